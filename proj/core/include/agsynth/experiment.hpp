#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agsynth/fsim_config.hpp"
#include "agsynth/generation.hpp"
#include "agsynth/metrics.hpp"
#include "agsynth/remote_backend.hpp"
#include "agsynth/report.hpp"

namespace agsynth {

struct CategorySpec {
  std::string name;
  std::filesystem::path ground_truth;
  std::string prompt;

  friend bool operator==(const CategorySpec&, const CategorySpec&) = default;
};

enum class BackendKind { kStub, kRemote };

struct ExperimentConfig {
  std::vector<CategorySpec> categories;
  std::vector<Method> methods{Method::kTextToImage, Method::kImageVariation};
  int images_per_method = 4;
  int image_size = 1024;
  FsimConfig fsim;
  BackendKind backend_kind = BackendKind::kStub;
  BackendConfig backend;
  std::filesystem::path output_dir = "results";
  std::filesystem::path dataset_dir = "dataset";
  std::filesystem::path cache_dir = "cache";  // empty disables caching
  std::uint64_t seed = 42;
  int workers = 0;          // scoring threads; 0 = one per core
  bool self_check = false;  // also score each ground truth against itself

  /// Throws InvalidConfig. Does not touch the filesystem.
  void validate() const;
  const CategorySpec* find_category(const std::string& name) const;
};

/// StubBackend(seed) or RemoteBackend(backend).
std::unique_ptr<ImageBackend> make_backend(const ExperimentConfig& cfg);

/// Restricts generate_dataset to a subset; empty vectors mean "all".
struct DatasetFilter {
  std::vector<Method> methods;
  std::vector<std::string> categories;
};

/// Generates images into <dataset_dir>/<category>/<method>/<index>.png
/// through the cache under cache_dir. Ground truth is required only for
/// image-variation jobs. Returns the paths written, in category, method,
/// index order.
std::vector<std::filesystem::path> generate_dataset(const ExperimentConfig& cfg,
                                                    ImageBackend& backend,
                                                    const DatasetFilter& filter = {},
                                                    const std::atomic<bool>* cancel = nullptr);

struct ExperimentReport {
  /// Ordered by category (config order), method, then image index.
  std::vector<MetricRecord> records;
  std::optional<SummaryTable> table;  // empty when no record was produced
  std::vector<std::filesystem::path> files;
  bool complete = true;
};

/// Generates, scores, and reports. Every ground-truth file is checked
/// before any generation (MissingGroundTruth). On a backend failure or
/// cancellation the records scored so far are written, run.json is marked
/// incomplete, and the error is rethrown.
///
/// Files in output_dir: records.csv, summary.json, heatmap.csv, run.json.
/// Nothing time-dependent is written, so reruns over a warm cache are
/// byte-identical.
ExperimentReport run_experiment(const ExperimentConfig& cfg, ImageBackend& backend,
                                const std::atomic<bool>* cancel = nullptr);

/// Scores images already present under dataset_dir and writes the same
/// report files. Throws EmptyInput when no generated image is found.
ExperimentReport evaluate_dataset(const ExperimentConfig& cfg,
                                  const std::atomic<bool>* cancel = nullptr);

/// "<category>/<method>/<index>".
std::string image_id(const std::string& category, Method method, int index);

}  // namespace agsynth
