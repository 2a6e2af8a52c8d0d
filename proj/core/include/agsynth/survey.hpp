#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agsynth/metrics.hpp"

namespace agsynth {

struct ExperimentConfig;

/// One image shown to raters. `source` and `image_path` stay on the server.
struct PoolItem {
  std::string item_id;
  std::filesystem::path image_path;
  std::string category;
  Method source = Method::kGroundTruth;

  friend bool operator==(const PoolItem&, const PoolItem&) = default;
};

class SurveyPool {
 public:
  SurveyPool() = default;
  /// Throws InvalidConfig on an empty or duplicate item id, empty category,
  /// or empty path.
  explicit SurveyPool(std::vector<PoolItem> items);

  const std::vector<PoolItem>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const PoolItem* find(std::string_view item_id) const;
  /// Distinct category names, sorted.
  std::vector<std::string> categories() const;

  /// Manifest format:
  ///   {"items": [{"item_id", "image_path", "category", "source"}, ...]}
  /// Relative image paths resolve against the manifest's directory.
  /// Throws IoError or InvalidConfig.
  static SurveyPool load(const std::filesystem::path& manifest);
  /// Writes paths relative to the manifest's directory where possible.
  void save(const std::filesystem::path& manifest) const;

  friend bool operator==(const SurveyPool&, const SurveyPool&) = default;

 private:
  std::vector<PoolItem> items_;
};

/// Ground truth for every category plus every generated image found under
/// the dataset directory. Item ids are opaque 16-hex-digit hashes.
SurveyPool build_pool(const ExperimentConfig& cfg);

struct Session {
  std::string session_id;
  std::string rater_label;
  std::uint64_t seed = 0;
  std::vector<std::string> order;  // permutation of the pool's item ids

  friend bool operator==(const Session&, const Session&) = default;
};

/// Fisher-Yates shuffle of the pool driven by `seed`. Throws EmptyPool.
Session create_session(const SurveyPool& pool, std::string rater_label, std::uint64_t seed);

struct RatingRecord {
  std::string session_id;
  std::string item_id;
  int score = 0;
  std::string submitted_at;  // UTC, YYYY-MM-DDTHH:MM:SSZ

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

nlohmann::json to_json(const RatingRecord& r);
RatingRecord rating_from_json(const nlohmann::json& j);

/// Append-only line-delimited JSON file, one RatingRecord per line.
/// Appends are serialized by a mutex within the process and an exclusive
/// advisory lock across processes.
class RatingStore {
 public:
  explicit RatingStore(std::filesystem::path path) : path_(std::move(path)) {}

  const std::filesystem::path& path() const noexcept { return path_; }
  void append(const RatingRecord& r);
  /// Throws IoError when the file is missing, DecodeError on a bad line.
  std::vector<RatingRecord> load() const;
  /// As load(), but a missing file yields no records.
  std::vector<RatingRecord> load_or_empty() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
};

struct RatingCell {
  std::string category;
  Method source = Method::kGroundTruth;
  std::size_t n = 0;
  std::optional<double> mean;  // absent when n == 0

  friend bool operator==(const RatingCell&, const RatingCell&) = default;
};

struct RatingTable {
  /// Categories sorted; within each, ground_truth, text_to_image,
  /// image_variation.
  std::vector<RatingCell> cells;
  std::size_t unmatched = 0;  // ratings whose item is not in the pool

  const RatingCell* find(std::string_view category, Method source) const;

  friend bool operator==(const RatingTable&, const RatingTable&) = default;
};

/// Independent of record order.
RatingTable aggregate_ratings(const std::vector<RatingRecord>& records, const SurveyPool& pool);

nlohmann::json to_json(const RatingTable& t);
/// Header category,source,n,mean; absent means are left empty.
std::string rating_table_csv(const RatingTable& t);

/// Session bookkeeping over a fixed pool. Sessions are persisted to
/// <store_dir>/sessions.ndjson and ratings to <store_dir>/ratings.ndjson;
/// both are reloaded on construction, and a session's position is derived
/// from the ratings it has submitted.
class SurveyService {
 public:
  using Clock = std::function<std::chrono::system_clock::time_point()>;

  /// Throws EmptyPool.
  SurveyService(SurveyPool pool, std::filesystem::path store_dir, std::uint64_t seed,
                Clock clock = {});

  const SurveyPool& pool() const noexcept { return pool_; }
  const RatingStore& store() const noexcept { return ratings_; }

  Session create_session(const std::string& rater_label);

  /// {"done": bool, "position": 1-based, "total": n,
  ///  "item": {"item_id", "category", "image_url"}}; "item" is null when
  /// done. Never carries a source label or a file path. Throws
  /// UnknownSession.
  nlohmann::json next_item(const std::string& session_id) const;

  /// Validation order: UnknownSession, UnknownItem, ScoreOutOfRange,
  /// DuplicateRating. Nothing is written when any check fails.
  RatingRecord submit_rating(const std::string& session_id, const std::string& item_id,
                             int score);

  RatingTable results() const;

  struct ImageBytes {
    std::vector<std::uint8_t> bytes;
    std::string content_type;
  };
  /// Throws UnknownItem, or IoError for an unreadable file.
  ImageBytes image(const std::string& item_id) const;

  bool has_session(const std::string& session_id) const;

 private:
  struct State {
    Session session;
    std::set<std::string> rated;
  };

  SurveyPool pool_;
  std::filesystem::path sessions_path_;
  RatingStore ratings_;
  std::uint64_t seed_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, State> sessions_;
  std::uint64_t created_ = 0;
};

}  // namespace agsynth
