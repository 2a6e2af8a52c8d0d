#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agsynth/metrics.hpp"
#include "agsynth/stats.hpp"

namespace agsynth {

enum class Metric { kMse, kPsnr, kFsim };
inline constexpr std::array<Metric, 3> kAllMetrics{Metric::kMse, Metric::kPsnr, Metric::kFsim};

std::string_view to_string(Metric m) noexcept;

/// Order statistics of one (category, method, metric) cell. Infinite PSNR
/// values are left out of `stats` and counted in `excluded_infinite`;
/// `stats` is empty when nothing finite remains.
struct SummaryRow {
  std::string category;
  Method method = Method::kTextToImage;
  Metric metric = Metric::kMse;
  std::optional<OrderStats> stats;
  std::size_t excluded_infinite = 0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct SummaryTable {
  /// Sorted by category name, then method, then metric.
  std::vector<SummaryRow> rows;
  /// Indexed by Metric: 100 (mean_variation - mean_text) / mean_text where
  /// each side is the average of its per-category cell means. Empty when
  /// either method has no finite data or the text mean is zero.
  std::array<std::optional<double>, 3> percent_changes{};

  const SummaryRow* find(std::string_view category, Method method, Metric metric) const;
  std::optional<double> percent_change(Metric m) const {
    return percent_changes[static_cast<std::size_t>(m)];
  }

  friend bool operator==(const SummaryTable&, const SummaryTable&) = default;
};

/// Throws EmptyInput when `records` is empty. Independent of record order.
SummaryTable aggregate_metrics(const std::vector<MetricRecord>& records);

/// Recomputes percent changes from the rows' means.
std::array<std::optional<double>, 3> compute_percent_changes(const std::vector<SummaryRow>& rows);

nlohmann::json to_json(const SummaryTable& table);
SummaryTable summary_from_json(const nlohmann::json& j);

/// Header: category,method,image_id,mse,psnr,fsim. Reals use the shortest
/// round-trip decimal form; infinite PSNR is written as "inf".
std::string records_to_csv(const std::vector<MetricRecord>& records);
std::vector<MetricRecord> records_from_csv(std::string_view csv);

/// One row per category, one column per (metric, method) cell mean, e.g.
/// "psnr:image_variation". Cells without finite data are left empty.
std::string heatmap_csv(const SummaryTable& table);

enum class ReportFormat { kCsv, kJson };

/// Writes records.csv, summary.json, and heatmap.csv into `dir`, or only
/// summary.json for kJson. Returns the paths written. Throws IoError.
std::vector<std::filesystem::path> render_report(const SummaryTable& table,
                                                 const std::vector<MetricRecord>& records,
                                                 const std::filesystem::path& dir,
                                                 ReportFormat format = ReportFormat::kCsv);

/// Shortest decimal string that parses back to the same double.
std::string format_real(double v);

}  // namespace agsynth
