#include "agsynth/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <system_error>
#include <tuple>

#include "agsynth/error.hpp"
#include "agsynth/image_io.hpp"

namespace agsynth {
namespace {

using nlohmann::json;

constexpr std::array<Method, 2> kGeneratedMethods{Method::kTextToImage,
                                                  Method::kImageVariation};

double metric_value(const MetricRecord& r, Metric m) {
  switch (m) {
    case Metric::kMse: return r.mse;
    case Metric::kPsnr: return r.psnr;
    case Metric::kFsim: return r.fsim;
  }
  return 0.0;
}

std::optional<Metric> metric_from_string(std::string_view s) {
  for (Metric m : kAllMetrics)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

double parse_real(std::string_view s, std::size_t line) {
  if (s == "inf") return kInfinitePsnr;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::kDecode,
                "records line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

json stats_to_json(const OrderStats& s) {
  return {{"n", s.n},         {"mean", s.mean}, {"min", s.min}, {"q1", s.q1},
          {"median", s.median}, {"q3", s.q3},     {"max", s.max}};
}

OrderStats stats_from_json(const json& j) {
  OrderStats s;
  s.n = j.at("n").get<std::size_t>();
  s.mean = j.at("mean").get<double>();
  s.min = j.at("min").get<double>();
  s.q1 = j.at("q1").get<double>();
  s.median = j.at("median").get<double>();
  s.q3 = j.at("q3").get<double>();
  s.max = j.at("max").get<double>();
  return s;
}

}  // namespace

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::kMse: return "mse";
    case Metric::kPsnr: return "psnr";
    case Metric::kFsim: return "fsim";
  }
  return "unknown";
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

const SummaryRow* SummaryTable::find(std::string_view category, Method method,
                                     Metric metric) const {
  for (const SummaryRow& r : rows)
    if (r.category == category && r.method == method && r.metric == metric) return &r;
  return nullptr;
}

std::array<std::optional<double>, 3> compute_percent_changes(
    const std::vector<SummaryRow>& rows) {
  std::array<std::optional<double>, 3> out{};
  for (Metric m : kAllMetrics) {
    std::array<double, 2> sum{};
    std::array<int, 2> count{};
    for (const SummaryRow& r : rows) {
      if (r.metric != m || !r.stats) continue;
      for (std::size_t k = 0; k < kGeneratedMethods.size(); ++k)
        if (r.method == kGeneratedMethods[k]) {
          sum[k] += r.stats->mean;
          ++count[k];
        }
    }
    if (count[0] == 0 || count[1] == 0) continue;
    const double text = sum[0] / count[0];
    const double variation = sum[1] / count[1];
    if (text == 0.0) continue;
    out[static_cast<std::size_t>(m)] = 100.0 * (variation - text) / text;
  }
  return out;
}

SummaryTable aggregate_metrics(const std::vector<MetricRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no metric records to aggregate");

  std::map<std::tuple<std::string, Method, Metric>, std::vector<double>> cells;
  std::map<std::tuple<std::string, Method, Metric>, std::size_t> excluded;
  for (const MetricRecord& r : records) {
    for (Metric m : kAllMetrics) {
      auto key = std::make_tuple(r.category, r.method, m);
      double v = metric_value(r, m);
      auto& cell = cells[key];
      if (std::isinf(v))
        ++excluded[key];
      else
        cell.push_back(v);
    }
  }

  SummaryTable table;
  for (auto& [key, values] : cells) {
    SummaryRow row;
    std::tie(row.category, row.method, row.metric) = key;
    if (auto it = excluded.find(key); it != excluded.end()) row.excluded_infinite = it->second;
    if (!values.empty()) row.stats = describe(std::move(values));
    table.rows.push_back(std::move(row));
  }
  table.percent_changes = compute_percent_changes(table.rows);
  return table;
}

nlohmann::json to_json(const SummaryTable& table) {
  json rows = json::array();
  for (const SummaryRow& r : table.rows) {
    rows.push_back({{"category", r.category},
                    {"method", std::string(to_string(r.method))},
                    {"metric", std::string(to_string(r.metric))},
                    {"excluded_infinite", r.excluded_infinite},
                    {"stats", r.stats ? stats_to_json(*r.stats) : json(nullptr)}});
  }
  json pc = json::object();
  for (Metric m : kAllMetrics) {
    auto v = table.percent_change(m);
    pc[std::string(to_string(m))] = v ? json(*v) : json(nullptr);
  }
  return {{"rows", rows}, {"percent_changes", pc}};
}

SummaryTable summary_from_json(const nlohmann::json& j) {
  try {
    SummaryTable t;
    for (const json& r : j.at("rows")) {
      SummaryRow row;
      row.category = r.at("category").get<std::string>();
      auto method = method_from_string(r.at("method").get<std::string>());
      auto metric = metric_from_string(r.at("metric").get<std::string>());
      if (!method || !metric) throw Error(ErrorCode::kDecode, "summary row with unknown label");
      row.method = *method;
      row.metric = *metric;
      row.excluded_infinite = r.at("excluded_infinite").get<std::size_t>();
      if (!r.at("stats").is_null()) row.stats = stats_from_json(r.at("stats"));
      t.rows.push_back(std::move(row));
    }
    const json& pc = j.at("percent_changes");
    for (Metric m : kAllMetrics) {
      const json& v = pc.at(std::string(to_string(m)));
      if (!v.is_null()) t.percent_changes[static_cast<std::size_t>(m)] = v.get<double>();
    }
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kDecode, std::string("malformed summary: ") + e.what());
  }
}

std::string records_to_csv(const std::vector<MetricRecord>& records) {
  std::string out = "category,method,image_id,mse,psnr,fsim\n";
  for (const MetricRecord& r : records) {
    out += r.category;
    out += ',';
    out += to_string(r.method);
    out += ',';
    out += r.image_id;
    out += ',';
    out += format_real(r.mse);
    out += ',';
    out += format_real(r.psnr);
    out += ',';
    out += format_real(r.fsim);
    out += '\n';
  }
  return out;
}

std::vector<MetricRecord> records_from_csv(std::string_view csv) {
  std::vector<MetricRecord> out;
  std::size_t line_no = 0;
  while (!csv.empty()) {
    std::size_t nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != "category,method,image_id,mse,psnr,fsim")
        throw Error(ErrorCode::kDecode, "records file has an unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i)
      if (i == line.size() || line[i] == ',') {
        f.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    if (f.size() != 6)
      throw Error(ErrorCode::kDecode, "records line " + std::to_string(line_no) +
                                          ": expected 6 fields, got " + std::to_string(f.size()));
    auto method = method_from_string(f[1]);
    if (!method)
      throw Error(ErrorCode::kDecode, "records line " + std::to_string(line_no) +
                                          ": unknown method '" + std::string(f[1]) + "'");
    out.push_back({std::string(f[0]), *method, std::string(f[2]), parse_real(f[3], line_no),
                   parse_real(f[4], line_no), parse_real(f[5], line_no)});
  }
  return out;
}

std::string heatmap_csv(const SummaryTable& table) {
  std::vector<std::string> categories;
  for (const SummaryRow& r : table.rows)
    if (std::find(categories.begin(), categories.end(), r.category) == categories.end())
      categories.push_back(r.category);

  std::string out = "category";
  for (Metric m : kAllMetrics)
    for (Method method : kGeneratedMethods) {
      out += ',';
      out += to_string(m);
      out += ':';
      out += to_string(method);
    }
  out += '\n';
  for (const std::string& c : categories) {
    out += c;
    for (Metric m : kAllMetrics)
      for (Method method : kGeneratedMethods) {
        out += ',';
        const SummaryRow* row = table.find(c, method, m);
        if (row && row->stats) out += format_real(row->stats->mean);
      }
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> render_report(const SummaryTable& table,
                                                 const std::vector<MetricRecord>& records,
                                                 const std::filesystem::path& dir,
                                                 ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    auto path = dir / name;
    write_file_atomic(path, body);
    written.push_back(path);
  };
  if (format == ReportFormat::kCsv) emit("records.csv", records_to_csv(records));
  emit("summary.json", to_json(table).dump(2) + "\n");
  if (format == ReportFormat::kCsv) emit("heatmap.csv", heatmap_csv(table));
  return written;
}

}  // namespace agsynth
