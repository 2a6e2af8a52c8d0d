#include "agsynth/survey.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "agsynth/error.hpp"
#include "agsynth/experiment.hpp"
#include "agsynth/hash.hpp"
#include "agsynth/image_io.hpp"
#include "dataset_layout.hpp"
#include "json_fields.hpp"

namespace agsynth {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::array<Method, 3> kSources{Method::kGroundTruth, Method::kTextToImage,
                                         Method::kImageVariation};

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Unbiased draw from [0, bound) by rejection on the raw generator output.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    std::uint64_t v = rng();
    if (v < limit) return v % bound;
  }
}

void append_line(const fs::path& path, const std::string& line) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0)
    throw Error(ErrorCode::kIo, "cannot open " + path.string() + ": " + std::strerror(errno));
  if (::flock(fd, LOCK_EX) != 0) {
    ::close(fd);
    throw Error(ErrorCode::kIo, "cannot lock " + path.string());
  }
  std::string data = line + "\n";
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      ::close(fd);
      throw Error(ErrorCode::kIo, "write failed: " + path.string());
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  ::close(fd);
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string item_id_for(const std::string& category, Method source, const fs::path& path) {
  Sha256 h;
  h.update("agsynth.item\n").update(category).update("\n").update(to_string(source));
  h.update("\n").update(path.generic_string());
  return h.hex_digest().substr(0, 16);
}

}  // namespace

SurveyPool::SurveyPool(std::vector<PoolItem> items) : items_(std::move(items)) {
  std::set<std::string> ids;
  for (const PoolItem& it : items_) {
    if (it.item_id.empty()) throw Error(ErrorCode::kInvalidConfig, "pool item with empty id");
    if (it.category.empty())
      throw Error(ErrorCode::kInvalidConfig, "pool item '" + it.item_id + "' has no category");
    if (it.image_path.empty())
      throw Error(ErrorCode::kInvalidConfig, "pool item '" + it.item_id + "' has no image path");
    if (!ids.insert(it.item_id).second)
      throw Error(ErrorCode::kInvalidConfig, "duplicate pool item id '" + it.item_id + "'");
  }
}

const PoolItem* SurveyPool::find(std::string_view item_id) const {
  for (const PoolItem& it : items_)
    if (it.item_id == item_id) return &it;
  return nullptr;
}

std::vector<std::string> SurveyPool::categories() const {
  std::set<std::string> names;
  for (const PoolItem& it : items_) names.insert(it.category);
  return {names.begin(), names.end()};
}

SurveyPool SurveyPool::load(const fs::path& manifest) {
  std::vector<std::uint8_t> bytes = read_file(manifest);
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, "pool manifest " + manifest.string() +
                                               " is not valid JSON: " + e.what());
  }
  detail::FieldReader top(j, "pool");
  const json& arr = top.raw("items");
  top.finish();
  if (!arr.is_array()) throw Error(ErrorCode::kInvalidConfig, "pool.items must be an array");

  const fs::path base = manifest.parent_path();
  std::vector<PoolItem> items;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    detail::FieldReader r(arr[i], "pool.items[" + std::to_string(i) + "]");
    PoolItem it;
    std::string path, source;
    r.require("item_id", it.item_id);
    r.require("image_path", path);
    r.require("category", it.category);
    r.require("source", source);
    r.finish();
    auto m = method_from_string(source);
    if (!m)
      throw Error(ErrorCode::kInvalidConfig, "unknown source '" + source + "' in " + r.path("source"));
    it.source = *m;
    it.image_path = fs::path(path).is_absolute() ? fs::path(path) : base / path;
    items.push_back(std::move(it));
  }
  return SurveyPool(std::move(items));
}

void SurveyPool::save(const fs::path& manifest) const {
  const fs::path base = fs::absolute(manifest).parent_path();
  json arr = json::array();
  for (const PoolItem& it : items_) {
    fs::path rel = fs::absolute(it.image_path).lexically_normal().lexically_relative(base);
    std::string path = rel.empty() ? fs::absolute(it.image_path).generic_string()
                                   : rel.generic_string();
    arr.push_back({{"item_id", it.item_id},
                   {"image_path", path},
                   {"category", it.category},
                   {"source", std::string(to_string(it.source))}});
  }
  write_file_atomic(manifest, json{{"items", arr}}.dump(2) + "\n");
}

SurveyPool build_pool(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<PoolItem> items;
  for (const CategorySpec& c : cfg.categories) {
    std::error_code ec;
    if (!fs::is_regular_file(c.ground_truth, ec))
      throw Error(ErrorCode::kMissingGroundTruth,
                  "ground truth for '" + c.name + "' not found: " + c.ground_truth.string());
    items.push_back({item_id_for(c.name, Method::kGroundTruth, c.ground_truth), c.ground_truth,
                     c.name, Method::kGroundTruth});
    for (Method m : {Method::kTextToImage, Method::kImageVariation}) {
      fs::path dir = cfg.dataset_dir / c.name / std::string(to_string(m));
      for (auto& [index, path] : detail::list_indexed_images(dir))
        items.push_back({item_id_for(c.name, m, path), path, c.name, m});
    }
  }
  return SurveyPool(std::move(items));
}

Session create_session(const SurveyPool& pool, std::string rater_label, std::uint64_t seed) {
  if (pool.empty()) throw Error(ErrorCode::kEmptyPool, "survey pool has no items");
  Session s;
  s.rater_label = std::move(rater_label);
  s.seed = seed;
  s.order.reserve(pool.size());
  for (const PoolItem& it : pool.items()) s.order.push_back(it.item_id);
  std::mt19937_64 rng(seed);
  for (std::size_t i = s.order.size() - 1; i > 0; --i)
    std::swap(s.order[i], s.order[draw_below(rng, i + 1)]);

  Sha256 h;
  h.update("agsynth.session\n").update(std::to_string(seed)).update("\n").update(s.rater_label);
  for (const std::string& id : s.order) h.update("\n").update(id);
  s.session_id = h.hex_digest().substr(0, 32);
  return s;
}

nlohmann::json to_json(const RatingRecord& r) {
  return {{"session_id", r.session_id},
          {"item_id", r.item_id},
          {"score", r.score},
          {"submitted_at", r.submitted_at}};
}

RatingRecord rating_from_json(const nlohmann::json& j) {
  try {
    detail::FieldReader f(j, "rating");
    RatingRecord r;
    f.require("session_id", r.session_id);
    f.require("item_id", r.item_id);
    if (f.has("score") && !j["score"].is_number_integer())
      throw Error(ErrorCode::kDecode, "rating.score must be an integer");
    f.require("score", r.score);
    f.require("submitted_at", r.submitted_at);
    f.finish();
    return r;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDecode) throw;
    throw Error(ErrorCode::kDecode, e.what());
  }
}

void RatingStore::append(const RatingRecord& r) {
  std::lock_guard lock(mu_);
  append_line(path_, to_json(r).dump());
}

std::vector<RatingRecord> RatingStore::load() const {
  std::lock_guard lock(mu_);
  std::error_code ec;
  if (!fs::is_regular_file(path_, ec))
    throw Error(ErrorCode::kIo, "ratings store not found: " + path_.string());
  std::vector<RatingRecord> out;
  auto lines = read_lines(path_);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      out.push_back(rating_from_json(json::parse(lines[i])));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kDecode, path_.string() + " line " + std::to_string(i + 1) + ": " +
                                          e.what());
    }
  }
  return out;
}

std::vector<RatingRecord> RatingStore::load_or_empty() const {
  std::error_code ec;
  if (!fs::exists(path_, ec)) return {};
  return load();
}

const RatingCell* RatingTable::find(std::string_view category, Method source) const {
  for (const RatingCell& c : cells)
    if (c.category == category && c.source == source) return &c;
  return nullptr;
}

RatingTable aggregate_ratings(const std::vector<RatingRecord>& records, const SurveyPool& pool) {
  // Integer sums keep the means exact and order-independent.
  std::map<std::pair<std::string, Method>, std::pair<std::size_t, long long>> acc;
  RatingTable t;
  for (const RatingRecord& r : records) {
    const PoolItem* it = pool.find(r.item_id);
    if (!it) {
      ++t.unmatched;
      continue;
    }
    auto& [n, sum] = acc[{it->category, it->source}];
    ++n;
    sum += r.score;
  }
  for (const std::string& c : pool.categories()) {
    for (Method s : kSources) {
      RatingCell cell{c, s, 0, std::nullopt};
      if (auto found = acc.find({c, s}); found != acc.end()) {
        cell.n = found->second.first;
        cell.mean = static_cast<double>(found->second.second) / static_cast<double>(cell.n);
      }
      t.cells.push_back(std::move(cell));
    }
  }
  return t;
}

nlohmann::json to_json(const RatingTable& t) {
  json cells = json::array();
  for (const RatingCell& c : t.cells)
    cells.push_back({{"category", c.category},
                     {"source", std::string(to_string(c.source))},
                     {"n", c.n},
                     {"mean", c.mean ? json(*c.mean) : json(nullptr)}});
  return {{"cells", cells}, {"unmatched", t.unmatched}};
}

std::string rating_table_csv(const RatingTable& t) {
  std::string out = "category,source,n,mean\n";
  for (const RatingCell& c : t.cells) {
    out += c.category + "," + std::string(to_string(c.source)) + "," + std::to_string(c.n) + ",";
    if (c.mean) out += format_real(*c.mean);
    out += "\n";
  }
  return out;
}

SurveyService::SurveyService(SurveyPool pool, fs::path store_dir, std::uint64_t seed, Clock clock)
    : pool_(std::move(pool)),
      sessions_path_(store_dir / "sessions.ndjson"),
      ratings_(store_dir / "ratings.ndjson"),
      seed_(seed),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::system_clock::now(); })) {
  if (pool_.empty()) throw Error(ErrorCode::kEmptyPool, "survey pool has no items");

  std::error_code ec;
  if (fs::exists(sessions_path_, ec)) {
    auto lines = read_lines(sessions_path_);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      try {
        json j = json::parse(lines[i]);
        Session s = agsynth::create_session(pool_, j.at("rater_label").get<std::string>(),
                                            j.at("seed").get<std::uint64_t>());
        s.session_id = j.at("session_id").get<std::string>();
        std::string id = s.session_id;
        sessions_[id] = State{std::move(s), {}};
        ++created_;
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kDecode, sessions_path_.string() + " line " +
                                            std::to_string(i + 1) + ": " + e.what());
      }
    }
  }
  for (const RatingRecord& r : ratings_.load_or_empty())
    if (auto it = sessions_.find(r.session_id); it != sessions_.end())
      it->second.rated.insert(r.item_id);
}

Session SurveyService::create_session(const std::string& rater_label) {
  std::lock_guard lock(mu_);
  Session s;
  do {
    s = agsynth::create_session(pool_, rater_label, mix64(seed_ ^ mix64(created_++)));
  } while (sessions_.count(s.session_id));
  append_line(sessions_path_, json{{"session_id", s.session_id},
                                   {"rater_label", s.rater_label},
                                   {"seed", s.seed}}
                                  .dump());
  sessions_.emplace(s.session_id, State{s, {}});
  return s;
}

bool SurveyService::has_session(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return sessions_.count(session_id) > 0;
}

nlohmann::json SurveyService::next_item(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end())
    throw Error(ErrorCode::kUnknownSession, "unknown session '" + session_id + "'");
  const State& st = it->second;
  const std::size_t total = st.session.order.size();
  for (const std::string& id : st.session.order) {
    if (st.rated.count(id)) continue;
    const PoolItem* item = pool_.find(id);
    return {{"done", false},
            {"position", st.rated.size() + 1},
            {"total", total},
            {"item", {{"item_id", id}, {"category", item->category},
                      {"image_url", "/api/images/" + id}}}};
  }
  return {{"done", true}, {"position", total}, {"total", total}, {"item", nullptr}};
}

RatingRecord SurveyService::submit_rating(const std::string& session_id,
                                          const std::string& item_id, int score) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end())
    throw Error(ErrorCode::kUnknownSession, "unknown session '" + session_id + "'");
  if (!pool_.find(item_id))
    throw Error(ErrorCode::kUnknownItem, "unknown item '" + item_id + "'");
  if (score < 1 || score > 5)
    throw Error(ErrorCode::kScoreOutOfRange,
                "score must be an integer from 1 to 5, got " + std::to_string(score));
  if (it->second.rated.count(item_id))
    throw Error(ErrorCode::kDuplicateRating, "item '" + item_id + "' already rated in this session");

  RatingRecord r{session_id, item_id, score, utc_timestamp(clock_())};
  ratings_.append(r);
  it->second.rated.insert(item_id);
  return r;
}

RatingTable SurveyService::results() const {
  return aggregate_ratings(ratings_.load_or_empty(), pool_);
}

SurveyService::ImageBytes SurveyService::image(const std::string& item_id) const {
  const PoolItem* item = pool_.find(item_id);
  if (!item) throw Error(ErrorCode::kUnknownItem, "unknown item '" + item_id + "'");
  ImageBytes out;
  out.bytes = read_file(item->image_path);
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G'};
  if (out.bytes.size() >= 4 && std::equal(kPng, kPng + 4, out.bytes.begin()))
    out.content_type = "image/png";
  else if (out.bytes.size() >= 3 && out.bytes[0] == 0xFF && out.bytes[1] == 0xD8 &&
           out.bytes[2] == 0xFF)
    out.content_type = "image/jpeg";
  else
    throw Error(ErrorCode::kDecode, "item '" + item_id + "' is neither PNG nor JPEG");
  return out;
}

}  // namespace agsynth
