#include <gtest/gtest.h>

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "agsynth/error.hpp"
#include "agsynth/survey.hpp"
#include "agsynth/survey_server.hpp"
#include "support/expect_error.hpp"
#include "support/survey_fixture.hpp"
#include "support/temp_dir.hpp"

namespace agsynth {
namespace {

namespace fs = std::filesystem;
using fixtures::code_of;

const fs::path kFixture = fs::path(AGSYNTH_TEST_DATA_DIR) / "survey_fixture";

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

SurveyService::Clock fixed_clock() {
  return [] { return std::chrono::system_clock::time_point(std::chrono::seconds(1767225600)); };
}

TEST(SurveyPool, RejectsBadItems) {
  EXPECT_EQ(code_of([] { SurveyPool({{"", "a.png", "c", Method::kGroundTruth}}); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] {
              SurveyPool({{"x", "a.png", "c", Method::kGroundTruth},
                          {"x", "b.png", "c", Method::kTextToImage}});
            }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] { SurveyPool({{"x", "a.png", "", Method::kGroundTruth}}); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] { SurveyPool({{"x", "", "c", Method::kGroundTruth}}); }),
            ErrorCode::kInvalidConfig);
}

TEST(SurveyPool, ManifestRoundTripUsesRelativePaths) {
  auto pool = SurveyPool::load(kFixture / "pool.json");
  ASSERT_EQ(pool.size(), 3u);
  EXPECT_EQ(pool.find("0b7e4c1d9a2f3e58")->image_path,
            kFixture / "images" / "apples_text_to_image_0.png");
  EXPECT_EQ(pool.categories(), std::vector<std::string>{"apples"});

  fixtures::TempDir dir;
  std::vector<PoolItem> items = pool.items();
  for (auto& it : items) it.image_path = dir.path() / "img" / it.image_path.filename();
  SurveyPool moved(items);
  moved.save(dir.path() / "pool.json");
  auto text = read_file(dir.path() / "pool.json");
  EXPECT_EQ(std::string(text.begin(), text.end()).find(dir.path().string()), std::string::npos);
  EXPECT_EQ(SurveyPool::load(dir.path() / "pool.json"), moved);
}

TEST(SurveyPool, ManifestErrors) {
  fixtures::TempDir dir;
  EXPECT_EQ(code_of([&] { SurveyPool::load(dir.path() / "missing.json"); }), ErrorCode::kIo);
  write_file_atomic(dir.path() / "bad.json", std::string_view(R"({"items":[{"item_id":"a"}]})"));
  EXPECT_EQ(code_of([&] { SurveyPool::load(dir.path() / "bad.json"); }),
            ErrorCode::kInvalidConfig);
}

TEST(SurveyPool, BuildFromDatasetHasOpaqueStableIds) {
  fixtures::TempDir dir;
  auto pool = fixtures::make_survey_pool(dir.path());
  EXPECT_EQ(pool.size(), 24u);
  std::map<Method, int> by_source;
  for (const auto& it : pool.items()) {
    ++by_source[it.source];
    ASSERT_EQ(it.item_id.size(), 16u);
    EXPECT_EQ(it.item_id.find_first_not_of("0123456789abcdef"), std::string::npos);
  }
  EXPECT_EQ(by_source[Method::kGroundTruth], 8);
  EXPECT_EQ(by_source[Method::kTextToImage], 8);
  EXPECT_EQ(by_source[Method::kImageVariation], 8);
  EXPECT_EQ(build_pool(fixtures::survey_config(dir.path())), pool);
}

TEST(Session, IsSeededPermutation) {
  fixtures::TempDir dir;
  auto pool = fixtures::make_survey_pool(dir.path());
  std::vector<std::string> ids;
  for (const auto& it : pool.items()) ids.push_back(it.item_id);

  auto s1 = create_session(pool, "r1", 1);
  auto s2 = create_session(pool, "r1", 2);
  ASSERT_EQ(s1.order.size(), 24u);
  EXPECT_TRUE(std::is_permutation(s1.order.begin(), s1.order.end(), ids.begin(), ids.end()));
  EXPECT_TRUE(std::is_permutation(s2.order.begin(), s2.order.end(), ids.begin(), ids.end()));
  EXPECT_NE(s1.order, s2.order);
  EXPECT_NE(s1.session_id, s2.session_id);
  EXPECT_EQ(create_session(pool, "r1", 1), s1);
  EXPECT_EQ(code_of([] { create_session(SurveyPool{}, "r", 1); }), ErrorCode::kEmptyPool);
}

TEST(Session, ShufflesAreUnbiasedEnough) {
  // Each of 4 items should land first roughly a quarter of the time.
  SurveyPool pool({{"a", "a", "c", Method::kGroundTruth},
                   {"b", "b", "c", Method::kGroundTruth},
                   {"c", "c", "c", Method::kGroundTruth},
                   {"d", "d", "c", Method::kGroundTruth}});
  std::map<std::string, int> first;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) ++first[create_session(pool, "", seed).order[0]];
  for (const auto& [id, n] : first) {
    EXPECT_GT(n, 850) << id;
    EXPECT_LT(n, 1150) << id;
  }
}

TEST(RatingRecord, JsonIsStrict) {
  RatingRecord r{"s", "i", 3, "2026-01-01T00:00:00Z"};
  EXPECT_EQ(rating_from_json(to_json(r)), r);
  auto j = to_json(r);
  j["extra"] = 1;
  EXPECT_EQ(code_of([&] { rating_from_json(j); }), ErrorCode::kDecode);
  j = to_json(r);
  j["score"] = "3";
  EXPECT_EQ(code_of([&] { rating_from_json(j); }), ErrorCode::kDecode);
}

TEST(RatingStore, AppendLoadAndErrors) {
  fixtures::TempDir dir;
  RatingStore store(dir.path() / "ratings.ndjson");
  EXPECT_EQ(code_of([&] { store.load(); }), ErrorCode::kIo);
  EXPECT_TRUE(store.load_or_empty().empty());
  RatingRecord a{"s", "i1", 2, "2026-01-01T00:00:00Z"};
  RatingRecord b{"s", "i2", 5, "2026-01-01T00:00:01Z"};
  store.append(a);
  EXPECT_EQ(line_count(store.path()), 1u);
  store.append(b);
  EXPECT_EQ(line_count(store.path()), 2u);
  EXPECT_EQ(store.load(), (std::vector<RatingRecord>{a, b}));

  std::ofstream(store.path(), std::ios::app) << "{not json\n";
  std::string what;
  EXPECT_EQ(code_of([&] { store.load(); }, &what), ErrorCode::kDecode);
  EXPECT_NE(what.find("line 3"), std::string::npos) << what;
}

TEST(RatingStore, ConcurrentAppendsKeepWholeLines) {
  fixtures::TempDir dir;
  RatingStore store(dir.path() / "ratings.ndjson");
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i)
        store.append({"s" + std::to_string(t), "item" + std::to_string(i), 1 + i % 5,
                      "2026-01-01T00:00:00Z"});
    });
  for (auto& th : threads) th.join();
  EXPECT_EQ(store.load().size(), 200u);
}

TEST(Aggregate, TwoRatingFixture) {
  auto pool = SurveyPool::load(kFixture / "pool.json");
  auto ratings = RatingStore(kFixture / "ratings.ndjson").load();
  auto table = aggregate_ratings(ratings, pool);
  ASSERT_EQ(table.cells.size(), 3u);
  const auto* text = table.find("apples", Method::kTextToImage);
  ASSERT_NE(text, nullptr);
  EXPECT_EQ(text->n, 2u);
  EXPECT_EQ(text->mean, 4.5);
  const auto* gt = table.find("apples", Method::kGroundTruth);
  EXPECT_EQ(gt->n, 0u);
  EXPECT_FALSE(gt->mean);
  EXPECT_EQ(table.unmatched, 0u);
  EXPECT_EQ(rating_table_csv(table),
            "category,source,n,mean\napples,ground_truth,0,\napples,text_to_image,2,4.5\n"
            "apples,image_variation,0,\n");
  EXPECT_TRUE(to_json(table)["cells"][0]["mean"].is_null());
}

TEST(Aggregate, ShuffledStoreGivesIdenticalTable) {
  fixtures::TempDir dir;
  auto pool = fixtures::make_survey_pool(dir.path());
  std::mt19937_64 rng(3);
  std::vector<RatingRecord> ratings;
  for (int s = 0; s < 15; ++s)
    for (const auto& it : pool.items())
      ratings.push_back({"s" + std::to_string(s), it.item_id, static_cast<int>(1 + rng() % 5),
                         "2026-01-01T00:00:00Z"});
  ratings.push_back({"s0", "not-in-pool", 3, "2026-01-01T00:00:00Z"});
  const auto table = aggregate_ratings(ratings, pool);
  EXPECT_EQ(table.cells.size(), 24u);
  EXPECT_EQ(table.unmatched, 1u);
  for (const auto& c : table.cells) {
    EXPECT_EQ(c.n, 15u);
    EXPECT_GE(*c.mean, 1.0);
    EXPECT_LE(*c.mean, 5.0);
  }
  for (int i = 0; i < 20; ++i) {
    std::shuffle(ratings.begin(), ratings.end(), rng);
    ASSERT_EQ(aggregate_ratings(ratings, pool), table);
  }
}

TEST(Aggregate, SixBySourceCells) {
  std::vector<PoolItem> items;
  std::vector<RatingRecord> ratings;
  for (const char* cat : {"a", "b", "c", "d", "e", "f"})
    for (Method m : {Method::kGroundTruth, Method::kTextToImage, Method::kImageVariation}) {
      std::string id = std::string(cat) + std::string(to_string(m));
      items.push_back({id, id + ".png", cat, m});
      ratings.push_back({"s", id, 3, "2026-01-01T00:00:00Z"});
    }
  auto table = aggregate_ratings(ratings, SurveyPool(items));
  EXPECT_EQ(table.cells.size(), 18u);
  for (const auto& c : table.cells) EXPECT_EQ(c.mean, 3.0);
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override { pool_ = fixtures::make_survey_pool(dir_.path() / "data"); }
  SurveyService make() { return SurveyService(pool_, dir_.path() / "store", 42, fixed_clock()); }

  fixtures::TempDir dir_;
  SurveyPool pool_;
};

TEST_F(ServiceTest, WalksSessionToCompletion) {
  auto svc = make();
  Session s = svc.create_session("rater");
  for (int i = 0; i < 24; ++i) {
    auto next = svc.next_item(s.session_id);
    ASSERT_FALSE(next["done"].get<bool>());
    EXPECT_EQ(next["position"], i + 1);
    EXPECT_EQ(next["total"], 24);
    const std::string id = next["item"]["item_id"];
    EXPECT_EQ(id, s.order[i]);
    EXPECT_EQ(next["item"]["image_url"], "/api/images/" + id);
    EXPECT_EQ(next["item"].size(), 3u);
    auto r = svc.submit_rating(s.session_id, id, 1 + i % 5);
    EXPECT_EQ(r.submitted_at, "2026-01-01T00:00:00Z");
  }
  auto done = svc.next_item(s.session_id);
  EXPECT_TRUE(done["done"].get<bool>());
  EXPECT_TRUE(done["item"].is_null());
  EXPECT_EQ(line_count(dir_.path() / "store" / "ratings.ndjson"), 24u);
}

TEST_F(ServiceTest, SubmitValidationOrderAndNoPartialWrites) {
  auto svc = make();
  Session s = svc.create_session("rater");
  const std::string item = s.order[0];
  EXPECT_EQ(code_of([&] { svc.submit_rating("nope", "nope", 9); }), ErrorCode::kUnknownSession);
  EXPECT_EQ(code_of([&] { svc.submit_rating(s.session_id, "nope", 9); }), ErrorCode::kUnknownItem);
  EXPECT_EQ(code_of([&] { svc.submit_rating(s.session_id, item, 6); }),
            ErrorCode::kScoreOutOfRange);
  EXPECT_EQ(code_of([&] { svc.submit_rating(s.session_id, item, 0); }),
            ErrorCode::kScoreOutOfRange);
  const fs::path ratings = dir_.path() / "store" / "ratings.ndjson";
  EXPECT_EQ(line_count(ratings), 0u);
  svc.submit_rating(s.session_id, item, 5);
  EXPECT_EQ(line_count(ratings), 1u);
  EXPECT_EQ(code_of([&] { svc.submit_rating(s.session_id, item, 4); }),
            ErrorCode::kDuplicateRating);
  EXPECT_EQ(line_count(ratings), 1u);
  EXPECT_EQ(svc.store().load()[0].score, 5);
  EXPECT_EQ(code_of([&] { svc.next_item("nope"); }), ErrorCode::kUnknownSession);
}

TEST_F(ServiceTest, SessionsDifferPerRaterAndSurviveRestart) {
  std::string sid;
  RatingTable before;
  {
    auto svc = make();
    Session a = svc.create_session("a");
    Session b = svc.create_session("b");
    EXPECT_NE(a.order, b.order);
    sid = a.session_id;
    svc.submit_rating(sid, a.order[0], 4);
    svc.submit_rating(sid, a.order[1], 2);
    before = svc.results();
  }
  auto svc = make();
  EXPECT_TRUE(svc.has_session(sid));
  EXPECT_EQ(svc.results(), before);
  EXPECT_EQ(svc.next_item(sid)["position"], 3);
  Session c = svc.create_session("c");
  EXPECT_FALSE(c.session_id.empty());
  EXPECT_NE(c.session_id, sid);
}

TEST_F(ServiceTest, ImagesAreServedByIdOnly) {
  auto svc = make();
  const PoolItem& it = pool_.items()[0];
  auto img = svc.image(it.item_id);
  EXPECT_EQ(img.content_type, "image/png");
  EXPECT_EQ(img.bytes, read_file(it.image_path));
  EXPECT_EQ(code_of([&] { svc.image("missing"); }), ErrorCode::kUnknownItem);
  EXPECT_EQ(code_of([] { SurveyService(SurveyPool{}, "x", 1); }), ErrorCode::kEmptyPool);
}

// Runs a SurveyServer on an ephemeral port for the lifetime of the object.
class LiveServer {
 public:
  LiveServer(SurveyService& svc, SurveyServerOptions opts) : server_(svc, withport(opts)) {
    port_ = server_.bind();
    thread_ = std::thread([this] { server_.serve(); });
    server_.wait_until_ready();
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }
  int port() const { return port_; }

 private:
  static SurveyServerOptions withport(SurveyServerOptions o) {
    o.port = 0;
    return o;
  }
  SurveyServer server_;
  std::thread thread_;
  int port_ = 0;
};

// Every byte a rater's client receives passes through here.
class BlindingScanner {
 public:
  explicit BlindingScanner(const SurveyPool& pool, const fs::path& root) {
    needles_ = {"ground_truth", "text_to_image", "image_variation", "\"source\"",
                root.string(), "dataset", ".png"};
    for (const auto& it : pool.items()) {
      needles_.push_back(it.image_path.string());
      needles_.push_back(it.image_path.parent_path().string());
    }
  }
  void scan(const httplib::Result& res) {
    ASSERT_TRUE(res);
    ++responses;
    std::string blob = res->body;
    for (const auto& [k, v] : res->headers) blob += "\n" + k + ": " + v;
    for (const auto& n : needles_)
      if (blob.find(n) != std::string::npos) ++leaks, ADD_FAILURE() << "leaked '" << n << "'";
  }
  int responses = 0;
  int leaks = 0;

 private:
  std::vector<std::string> needles_;
};

TEST_F(ServiceTest, HttpSessionIsBlindedEndToEnd) {
  auto svc = make();
  LiveServer live(svc, {});
  auto cli = live.client();
  BlindingScanner scanner(pool_, dir_.path());

  auto created = cli.Post("/api/sessions", R"({"rater_label":"scholar-1"})", "application/json");
  scanner.scan(created);
  ASSERT_EQ(created->status, 201);
  auto session = nlohmann::json::parse(created->body);
  const std::string sid = session["session_id"];
  EXPECT_EQ(session["total"], 24);

  std::set<std::string> seen;
  for (int i = 0; i < 24; ++i) {
    auto next = cli.Get("/api/sessions/" + sid + "/next");
    scanner.scan(next);
    ASSERT_EQ(next->status, 200);
    auto j = nlohmann::json::parse(next->body);
    ASSERT_FALSE(j["done"].get<bool>());
    const std::string item = j["item"]["item_id"];
    seen.insert(item);

    auto img = cli.Get(j["item"]["image_url"].get<std::string>());
    scanner.scan(img);
    ASSERT_EQ(img->status, 200);
    EXPECT_EQ(img->get_header_value("Content-Type"), "image/png");

    nlohmann::json body{{"session_id", sid}, {"item_id", item}, {"score", 1 + i % 5}};
    if (i == 0) {
      auto high = cli.Post("/api/ratings", nlohmann::json{{"session_id", sid}, {"item_id", item}, {"score", 6}}.dump(), "application/json");
      scanner.scan(high);
      EXPECT_EQ(high->status, 400);
      EXPECT_EQ(nlohmann::json::parse(high->body)["error"]["code"], "ScoreOutOfRange");
      auto frac = cli.Post("/api/ratings", nlohmann::json{{"session_id", sid}, {"item_id", item}, {"score", 2.5}}.dump(), "application/json");
      scanner.scan(frac);
      EXPECT_EQ(frac->status, 400);
    }
    auto rated = cli.Post("/api/ratings", body.dump(), "application/json");
    scanner.scan(rated);
    ASSERT_EQ(rated->status, 201);
    if (i == 0) {
      auto dup = cli.Post("/api/ratings", body.dump(), "application/json");
      scanner.scan(dup);
      EXPECT_EQ(dup->status, 409);
      EXPECT_EQ(nlohmann::json::parse(dup->body)["error"]["code"], "DuplicateRating");
    }
  }
  EXPECT_EQ(seen.size(), 24u);
  auto done = cli.Get("/api/sessions/" + sid + "/next");
  scanner.scan(done);
  EXPECT_TRUE(nlohmann::json::parse(done->body)["done"].get<bool>());
  EXPECT_EQ(scanner.leaks, 0);
  EXPECT_EQ(scanner.responses, 2 + 24 * 3 + 3);
  EXPECT_EQ(line_count(dir_.path() / "store" / "ratings.ndjson"), 24u);
}

TEST_F(ServiceTest, HttpErrorContract) {
  auto svc = make();
  LiveServer live(svc, {});
  auto cli = live.client();
  auto code = [](const httplib::Result& r) {
    return nlohmann::json::parse(r->body)["error"]["code"].get<std::string>();
  };
  auto unknown = cli.Get("/api/sessions/deadbeef/next");
  EXPECT_EQ(unknown->status, 404);
  EXPECT_EQ(code(unknown), "UnknownSession");
  auto img = cli.Get("/api/images/deadbeef");
  EXPECT_EQ(img->status, 404);
  EXPECT_EQ(code(img), "UnknownItem");
  auto bad = cli.Post("/api/sessions", "not json", "application/json");
  EXPECT_EQ(bad->status, 400);
  auto empty_label = cli.Post("/api/sessions", R"({"rater_label":""})", "application/json");
  EXPECT_EQ(empty_label->status, 400);
  auto missing = cli.Post("/api/ratings", R"({"session_id":"x"})", "application/json");
  EXPECT_EQ(missing->status, 400);
  auto results = cli.Get("/api/results");
  EXPECT_EQ(results->status, 403);
  auto root = cli.Get("/");
  EXPECT_EQ(root->status, 200);
  EXPECT_NE(root->body.find("<html"), std::string::npos);
}

TEST_F(ServiceTest, HttpAdminResultsAndStaticFiles) {
  fs::path site = dir_.path() / "site";
  fs::create_directories(site);
  std::ofstream(site / "index.html") << "<html>survey ui</html>";
  auto svc = make();
  SurveyServerOptions opts;
  opts.admin = true;
  opts.static_dir = site;
  LiveServer live(svc, opts);
  auto cli = live.client();
  Session s = svc.create_session("direct");
  svc.submit_rating(s.session_id, s.order[0], 5);
  auto results = cli.Get("/api/results");
  ASSERT_EQ(results->status, 200);
  auto table = nlohmann::json::parse(results->body);
  EXPECT_EQ(table["cells"].size(), 24u);
  auto index = cli.Get("/");
  ASSERT_EQ(index->status, 200);
  EXPECT_EQ(index->body, "<html>survey ui</html>");
}

TEST_F(ServiceTest, BindingATakenPortFails) {
  auto svc = make();
  LiveServer live(svc, {});
  SurveyServerOptions opts;
  opts.port = live.port();
  SurveyServer second(svc, opts);
  EXPECT_EQ(code_of([&] { second.bind(); }), ErrorCode::kIo);
}

}  // namespace
}  // namespace agsynth
