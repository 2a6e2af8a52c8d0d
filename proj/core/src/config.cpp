#include "agsynth/config.hpp"

#include "agsynth/error.hpp"
#include "agsynth/image_io.hpp"
#include "json_fields.hpp"

namespace agsynth {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void read_path(detail::FieldReader& r, const std::string& key, const fs::path& base,
               fs::path& out) {
  std::string s;
  if (r.get(key, s)) out = resolve(base, s);
}

std::vector<CategorySpec> read_categories(const json& arr, const fs::path& base) {
  if (!arr.is_array())
    throw Error(ErrorCode::kInvalidConfig, "experiment.categories must be an array");
  std::vector<CategorySpec> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    detail::FieldReader r(arr[i], "experiment.categories[" + std::to_string(i) + "]");
    CategorySpec c;
    std::string gt;
    r.require("name", c.name);
    r.require("ground_truth", gt);
    if (!r.get("prompt", c.prompt)) c.prompt = default_prompt(c.name);
    r.finish();
    c.ground_truth = resolve(base, gt);
    out.push_back(std::move(c));
  }
  return out;
}

void read_experiment(const json& j, const fs::path& base, ExperimentConfig& e) {
  detail::FieldReader r(j, "experiment");
  e.categories = read_categories(r.raw("categories"), base);
  std::vector<std::string> methods;
  if (r.get("methods", methods)) {
    e.methods.clear();
    for (const std::string& m : methods) {
      auto parsed = method_from_string(m);
      if (!parsed || *parsed == Method::kGroundTruth)
        throw Error(ErrorCode::kInvalidConfig, "unknown method '" + m + "' in experiment.methods");
      e.methods.push_back(*parsed);
    }
  }
  r.get("images_per_method", e.images_per_method);
  r.get("image_size", e.image_size);
  read_path(r, "output_dir", base, e.output_dir);
  read_path(r, "dataset_dir", base, e.dataset_dir);
  if (r.has("cache_dir")) {
    e.cache_dir.clear();
    read_path(r, "cache_dir", base, e.cache_dir);
  }
  r.get("seed", e.seed);
  r.get("workers", e.workers);
  r.get("self_check", e.self_check);
  r.finish();
}

void read_backend(const json& j, ExperimentConfig& e) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "backend must be an object");
  if (j.contains("api_key"))
    throw Error(ErrorCode::kInvalidConfig,
                "unknown key 'backend.api_key': keys are read only from the environment "
                "variable named by backend.api_key_env");
  std::string kind = "stub";
  if (j.contains("kind")) {
    if (!j["kind"].is_string())
      throw Error(ErrorCode::kInvalidConfig, "wrong type for key 'backend.kind'");
    kind = j["kind"].get<std::string>();
  }
  json rest = j;
  rest.erase("kind");
  if (kind == "stub") {
    detail::FieldReader(rest, "backend").finish();
    e.backend_kind = BackendKind::kStub;
  } else if (kind == "remote") {
    e.backend_kind = BackendKind::kRemote;
    e.backend = backend_config_from_json(rest, "backend");
  } else {
    throw Error(ErrorCode::kInvalidConfig,
                "backend.kind must be \"stub\" or \"remote\", got \"" + kind + "\"");
  }
}

void read_survey(const json& j, const fs::path& base, SurveyConfig& s) {
  detail::FieldReader r(j, "survey");
  read_path(r, "pool", base, s.pool);
  read_path(r, "store_dir", base, s.store_dir);
  read_path(r, "static_dir", base, s.static_dir);
  r.get("host", s.host);
  r.get("port", s.port);
  r.get("seed", s.seed);
  r.finish();
  if (s.port < 0 || s.port > 65535)
    throw Error(ErrorCode::kInvalidConfig, "survey.port must be in [0, 65535]");
}

}  // namespace

AppConfig config_from_json(const json& j, const fs::path& base_dir) {
  AppConfig cfg;
  cfg.experiment.output_dir = base_dir / "results";
  cfg.experiment.dataset_dir = base_dir / "dataset";
  cfg.experiment.cache_dir = base_dir / "cache";
  cfg.survey.pool = base_dir / "survey" / "pool.json";
  cfg.survey.store_dir = base_dir / "survey";

  detail::FieldReader top(j, "config");
  read_experiment(top.raw("experiment"), base_dir, cfg.experiment);
  if (top.has("backend")) read_backend(top.raw("backend"), cfg.experiment);
  if (top.has("fsim")) cfg.experiment.fsim = fsim_config_from_json(top.raw("fsim"), "fsim");
  if (top.has("survey")) read_survey(top.raw("survey"), base_dir, cfg.survey);
  top.finish();
  cfg.experiment.validate();
  return cfg;
}

AppConfig load_config(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    throw Error(ErrorCode::kIo, "config file not found: " + path.string());
  std::vector<std::uint8_t> bytes = read_file(path);
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": " + e.what());
  }
  fs::path base = fs::absolute(path).parent_path();
  try {
    return config_from_json(j, base);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidConfig) throw;
    std::string msg = e.what();
    const std::string prefix = "InvalidConfig: ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": " + msg);
  }
}

json to_json(const AppConfig& cfg) {
  const ExperimentConfig& e = cfg.experiment;
  json cats = json::array();
  for (const CategorySpec& c : e.categories)
    cats.push_back({{"name", c.name}, {"ground_truth", c.ground_truth.string()}, {"prompt", c.prompt}});
  json methods = json::array();
  for (Method m : e.methods) methods.push_back(std::string(to_string(m)));

  json backend = e.backend_kind == BackendKind::kRemote ? to_json(e.backend) : json::object();
  backend["kind"] = e.backend_kind == BackendKind::kRemote ? "remote" : "stub";

  json survey = {{"pool", cfg.survey.pool.string()},
                 {"store_dir", cfg.survey.store_dir.string()},
                 {"host", cfg.survey.host},
                 {"port", cfg.survey.port},
                 {"seed", cfg.survey.seed}};
  if (!cfg.survey.static_dir.empty()) survey["static_dir"] = cfg.survey.static_dir.string();

  return {{"experiment",
           {{"categories", cats},
            {"methods", methods},
            {"images_per_method", e.images_per_method},
            {"image_size", e.image_size},
            {"output_dir", e.output_dir.string()},
            {"dataset_dir", e.dataset_dir.string()},
            {"cache_dir", e.cache_dir.string()},
            {"seed", e.seed},
            {"workers", e.workers},
            {"self_check", e.self_check}}},
          {"backend", backend},
          {"fsim", to_json(e.fsim)},
          {"survey", survey}};
}

json example_config() {
  json cats = json::array();
  for (const char* name : {"strawberries", "mangoes", "apples", "avocados", "rockmelons", "oranges"})
    cats.push_back({{"name", name},
                    {"ground_truth", std::string("ground_truth/") + name + ".png"},
                    {"prompt", default_prompt(name)}});
  return {{"experiment",
           {{"categories", cats},
            {"methods", {"text_to_image", "image_variation"}},
            {"images_per_method", 4},
            {"image_size", 1024},
            {"output_dir", "results"},
            {"dataset_dir", "dataset"},
            {"cache_dir", "cache"},
            {"seed", 42},
            {"workers", 0}}},
          {"backend", {{"kind", "stub"}}},
          {"survey", {{"pool", "survey/pool.json"}, {"store_dir", "survey"}, {"port", 8080}}}};
}

}  // namespace agsynth
