// agsynth: generate, score, report, and survey synthetic crop imagery.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "agsynth/config.hpp"
#include "agsynth/error.hpp"
#include "agsynth/experiment.hpp"
#include "agsynth/image_io.hpp"
#include "agsynth/report.hpp"
#include "agsynth/stub_backend.hpp"
#include "agsynth/survey.hpp"
#include "agsynth/survey_server.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel.store(true); }

struct Options {
  std::string config = "agsynth.json";
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;

  std::string init_dir = ".";
  bool init_force = false;
  bool init_demo = false;

  std::string method = "all";
  std::vector<std::string> categories;
  std::string out;

  bool self_check = false;
  std::string dataset;

  std::string records;
  std::string format = "csv";

  std::string pool;
  std::string store;
  std::string static_dir;
  std::string host;
  std::optional<int> port;
  bool admin = false;
};

agsynth::AppConfig load(const Options& o) {
  agsynth::AppConfig cfg = agsynth::load_config(o.config);
  if (o.workers) cfg.experiment.workers = *o.workers;
  if (o.seed) {
    cfg.experiment.seed = *o.seed;
    cfg.survey.seed = *o.seed;
  }
  return cfg;
}

void print_summary(const agsynth::ExperimentReport& r) {
  std::cout << r.records.size() << " records\n";
  if (r.table) {
    for (agsynth::Metric m : agsynth::kAllMetrics) {
      auto pc = r.table->percent_change(m);
      std::printf("%-4s variation vs text: %s\n", std::string(agsynth::to_string(m)).c_str(),
                  pc ? (std::to_string(*pc) + "%").c_str() : "n/a");
    }
  }
  for (const auto& f : r.files) std::cout << "wrote " << f.string() << "\n";
}

int cmd_init(const Options& o) {
  fs::path dir = o.init_dir;
  fs::path cfg_path = dir / "agsynth.json";
  if (fs::exists(cfg_path) && !o.init_force) {
    std::cerr << "agsynth: " << cfg_path.string() << " already exists (use --force)\n";
    return kExitRuntime;
  }
  fs::create_directories(dir / "ground_truth");
  nlohmann::json example = agsynth::example_config();
  agsynth::write_file_atomic(cfg_path, example.dump(2) + "\n");
  std::cout << "wrote " << cfg_path.string() << "\n";

  if (o.init_demo) {
    // Stand-in ground truth so the pipeline can run without field photos.
    agsynth::StubBackend stub(o.seed.value_or(7));
    for (const auto& c : example["experiment"]["categories"]) {
      auto name = c["name"].get<std::string>();
      auto job = agsynth::make_text_job(agsynth::default_prompt(name), 1, 512, stub.id());
      auto images = stub.generate(job);
      fs::path p = dir / c["ground_truth"].get<std::string>();
      agsynth::save_png(images.front(), p);
      std::cout << "wrote " << p.string() << "\n";
    }
  }
  return 0;
}

int cmd_generate(const Options& o) {
  agsynth::AppConfig cfg = load(o);
  if (!o.out.empty()) cfg.experiment.dataset_dir = o.out;
  agsynth::DatasetFilter filter;
  if (o.method == "text") filter.methods = {agsynth::Method::kTextToImage};
  if (o.method == "variation") filter.methods = {agsynth::Method::kImageVariation};
  filter.categories = o.categories;
  auto backend = agsynth::make_backend(cfg.experiment);
  auto paths = agsynth::generate_dataset(cfg.experiment, *backend, filter, &g_cancel);
  for (const auto& p : paths) std::cout << p.string() << "\n";
  return 0;
}

int cmd_evaluate(const Options& o) {
  agsynth::AppConfig cfg = load(o);
  if (o.self_check) cfg.experiment.self_check = true;
  if (!o.dataset.empty()) cfg.experiment.dataset_dir = o.dataset;
  if (!o.out.empty()) cfg.experiment.output_dir = o.out;
  print_summary(agsynth::evaluate_dataset(cfg.experiment, &g_cancel));
  return 0;
}

int cmd_run(const Options& o) {
  agsynth::AppConfig cfg = load(o);
  if (o.self_check) cfg.experiment.self_check = true;
  if (!o.out.empty()) cfg.experiment.output_dir = o.out;
  auto backend = agsynth::make_backend(cfg.experiment);
  print_summary(agsynth::run_experiment(cfg.experiment, *backend, &g_cancel));
  return 0;
}

int cmd_report(const Options& o) {
  auto bytes = agsynth::read_file(o.records);
  auto records = agsynth::records_from_csv(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  auto table = agsynth::aggregate_metrics(records);
  fs::path out = o.out.empty() ? fs::path(o.records).parent_path() : fs::path(o.out);
  auto format = o.format == "json" ? agsynth::ReportFormat::kJson : agsynth::ReportFormat::kCsv;
  for (const auto& f : agsynth::render_report(table, records, out, format))
    std::cout << "wrote " << f.string() << "\n";
  return 0;
}

agsynth::SurveyConfig survey_config(const Options& o) {
  agsynth::SurveyConfig s;
  std::error_code ec;
  // The survey can run from flags alone when no config file is present.
  if (fs::exists(o.config, ec) || o.pool.empty()) s = load(o).survey;
  if (!o.pool.empty()) s.pool = o.pool;
  if (!o.store.empty()) s.store_dir = o.store;
  if (!o.static_dir.empty()) s.static_dir = o.static_dir;
  if (!o.host.empty()) s.host = o.host;
  if (o.port) s.port = *o.port;
  if (o.seed) s.seed = *o.seed;
  return s;
}

int cmd_survey_pool(const Options& o) {
  agsynth::AppConfig cfg = load(o);
  fs::path out = o.out.empty() ? cfg.survey.pool : fs::path(o.out);
  agsynth::SurveyPool pool = agsynth::build_pool(cfg.experiment);
  pool.save(out);
  std::cout << pool.size() << " items -> " << out.string() << "\n";
  return 0;
}

int cmd_survey_serve(const Options& o) {
  agsynth::SurveyConfig s = survey_config(o);
  agsynth::SurveyService service(agsynth::SurveyPool::load(s.pool), s.store_dir, s.seed);
  agsynth::SurveyServer server(service, {s.host, s.port, s.static_dir, o.admin});
  int port = server.bind();
  std::cout << "listening on http://" << s.host << ":" << port << std::endl;

  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done.load()) {
      if (g_cancel.load()) {
        server.stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  });
  server.serve();
  done.store(true);
  watcher.join();
  return 0;
}

int cmd_survey_aggregate(const Options& o) {
  agsynth::SurveyConfig s = survey_config(o);
  agsynth::SurveyPool pool = agsynth::SurveyPool::load(s.pool);
  agsynth::RatingStore store(s.store_dir / "ratings.ndjson");
  std::cout << agsynth::rating_table_csv(agsynth::aggregate_ratings(store.load(), pool));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate, score, and survey synthetic agricultural images."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "agsynth 0.1.0");
  Options o;
  app.add_option("-c,--config", o.config, "Config file (JSON)")->capture_default_str();
  app.add_option("--workers", o.workers, "Worker threads (0 = one per core)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", o.seed, "Override the configured seed");

  auto* init = app.add_subcommand("init", "Write a starter config");
  init->add_option("--dir", o.init_dir, "Target directory")->capture_default_str();
  init->add_flag("--force", o.init_force, "Overwrite an existing config");
  init->add_flag("--demo", o.init_demo, "Also write synthetic stand-in ground truth images");

  auto* generate = app.add_subcommand("generate", "Generate images into the dataset directory");
  generate->add_option("--method", o.method, "text, variation, or all")
      ->check(CLI::IsMember({"text", "variation", "all"}))
      ->capture_default_str();
  generate->add_option("--category", o.categories, "Restrict to a category (repeatable)");
  generate->add_option("--out", o.out, "Dataset directory override");

  auto* evaluate = app.add_subcommand("evaluate", "Score the dataset against ground truth");
  evaluate->add_flag("--self-check", o.self_check, "Also score ground truth against itself");
  evaluate->add_option("--dataset", o.dataset, "Dataset directory override");
  evaluate->add_option("--out", o.out, "Output directory override");

  auto* run = app.add_subcommand("run", "Generate, score, and report in one pass");
  run->add_flag("--self-check", o.self_check, "Also score ground truth against itself");
  run->add_option("--out", o.out, "Output directory override");

  auto* report = app.add_subcommand("report", "Rebuild summaries from a records file");
  report->add_option("--records", o.records, "records.csv to aggregate")->required();
  report->add_option("--out", o.out, "Output directory (default: beside the records)");
  report->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  auto* survey = app.add_subcommand("survey", "Blinded realism survey");
  survey->require_subcommand(1);
  auto* pool_cmd = survey->add_subcommand("pool", "Build the survey pool manifest");
  pool_cmd->add_option("--out", o.out, "Manifest path override");
  auto* serve = survey->add_subcommand("serve", "Serve the survey over HTTP");
  auto* aggregate = survey->add_subcommand("aggregate", "Print mean ratings as CSV");
  for (auto* sub : {serve, aggregate}) {
    sub->add_option("--pool", o.pool, "Pool manifest");
    sub->add_option("--store", o.store, "Directory holding ratings.ndjson");
  }
  serve->add_option("--port", o.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--static", o.static_dir, "Survey UI assets served at /");
  serve->add_flag("--admin", o.admin, "Enable GET /api/results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  std::signal(SIGINT, on_sigint);
  try {
    if (*init) return cmd_init(o);
    if (*generate) return cmd_generate(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*run) return cmd_run(o);
    if (*report) return cmd_report(o);
    if (*pool_cmd) return cmd_survey_pool(o);
    if (*serve) return cmd_survey_serve(o);
    if (*aggregate) return cmd_survey_aggregate(o);
  } catch (const agsynth::Error& e) {
    std::cerr << "agsynth: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "agsynth: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
