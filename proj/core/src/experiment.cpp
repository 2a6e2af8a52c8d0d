#include "agsynth/experiment.hpp"

#include <algorithm>
#include <exception>
#include <set>

#include <nlohmann/json.hpp>

#include "agsynth/error.hpp"
#include "agsynth/image_cache.hpp"
#include "agsynth/image_io.hpp"
#include "agsynth/stub_backend.hpp"
#include "dataset_layout.hpp"
#include "parallel.hpp"

namespace agsynth {
namespace {

namespace fs = std::filesystem;

void check_cancel(const std::atomic<bool>* cancel) {
  if (cancel && cancel->load()) throw Error(ErrorCode::kCancelled, "run cancelled");
}

void require_ground_truth(const CategorySpec& c) {
  std::error_code ec;
  if (!fs::is_regular_file(c.ground_truth, ec))
    throw Error(ErrorCode::kMissingGroundTruth,
                "ground truth for '" + c.name + "' not found: " + c.ground_truth.string());
}

fs::path dataset_path(const ExperimentConfig& cfg, const std::string& category, Method m,
                      int index) {
  return cfg.dataset_dir / category / std::string(to_string(m)) /
         (std::to_string(index) + ".png");
}

struct Generated {
  std::vector<RgbImage> images;
  fs::path cache_entry;  // empty when uncached
};

Generated generate_one(const ExperimentConfig& cfg, const CategorySpec& c, Method m,
                       const RgbImage* ground_truth, ImageBackend& backend, ImageCache* cache) {
  GenerationJob job =
      m == Method::kTextToImage
          ? make_text_job(c.prompt, cfg.images_per_method, cfg.image_size, backend.id())
          : make_variation_job(*ground_truth, cfg.images_per_method, cfg.image_size,
                               backend.id());
  Generated out;
  out.images = m == Method::kTextToImage ? generate_text_to_image(job, backend, cache)
                                         : generate_variations(job, backend, cache);
  if (cache) out.cache_entry = cache->entry_dir(cache_key(job));
  return out;
}

// Cached entries already hold the encoded PNG, so copy instead of re-encoding.
void write_dataset_image(const Generated& g, std::size_t k, const fs::path& dest) {
  if (!g.cache_entry.empty()) {
    fs::path src = g.cache_entry / (std::to_string(k) + ".png");
    std::error_code ec;
    if (fs::is_regular_file(src, ec)) {
      write_file_atomic(dest, read_file(src));
      return;
    }
  }
  save_png(g.images[k], dest);
}

int generation_workers(const ExperimentConfig& cfg) {
  if (cfg.backend_kind == BackendKind::kRemote) return cfg.backend.max_concurrent;
  return detail::resolve_workers(cfg.workers);
}

// A generated or ground-truth image waiting to be scored.
struct ScoreTask {
  std::size_t category = 0;
  Method method = Method::kTextToImage;
  int index = 0;
  const RgbImage* image = nullptr;
};

struct Scored {
  std::vector<std::optional<MetricRecord>> slots;
  std::exception_ptr error;
};

Scored score_tasks(const ExperimentConfig& cfg, const std::vector<ScoreTask>& tasks,
                   const std::vector<ImagePlane>& references, const std::atomic<bool>* cancel) {
  Scored out;
  out.slots.resize(tasks.size());
  try {
    detail::parallel_for(tasks.size(), detail::resolve_workers(cfg.workers), [&](std::size_t i) {
      check_cancel(cancel);
      const ScoreTask& t = tasks[i];
      const std::string& name = cfg.categories[t.category].name;
      out.slots[i] = score_pair(references[t.category], preprocess_for_metrics(*t.image), cfg.fsim,
                                name, t.method, image_id(name, t.method, t.index));
    });
  } catch (...) {
    out.error = std::current_exception();
  }
  return out;
}

std::string error_message(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

// Writes the report for whatever was scored, then rethrows `error` if set.
ExperimentReport finish(const ExperimentConfig& cfg, const std::string& backend_id,
                        std::vector<std::optional<MetricRecord>> slots, std::size_t expected,
                        std::exception_ptr error) {
  ExperimentReport report;
  for (auto& s : slots)
    if (s) report.records.push_back(std::move(*s));
  report.complete = !error && report.records.size() == expected;

  if (!report.records.empty()) {
    report.table = aggregate_metrics(report.records);
    report.files = render_report(*report.table, report.records, cfg.output_dir);
  } else {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec)
      throw Error(ErrorCode::kIo, "cannot create " + cfg.output_dir.string() + ": " + ec.message());
    write_file_atomic(cfg.output_dir / "records.csv", records_to_csv({}));
    report.files.push_back(cfg.output_dir / "records.csv");
  }

  nlohmann::json run = {{"complete", report.complete},
                        {"backend", backend_id},
                        {"seed", cfg.seed},
                        {"records", report.records.size()},
                        {"expected", expected},
                        {"error", error ? nlohmann::json(error_message(error)) : nlohmann::json(nullptr)}};
  write_file_atomic(cfg.output_dir / "run.json", run.dump(2) + "\n");
  report.files.push_back(cfg.output_dir / "run.json");

  if (error) std::rethrow_exception(error);
  return report;
}

std::vector<ImagePlane> load_references(const ExperimentConfig& cfg,
                                        std::vector<RgbImage>* keep) {
  std::vector<ImagePlane> refs;
  for (const CategorySpec& c : cfg.categories) {
    RgbImage gt = load_image(c.ground_truth);
    refs.push_back(preprocess_for_metrics(gt));
    if (keep) keep->push_back(std::move(gt));
  }
  return refs;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (categories.empty()) bad("experiment.categories must list at least one category");
  std::set<std::string> names;
  for (const CategorySpec& c : categories) {
    if (c.name.empty()) bad("category name must be non-empty");
    if (c.name.find_first_of("/\\,") != std::string::npos || c.name == "." || c.name == "..")
      bad("category name '" + c.name + "' contains a path separator or comma");
    if (!names.insert(c.name).second) bad("duplicate category '" + c.name + "'");
    if (c.prompt.empty()) bad("prompt for category '" + c.name + "' is empty");
    if (c.ground_truth.empty()) bad("ground truth path for category '" + c.name + "' is empty");
  }
  if (methods.empty()) bad("experiment.methods must list at least one method");
  std::set<Method> seen;
  for (Method m : methods) {
    if (m == Method::kGroundTruth) bad("experiment.methods may not include ground_truth");
    if (!seen.insert(m).second) bad("duplicate method '" + std::string(to_string(m)) + "'");
  }
  if (images_per_method < 1 || images_per_method > kMaxImagesPerJob)
    bad("experiment.images_per_method must be in [1, " + std::to_string(kMaxImagesPerJob) + "]");
  if (std::find(std::begin(kAllowedSizes), std::end(kAllowedSizes), image_size) ==
      std::end(kAllowedSizes))
    bad("experiment.image_size must be 256, 512, or 1024");
  if (workers < 0) bad("experiment.workers must be >= 0");
  if (output_dir.empty()) bad("experiment.output_dir must be set");
  if (dataset_dir.empty()) bad("experiment.dataset_dir must be set");
  fsim.validate();
  if (backend_kind == BackendKind::kRemote) backend.validate();
}

const CategorySpec* ExperimentConfig::find_category(const std::string& name) const {
  for (const CategorySpec& c : categories)
    if (c.name == name) return &c;
  return nullptr;
}

std::unique_ptr<ImageBackend> make_backend(const ExperimentConfig& cfg) {
  if (cfg.backend_kind == BackendKind::kRemote) return std::make_unique<RemoteBackend>(cfg.backend);
  return std::make_unique<StubBackend>(cfg.seed);
}

std::string image_id(const std::string& category, Method method, int index) {
  return category + "/" + std::string(to_string(method)) + "/" + std::to_string(index);
}

std::vector<fs::path> generate_dataset(const ExperimentConfig& cfg, ImageBackend& backend,
                                       const DatasetFilter& filter,
                                       const std::atomic<bool>* cancel) {
  cfg.validate();
  for (const std::string& name : filter.categories)
    if (!cfg.find_category(name))
      throw Error(ErrorCode::kInvalidConfig, "unknown category '" + name + "'");
  auto wanted_method = [&](Method m) {
    return filter.methods.empty() ||
           std::find(filter.methods.begin(), filter.methods.end(), m) != filter.methods.end();
  };
  auto wanted_category = [&](const std::string& name) {
    return filter.categories.empty() ||
           std::find(filter.categories.begin(), filter.categories.end(), name) !=
               filter.categories.end();
  };

  struct Job {
    const CategorySpec* category;
    Method method;
  };
  std::vector<Job> jobs;
  for (const CategorySpec& c : cfg.categories) {
    if (!wanted_category(c.name)) continue;
    for (Method m : cfg.methods) {
      if (!wanted_method(m)) continue;
      if (m == Method::kImageVariation) require_ground_truth(c);
      jobs.push_back({&c, m});
    }
  }

  std::optional<ImageCache> cache;
  if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir);

  std::vector<std::vector<fs::path>> written(jobs.size());
  detail::parallel_for(jobs.size(), generation_workers(cfg), [&](std::size_t i) {
    check_cancel(cancel);
    const Job& job = jobs[i];
    std::optional<RgbImage> gt;
    if (job.method == Method::kImageVariation) gt = load_image(job.category->ground_truth);
    Generated g = generate_one(cfg, *job.category, job.method, gt ? &*gt : nullptr, backend,
                               cache ? &*cache : nullptr);
    for (std::size_t k = 0; k < g.images.size(); ++k) {
      fs::path p = dataset_path(cfg, job.category->name, job.method, static_cast<int>(k));
      write_dataset_image(g, k, p);
      written[i].push_back(std::move(p));
    }
  });

  std::vector<fs::path> out;
  for (auto& w : written) out.insert(out.end(), w.begin(), w.end());
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, ImageBackend& backend,
                                const std::atomic<bool>* cancel) {
  cfg.validate();
  for (const CategorySpec& c : cfg.categories) require_ground_truth(c);

  std::vector<RgbImage> ground_truth;
  const std::vector<ImagePlane> references = load_references(cfg, &ground_truth);

  std::optional<ImageCache> cache;
  if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir);

  const std::size_t n_methods = cfg.methods.size();
  const std::size_t n_jobs = cfg.categories.size() * n_methods;
  std::vector<std::optional<std::vector<RgbImage>>> generated(n_jobs);
  std::exception_ptr error;
  try {
    detail::parallel_for(n_jobs, generation_workers(cfg), [&](std::size_t j) {
      check_cancel(cancel);
      const std::size_t ci = j / n_methods;
      const Method m = cfg.methods[j % n_methods];
      const CategorySpec& c = cfg.categories[ci];
      Generated g = generate_one(cfg, c, m, &ground_truth[ci], backend, cache ? &*cache : nullptr);
      for (std::size_t k = 0; k < g.images.size(); ++k)
        write_dataset_image(g, k, dataset_path(cfg, c.name, m, static_cast<int>(k)));
      generated[j] = std::move(g.images);
    });
  } catch (...) {
    error = std::current_exception();
  }

  std::vector<ScoreTask> tasks;
  for (std::size_t ci = 0; ci < cfg.categories.size(); ++ci) {
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const auto& images = generated[ci * n_methods + mi];
      if (!images) continue;
      for (std::size_t k = 0; k < images->size(); ++k)
        tasks.push_back({ci, cfg.methods[mi], static_cast<int>(k), &(*images)[k]});
    }
    if (cfg.self_check) tasks.push_back({ci, Method::kGroundTruth, 0, &ground_truth[ci]});
  }
  const std::size_t expected =
      cfg.categories.size() *
      (n_methods * static_cast<std::size_t>(cfg.images_per_method) + (cfg.self_check ? 1 : 0));

  Scored scored = score_tasks(cfg, tasks, references, cancel);
  if (!error) error = scored.error;
  return finish(cfg, backend.id(), std::move(scored.slots), expected, error);
}

ExperimentReport evaluate_dataset(const ExperimentConfig& cfg, const std::atomic<bool>* cancel) {
  cfg.validate();
  for (const CategorySpec& c : cfg.categories) require_ground_truth(c);

  struct Found {
    std::size_t category;
    Method method;
    int index;
    fs::path path;
  };
  std::vector<Found> found;
  for (std::size_t ci = 0; ci < cfg.categories.size(); ++ci) {
    for (Method m : cfg.methods) {
      fs::path dir = cfg.dataset_dir / cfg.categories[ci].name / std::string(to_string(m));
      for (auto& [index, path] : detail::list_indexed_images(dir))
        found.push_back({ci, m, index, path});
    }
  }
  if (found.empty())
    throw Error(ErrorCode::kEmptyInput,
                "no generated images found under " + cfg.dataset_dir.string());

  std::vector<RgbImage> ground_truth;
  const std::vector<ImagePlane> references = load_references(cfg, &ground_truth);

  std::vector<RgbImage> images;
  images.reserve(found.size());
  for (const Found& f : found) images.push_back(load_image(f.path));

  std::vector<ScoreTask> tasks;
  std::size_t next = 0;
  for (std::size_t ci = 0; ci < cfg.categories.size(); ++ci) {
    for (; next < found.size() && found[next].category == ci; ++next)
      tasks.push_back({ci, found[next].method, found[next].index, &images[next]});
    if (cfg.self_check) tasks.push_back({ci, Method::kGroundTruth, 0, &ground_truth[ci]});
  }
  const std::size_t expected = tasks.size();
  Scored scored = score_tasks(cfg, tasks, references, cancel);
  return finish(cfg, "dataset", std::move(scored.slots), expected, scored.error);
}

}  // namespace agsynth
