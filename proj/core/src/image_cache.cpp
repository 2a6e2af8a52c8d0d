#include "agsynth/image_cache.hpp"

#include <atomic>
#include <random>
#include <system_error>

#include <nlohmann/json.hpp>

#include "agsynth/error.hpp"
#include "agsynth/hash.hpp"
#include "agsynth/image_io.hpp"

namespace fs = std::filesystem;

namespace agsynth {

ImageCache::ImageCache(fs::path root) : root_(std::move(root)) {}

std::optional<std::vector<RgbImage>> ImageCache::load(const std::string& digest,
                                                      int expected_count) const {
  const fs::path dir = entry_dir(digest);
  std::error_code ec;
  if (!fs::is_regular_file(dir / "job.json", ec)) return std::nullopt;
  std::vector<RgbImage> images;
  try {
    for (int i = 0; i < expected_count; ++i)
      images.push_back(load_image(dir / (std::to_string(i) + ".png")));
  } catch (const Error&) {
    return std::nullopt;
  }
  return images;
}

void ImageCache::store(const std::string& digest, const GenerationJob& job,
                       const std::vector<RgbImage>& images) const {
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  fs::create_directories(root_, ec);
  const fs::path final_dir = entry_dir(digest);
  if (fs::exists(final_dir / "job.json", ec)) return;

  std::random_device rd;
  const fs::path tmp = root_ / (".tmp-" + digest.substr(0, 16) + "-" + std::to_string(rd()) +
                                "-" + std::to_string(counter++));
  fs::create_directories(tmp, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create cache directory " + tmp.string());

  nlohmann::json manifest{
      {"digest", digest},
      {"kind", to_string(job.kind)},
      {"n", job.count},
      {"size", job.size},
      {"backend", job.backend_id},
  };
  if (job.kind == JobKind::kTextToImage)
    manifest["prompt"] = job.prompt;
  else
    manifest["source_sha256"] = sha256_hex(job.source_image);
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string name = std::to_string(i) + ".png";
    save_png(images[i], tmp / name);
    files.push_back(name);
  }
  manifest["files"] = files;
  write_file_atomic(tmp / "job.json", manifest.dump(2) + "\n");

  fs::rename(tmp, final_dir, ec);
  if (ec) {
    // Lost a race with another writer, or a stale partial entry is in the way.
    std::error_code ignore;
    if (!fs::exists(final_dir / "job.json", ignore)) {
      fs::remove_all(final_dir, ignore);
      fs::rename(tmp, final_dir, ec);
      if (!ec) return;
    }
    fs::remove_all(tmp, ignore);
  }
}

}  // namespace agsynth
