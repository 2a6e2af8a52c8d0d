#include "agsynth/generation.hpp"

#include <algorithm>
#include <string>

#include "agsynth/error.hpp"
#include "agsynth/hash.hpp"
#include "agsynth/image_cache.hpp"
#include "agsynth/image_io.hpp"

namespace agsynth {
namespace {

std::vector<RgbImage> run_job(const GenerationJob& job, ImageBackend& backend, ImageCache* cache) {
  if (job.backend_id != backend.id())
    throw Error(ErrorCode::kInvalidJob,
                "job targets backend '" + job.backend_id + "' but was given '" + backend.id() + "'");
  const std::string digest = cache_key(job);
  if (cache) {
    if (auto hit = cache->load(digest, job.count)) return std::move(*hit);
  }
  std::vector<RgbImage> images = backend.generate(job);
  if (static_cast<int>(images.size()) != job.count)
    throw Error(ErrorCode::kBackendUnavailable,
                "backend returned " + std::to_string(images.size()) + " images, expected " +
                    std::to_string(job.count));
  for (const RgbImage& img : images)
    if (img.width() != job.size || img.height() != job.size)
      throw Error(ErrorCode::kBackendUnavailable,
                  "backend returned a " + std::to_string(img.width()) + "x" +
                      std::to_string(img.height()) + " image, expected " +
                      std::to_string(job.size) + " square");
  if (cache) cache->store(digest, job, images);
  return images;
}

}  // namespace

std::string_view to_string(JobKind k) noexcept {
  return k == JobKind::kTextToImage ? "text_to_image" : "image_variation";
}

void GenerationJob::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidJob, m); };
  if (count < 1 || count > kMaxImagesPerJob)
    fail("image count must be in [1, " + std::to_string(kMaxImagesPerJob) + "], got " +
         std::to_string(count));
  if (std::find(std::begin(kAllowedSizes), std::end(kAllowedSizes), size) ==
      std::end(kAllowedSizes))
    fail("size must be 256, 512 or 1024, got " + std::to_string(size));
  if (kind == JobKind::kTextToImage) {
    if (prompt.empty()) fail("text job needs a non-empty prompt");
    if (!source_image.empty()) fail("text job must not carry a source image");
  } else {
    if (!prompt.empty()) fail("variation job must not carry a prompt");
  }
}

GenerationJob make_text_job(std::string prompt, int count, int size, std::string backend_id) {
  GenerationJob job;
  job.kind = JobKind::kTextToImage;
  job.prompt = std::move(prompt);
  job.count = count;
  job.size = size;
  job.backend_id = std::move(backend_id);
  return job;
}

GenerationJob make_variation_job(const RgbImage& source, int count, int size,
                                 std::string backend_id) {
  GenerationJob job;
  job.kind = JobKind::kImageVariation;
  job.source_image = encode_png(source);
  job.count = count;
  job.size = size;
  job.backend_id = std::move(backend_id);
  return job;
}

std::string default_prompt(std::string_view category) {
  return std::string(category) + " in the field for harvesting";
}

std::vector<std::uint8_t> cache_key_material(const GenerationJob& job) {
  const bool text = job.kind == JobKind::kTextToImage;
  const std::size_t payload = text ? job.prompt.size() : job.source_image.size();
  std::string head = "agsynth.job.v1\n";
  head += "kind=" + std::string(to_string(job.kind)) + "\n";
  head += "n=" + std::to_string(job.count) + "\n";
  head += "size=" + std::to_string(job.size) + "\n";
  head += "backend=" + job.backend_id + "\n";
  head += "payload=" + std::to_string(payload) + "\n";
  std::vector<std::uint8_t> out(head.begin(), head.end());
  if (text)
    out.insert(out.end(), job.prompt.begin(), job.prompt.end());
  else
    out.insert(out.end(), job.source_image.begin(), job.source_image.end());
  return out;
}

std::string cache_key(const GenerationJob& job) { return sha256_hex(cache_key_material(job)); }

std::vector<RgbImage> generate_text_to_image(const GenerationJob& job, ImageBackend& backend,
                                             ImageCache* cache) {
  if (job.kind != JobKind::kTextToImage)
    throw Error(ErrorCode::kInvalidJob, "expected a text_to_image job");
  job.validate();
  return run_job(job, backend, cache);
}

std::vector<RgbImage> generate_variations(const GenerationJob& job, ImageBackend& backend,
                                          ImageCache* cache) {
  if (job.kind != JobKind::kImageVariation)
    throw Error(ErrorCode::kInvalidJob, "expected an image_variation job");
  job.validate();
  if (job.source_image.empty())
    throw Error(ErrorCode::kInvalidSourceImage, "variation job has an empty source image");
  try {
    (void)decode_image(job.source_image, "variation source");
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidSourceImage, e.what());
  }
  return run_job(job, backend, cache);
}

}  // namespace agsynth
