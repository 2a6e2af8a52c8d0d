#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agsynth/image.hpp"

namespace agsynth {

class ImageCache;

enum class JobKind { kTextToImage, kImageVariation };

std::string_view to_string(JobKind k) noexcept;

/// Output sizes accepted by the generation endpoints (square, pixels).
inline constexpr int kAllowedSizes[] = {256, 512, 1024};
inline constexpr int kMaxImagesPerJob = 10;

/// One unit of generator work. Text jobs carry a prompt; variation jobs
/// carry the source image as encoded PNG bytes, which is also what gets
/// uploaded and hashed.
struct GenerationJob {
  JobKind kind = JobKind::kTextToImage;
  std::string prompt;
  std::vector<std::uint8_t> source_image;
  int count = 4;
  int size = 1024;
  std::string backend_id;

  /// Throws InvalidJob describing the first violated constraint.
  void validate() const;
};

GenerationJob make_text_job(std::string prompt, int count, int size, std::string backend_id);
GenerationJob make_variation_job(const RgbImage& source, int count, int size,
                                 std::string backend_id);

/// "<category> in the field for harvesting".
std::string default_prompt(std::string_view category);

/// Bytes hashed by cache_key():
///
///   "agsynth.job.v1\n"
///   "kind=" <text_to_image|image_variation> "\n"
///   "n=" <count> "\n"
///   "size=" <size> "\n"
///   "backend=" <backend_id> "\n"
///   "payload=" <payload byte length> "\n"
///   <payload>
///
/// The payload is the UTF-8 prompt for text jobs and the source PNG bytes
/// for variation jobs. Integers are decimal without padding.
std::vector<std::uint8_t> cache_key_material(const GenerationJob& job);

/// SHA-256 of cache_key_material(job) as 64 lower-case hex characters.
std::string cache_key(const GenerationJob& job);

/// A source of generated images. Implementations must return exactly
/// job.count images of job.size x job.size.
class ImageBackend {
 public:
  virtual ~ImageBackend() = default;
  /// Stable identifier folded into cache keys.
  virtual std::string id() const = 0;
  virtual std::vector<RgbImage> generate(const GenerationJob& job) = 0;
};

/// Runs a text job through the cache and backend. A cache hit never calls
/// the backend. Fresh results are cached before returning.
/// Throws InvalidJob, AuthError, RateLimited, or BackendUnavailable.
std::vector<RgbImage> generate_text_to_image(const GenerationJob& job, ImageBackend& backend,
                                             ImageCache* cache);

/// As generate_text_to_image for variation jobs; additionally throws
/// InvalidSourceImage when the source bytes are empty or undecodable.
std::vector<RgbImage> generate_variations(const GenerationJob& job, ImageBackend& backend,
                                          ImageCache* cache);

}  // namespace agsynth
