#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agsynth/generation.hpp"
#include "agsynth/image.hpp"

namespace agsynth {

/// On-disk cache of generated images:
///
///   <root>/<digest>/job.json
///   <root>/<digest>/<index>.png      index = 0 .. n-1
///
/// Entries are assembled in a temporary sibling directory and renamed into
/// place, so a visible entry is always complete. Safe for concurrent use
/// by several threads or processes.
class ImageCache {
 public:
  explicit ImageCache(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path entry_dir(const std::string& digest) const { return root_ / digest; }

  /// Cached images for `digest`, or nullopt when absent, incomplete, or
  /// unreadable.
  std::optional<std::vector<RgbImage>> load(const std::string& digest, int expected_count) const;

  void store(const std::string& digest, const GenerationJob& job,
             const std::vector<RgbImage>& images) const;

 private:
  std::filesystem::path root_;
};

}  // namespace agsynth
