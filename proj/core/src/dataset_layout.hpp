// <dataset_dir>/<category>/<method>/<index>.<png|jpg|jpeg>
#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace agsynth::detail {

inline std::optional<int> dataset_index(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext != ".png" && ext != ".jpg" && ext != ".jpeg") return std::nullopt;
  const std::string stem = p.stem().string();
  int v = 0;
  auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), v);
  if (ec != std::errc() || ptr != stem.data() + stem.size() || v < 0) return std::nullopt;
  return v;
}

/// Indexed images in `dir` sorted by index; empty when `dir` is absent.
inline std::vector<std::pair<int, std::filesystem::path>> list_indexed_images(
    const std::filesystem::path& dir) {
  std::vector<std::pair<int, std::filesystem::path>> out;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (auto idx = dataset_index(entry.path())) out.emplace_back(*idx, entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace agsynth::detail
