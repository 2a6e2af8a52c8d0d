#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "agsynth/image.hpp"

namespace agsynth {

/// Decodes a PNG or JPEG file. Throws IoError when the file is missing or
/// unreadable, DecodeError for empty, corrupt, or unsupported payloads; both
/// messages name the path. 16-bit PNG channels are scaled by integer
/// division by 257; alpha is discarded.
RgbImage load_image(const std::filesystem::path& path);

/// Same as load_image for an in-memory payload; `origin` labels errors.
RgbImage decode_image(std::span<const std::uint8_t> bytes, std::string_view origin);

/// Deterministic 8-bit RGB PNG (fixed zlib level, no timestamp chunks).
std::vector<std::uint8_t> encode_png(const RgbImage& img);

/// 8-bit grayscale PNG of a plane, values rescaled to [0, 255] and rounded.
std::vector<std::uint8_t> encode_png(const ImagePlane& plane);

void save_png(const RgbImage& img, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace agsynth
