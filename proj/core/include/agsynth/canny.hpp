#pragma once

#include <cstdint>
#include <vector>

#include "agsynth/fsim_config.hpp"
#include "agsynth/image.hpp"

namespace agsynth {

struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;  // 1 = edge

  bool at(int x, int y) const noexcept {
    return mask[static_cast<std::size_t>(y) * width + x] != 0;
  }
  std::size_t count() const noexcept;
};

/// Gaussian blur (canny_sigma, radius ceil(3 sigma)) -> Sobel -> non-maximum
/// suppression over four quantized directions -> hysteresis with 8-connected
/// growth from strong pixels. The one-pixel image frame is never an edge.
///
/// Throws InvalidConfig when thresholds are out of order and TooSmall for
/// planes under 3x3.
EdgeMap canny_edges(const ImagePlane& plane, const FsimConfig& cfg);

}  // namespace agsynth
