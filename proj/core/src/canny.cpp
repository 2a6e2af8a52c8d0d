#include "agsynth/canny.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "agsynth/error.hpp"
#include "agsynth/filter.hpp"

namespace agsynth {

std::size_t EdgeMap::count() const noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

EdgeMap canny_edges(const ImagePlane& plane, const FsimConfig& cfg) {
  if (!(cfg.canny_low > 0 && cfg.canny_low < cfg.canny_high))
    throw Error(ErrorCode::kInvalidConfig, "canny thresholds must satisfy 0 < low < high");
  if (!(cfg.canny_sigma > 0)) throw Error(ErrorCode::kInvalidConfig, "canny_sigma must be positive");
  const int w = plane.width();
  const int h = plane.height();
  if (w < 3 || h < 3) throw Error(ErrorCode::kTooSmall, "canny needs at least a 3x3 plane");

  const int radius = static_cast<int>(std::ceil(3.0 * cfg.canny_sigma));
  const RealPlane blurred =
      correlate_separable(plane.values(), w, h, gaussian_taps(cfg.canny_sigma, radius));
  const RealPlane b = pad_reflect101(blurred.data, w, h, 1);

  RealPlane gx(w, h), gy(w, h), mag(w, h);
  const double inv_max = 1.0 / plane.max_value();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // (x, y) in the padded plane is (x + 1, y + 1).
      const double tl = b.at(x, y), tc = b.at(x + 1, y), tr = b.at(x + 2, y);
      const double ml = b.at(x, y + 1), mr = b.at(x + 2, y + 1);
      const double bl = b.at(x, y + 2), bc = b.at(x + 1, y + 2), br = b.at(x + 2, y + 2);
      const double dx = (tr + 2 * mr + br) - (tl + 2 * ml + bl);
      const double dy = (bl + 2 * bc + br) - (tl + 2 * tc + tr);
      gx.at(x, y) = dx;
      gy.at(x, y) = dy;
      mag.at(x, y) = std::hypot(dx, dy) * inv_max;
    }
  }

  // Non-maximum suppression. Keep when strictly above the neighbour against
  // the gradient and at least equal to the one along it, so a symmetric
  // ridge keeps exactly one pixel.
  std::vector<std::uint8_t> state(static_cast<std::size_t>(w) * h, 0);  // 0 none, 1 weak, 2 strong
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double m = mag.at(x, y);
      if (m < cfg.canny_low) continue;
      double deg = std::atan2(gy.at(x, y), gx.at(x, y)) * (180.0 / std::numbers::pi);
      if (deg < 0) deg += 180.0;
      int px, py;
      if (deg < 22.5 || deg >= 157.5) {
        px = 1, py = 0;
      } else if (deg < 67.5) {
        px = 1, py = 1;
      } else if (deg < 112.5) {
        px = 0, py = 1;
      } else {
        px = -1, py = 1;
      }
      if (m > mag.at(x - px, y - py) && m >= mag.at(x + px, y + py))
        state[static_cast<std::size_t>(y) * w + x] = m >= cfg.canny_high ? 2 : 1;
    }
  }

  EdgeMap edges{w, h, std::vector<std::uint8_t>(state.size(), 0)};
  std::vector<int> stack;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] != 2 || edges.mask[i]) continue;
    edges.mask[i] = 1;
    stack.push_back(static_cast<int>(i));
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      const int cx = cur % w, cy = cur / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = cx + dx, ny = cy + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
          if (state[n] != 0 && !edges.mask[n]) {
            edges.mask[n] = 1;
            stack.push_back(static_cast<int>(n));
          }
        }
      }
    }
  }
  return edges;
}

}  // namespace agsynth
