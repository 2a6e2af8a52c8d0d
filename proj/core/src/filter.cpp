#include "agsynth/filter.hpp"

#include <cmath>

namespace agsynth {

int reflect101(int i, int n) noexcept {
  if (n <= 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

std::vector<double> gaussian_taps(double sigma, int radius) {
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += taps[i + radius];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

RealPlane pad_reflect101(std::span<const double> src, int width, int height, int pad) {
  RealPlane out(width + 2 * pad, height + 2 * pad);
  for (int y = 0; y < out.height; ++y) {
    const int sy = reflect101(y - pad, height);
    for (int x = 0; x < out.width; ++x)
      out.at(x, y) = src[static_cast<std::size_t>(sy) * width + reflect101(x - pad, width)];
  }
  return out;
}

RealPlane correlate_separable(std::span<const double> src, int width, int height,
                              std::span<const double> taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  const RealPlane padded = pad_reflect101(src, width, height, r);

  // Horizontal pass over all padded rows, then vertical pass.
  RealPlane rows(width, padded.height);
  for (int y = 0; y < padded.height; ++y) {
    const double* in = &padded.data[static_cast<std::size_t>(y) * padded.width];
    double* out = &rows.data[static_cast<std::size_t>(y) * width];
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = 0; k <= 2 * r; ++k) acc += taps[k] * in[x + k];
      out[x] = acc;
    }
  }
  RealPlane out(width, height);
  for (int y = 0; y < height; ++y) {
    double* dst = &out.data[static_cast<std::size_t>(y) * width];
    for (int k = 0; k <= 2 * r; ++k) {
      const double t = taps[k];
      const double* in = &rows.data[static_cast<std::size_t>(y + k) * width];
      for (int x = 0; x < width; ++x) dst[x] += t * in[x];
    }
  }
  return out;
}

RealPlane correlate_dense(std::span<const double> src, int width, int height,
                          std::span<const double> kernel, int ksize) {
  const int r = ksize / 2;
  const RealPlane padded = pad_reflect101(src, width, height, r);
  RealPlane out(width, height);
  for (int y = 0; y < height; ++y) {
    double* dst = &out.data[static_cast<std::size_t>(y) * width];
    for (int ky = 0; ky < ksize; ++ky) {
      const double* in = &padded.data[static_cast<std::size_t>(y + ky) * padded.width];
      for (int kx = 0; kx < ksize; ++kx) {
        const double t = kernel[static_cast<std::size_t>(ky) * ksize + kx];
        const double* row = in + kx;
        for (int x = 0; x < width; ++x) dst[x] += t * row[x];
      }
    }
  }
  return out;
}

}  // namespace agsynth
