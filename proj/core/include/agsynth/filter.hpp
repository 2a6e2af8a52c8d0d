// Border-aware correlation primitives shared by the edge, Gabor, and
// windowed-statistics stages. All borders are reflect-101 (dcb|abcd|cba).
#pragma once

#include <span>
#include <vector>

namespace agsynth {

/// Unbounded real-valued raster used for intermediate filter outputs.
struct RealPlane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  RealPlane() = default;
  RealPlane(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0) {}
  RealPlane(int w, int h, std::vector<double> values)
      : width(w), height(h), data(std::move(values)) {}

  double at(int x, int y) const noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Maps any integer index into [0, n) by reflect-101 mirroring.
int reflect101(int i, int n) noexcept;

/// Normalized (sum 1) Gaussian taps of length 2*radius+1.
std::vector<double> gaussian_taps(double sigma, int radius);

/// Copy of `src` padded by `pad` reflected samples on every side.
RealPlane pad_reflect101(std::span<const double> src, int width, int height, int pad);

/// Same-size correlation with a separable kernel (row taps, then column taps).
RealPlane correlate_separable(std::span<const double> src, int width, int height,
                              std::span<const double> taps);

/// Same-size correlation with a dense square kernel of odd side `ksize`.
RealPlane correlate_dense(std::span<const double> src, int width, int height,
                          std::span<const double> kernel, int ksize);

}  // namespace agsynth
