#pragma once

#include <vector>

#include "agsynth/canny.hpp"
#include "agsynth/filter.hpp"
#include "agsynth/fsim_config.hpp"
#include "agsynth/image.hpp"

namespace agsynth {

/// Real (cosine-phase) Gabor kernels over an orientation x wavelength grid.
/// Kernel index is orientation-major: index(o, w) = o * wavelengths.size() + w.
struct GaborBank {
  std::vector<RealPlane> kernels;
  std::vector<double> orientations;  // radians
  std::vector<double> wavelengths;   // pixels
  int kernel_size = 0;
  double sigma = 0.0;
  double gamma = 0.0;

  const RealPlane& kernel(std::size_t orientation, std::size_t wavelength) const {
    return kernels[orientation * wavelengths.size() + wavelength];
  }
};

/// One kernel: exp(-(x'^2 + gamma^2 y'^2) / 2 sigma^2) * cos(2 pi x' / wavelength)
/// with (x', y') rotated by theta, then mean-subtracted and scaled to unit
/// L2 norm. Rows index y, columns index x, y pointing down.
RealPlane make_gabor_kernel(double theta, double wavelength, int size, double sigma,
                            double gamma);

/// Throws InvalidConfig on an invalid configuration.
GaborBank build_gabor_bank(const FsimConfig& cfg);

/// |plane (*) kernel| per kernel, same-size, reflect-101 borders. The kernels
/// are point-symmetric, so correlation and convolution coincide.
/// Throws TooSmall unless the plane exceeds the kernel in both dimensions.
std::vector<RealPlane> gabor_responses(const ImagePlane& plane, const GaborBank& bank);

struct FeatureStack {
  int width = 0;
  int height = 0;
  std::vector<RealPlane> responses;
  EdgeMap edge_map;

  /// Per-pixel maximum response magnitude over all kernels.
  RealPlane combined_magnitude() const;
};

/// Canny edges plus Gabor response magnitudes for one plane.
FeatureStack extract_features(const ImagePlane& plane, const GaborBank& bank,
                              const FsimConfig& cfg);

}  // namespace agsynth
