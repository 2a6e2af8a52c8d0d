#include "agsynth/gabor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "agsynth/error.hpp"

namespace agsynth {

RealPlane make_gabor_kernel(double theta, double wavelength, int size, double sigma,
                            double gamma) {
  RealPlane k(size, size);
  const int r = size / 2;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double xr = x * c + y * s;
      const double yr = -x * s + y * c;
      k.at(x + r, y + r) = std::exp(-(xr * xr + gamma * gamma * yr * yr) / (2 * sigma * sigma)) *
                           std::cos(2 * std::numbers::pi * xr / wavelength);
    }
  }
  double mean = 0.0;
  for (double v : k.data) mean += v;
  mean /= static_cast<double>(k.data.size());
  double norm = 0.0;
  for (double& v : k.data) {
    v -= mean;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double& v : k.data) v /= norm;
  return k;
}

GaborBank build_gabor_bank(const FsimConfig& cfg) {
  cfg.validate();
  GaborBank bank;
  bank.orientations = cfg.gabor_orientations;
  bank.wavelengths = cfg.gabor_wavelengths;
  bank.kernel_size = cfg.gabor_kernel_size;
  bank.sigma = cfg.gabor_sigma;
  bank.gamma = cfg.gabor_gamma;
  for (double theta : bank.orientations)
    for (double lambda : bank.wavelengths)
      bank.kernels.push_back(
          make_gabor_kernel(theta, lambda, bank.kernel_size, bank.sigma, bank.gamma));
  return bank;
}

std::vector<RealPlane> gabor_responses(const ImagePlane& plane, const GaborBank& bank) {
  if (plane.width() <= bank.kernel_size || plane.height() <= bank.kernel_size)
    throw Error(ErrorCode::kTooSmall,
                "plane " + std::to_string(plane.width()) + "x" + std::to_string(plane.height()) +
                    " must exceed the Gabor kernel size " + std::to_string(bank.kernel_size));
  std::vector<RealPlane> out;
  out.reserve(bank.kernels.size());
  for (const RealPlane& k : bank.kernels) {
    RealPlane r = correlate_dense(plane.values(), plane.width(), plane.height(), k.data,
                                  bank.kernel_size);
    for (double& v : r.data) v = std::fabs(v);
    out.push_back(std::move(r));
  }
  return out;
}

RealPlane FeatureStack::combined_magnitude() const {
  RealPlane f(width, height);
  for (const RealPlane& r : responses)
    for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = std::max(f.data[i], r.data[i]);
  return f;
}

FeatureStack extract_features(const ImagePlane& plane, const GaborBank& bank,
                              const FsimConfig& cfg) {
  FeatureStack fs;
  fs.width = plane.width();
  fs.height = plane.height();
  fs.responses = gabor_responses(plane, bank);
  fs.edge_map = canny_edges(plane, cfg);
  return fs;
}

}  // namespace agsynth
