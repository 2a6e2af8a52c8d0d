#pragma once

#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

namespace agsynth {

/// Free parameters of the feature-similarity pipeline.
///
/// Stabilizers are stored as coefficients of max_value^2 so a plane
/// declared on [0, 1] scores the same as its [0, 255] counterpart. Canny
/// thresholds apply to the Sobel gradient magnitude divided by max_value.
struct FsimConfig {
  int scales = 3;
  /// Per-scale exponents; empty means uniform 1/scales.
  std::vector<double> scale_weights;

  double luminance_stabilizer = 1e-4;
  double contrast_stabilizer = 1e-4;
  double structure_stabilizer = 0.5e-4;

  double canny_low = 0.1;
  double canny_high = 0.3;
  double canny_sigma = 1.0;

  std::vector<double> gabor_orientations = {0.0, std::numbers::pi / 4, std::numbers::pi / 2,
                                            3 * std::numbers::pi / 4};
  std::vector<double> gabor_wavelengths = {4.0, 8.0};
  int gabor_kernel_size = 15;
  double gabor_sigma = 3.0;
  double gabor_gamma = 0.5;

  /// Gaussian window for local luminance/contrast statistics.
  int window_size = 11;
  double window_sigma = 1.5;

  /// Throws InvalidConfig naming the first violated constraint.
  void validate() const;

  /// scale_weights, or the uniform default when unset.
  std::vector<double> effective_weights() const;

  friend bool operator==(const FsimConfig&, const FsimConfig&) = default;
};

/// Strict parse: unknown keys are rejected with their name.
FsimConfig fsim_config_from_json(const nlohmann::json& j, const std::string& where = "fsim");
nlohmann::json to_json(const FsimConfig& cfg);

}  // namespace agsynth
