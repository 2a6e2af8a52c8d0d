#include "agsynth/fsim_config.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "agsynth/error.hpp"
#include "json_fields.hpp"

namespace agsynth {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

}  // namespace

std::vector<double> FsimConfig::effective_weights() const {
  if (!scale_weights.empty()) return scale_weights;
  return std::vector<double>(scales > 0 ? scales : 0, 1.0 / scales);
}

void FsimConfig::validate() const {
  require(scales >= 1, "fsim.scales must be >= 1");
  if (!scale_weights.empty()) {
    require(static_cast<int>(scale_weights.size()) == scales,
            "fsim.scale_weights must have one entry per scale");
    for (double a : scale_weights) require(a >= 0.0, "fsim.scale_weights must be non-negative");
    const double sum = std::accumulate(scale_weights.begin(), scale_weights.end(), 0.0);
    require(std::fabs(sum - 1.0) < 1e-9, "fsim.scale_weights must sum to 1");
  }
  require(luminance_stabilizer > 0 && contrast_stabilizer > 0 && structure_stabilizer > 0,
          "fsim stabilizers must be positive");
  require(canny_low > 0 && canny_low < canny_high,
          "fsim.canny thresholds must satisfy 0 < canny_low < canny_high");
  require(canny_sigma > 0, "fsim.canny_sigma must be positive");
  require(!gabor_orientations.empty(), "fsim.gabor_orientations must not be empty");
  require(!gabor_wavelengths.empty(), "fsim.gabor_wavelengths must not be empty");
  for (double w : gabor_wavelengths) require(w > 0, "fsim.gabor_wavelengths must be positive");
  require(gabor_kernel_size >= 3 && gabor_kernel_size % 2 == 1,
          "fsim.gabor_kernel_size must be odd and >= 3");
  require(gabor_sigma > 0 && gabor_gamma > 0, "fsim.gabor_sigma and gabor_gamma must be positive");
  require(window_size >= 3 && window_size % 2 == 1, "fsim.window_size must be odd and >= 3");
  require(window_sigma > 0, "fsim.window_sigma must be positive");
}

FsimConfig fsim_config_from_json(const nlohmann::json& j, const std::string& where) {
  FsimConfig c;
  detail::FieldReader r(j, where);
  r.get("scales", c.scales);
  r.get("scale_weights", c.scale_weights);
  r.get("luminance_stabilizer", c.luminance_stabilizer);
  r.get("contrast_stabilizer", c.contrast_stabilizer);
  r.get("structure_stabilizer", c.structure_stabilizer);
  r.get("canny_low", c.canny_low);
  r.get("canny_high", c.canny_high);
  r.get("canny_sigma", c.canny_sigma);
  r.get("gabor_orientations", c.gabor_orientations);
  r.get("gabor_wavelengths", c.gabor_wavelengths);
  r.get("gabor_kernel_size", c.gabor_kernel_size);
  r.get("gabor_sigma", c.gabor_sigma);
  r.get("gabor_gamma", c.gabor_gamma);
  r.get("window_size", c.window_size);
  r.get("window_sigma", c.window_sigma);
  r.finish();
  c.validate();
  return c;
}

nlohmann::json to_json(const FsimConfig& c) {
  nlohmann::json j{
      {"scales", c.scales},
      {"luminance_stabilizer", c.luminance_stabilizer},
      {"contrast_stabilizer", c.contrast_stabilizer},
      {"structure_stabilizer", c.structure_stabilizer},
      {"canny_low", c.canny_low},
      {"canny_high", c.canny_high},
      {"canny_sigma", c.canny_sigma},
      {"gabor_orientations", c.gabor_orientations},
      {"gabor_wavelengths", c.gabor_wavelengths},
      {"gabor_kernel_size", c.gabor_kernel_size},
      {"gabor_sigma", c.gabor_sigma},
      {"gabor_gamma", c.gabor_gamma},
      {"window_size", c.window_size},
      {"window_sigma", c.window_sigma},
  };
  if (!c.scale_weights.empty()) j["scale_weights"] = c.scale_weights;
  return j;
}

}  // namespace agsynth
