#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agsynth/fsim_config.hpp"
#include "agsynth/gabor.hpp"
#include "agsynth/image.hpp"

namespace agsynth {

/// PSNR returned for identical planes.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// Mean squared per-pixel difference. Throws DimensionMismatch when shape or
/// max_value differ.
double mse(const ImagePlane& o, const ImagePlane& g);

/// 10 log10(MAX^2 / MSE) in dB with MAX = o.max_value(); kInfinitePsnr when
/// MSE is zero.
double psnr(const ImagePlane& o, const ImagePlane& g);

double psnr_from_mse(double mse_value, double max_value);

struct FsimScale {
  double luminance = 1.0;
  double contrast = 1.0;
  double structure = 1.0;
  std::size_t support = 0;    // pixels pooled over
  bool edge_support = false;  // false = no edges in either plane, full plane used
};

struct FsimResult {
  double score = 1.0;
  std::vector<FsimScale> scales;
};

/// Feature similarity of two equally sized planes.
///
/// Scale 1 is the input; each further scale is a 2x2 mean-pooled copy of
/// the previous grayscale planes with features re-extracted. At every scale
/// the luminance and contrast comparisons use Gaussian-windowed local
/// statistics, the structure comparison uses the combined Gabor magnitudes,
/// and all three are pooled over the Canny edge union weighted by
/// max(F_o, F_g). The score is prod_k (l_k c_k s_k)^alpha_k clamped to [0, 1].
///
/// Throws DimensionMismatch, InvalidConfig, or TooSmall (coarsest scale not
/// larger than the Gabor kernel).
FsimResult fsim_detailed(const ImagePlane& o, const ImagePlane& g, const FsimConfig& cfg);

double fsim(const ImagePlane& o, const ImagePlane& g, const FsimConfig& cfg = {});

enum class Method { kTextToImage, kImageVariation, kGroundTruth };

std::string_view to_string(Method m) noexcept;
std::optional<Method> method_from_string(std::string_view s) noexcept;

/// One scored image: generated (or ground truth, in the self-check lane)
/// against its category's ground truth.
struct MetricRecord {
  std::string category;
  Method method = Method::kTextToImage;
  std::string image_id;
  double mse = 0.0;
  double psnr = kInfinitePsnr;
  double fsim = 1.0;

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

/// Scores a preprocessed candidate against a preprocessed reference.
MetricRecord score_pair(const ImagePlane& reference, const ImagePlane& candidate,
                        const FsimConfig& cfg, std::string category, Method method,
                        std::string image_id);

}  // namespace agsynth
