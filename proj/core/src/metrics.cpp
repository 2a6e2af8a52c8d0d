#include "agsynth/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "agsynth/error.hpp"
#include "agsynth/filter.hpp"

namespace agsynth {
namespace {

void check_comparable(const ImagePlane& o, const ImagePlane& g) {
  if (!o.same_shape(g))
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(o.width()) + "x" + std::to_string(o.height()) + " vs " +
                    std::to_string(g.width()) + "x" + std::to_string(g.height()));
  if (o.max_value() != g.max_value())
    throw Error(ErrorCode::kDimensionMismatch, "planes declare different max_value");
}

struct LocalStats {
  RealPlane mean;
  RealPlane variance;
};

LocalStats local_stats(const ImagePlane& p, std::span<const double> taps) {
  std::vector<double> sq(p.size());
  auto v = p.values();
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = v[i] * v[i];
  LocalStats s{correlate_separable(v, p.width(), p.height(), taps),
               correlate_separable(sq, p.width(), p.height(), taps)};
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double m = s.mean.data[i];
    s.variance.data[i] = std::max(s.variance.data[i] - m * m, 0.0);
  }
  return s;
}

FsimScale compare_scale(const ImagePlane& o, const ImagePlane& g, const GaborBank& bank,
                        const FsimConfig& cfg, std::span<const double> window) {
  const double m2 = o.max_value() * o.max_value();
  const double cl = cfg.luminance_stabilizer * m2;
  const double cc = cfg.contrast_stabilizer * m2;
  const double cs = cfg.structure_stabilizer * m2;

  const FeatureStack fo = extract_features(o, bank, cfg);
  const FeatureStack fg = extract_features(g, bank, cfg);
  const RealPlane mag_o = fo.combined_magnitude();
  const RealPlane mag_g = fg.combined_magnitude();
  const LocalStats so = local_stats(o, window);
  const LocalStats sg = local_stats(g, window);

  const std::size_t n = o.size();
  const auto& eo = fo.edge_map.mask;
  const auto& eg = fg.edge_map.mask;
  const bool edges = std::any_of(eo.begin(), eo.end(), [](auto e) { return e != 0; }) ||
                     std::any_of(eg.begin(), eg.end(), [](auto e) { return e != 0; });

  double w_sum = 0, wl = 0, wc = 0, ws = 0;
  double ul = 0, uc = 0, us = 0;
  std::size_t support = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (edges && !eo[i] && !eg[i]) continue;
    const double mo = so.mean.data[i], mg = sg.mean.data[i];
    const double vo = so.variance.data[i], vg = sg.variance.data[i];
    const double fa = mag_o.data[i], fb = mag_g.data[i];

    const double l = (2 * mo * mg + cl) / (mo * mo + mg * mg + cl);
    const double c = (2 * std::sqrt(vo) * std::sqrt(vg) + cc) / (vo + vg + cc);
    const double s = (2 * fa * fb + cs) / (fa * fa + fb * fb + cs);
    const double w = std::max(fa, fb);
    w_sum += w;
    wl += w * l;
    wc += w * c;
    ws += w * s;
    ul += l;
    uc += c;
    us += s;
    ++support;
  }

  FsimScale out;
  out.support = support;
  out.edge_support = edges;
  if (w_sum > 0) {
    out.luminance = wl / w_sum;
    out.contrast = wc / w_sum;
    out.structure = ws / w_sum;
  } else {
    // Featureless planes: every weight is zero, pool uniformly.
    const double k = static_cast<double>(support);
    out.luminance = ul / k;
    out.contrast = uc / k;
    out.structure = us / k;
  }
  return out;
}

}  // namespace

double mse(const ImagePlane& o, const ImagePlane& g) {
  check_comparable(o, g);
  auto a = o.values();
  auto b = g.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double psnr_from_mse(double mse_value, double max_value) {
  if (mse_value == 0.0) return kInfinitePsnr;
  return 10.0 * std::log10(max_value * max_value / mse_value);
}

double psnr(const ImagePlane& o, const ImagePlane& g) {
  return psnr_from_mse(mse(o, g), o.max_value());
}

FsimResult fsim_detailed(const ImagePlane& o, const ImagePlane& g, const FsimConfig& cfg) {
  check_comparable(o, g);
  cfg.validate();
  const std::vector<double> alpha = cfg.effective_weights();
  const int coarsest_w = o.width() >> (cfg.scales - 1);
  const int coarsest_h = o.height() >> (cfg.scales - 1);
  if (coarsest_w <= cfg.gabor_kernel_size || coarsest_h <= cfg.gabor_kernel_size)
    throw Error(ErrorCode::kTooSmall,
                "planes too small for " + std::to_string(cfg.scales) +
                    " scales with Gabor kernel size " + std::to_string(cfg.gabor_kernel_size));

  const GaborBank bank = build_gabor_bank(cfg);
  const std::vector<double> window = gaussian_taps(cfg.window_sigma, cfg.window_size / 2);

  FsimResult result;
  ImagePlane po = o;
  ImagePlane pg = g;
  double score = 1.0;
  for (int k = 0; k < cfg.scales; ++k) {
    if (k > 0) {
      po = mean_pool_2x2(po);
      pg = mean_pool_2x2(pg);
    }
    FsimScale sc = compare_scale(po, pg, bank, cfg, window);
    assert(sc.luminance > 0 && sc.luminance <= 1 + 1e-12);
    assert(sc.contrast > 0 && sc.contrast <= 1 + 1e-12);
    assert(sc.structure > 0 && sc.structure <= 1 + 1e-12);
    score *= std::pow(sc.luminance * sc.contrast * sc.structure, alpha[k]);
    result.scales.push_back(sc);
  }
  result.score = std::clamp(score, 0.0, 1.0);
  return result;
}

double fsim(const ImagePlane& o, const ImagePlane& g, const FsimConfig& cfg) {
  return fsim_detailed(o, g, cfg).score;
}

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::kTextToImage: return "text_to_image";
    case Method::kImageVariation: return "image_variation";
    case Method::kGroundTruth: return "ground_truth";
  }
  return "unknown";
}

std::optional<Method> method_from_string(std::string_view s) noexcept {
  if (s == "text_to_image") return Method::kTextToImage;
  if (s == "image_variation") return Method::kImageVariation;
  if (s == "ground_truth") return Method::kGroundTruth;
  return std::nullopt;
}

MetricRecord score_pair(const ImagePlane& reference, const ImagePlane& candidate,
                        const FsimConfig& cfg, std::string category, Method method,
                        std::string image_id) {
  MetricRecord r;
  r.category = std::move(category);
  r.method = method;
  r.image_id = std::move(image_id);
  r.mse = mse(reference, candidate);
  r.psnr = psnr_from_mse(r.mse, reference.max_value());
  r.fsim = fsim(reference, candidate, cfg);
  return r;
}

}  // namespace agsynth
