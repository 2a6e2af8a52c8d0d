#include "agsynth/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agsynth/error.hpp"

namespace agsynth {
namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::kInvalidDimension,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
}

}  // namespace

RgbImage::RgbImage(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(pixel_count() * 3, 0);
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != pixel_count() * 3)
    throw Error(ErrorCode::kInvalidDimension,
                "pixel buffer holds " + std::to_string(pixels_.size()) + " bytes, expected " +
                    std::to_string(pixel_count() * 3));
}

ImagePlane::ImagePlane(int width, int height, std::vector<double> values, double max_value)
    : width_(width), height_(height), max_value_(max_value), values_(std::move(values)) {
  check_dims(width, height);
  if (!(max_value > 0.0) || !std::isfinite(max_value))
    throw Error(ErrorCode::kInvalidDimension, "max_value must be positive and finite");
  if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw Error(ErrorCode::kInvalidDimension,
                "value count " + std::to_string(values_.size()) + " does not match " +
                    std::to_string(width) + "x" + std::to_string(height));
  for (double v : values_) {
    if (!(v >= 0.0 && v <= max_value))
      throw Error(ErrorCode::kValueOutOfRange,
                  "plane value " + std::to_string(v) + " outside [0, " +
                      std::to_string(max_value) + "]");
  }
}

ImagePlane ImagePlane::filled(int width, int height, double value, double max_value) {
  check_dims(width, height);
  return ImagePlane(width, height,
                    std::vector<double>(static_cast<std::size_t>(width) * height, value),
                    max_value);
}

ImagePlane to_grayscale(const RgbImage& img) {
  std::vector<double> out(img.pixel_count());
  auto px = img.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Integer weights in thousandths make the half-up rounding exact.
    unsigned r = px[3 * i], g = px[3 * i + 1], b = px[3 * i + 2];
    out[i] = static_cast<double>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return ImagePlane(img.width(), img.height(), std::move(out), 255.0);
}

ImagePlane resize_bilinear(const ImagePlane& plane, int target_w, int target_h) {
  if (target_w < 1 || target_h < 1)
    throw Error(ErrorCode::kInvalidDimension,
                "resize target must be positive, got " + std::to_string(target_w) + "x" +
                    std::to_string(target_h));
  if (target_w == plane.width() && target_h == plane.height()) return plane;

  const int sw = plane.width();
  const int sh = plane.height();
  const double sx_scale = static_cast<double>(sw) / target_w;
  const double sy_scale = static_cast<double>(sh) / target_h;

  struct Tap {
    int i0, i1;
    double f;
  };
  auto taps = [](int n_out, int n_in, double scale) {
    std::vector<Tap> t(n_out);
    for (int o = 0; o < n_out; ++o) {
      double s = std::clamp((o + 0.5) * scale - 0.5, 0.0, n_in - 1.0);
      int i0 = static_cast<int>(s);
      t[o] = {i0, std::min(i0 + 1, n_in - 1), s - i0};
    }
    return t;
  };
  const auto xt = taps(target_w, sw, sx_scale);
  const auto yt = taps(target_h, sh, sy_scale);

  const double hi = plane.max_value();
  std::vector<double> out(static_cast<std::size_t>(target_w) * target_h);
  for (int y = 0; y < target_h; ++y) {
    const Tap& ty = yt[y];
    for (int x = 0; x < target_w; ++x) {
      const Tap& tx = xt[x];
      double top = plane.at(tx.i0, ty.i0) * (1 - tx.f) + plane.at(tx.i1, ty.i0) * tx.f;
      double bot = plane.at(tx.i0, ty.i1) * (1 - tx.f) + plane.at(tx.i1, ty.i1) * tx.f;
      out[static_cast<std::size_t>(y) * target_w + x] =
          std::clamp(top * (1 - ty.f) + bot * ty.f, 0.0, hi);
    }
  }
  return ImagePlane(target_w, target_h, std::move(out), hi);
}

ImagePlane mean_pool_2x2(const ImagePlane& plane) {
  if (plane.width() < 2 || plane.height() < 2)
    throw Error(ErrorCode::kTooSmall, "mean pooling needs at least 2x2 input");
  const int w = plane.width() / 2;
  const int h = plane.height() / 2;
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out[static_cast<std::size_t>(y) * w + x] =
          (plane.at(2 * x, 2 * y) + plane.at(2 * x + 1, 2 * y) + plane.at(2 * x, 2 * y + 1) +
           plane.at(2 * x + 1, 2 * y + 1)) *
          0.25;
  return ImagePlane(w, h, std::move(out), plane.max_value());
}

ImagePlane preprocess_for_metrics(const RgbImage& img) {
  return resize_bilinear(to_grayscale(img), kMetricSide, kMetricSide);
}

}  // namespace agsynth
