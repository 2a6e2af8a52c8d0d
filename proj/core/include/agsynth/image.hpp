#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace agsynth {

/// 8-bit RGB raster, row-major, channels interleaved as R,G,B.
class RgbImage {
 public:
  /// Black image. Throws InvalidDimension unless width, height >= 1.
  RgbImage(int width, int height);
  /// Takes ownership of `pixels`, which must hold width * height * 3 bytes.
  RgbImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  const std::uint8_t* at(int x, int y) const noexcept {
    return pixels_.data() + 3 * (static_cast<std::size_t>(y) * width_ + x);
  }
  std::uint8_t* at(int x, int y) noexcept {
    return pixels_.data() + 3 * (static_cast<std::size_t>(y) * width_ + x);
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// Single-channel real-valued image with a declared dynamic range
/// [0, max_value]. Immutable once built; the range is checked on
/// construction.
class ImagePlane {
 public:
  ImagePlane(int width, int height, std::vector<double> values, double max_value = 255.0);

  static ImagePlane filled(int width, int height, double value, double max_value = 255.0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double max_value() const noexcept { return max_value_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double at(int x, int y) const noexcept {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }

  bool same_shape(const ImagePlane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  int width_;
  int height_;
  double max_value_;
  std::vector<double> values_;
};

/// Side length every metric input is resampled to.
inline constexpr int kMetricSide = 256;

/// BT.601 luma, quantized half-up to an integer level in [0, 255].
ImagePlane to_grayscale(const RgbImage& img);

/// Bilinear resampling with half-pixel centres. Output is clamped to the
/// input's [0, max_value]. Throws InvalidDimension on a zero target.
ImagePlane resize_bilinear(const ImagePlane& plane, int target_w, int target_h);

/// 2x2 box average (odd trailing row/column dropped). Throws TooSmall when
/// either side is below 2.
ImagePlane mean_pool_2x2(const ImagePlane& plane);

/// grayscale -> kMetricSide x kMetricSide, the preprocessing applied to
/// both ground truth and generated images before scoring.
ImagePlane preprocess_for_metrics(const RgbImage& img);

}  // namespace agsynth
