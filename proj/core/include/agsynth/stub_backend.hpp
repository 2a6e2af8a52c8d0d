#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agsynth/generation.hpp"

namespace agsynth {

/// Deterministic offline generator; output is a pure function of
/// (seed, job).
///
/// Text jobs render a procedural field scene: layered value-noise sky,
/// foliage and ground, overlaid with shaded ellipse "fruit" whose palette
/// and size follow the first crop keyword found in the prompt.
///
/// Variation jobs resample the source onto the requested size through a
/// seeded similarity transform and add a uniform brightness offset, within
/// the bounds below.
class StubBackend final : public ImageBackend {
 public:
  static constexpr double kMaxRotationDegrees = 4.0;
  static constexpr double kMaxZoom = 0.04;         // relative
  static constexpr double kMaxShift = 0.03;        // fraction of the side
  static constexpr double kMinBrightnessShift = 2.0;
  static constexpr double kMaxBrightnessShift = 6.0;

  explicit StubBackend(std::uint64_t seed) : seed_(seed) {}

  std::string id() const override { return "stub:" + std::to_string(seed_); }
  std::vector<RgbImage> generate(const GenerationJob& job) override;

  /// The crop keyword that selected the palette, or "generic".
  static std::string detect_crop(const std::string& prompt);

 private:
  std::uint64_t seed_;
};

}  // namespace agsynth
