#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "agsynth/canny.hpp"
#include "agsynth/error.hpp"
#include "agsynth/filter.hpp"
#include "agsynth/gabor.hpp"
#include "reference.hpp"
#include "support/fixtures.hpp"

namespace agsynth {
namespace {

ImagePlane to_plane(const fixtures::Gray& g) { return ImagePlane(g.width, g.height, g.v); }
reference::Plane to_ref(const fixtures::Gray& g) { return {g.width, g.height, g.v}; }

ImagePlane step_edge() {
  std::vector<double> v(32 * 32, 0.0);
  for (int y = 0; y < 32; ++y)
    for (int x = 16; x < 32; ++x) v[y * 32 + x] = 255.0;
  return ImagePlane(32, 32, v);
}

TEST(Reflect101, MirrorsWithoutRepeatingBorder) {
  EXPECT_EQ(reflect101(-1, 5), 1);
  EXPECT_EQ(reflect101(-2, 5), 2);
  EXPECT_EQ(reflect101(5, 5), 3);
  EXPECT_EQ(reflect101(6, 5), 2);
  EXPECT_EQ(reflect101(0, 1), 0);
  EXPECT_EQ(reflect101(-7, 3), 1);
}

TEST(Correlate, SeparableMatchesDenseOuterProduct) {
  auto taps = gaussian_taps(1.5, 5);
  double sum = 0;
  for (double t : taps) sum += t;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  std::vector<double> dense(taps.size() * taps.size());
  for (std::size_t y = 0; y < taps.size(); ++y)
    for (std::size_t x = 0; x < taps.size(); ++x) dense[y * taps.size() + x] = taps[y] * taps[x];
  auto g = fixtures::uniform_noise(23, 17, 4);
  RealPlane a = correlate_separable(g.v, 23, 17, taps);
  RealPlane b = correlate_dense(g.v, 23, 17, dense, static_cast<int>(taps.size()));
  for (std::size_t i = 0; i < a.data.size(); ++i) EXPECT_NEAR(a.data[i], b.data[i], 1e-9);
}

TEST(Canny, StepEdgeMatchesFrozenOracle) {
  EdgeMap e = canny_edges(step_edge(), FsimConfig{});
  // Reference output: rows 1..30 carry one edge pixel in column 15; the
  // frame rows carry none. Columns 15 and 16 have equal gradient magnitude
  // in exact arithmetic, so rounding may move the survivor to column 16.
  std::vector<int> column(32, -1);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      if (e.at(x, y)) {
        EXPECT_EQ(column[y], -1) << "second edge pixel in row " << y;
        column[y] = x;
      }
  EXPECT_EQ(column[0], -1);
  EXPECT_EQ(column[31], -1);
  for (int y = 1; y <= 30; ++y) {
    EXPECT_TRUE(column[y] == 15 || column[y] == 16) << "row " << y << " column " << column[y];
    EXPECT_EQ(column[y], column[1]) << "edge must be straight";
  }
  EXPECT_EQ(e.count(), 30u);
}

TEST(Canny, ConstantPlaneHasNoEdges) {
  EXPECT_EQ(canny_edges(ImagePlane::filled(40, 30, 99.0), FsimConfig{}).count(), 0u);
}

TEST(Canny, AgreesWithReferenceOnNaturalScenes) {
  FsimConfig cfg;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto g = fixtures::natural(96, 80, seed);
    EdgeMap e = canny_edges(to_plane(g), cfg);
    auto ref = reference::canny(to_ref(g), cfg.canny_sigma, cfg.canny_low, cfg.canny_high, 255.0);
    std::size_t diff = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) diff += (ref[i] != 0) != (e.mask[i] != 0);
    EXPECT_EQ(diff, 0u) << "seed " << seed;
    EXPECT_GT(e.count(), 0u);
  }
}

TEST(Canny, RejectsBadThresholdsAndTinyPlanes) {
  FsimConfig cfg;
  cfg.canny_low = 0.5;
  cfg.canny_high = 0.2;
  try {
    canny_edges(step_edge(), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }
  try {
    canny_edges(ImagePlane::filled(2, 2, 0.0), FsimConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooSmall);
  }
}

TEST(Gabor, KernelMatchesReferenceAndIsNormalized) {
  for (double theta : {0.0, std::numbers::pi / 4, 1.2}) {
    for (double lambda : {4.0, 8.0}) {
      RealPlane k = make_gabor_kernel(theta, lambda, 15, 3.0, 0.5);
      auto ref = reference::gabor_kernel(theta, lambda, 15, 3.0, 0.5);
      double sum = 0, sq = 0;
      for (std::size_t i = 0; i < ref.size(); ++i) {
        EXPECT_NEAR(k.data[i], ref[i], 1e-12);
        sum += k.data[i];
        sq += k.data[i] * k.data[i];
      }
      EXPECT_NEAR(sum, 0.0, 1e-12);
      EXPECT_NEAR(sq, 1.0, 1e-12);
      // Cosine phase makes every kernel point-symmetric.
      for (int y = 0; y < 15; ++y)
        for (int x = 0; x < 15; ++x) EXPECT_NEAR(k.at(x, y), k.at(14 - x, 14 - y), 1e-15);
    }
  }
}

TEST(Gabor, BankIsOrientationMajor) {
  GaborBank bank = build_gabor_bank(FsimConfig{});
  ASSERT_EQ(bank.kernels.size(), 8u);
  RealPlane k = make_gabor_kernel(bank.orientations[2], bank.wavelengths[1], 15, 3.0, 0.5);
  EXPECT_EQ(bank.kernel(2, 1).data, k.data);
  EXPECT_EQ(&bank.kernel(2, 1), &bank.kernels[5]);
}

TEST(Gabor, ResponsesMatchReference) {
  auto g = fixtures::smooth_noise(40, 36, 8);
  GaborBank bank = build_gabor_bank(FsimConfig{});
  auto responses = gabor_responses(to_plane(g), bank);
  ASSERT_EQ(responses.size(), bank.kernels.size());
  for (std::size_t k = 0; k < bank.kernels.size(); ++k) {
    auto ref = reference::abs_response(to_ref(g), bank.kernels[k].data, 15);
    for (std::size_t i = 0; i < ref.v.size(); ++i)
      ASSERT_NEAR(responses[k].data[i], ref.v[i], 1e-9) << "kernel " << k << " pixel " << i;
  }
}

TEST(Gabor, GratingSelectsMatchingKernel) {
  // Stripes varying along x with period 8 should excite theta = 0,
  // wavelength = 8 most strongly at the centre; rotating the grating by 90
  // degrees should move the peak to theta = pi/2.
  FsimConfig cfg;
  GaborBank bank = build_gabor_bank(cfg);
  for (int vertical = 0; vertical < 2; ++vertical) {
    std::vector<double> v(64 * 64);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        int t = vertical ? y : x;
        v[y * 64 + x] = 127.5 + 127.5 * std::cos(2 * std::numbers::pi * t / 8.0);
      }
    auto responses = gabor_responses(ImagePlane(64, 64, v), bank);
    std::size_t best = 0;
    for (std::size_t k = 1; k < responses.size(); ++k)
      if (responses[k].at(32, 32) > responses[best].at(32, 32)) best = k;
    const std::size_t expected_orientation = vertical ? 2 : 0;
    EXPECT_EQ(best, expected_orientation * bank.wavelengths.size() + 1);
  }
}

TEST(Gabor, TooSmallPlaneIsRejected) {
  GaborBank bank = build_gabor_bank(FsimConfig{});
  try {
    gabor_responses(ImagePlane::filled(15, 40, 1.0), bank);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooSmall);
  }
}

TEST(Features, CombinedMagnitudeIsPerPixelMax) {
  auto g = fixtures::natural(48, 48, 5);
  GaborBank bank = build_gabor_bank(FsimConfig{});
  FeatureStack f = extract_features(to_plane(g), bank, FsimConfig{});
  RealPlane m = f.combined_magnitude();
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    double mx = 0;
    for (const auto& r : f.responses) mx = std::max(mx, r.data[i]);
    EXPECT_EQ(m.data[i], mx);
  }
  EXPECT_EQ(f.edge_map.width, 48);
}

}  // namespace
}  // namespace agsynth
