// Deterministic test images. Only the raw mt19937_64 output stream is used
// (its sequence is fixed by the standard); no <random> distributions, whose
// algorithms are implementation-defined.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fixtures {

struct Gray {
  int width = 0;
  int height = 0;
  std::vector<double> v;
};

inline double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double normal(std::mt19937_64& rng) {
  // Box-Muller, cosine branch only.
  double u1 = unit(rng);
  double u2 = unit(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Integer-valued white noise in [0, 255].
inline Gray uniform_noise(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Gray g{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
  for (double& c : g.v) c = static_cast<double>(rng() >> 56);
  return g;
}

// Integer-valued smooth value noise (two octaves, 32 px and 8 px cells).
inline Gray smooth_noise(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto lattice = [&](int cell) {
    int gw = w / cell + 2;
    int gh = h / cell + 2;
    std::vector<double> lat(static_cast<std::size_t>(gw) * gh);
    for (double& c : lat) c = unit(rng);
    return std::pair{lat, gw};
  };
  auto [coarse, cw] = lattice(32);
  auto [fine, fw] = lattice(8);
  auto eval = [](const std::vector<double>& lat, int gw, int cell, int x, int y) {
    int cx = x / cell, cy = y / cell;
    double fx = (x % cell + 0.5) / cell, fy = (y % cell + 0.5) / cell;
    fx = fx * fx * (3 - 2 * fx);
    fy = fy * fy * (3 - 2 * fy);
    double a = lat[cy * gw + cx], b = lat[cy * gw + cx + 1];
    double c = lat[(cy + 1) * gw + cx], d = lat[(cy + 1) * gw + cx + 1];
    return (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
  };
  Gray g{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = 0.7 * eval(coarse, cw, 32, x, y) + 0.3 * eval(fine, fw, 8, x, y);
      g.v[y * w + x] = std::round(255.0 * v);
    }
  return g;
}

// A field-like scene: sky/ground gradient, leafy texture, bright round
// "fruit" blobs with soft shading. Integer-valued.
inline Gray natural(int w, int h, std::uint64_t seed) {
  Gray base = smooth_noise(w, h, seed * 7919 + 13);
  std::mt19937_64 rng(seed);
  struct Blob {
    double cx, cy, r, level;
  };
  std::vector<Blob> blobs;
  int count = 5 + static_cast<int>(rng() % 6);
  for (int i = 0; i < count; ++i)
    blobs.push_back({unit(rng) * w, 0.35 * h + unit(rng) * 0.6 * h,
                     (0.04 + 0.06 * unit(rng)) * w, 150 + 90 * unit(rng)});
  Gray g{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double t = static_cast<double>(y) / h;
      double v = t < 0.3 ? 200 - 60 * t : 70 + 0.45 * base.v[y * w + x];
      v += 12.0 * std::sin(0.35 * x + 0.2 * y) * (t >= 0.3);
      for (const Blob& b : blobs) {
        double dx = x - b.cx, dy = y - b.cy;
        double d2 = (dx * dx + dy * dy) / (b.r * b.r);
        if (d2 < 1.0) v = b.level - 40.0 * d2;
      }
      g.v[y * w + x] = std::round(std::clamp(v, 0.0, 255.0));
    }
  }
  return g;
}

// Clamped additive Gaussian noise; values stay real.
inline Gray add_gaussian(const Gray& in, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Gray g = in;
  for (double& c : g.v) c = std::clamp(c + sigma * normal(rng), 0.0, 255.0);
  return g;
}

inline Gray invert(const Gray& in) {
  Gray g = in;
  for (double& c : g.v) c = 255.0 - c;
  return g;
}

// The twenty fixed-seed 256x256 pairs used for FSIM oracle equivalence:
// even indices are white-noise pairs, odd indices smooth-noise pairs,
// with seeds (2i+1, 2i+2).
inline std::pair<Gray, Gray> oracle_pair(int i) {
  std::uint64_t a = 2 * static_cast<std::uint64_t>(i) + 1;
  std::uint64_t b = a + 1;
  if (i % 2 == 0) return {uniform_noise(256, 256, a), uniform_noise(256, 256, b)};
  return {smooth_noise(256, 256, a), smooth_noise(256, 256, b)};
}

constexpr int kOraclePairs = 20;

}  // namespace fixtures
