#include "agsynth/stub_backend.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>

#include "agsynth/error.hpp"
#include "agsynth/filter.hpp"
#include "agsynth/image_io.hpp"

namespace agsynth {
namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class SplitMix {
 public:
  explicit SplitMix(std::uint64_t s) : state_(s) {}
  std::uint64_t next() { return mix64(state_++ * 0x9E3779B97F4A7C15ull); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

struct Color {
  double r, g, b;
};

struct Palette {
  const char* keyword;
  Color fruit;
  Color foliage;
  Color ground;
  double min_radius, max_radius;  // fraction of side
  int min_count, max_count;
};

constexpr std::array<Palette, 7> kPalettes{{
    {"strawberr", {200, 30, 40}, {50, 120, 45}, {45, 45, 50}, 0.025, 0.045, 10, 18},
    {"mango", {235, 175, 50}, {40, 100, 40}, {110, 90, 60}, 0.05, 0.08, 5, 10},
    {"apple", {190, 35, 35}, {60, 125, 50}, {100, 120, 60}, 0.035, 0.06, 8, 16},
    {"avocado", {55, 85, 35}, {45, 95, 40}, {95, 80, 55}, 0.04, 0.065, 6, 12},
    {"rockmelon", {205, 180, 120}, {70, 130, 55}, {120, 95, 65}, 0.08, 0.13, 3, 6},
    {"orange", {240, 140, 25}, {40, 105, 45}, {105, 90, 60}, 0.04, 0.065, 8, 15},
    {"generic", {170, 120, 60}, {60, 115, 50}, {105, 90, 60}, 0.04, 0.07, 6, 12},
}};

const Palette& palette_for(const std::string& crop) {
  for (const Palette& p : kPalettes)
    if (crop == p.keyword) return p;
  return kPalettes.back();
}

// Lattice value noise in [0, 1] with smoothstep interpolation.
double value_noise(double x, double y, std::uint64_t seed) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
  auto lattice = [seed](std::int64_t a, std::int64_t b) {
    const std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(a) * 0x100000001B3ull ^
                                               static_cast<std::uint64_t>(b)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  };
  double tx = x - fx, ty = y - fy;
  tx = tx * tx * (3 - 2 * tx);
  ty = ty * ty * (3 - 2 * ty);
  const double top = lattice(ix, iy) * (1 - tx) + lattice(ix + 1, iy) * tx;
  const double bot = lattice(ix, iy + 1) * (1 - tx) + lattice(ix + 1, iy + 1) * tx;
  return top * (1 - ty) + bot * ty;
}

double layered_noise(double x, double y, std::uint64_t seed) {
  return 0.55 * value_noise(x / 64.0, y / 64.0, seed) +
         0.30 * value_noise(x / 16.0, y / 16.0, seed + 1) +
         0.15 * value_noise(x / 4.0, y / 4.0, seed + 2);
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

RgbImage render_scene(const Palette& pal, int side, std::uint64_t seed) {
  SplitMix rng(seed);
  const double scale = side / 1024.0;
  const double horizon = side * rng.range(0.18, 0.32);
  const std::uint64_t noise_seed = rng.next();
  std::vector<double> buf(static_cast<std::size_t>(side) * side * 3);

  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double n = layered_noise(x / scale, y / scale, noise_seed);
      Color c;
      if (y < horizon) {
        const double t = y / horizon;
        c = {150 + 80 * n - 20 * t, 185 + 50 * n - 15 * t, 225 + 25 * n};
      } else {
        const double depth = (y - horizon) / (side - horizon);
        const double shade = 0.55 + 0.75 * n;
        const double g = std::clamp((depth - 0.65) / 0.35, 0.0, 1.0);
        c = {(pal.foliage.r * (1 - g) + pal.ground.r * g) * shade,
             (pal.foliage.g * (1 - g) + pal.ground.g * g) * shade,
             (pal.foliage.b * (1 - g) + pal.ground.b * g) * shade};
      }
      double* px = &buf[3 * (static_cast<std::size_t>(y) * side + x)];
      px[0] = c.r, px[1] = c.g, px[2] = c.b;
    }
  }

  const int fruit = pal.min_count + rng.below(pal.max_count - pal.min_count + 1);
  for (int f = 0; f < fruit; ++f) {
    const double r = side * rng.range(pal.min_radius, pal.max_radius);
    const double aspect = rng.range(0.85, 1.15);
    const double cx = rng.range(0, side);
    const double cy = rng.range(horizon + r * 0.5, side - r * 0.25);
    const Color tint{pal.fruit.r + rng.range(-15, 15), pal.fruit.g + rng.range(-15, 15),
                     pal.fruit.b + rng.range(-15, 15)};
    const double rx = r * aspect, ry = r / aspect;
    const int x0 = std::max(0, static_cast<int>(cx - rx)), x1 = std::min(side - 1, static_cast<int>(cx + rx) + 1);
    const int y0 = std::max(0, static_cast<int>(cy - ry)), y1 = std::min(side - 1, static_cast<int>(cy + ry) + 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
        const double d2 = dx * dx + dy * dy;
        if (d2 >= 1.0) continue;
        // Soft radial shading with an upper-left highlight.
        const double hx = dx + 0.35, hy = dy + 0.35;
        const double light = 1.15 - 0.45 * d2 + 0.25 * std::max(0.0, 0.3 - (hx * hx + hy * hy));
        double* px = &buf[3 * (static_cast<std::size_t>(y) * side + x)];
        px[0] = tint.r * light, px[1] = tint.g * light, px[2] = tint.b * light;
      }
    }
  }

  std::vector<std::uint8_t> out(buf.size());
  std::transform(buf.begin(), buf.end(), out.begin(), to_byte);
  return RgbImage(side, side, std::move(out));
}

double mean_luma(const RgbImage& img) {
  auto px = img.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < img.pixel_count(); ++i)
    sum += 0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2];
  return sum / static_cast<double>(img.pixel_count());
}

RgbImage jitter(const RgbImage& src, int side, std::uint64_t seed, double source_luma) {
  SplitMix rng(seed);
  const double angle = rng.range(-StubBackend::kMaxRotationDegrees,
                                 StubBackend::kMaxRotationDegrees) *
                       std::numbers::pi / 180.0;
  const double zoom = 1.0 + rng.range(-StubBackend::kMaxZoom, StubBackend::kMaxZoom);
  const double sx_shift = rng.range(-StubBackend::kMaxShift, StubBackend::kMaxShift);
  const double sy_shift = rng.range(-StubBackend::kMaxShift, StubBackend::kMaxShift);
  double bright = rng.range(StubBackend::kMinBrightnessShift, StubBackend::kMaxBrightnessShift);
  const bool negative = rng.unit() < 0.5;
  if (source_luma > 200 || (negative && source_luma >= 55)) bright = -bright;

  const double ca = std::cos(angle), sa = std::sin(angle);
  const int w = src.width(), h = src.height();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(side) * side * 3);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double u = (x + 0.5) / side - 0.5, v = (y + 0.5) / side - 0.5;
      const double pu = (ca * u + sa * v) / zoom + sx_shift;
      const double pv = (-sa * u + ca * v) / zoom + sy_shift;
      const double fx = (pu + 0.5) * w - 0.5, fy = (pv + 0.5) * h - 0.5;
      const int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
      const double ax = fx - ix, ay = fy - iy;
      const int xa = reflect101(ix, w), xb = reflect101(ix + 1, w);
      const int ya = reflect101(iy, h), yb = reflect101(iy + 1, h);
      std::uint8_t* dst = &out[3 * (static_cast<std::size_t>(y) * side + x)];
      for (int ch = 0; ch < 3; ++ch) {
        const double top = src.at(xa, ya)[ch] * (1 - ax) + src.at(xb, ya)[ch] * ax;
        const double bot = src.at(xa, yb)[ch] * (1 - ax) + src.at(xb, yb)[ch] * ax;
        dst[ch] = to_byte(top * (1 - ay) + bot * ay + bright);
      }
    }
  }
  return RgbImage(side, side, std::move(out));
}

std::uint64_t job_seed(std::uint64_t seed, const GenerationJob& job) {
  const std::string key = cache_key(job);
  return mix64(seed ^ std::stoull(key.substr(0, 16), nullptr, 16));
}

}  // namespace

std::string StubBackend::detect_crop(const std::string& prompt) {
  std::string lower(prompt);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::size_t best = std::string::npos;
  std::string crop = "generic";
  for (const Palette& p : kPalettes) {
    const std::size_t at = lower.find(p.keyword);
    if (at != std::string::npos && at < best && std::string(p.keyword) != "generic") {
      best = at;
      crop = p.keyword;
    }
  }
  if (crop == "generic" && (lower.find("cantaloupe") != std::string::npos ||
                            lower.find("melon") != std::string::npos))
    crop = "rockmelon";
  return crop;
}

std::vector<RgbImage> StubBackend::generate(const GenerationJob& job) {
  job.validate();
  const std::uint64_t base = job_seed(seed_, job);
  std::vector<RgbImage> images;
  images.reserve(job.count);
  if (job.kind == JobKind::kTextToImage) {
    const Palette& pal = palette_for(detect_crop(job.prompt));
    for (int i = 0; i < job.count; ++i)
      images.push_back(render_scene(pal, job.size, mix64(base + static_cast<std::uint64_t>(i))));
  } else {
    RgbImage src = [&] {
      try {
        return decode_image(job.source_image, "variation source");
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidSourceImage, e.what());
      }
    }();
    const double luma = mean_luma(src);
    for (int i = 0; i < job.count; ++i)
      images.push_back(jitter(src, job.size, mix64(base + static_cast<std::uint64_t>(i)), luma));
  }
  return images;
}

}  // namespace agsynth
