// Prints oracle-derived expected values in a form that can be pasted into
// tests/data/*.inc. Run manually; not part of ctest.
#include <cstdio>

#include "reference.hpp"
#include "support/fixtures.hpp"

int main() {
  std::printf("// FSIM reference values for fixtures::oracle_pair(i), i = 0..%d\n",
              fixtures::kOraclePairs - 1);
  std::printf("inline constexpr double kFrozenFsim[] = {\n");
  for (int i = 0; i < fixtures::kOraclePairs; ++i) {
    auto [a, b] = fixtures::oracle_pair(i);
    reference::Plane pa{a.width, a.height, a.v};
    reference::Plane pb{b.width, b.height, b.v};
    std::printf("    %.17g,\n", reference::fsim(pa, pb, reference::FsimParams{}));
    std::fflush(stdout);
  }
  std::printf("};\n");

  reference::Plane step{32, 32, std::vector<double>(32 * 32)};
  for (int y = 0; y < 32; ++y)
    for (int x = 16; x < 32; ++x) step.v[y * 32 + x] = 255.0;
  auto edges = reference::canny(step, 1.0, 0.1, 0.3, 255.0);
  std::printf("// step edge columns per row:\n//");
  for (int y = 0; y < 32; ++y) {
    std::printf(" [");
    for (int x = 0; x < 32; ++x)
      if (edges[y * 32 + x]) std::printf("%d", x);
    std::printf("]");
  }
  std::printf("\n");

  reference::Plane tiny{2, 2, {0, 255, 255, 0}};
  auto up = reference::bilinear(tiny, 4, 4);
  std::printf("// bilinear 2x2 -> 4x4:\n");
  for (int y = 0; y < 4; ++y) {
    std::printf("//");
    for (int x = 0; x < 4; ++x) std::printf(" %.17g", up.v[y * 4 + x]);
    std::printf("\n");
  }
}
