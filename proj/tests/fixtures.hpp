#pragma once

#include <cmath>

#include "degradekit/image.hpp"
#include "degradekit/rng.hpp"

namespace degradekit::testing {

inline Image random_image(int h, int w, int c, std::uint64_t seed) {
  Image img(h, w, c);
  SeededRng rng(seed);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

// Deterministic textured RGB scene: smooth sinusoidal base, a few blocks,
// mild noise. Values kept inside (0, 1) so clamping stays inactive.
inline Image synthetic_scene(int idx, int h = 48, int w = 64) {
  SeededRng rng(4242 + static_cast<std::uint64_t>(idx));
  const double fx = 2.0 + 3.0 * rng.uniform();
  const double fy = 1.0 + 2.0 * rng.uniform();
  const double phase = rng.uniform() * 2.0 * M_PI;
  Image img(h, w, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double base =
          0.5 + 0.18 * std::sin(2.0 * M_PI * fx * x / w + phase) *
                    std::cos(2.0 * M_PI * fy * y / h);
      img.at(y, x, 0) = base;
      img.at(y, x, 1) = base * 0.9 + 0.05;
      img.at(y, x, 2) = base * 0.8 + 0.1;
    }
  }
  for (int block = 0; block < 4; ++block) {
    const int by = static_cast<int>(rng.uniform() * (h - 8));
    const int bx = static_cast<int>(rng.uniform() * (w - 8));
    const int bh = 4 + static_cast<int>(rng.uniform() * 8);
    const int bw = 4 + static_cast<int>(rng.uniform() * 12);
    const double lift = (rng.uniform() - 0.5) * 0.5;
    for (int y = by; y < std::min(h, by + bh); ++y)
      for (int x = bx; x < std::min(w, bx + bw); ++x)
        for (int c = 0; c < 3; ++c) img.at(y, x, c) += lift;
  }
  for (double& v : img.data) {
    v += 0.03 * (rng.uniform() - 0.5);
    v = v < 0.02 ? 0.02 : (v > 0.98 ? 0.98 : v);
  }
  return img;
}

inline Image synthetic_scene_gray(int idx, int h = 48, int w = 64) {
  return luminance(synthetic_scene(idx, h, w));
}

}  // namespace degradekit::testing
