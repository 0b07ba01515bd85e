#pragma once

#include <complex>
#include <vector>

#include "degradekit/image.hpp"

namespace degradekit {

// Unnormalized forward 2-D DFT of a gray image.
// coefficients[v*width + u] = sum_{y,x} img(y,x) * exp(-2*pi*i*(u*x/W + v*y/H))
// with the DC term at (0,0). Satisfies Parseval in the form
// sum |x|^2 = (1/(H*W)) * sum |X|^2.
struct Spectrum {
  int height = 0;
  int width = 0;
  std::vector<std::complex<double>> coefficients;

  std::complex<double> at(int v, int u) const {
    return coefficients[static_cast<std::size_t>(v) * width + u];
  }
};

Spectrum dft2(const Image& gray);

// Inverse transform; carries the 1/(H*W) factor of the unnormalized-forward
// convention. Returns the real part.
Image idft2(const Spectrum& spec);

// log(1 + |X|) view scaled to [0,1]; centered moves DC to (H/2, W/2).
Image log_magnitude(const Spectrum& spec, bool centered = true);

}  // namespace degradekit
