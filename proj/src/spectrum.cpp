#include "degradekit/spectrum.hpp"

#include <cmath>
#include <stdexcept>

namespace degradekit {

namespace {

// exp(-2*pi*i*k/n) for k in [0, n). conjugate=true flips the sign for the
// inverse transform.
std::vector<std::complex<double>> twiddle_table(int n, bool conjugate) {
  std::vector<std::complex<double>> t(n);
  const double sign = conjugate ? 1.0 : -1.0;
  for (int k = 0; k < n; ++k) {
    const double a = sign * 2.0 * M_PI * static_cast<double>(k) / n;
    t[k] = {std::cos(a), std::sin(a)};
  }
  return t;
}

// Row-column decomposition of the full 2-D transform; O(H*W*(H+W)).
std::vector<std::complex<double>> transform2d(
    const std::vector<std::complex<double>>& in, int h, int w,
    bool conjugate) {
  const auto tw_w = twiddle_table(w, conjugate);
  const auto tw_h = twiddle_table(h, conjugate);
  std::vector<std::complex<double>> rows(in.size());
  for (int y = 0; y < h; ++y) {
    for (int u = 0; u < w; ++u) {
      std::complex<double> acc = 0.0;
      for (int x = 0; x < w; ++x) {
        acc += in[static_cast<std::size_t>(y) * w + x] *
               tw_w[static_cast<std::size_t>(u) * x % w];
      }
      rows[static_cast<std::size_t>(y) * w + u] = acc;
    }
  }
  std::vector<std::complex<double>> out(in.size());
  for (int u = 0; u < w; ++u) {
    for (int v = 0; v < h; ++v) {
      std::complex<double> acc = 0.0;
      for (int y = 0; y < h; ++y) {
        acc += rows[static_cast<std::size_t>(y) * w + u] *
               tw_h[static_cast<std::size_t>(v) * y % h];
      }
      out[static_cast<std::size_t>(v) * w + u] = acc;
    }
  }
  return out;
}

}  // namespace

Spectrum dft2(const Image& gray) {
  if (!gray.is_gray()) throw std::invalid_argument("dft2 expects a single-channel image");
  Spectrum spec;
  spec.height = gray.height;
  spec.width = gray.width;
  std::vector<std::complex<double>> in(gray.data.size());
  for (std::size_t i = 0; i < gray.data.size(); ++i) in[i] = gray.data[i];
  spec.coefficients = transform2d(in, gray.height, gray.width, false);
  return spec;
}

Image idft2(const Spectrum& spec) {
  const auto back =
      transform2d(spec.coefficients, spec.height, spec.width, true);
  Image out(spec.height, spec.width, 1);
  const double norm = 1.0 / (static_cast<double>(spec.height) * spec.width);
  for (std::size_t i = 0; i < back.size(); ++i) out.data[i] = back[i].real() * norm;
  return out;
}

Image log_magnitude(const Spectrum& spec, bool centered) {
  const int h = spec.height, w = spec.width;
  Image out(h, w, 1);
  double maxv = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int v = centered ? (y + h - h / 2) % h : y;
      const int u = centered ? (x + w - w / 2) % w : x;
      const double m = std::log1p(std::abs(spec.at(v, u)));
      out.at(y, x) = m;
      if (m > maxv) maxv = m;
    }
  }
  if (maxv > 0.0)
    for (double& v : out.data) v /= maxv;
  return out;
}

}  // namespace degradekit
