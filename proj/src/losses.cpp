#include "degradekit/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace degradekit {

namespace {

void require_same_extent(const Image& a, const Image& b) {
  if (a.height != b.height || a.width != b.width)
    throw std::invalid_argument("image dimensions must match");
}

}  // namespace

double intensity_loss(const Image& fused, const Image& ir, const Image& vi,
                      IntensityDomain domain) {
  require_same_extent(fused, ir);
  require_same_extent(fused, vi);
  if (domain == IntensityDomain::per_channel) {
    if (fused.channels != vi.channels)
      throw std::invalid_argument(
          "per-channel intensity loss needs matching fused/vi channels");
    const Image a = luminance(ir);
    double acc = 0.0;
    for (int y = 0; y < fused.height; ++y)
      for (int x = 0; x < fused.width; ++x)
        for (int c = 0; c < fused.channels; ++c)
          acc += std::abs(fused.at(y, x, c) -
                          std::max(a.at(y, x), vi.at(y, x, c)));
    return acc / static_cast<double>(fused.data.size());
  }
  const Image f = luminance(fused);
  const Image a = luminance(ir);
  const Image b = luminance(vi);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.data.size(); ++i)
    acc += std::abs(f.data[i] - std::max(a.data[i], b.data[i]));
  return acc / static_cast<double>(f.data.size());
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

std::array<double, kSsimWindow> ssim_taps() {
  std::array<double, kSsimWindow> g{};
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    g[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable valid-region gaussian filtering: output is
// (H - 10) x (W - 10).
Image gauss_valid(const Image& img) {
  const auto taps = ssim_taps();
  const int oh = img.height - kSsimWindow + 1;
  const int ow = img.width - kSsimWindow + 1;
  Image horiz(img.height, ow, 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += taps[k] * img.at(y, x + k);
      horiz.at(y, x) = acc;
    }
  }
  Image out(oh, ow, 1);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += taps[k] * horiz.at(y + k, x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

}  // namespace

double ssim_index(const Image& a, const Image& b) {
  require_same_extent(a, b);
  if (a.height < kSsimWindow || a.width < kSsimWindow)
    throw std::invalid_argument("images must be at least 11x11 for SSIM");
  const Image x = luminance(a);
  const Image y = luminance(b);

  Image xx(x.height, x.width, 1), yy(x.height, x.width, 1), xy(x.height, x.width, 1);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    xx.data[i] = x.data[i] * x.data[i];
    yy.data[i] = y.data[i] * y.data[i];
    xy.data[i] = x.data[i] * y.data[i];
  }
  const Image mu_x = gauss_valid(x);
  const Image mu_y = gauss_valid(y);
  const Image e_xx = gauss_valid(xx);
  const Image e_yy = gauss_valid(yy);
  const Image e_xy = gauss_valid(xy);

  double acc = 0.0;
  for (std::size_t i = 0; i < mu_x.data.size(); ++i) {
    const double mx = mu_x.data[i], my = mu_y.data[i];
    const double vx = e_xx.data[i] - mx * mx;
    const double vy = e_yy.data[i] - my * my;
    const double cxy = e_xy.data[i] - mx * my;
    acc += ((2.0 * mx * my + kSsimC1) * (2.0 * cxy + kSsimC2)) /
           ((mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2));
  }
  return acc / static_cast<double>(mu_x.data.size());
}

double ssim_loss(const Image& fused, const Image& ir, const Image& vi) {
  return 2.0 - ssim_index(fused, ir) - ssim_index(fused, vi);
}

double gradient_loss(const Image& fused, const Image& ir, const Image& vi) {
  require_same_extent(fused, ir);
  require_same_extent(fused, vi);
  const Image gf = sobel(luminance(fused));
  const Image ga = sobel(luminance(ir));
  const Image gb = sobel(luminance(vi));
  double acc = 0.0;
  for (std::size_t i = 0; i < gf.data.size(); ++i)
    acc += std::abs(gf.data[i] - std::max(ga.data[i], gb.data[i]));
  return acc / static_cast<double>(gf.data.size());
}

double color_loss(const Image& fused, const Image& vi) {
  if (!fused.is_rgb() || !vi.is_rgb())
    throw std::invalid_argument("color_loss expects RGB images");
  require_same_extent(fused, vi);
  const Image a = rgb_to_ycbcr(fused);
  const Image b = rgb_to_ycbcr(vi);
  double acc = 0.0;
  const std::size_t n = a.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    acc += std::abs(a.data[3 * i + 1] - b.data[3 * i + 1]);  // Cb
    acc += std::abs(a.data[3 * i + 2] - b.data[3 * i + 2]);  // Cr
  }
  return acc / static_cast<double>(n);
}

LossReport total_loss(const Image& fused, const Image& ir, const Image& vi,
                      const LossWeights& w) {
  if (w.intensity < 0.0 || w.ssim < 0.0 || w.gradient < 0.0 || w.color < 0.0)
    throw std::invalid_argument("loss weights must be nonnegative");
  LossReport r;
  r.l_int = intensity_loss(fused, ir, vi);
  r.l_ssim = ssim_loss(fused, ir, vi);
  r.l_grad = gradient_loss(fused, ir, vi);
  r.l_color = (fused.is_rgb() && vi.is_rgb()) ? color_loss(fused, vi) : 0.0;
  r.total = w.intensity * r.l_int + w.ssim * r.l_ssim + w.gradient * r.l_grad +
            w.color * r.l_color;
  return r;
}

double entropy_metric(const Image& gray) {
  const Image g = luminance(gray);
  std::array<std::size_t, 256> hist{};
  for (double v : g.data) {
    const double c = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    hist[static_cast<std::size_t>(std::lround(c * 255.0))]++;
  }
  const double n = static_cast<double>(g.data.size());
  double h = 0.0;
  for (std::size_t count : hist) {
    if (count == 0) continue;
    const double p = count / n;
    h -= p * std::log2(p);
  }
  return h;
}

double sd_metric(const Image& img) {
  const Image g = luminance(img);
  double mean = 0.0;
  for (double v : g.data) mean += v * 255.0;
  mean /= static_cast<double>(g.data.size());
  double var = 0.0;
  for (double v : g.data) {
    const double d = v * 255.0 - mean;
    var += d * d;
  }
  return std::sqrt(var / static_cast<double>(g.data.size()));
}

namespace {

// Edge strength and ratio-folded orientation per pixel.
void edge_maps(const Image& gray, Image& strength, Image& angle) {
  Image gx, gy;
  sobel_xy(gray, gx, gy);
  strength = Image(gray.height, gray.width, 1);
  angle = Image(gray.height, gray.width, 1);
  for (std::size_t i = 0; i < gray.data.size(); ++i) {
    strength.data[i] = std::hypot(gx.data[i], gy.data[i]);
    angle.data[i] = gx.data[i] == 0.0 ? M_PI / 2.0
                                      : std::atan(gy.data[i] / gx.data[i]);
  }
}

constexpr double kQabfGammaG = 1.0, kQabfKg = -10.0, kQabfSigmaG = 0.5;
constexpr double kQabfGammaA = 1.0, kQabfKa = -20.0, kQabfSigmaA = 0.75;

// Per-pixel preservation of one source's edge into the fused image. An
// exactly preserved edge (equal strength and orientation) scores 1; the
// sigmoid families grade everything else.
double edge_preservation(double gs, double as, double gf, double af) {
  if (gs == gf && as == af) return 1.0;
  const double ratio = gs > gf ? (gs > 0.0 ? gf / gs : 0.0)
                               : (gf > 0.0 ? gs / gf : 0.0);
  const double align = 1.0 - std::abs(as - af) / (M_PI / 2.0);
  const double qg = kQabfGammaG / (1.0 + std::exp(kQabfKg * (ratio - kQabfSigmaG)));
  const double qa = kQabfGammaA / (1.0 + std::exp(kQabfKa * (align - kQabfSigmaA)));
  return qg * qa;
}

}  // namespace

double qabf_metric(const Image& fused, const Image& ir, const Image& vi) {
  require_same_extent(fused, ir);
  require_same_extent(fused, vi);
  Image gf, af, ga, aa, gb, ab;
  edge_maps(luminance(fused), gf, af);
  edge_maps(luminance(ir), ga, aa);
  edge_maps(luminance(vi), gb, ab);

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < gf.data.size(); ++i) {
    const double qaf = edge_preservation(ga.data[i], aa.data[i], gf.data[i], af.data[i]);
    const double qbf = edge_preservation(gb.data[i], ab.data[i], gf.data[i], af.data[i]);
    num += qaf * ga.data[i] + qbf * gb.data[i];
    den += ga.data[i] + gb.data[i];
  }
  if (den == 0.0) return 0.0;
  const double q = num / den;
  return q < 0.0 ? 0.0 : (q > 1.0 ? 1.0 : q);
}

}  // namespace degradekit
