#pragma once

#include "degradekit/image.hpp"

namespace degradekit {

// Default ratio 8 : 1 : 10 : 12 (intensity : ssim : gradient : color).
struct LossWeights {
  double intensity = 8.0;
  double ssim = 1.0;
  double gradient = 10.0;
  double color = 12.0;
};

struct LossReport {
  double l_int = 0.0;
  double l_ssim = 0.0;
  double l_grad = 0.0;
  double l_color = 0.0;
  double total = 0.0;
};

// Channel handling for the intensity target max(ir, vi) when the images mix
// gray and RGB: reduce everything to luminance (default), or broadcast the
// infrared luminance against each visible channel.
enum class IntensityDomain { luminance, per_channel };

// (1/HW) * ||fused - max(ir, vi)||_1; per_channel averages over channels as
// well and needs fused/vi channel counts to match.
double intensity_loss(const Image& fused, const Image& ir, const Image& vi,
                      IntensityDomain domain = IntensityDomain::luminance);

// Mean SSIM over valid positions of an 11x11 gaussian window (sigma 1.5),
// C1 = 0.01^2, C2 = 0.03^2 on the [0,1] scale. Luminance domain; inputs must
// be at least 11x11.
double ssim_index(const Image& a, const Image& b);

// 2 - SSIM(fused, ir) - SSIM(fused, vi).
double ssim_loss(const Image& fused, const Image& ir, const Image& vi);

// (1/HW) * ||sobel(fused) - max(sobel(ir), sobel(vi))||_1 on luminance.
double gradient_loss(const Image& fused, const Image& ir, const Image& vi);

// (1/HW) * L1 over the Cb and Cr channels after BT.601 conversion.
// Both inputs must be RGB.
double color_loss(const Image& fused, const Image& vi);

// All components plus the weighted total. The color term is 0 when either
// image is grayscale (no chroma to compare).
LossReport total_loss(const Image& fused, const Image& ir, const Image& vi,
                      const LossWeights& w = {});

// Shannon entropy in bits of the 256-bin histogram (pixels quantized to the
// 0-255 scale). Range [0, 8].
double entropy_metric(const Image& gray);

// Population standard deviation on the 0-255 scale.
double sd_metric(const Image& img);

// Edge-transfer fusion metric: per-pixel Sobel strength and orientation
// preservation from each source into the fused image, sigmoid-weighted and
// normalized by source edge strength. Result in [0, 1]; exactly preserved
// edges score 1.
double qabf_metric(const Image& fused, const Image& ir, const Image& vi);

}  // namespace degradekit
