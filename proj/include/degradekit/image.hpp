#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace degradekit {

// H x W x C raster, row-major, channel-interleaved. Values live nominally in
// [0,1]; every clamping operation says so in its contract. C is 1 (gray) or
// 3 (RGB). Instances are plain values: copy freely, never mutated in place by
// library calls.
struct Image {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int c = 1);
  static Image constant(int h, int w, int c, double v);

  double& at(int y, int x, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int y, int x, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * width;
  }
  bool same_shape(const Image& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
  bool is_gray() const { return channels == 1; }
  bool is_rgb() const { return channels == 3; }
};

// Dense 2-D kernel; both dimensions must be odd for convolve2d.
struct Kernel {
  int rows = 0;
  int cols = 0;
  std::vector<double> weights;

  Kernel() = default;
  Kernel(int r, int c);
  static Kernel identity();

  double& at(int r, int c) {
    return weights[static_cast<std::size_t>(r) * cols + c];
  }
  double at(int r, int c) const {
    return weights[static_cast<std::size_t>(r) * cols + c];
  }
  double sum() const;
};

// BT.601 full-range: Y = .299R + .587G + .114B, Cb = .5 + (B-Y)*.564,
// Cr = .5 + (R-Y)*.713. ycbcr_to_rgb inverts it to within 1e-5.
Image rgb_to_ycbcr(const Image& rgb);
Image ycbcr_to_rgb(const Image& ycbcr);

// Gray passthrough; RGB reduced with the BT.601 luma weights.
Image luminance(const Image& img);

// True convolution (kernel index-reversed), replicate-edge padding,
// same-size output, applied per channel.
Image convolve2d(const Image& img, const Kernel& kernel);

// Gradient magnitude |Gx| + |Gy| with the standard 3x3 Sobel kernels,
// replicate edges. Single-channel input only.
Image sobel(const Image& gray);

// Signed Sobel components, for places where orientation matters.
void sobel_xy(const Image& gray, Image& gx, Image& gy);

// Box mean with replicate edges; radius counts pixels on either side of the
// center, per axis.
Image box_blur(const Image& img, int radius_x, int radius_y);

// Seeded i.i.d. N(0, (sigma/scale)^2) field. sigma is quoted on the
// 0..scale intensity scale (default 255, matching 8-bit conventions); the
// stored field is already divided down. Not clamped.
Image gaussian_field(int h, int w, double sigma, std::uint64_t seed,
                     double scale = 255.0);

Image clamp01(Image img);

}  // namespace degradekit
