#include "degradekit/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "degradekit/rng.hpp"

namespace degradekit {

Image::Image(int h, int w, int c) : height(h), width(w), channels(c) {
  if (h < 1 || w < 1) throw std::invalid_argument("image dimensions must be >= 1");
  if (c != 1 && c != 3) throw std::invalid_argument("image channels must be 1 or 3");
  data.assign(static_cast<std::size_t>(h) * w * c, 0.0);
}

Image Image::constant(int h, int w, int c, double v) {
  Image img(h, w, c);
  std::fill(img.data.begin(), img.data.end(), v);
  return img;
}

Kernel::Kernel(int r, int c) : rows(r), cols(c) {
  if (r < 1 || c < 1) throw std::invalid_argument("kernel dimensions must be >= 1");
  weights.assign(static_cast<std::size_t>(r) * c, 0.0);
}

Kernel Kernel::identity() {
  Kernel k(1, 1);
  k.weights[0] = 1.0;
  return k;
}

double Kernel::sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

Image rgb_to_ycbcr(const Image& rgb) {
  if (!rgb.is_rgb()) throw std::invalid_argument("rgb_to_ycbcr expects an RGB image");
  Image out(rgb.height, rgb.width, 3);
  const std::size_t n = rgb.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rgb.data[3 * i];
    const double g = rgb.data[3 * i + 1];
    const double b = rgb.data[3 * i + 2];
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    out.data[3 * i] = y;
    out.data[3 * i + 1] = 0.5 + (b - y) * 0.564;
    out.data[3 * i + 2] = 0.5 + (r - y) * 0.713;
  }
  return out;
}

Image ycbcr_to_rgb(const Image& ycbcr) {
  if (!ycbcr.is_rgb()) throw std::invalid_argument("ycbcr_to_rgb expects a 3-channel image");
  Image out(ycbcr.height, ycbcr.width, 3);
  const std::size_t n = ycbcr.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double y = ycbcr.data[3 * i];
    const double cb = ycbcr.data[3 * i + 1];
    const double cr = ycbcr.data[3 * i + 2];
    const double b = y + (cb - 0.5) / 0.564;
    const double r = y + (cr - 0.5) / 0.713;
    const double g = (y - 0.299 * r - 0.114 * b) / 0.587;
    out.data[3 * i] = r;
    out.data[3 * i + 1] = g;
    out.data[3 * i + 2] = b;
  }
  return out;
}

Image luminance(const Image& img) {
  if (img.is_gray()) return img;
  Image out(img.height, img.width, 1);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    out.data[i] = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] +
                  0.114 * img.data[3 * i + 2];
  }
  return out;
}

namespace {

inline int clamp_index(int v, int hi) {
  return v < 0 ? 0 : (v > hi ? hi : v);
}

}  // namespace

Image convolve2d(const Image& img, const Kernel& kernel) {
  if (kernel.rows % 2 == 0 || kernel.cols % 2 == 0)
    throw std::invalid_argument("convolve2d requires odd kernel dimensions");
  const int ry = kernel.rows / 2;
  const int rx = kernel.cols / 2;
  Image out(img.height, img.width, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int ky = -ry; ky <= ry; ++ky) {
          const int sy = clamp_index(y - ky, img.height - 1);
          for (int kx = -rx; kx <= rx; ++kx) {
            const int sx = clamp_index(x - kx, img.width - 1);
            acc += kernel.at(ky + ry, kx + rx) * img.at(sy, sx, c);
          }
        }
        out.at(y, x, c) = acc;
      }
    }
  }
  return out;
}

void sobel_xy(const Image& gray, Image& gx, Image& gy) {
  if (!gray.is_gray()) throw std::invalid_argument("sobel expects a single-channel image");
  const int h = gray.height, w = gray.width;
  // Separable form: difference along one axis, [1 2 1] smoothing along the
  // other. Keeps constant regions at exactly zero.
  Image dx(h, w, 1), dy(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      dx.at(y, x) = gray.at(y, clamp_index(x + 1, w - 1)) -
                    gray.at(y, clamp_index(x - 1, w - 1));
      dy.at(y, x) = gray.at(clamp_index(y + 1, h - 1), x) -
                    gray.at(clamp_index(y - 1, h - 1), x);
    }
  }
  gx = Image(h, w, 1);
  gy = Image(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int ym = clamp_index(y - 1, h - 1), yp = clamp_index(y + 1, h - 1);
      const int xm = clamp_index(x - 1, w - 1), xp = clamp_index(x + 1, w - 1);
      gx.at(y, x) = dx.at(ym, x) + 2.0 * dx.at(y, x) + dx.at(yp, x);
      gy.at(y, x) = dy.at(y, xm) + 2.0 * dy.at(y, x) + dy.at(y, xp);
    }
  }
}

Image sobel(const Image& gray) {
  Image gx, gy;
  sobel_xy(gray, gx, gy);
  Image out(gray.height, gray.width, 1);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = std::abs(gx.data[i]) + std::abs(gy.data[i]);
  return out;
}

Image box_blur(const Image& img, int radius_x, int radius_y) {
  if (radius_x < 0 || radius_y < 0)
    throw std::invalid_argument("box_blur radius must be nonnegative");
  const double inv = 1.0 / ((2 * radius_x + 1) * (2 * radius_y + 1));
  Image out(img.height, img.width, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int ky = -radius_y; ky <= radius_y; ++ky) {
          const int sy = clamp_index(y + ky, img.height - 1);
          for (int kx = -radius_x; kx <= radius_x; ++kx) {
            acc += img.at(sy, clamp_index(x + kx, img.width - 1), c);
          }
        }
        out.at(y, x, c) = acc * inv;
      }
    }
  }
  return out;
}

Image gaussian_field(int h, int w, double sigma, std::uint64_t seed,
                     double scale) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_field sigma must be >= 0");
  if (scale <= 0.0) throw std::invalid_argument("gaussian_field scale must be > 0");
  Image out(h, w, 1);
  const double s = sigma / scale;
  SeededRng rng(seed);
  for (double& v : out.data) v = s * rng.gaussian();
  return out;
}

Image clamp01(Image img) {
  for (double& v : img.data) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  return img;
}

}  // namespace degradekit
