#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "degradekit/image.hpp"

namespace degradekit {

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// 8-bit PNG in, [0,1] doubles out (v / 255). Palette, alpha and 16-bit
// inputs are converted on the fly; grayscale stays single-channel,
// everything else decodes to RGB.
Image read_png(const std::string& path);

// round(v * 255) with clamping. Gray or RGB only.
void write_png(const std::string& path, const Image& img);

// The exact pixel payload write_png would emit, for bit-exact comparisons.
std::vector<std::uint8_t> quantize_to_bytes(const Image& img);

}  // namespace degradekit
