#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"

#include "degradekit/image.hpp"

namespace degradekit {

// Deterministic per-image degradation signature: spectral energy layout plus
// a few spatial statistics. column_autocorr is the stripe-noise indicator --
// the lag-1 vertical autocorrelation of the image minus its row-blurred
// self, near 1 for column-constant patterns and near 0 for white noise.
struct SignatureVector {
  std::vector<double> radial_profile;     // spectral energy per radius bin
  std::array<double, 3> band_ratios{};    // low/mid/high fractions, sum 1
  double mean = 0.0;
  double variance = 0.0;
  double gradient_energy = 0.0;           // mean squared Sobel magnitude
  double column_autocorr = 0.0;
};

struct SignatureOptions {
  int radial_bins = 32;
  double low_cut = 1.0 / 6.0;   // normalized-frequency radius
  double mid_cut = 1.0 / 3.0;
  int row_blur_radius = 2;      // 5-tap row blur for the stripe residual
};

SignatureVector signature(const Image& gray, const SignatureOptions& opts = {});

nlohmann::json signature_to_json(const SignatureVector& sig);
std::string signature_csv_header(int radial_bins);
std::string signature_csv_row(const SignatureVector& sig);

// Opaque numeric embedding; dimension is whatever the producer used.
struct Embedding {
  std::vector<double> values;
};

// lambda1 * sum((a-b)^2) + lambda2 * (1 - cos(a,b)). The squared term is a
// plain sum over dimensions, not a mean. Defaults carry the 1:3 weighting.
// Throws std::invalid_argument on dimension mismatch and std::domain_error
// when either norm is zero (cosine undefined).
double alignment_loss(const Embedding& vis, const Embedding& text,
                      double lambda1 = 1.0, double lambda2 = 3.0);

}  // namespace degradekit
