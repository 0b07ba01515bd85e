#include "degradekit/signatures.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "degradekit/spectrum.hpp"

namespace degradekit {

SignatureVector signature(const Image& gray, const SignatureOptions& opts) {
  if (!gray.is_gray())
    throw std::invalid_argument("signature expects a single-channel image");
  if (opts.radial_bins < 1)
    throw std::invalid_argument("radial_bins must be >= 1");

  SignatureVector sig;
  sig.radial_profile.assign(opts.radial_bins, 0.0);

  const Spectrum spec = dft2(gray);
  const int h = spec.height, w = spec.width;
  const double max_radius = 0.5 * std::sqrt(2.0);
  double band[3] = {0.0, 0.0, 0.0};
  for (int v = 0; v < h; ++v) {
    const double fv = static_cast<double>(std::min(v, h - v)) / h;
    for (int u = 0; u < w; ++u) {
      const double fu = static_cast<double>(std::min(u, w - u)) / w;
      const double r = std::hypot(fu, fv);
      const double e = std::norm(spec.at(v, u));
      int bin = static_cast<int>(r / max_radius * opts.radial_bins);
      if (bin >= opts.radial_bins) bin = opts.radial_bins - 1;
      sig.radial_profile[bin] += e;
      band[r < opts.low_cut ? 0 : (r < opts.mid_cut ? 1 : 2)] += e;
    }
  }
  const double total = band[0] + band[1] + band[2];
  if (total > 0.0) {
    for (int i = 0; i < 3; ++i) sig.band_ratios[i] = band[i] / total;
  } else {
    sig.band_ratios = {1.0, 0.0, 0.0};  // empty spectrum counts as all-DC
  }

  double sum = 0.0;
  for (double v : gray.data) sum += v;
  const double n = static_cast<double>(gray.data.size());
  sig.mean = sum / n;
  double var = 0.0;
  for (double v : gray.data) var += (v - sig.mean) * (v - sig.mean);
  sig.variance = var / n;

  const Image grad = sobel(gray);
  double ge = 0.0;
  for (double v : grad.data) ge += v * v;
  sig.gradient_energy = ge / n;

  // Stripe indicator: remove slow horizontal structure with a row blur, then
  // measure lag-1 correlation straight down the columns.
  const Image residual_base = box_blur(gray, opts.row_blur_radius, 0);
  Image residual(gray.height, gray.width, 1);
  for (std::size_t i = 0; i < gray.data.size(); ++i)
    residual.data[i] = gray.data[i] - residual_base.data[i];
  double num = 0.0, den = 0.0;
  for (int x = 0; x < gray.width; ++x) {
    for (int y = 0; y + 1 < gray.height; ++y)
      num += residual.at(y, x) * residual.at(y + 1, x);
    for (int y = 0; y < gray.height; ++y)
      den += residual.at(y, x) * residual.at(y, x);
  }
  sig.column_autocorr = den > 0.0 ? num / den : 0.0;

  return sig;
}

nlohmann::json signature_to_json(const SignatureVector& sig) {
  return nlohmann::json{
      {"radial_profile", sig.radial_profile},
      {"band_ratios", sig.band_ratios},
      {"mean", sig.mean},
      {"variance", sig.variance},
      {"gradient_energy", sig.gradient_energy},
      {"column_autocorr", sig.column_autocorr},
  };
}

std::string signature_csv_header(int radial_bins) {
  std::ostringstream os;
  os << "mean,variance,gradient_energy,column_autocorr,band_low,band_mid,band_high";
  for (int i = 0; i < radial_bins; ++i) os << ",radial_" << i;
  return os.str();
}

std::string signature_csv_row(const SignatureVector& sig) {
  std::ostringstream os;
  const auto num = [](double v) { return nlohmann::json(v).dump(); };
  os << num(sig.mean) << ',' << num(sig.variance) << ','
     << num(sig.gradient_energy) << ',' << num(sig.column_autocorr);
  for (double b : sig.band_ratios) os << ',' << num(b);
  for (double r : sig.radial_profile) os << ',' << num(r);
  return os.str();
}

double alignment_loss(const Embedding& vis, const Embedding& text,
                      double lambda1, double lambda2) {
  if (vis.values.size() != text.values.size())
    throw std::invalid_argument("embedding dimensions must match");
  if (vis.values.empty())
    throw std::invalid_argument("embeddings must be nonempty");

  double sq = 0.0, dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < vis.values.size(); ++i) {
    const double a = vis.values[i];
    const double b = text.values[i];
    if (!std::isfinite(a) || !std::isfinite(b))
      throw std::invalid_argument("embeddings must be finite");
    sq += (a - b) * (a - b);
    dot += a * b;
    na += a * a;
    nb += b * b;
  }
  if (na == 0.0 || nb == 0.0)
    throw std::domain_error("cosine undefined for a zero-norm embedding");
  if (sq == 0.0) return 0.0;  // bitwise-equal embeddings: both terms vanish
  double cosine = dot / (std::sqrt(na) * std::sqrt(nb));
  cosine = cosine > 1.0 ? 1.0 : (cosine < -1.0 ? -1.0 : cosine);
  return lambda1 * sq + lambda2 * (1.0 - cosine);
}

}  // namespace degradekit
