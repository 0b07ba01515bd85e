// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "degradekit/dataset.hpp"
#include "degradekit/degrade.hpp"
#include "degradekit/fusion_math.hpp"
#include "degradekit/image.hpp"
#include "degradekit/losses.hpp"
#include "degradekit/png_io.hpp"
#include "degradekit/prompts.hpp"
#include "degradekit/signatures.hpp"
#include "degradekit/spectrum.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace degradekit;
using namespace degradekit::testing;
namespace fs = std::filesystem;

namespace {

struct Harness {
  int failures = 0;

  void run(int number, const std::string& name,
           const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool pass = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      pass = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n",
                pass ? "PASS" : "FAIL", number, name.c_str(), secs,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

DegradationSpec make_spec(Modality m, DegradationKind k, int level,
                          std::uint64_t seed = 0) {
  DegradationSpec s;
  s.modality = m;
  s.kind = k;
  s.level = level;
  s.seed = seed;
  return s;
}

// 1. Every operator at its identity parameter point reproduces the input
//    exactly (tolerance 0); must finish in under a second.
bool criterion_identity(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const Image ir = synthetic_scene_gray(0);
  const Image vi = synthetic_scene(1);

  bool ok = apply_contrast_stripe(ir, 1.0, 0.0, 5).data == ir.data;
  ok = ok && apply_noise_blur(ir, BlurKernel::identity(), 0.0, 5).data == ir.data;
  ok = ok && apply_noise_blur(vi, BlurKernel::identity(), 0.0, 5).data == vi.data;
  ok = ok && apply_illumination(vi, 1.0).data == vi.data;
  SideMaps flat_depth;
  flat_depth.depth = Image::constant(vi.height, vi.width, 1, 0.0);
  ok = ok && apply_weather(vi, 1.0, 0.6, 0.0, flat_depth).data == vi.data;
  ok = ok && gaussian_field(16, 16, 0.0, 3).data == Image(16, 16, 1).data;
  const auto [ir_out, vi_out] = compose(ir, vi, {});
  ok = ok && ir_out.data == ir.data && vi_out.data == vi.data;

  const double secs = elapsed_since(t0);
  std::ostringstream os;
  os << "exact match, " << secs << "s";
  detail = os.str();
  return ok && secs < 1.0;
}

// 2. dft2 vs the naive double sum on >= 20 random images up to 16x16,
//    per-coefficient error < 1e-6; Parseval relative error < 1e-6; < 5 s.
bool criterion_dft(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  SeededRng shape_rng(2024);
  int images = 0;
  double worst = 0.0, worst_parseval = 0.0;
  for (int trial = 0; trial < 22; ++trial) {
    const int h = 1 + static_cast<int>(shape_rng.uniform() * 16) % 16;
    const int w = 1 + static_cast<int>(shape_rng.uniform() * 16) % 16;
    const Image img = random_image(h, w, 1, 7000 + trial);
    const Spectrum spec = dft2(img);
    const auto want = naive_dft2(img);
    for (std::size_t i = 0; i < want.size(); ++i)
      worst = std::max(worst, std::abs(spec.coefficients[i] - want[i]));

    double spatial = 0.0;
    for (double v : img.data) spatial += v * v;
    double freq = 0.0;
    for (const auto& c : spec.coefficients) freq += std::norm(c);
    freq /= static_cast<double>(img.data.size());
    if (spatial > 0.0)
      worst_parseval = std::max(worst_parseval,
                                std::abs(spatial - freq) / spatial);
    ++images;
  }
  const double secs = elapsed_since(t0);
  std::ostringstream os;
  os << images << " images, max coeff err " << worst << ", parseval "
     << worst_parseval;
  detail = os.str();
  return images >= 20 && worst < 1e-6 && worst_parseval < 1e-6 && secs < 5.0;
}

// 3. Blur kernels: sum 1 +/- 1e-9 and exact 180-degree point symmetry for
//    all N in [3,12] x theta in {10,25,45,60,80}.
bool criterion_blur_kernel(std::string& detail) {
  double worst_sum = 0.0;
  for (int n = 3; n <= 12; ++n) {
    for (double theta : {10.0, 25.0, 45.0, 60.0, 80.0}) {
      const BlurKernel b = make_blur_kernel(n, theta);
      worst_sum = std::max(worst_sum, std::abs(b.kernel.sum() - 1.0));
      const int s = b.kernel.rows;
      for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
          if (b.kernel.at(i, j) != b.kernel.at(s - 1 - i, s - 1 - j)) {
            detail = "symmetry broken at n=" + std::to_string(n);
            return false;
          }
      for (double w : b.kernel.weights)
        if (w < 0.0) {
          detail = "negative weight";
          return false;
        }
    }
  }
  detail = "50 kernels, max |sum-1| = " + std::to_string(worst_sum);
  return worst_sum < 1e-9;
}

// 4. Stripe noise: pre-clamp residual variance along every column < 1e-12
//    across 50 seeded instances.
bool criterion_stripe(std::string& detail) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Image img(24, 20, 1);
    SeededRng rng(900 + seed);
    for (double& v : img.data) v = 0.3 + 0.4 * rng.uniform();  // clamp-safe
    const double alpha = 0.85;
    const Image out = apply_contrast_stripe(img, alpha, 8.0, seed);
    for (int x = 0; x < img.width; ++x) {
      double mean = 0.0;
      for (int y = 0; y < img.height; ++y)
        mean += out.at(y, x) - alpha * img.at(y, x);
      mean /= img.height;
      double var = 0.0;
      for (int y = 0; y < img.height; ++y) {
        const double d = out.at(y, x) - alpha * img.at(y, x) - mean;
        var += d * d;
      }
      worst = std::max(worst, var / img.height);
    }
  }
  detail = "max column variance " + std::to_string(worst);
  return worst < 1e-12;
}

// 5. Severity monotonicity on a fixed 10-image corpus: mean luminance
//    non-increasing in level for low_light; high-band ratio non-increasing
//    for blur; gauss noise std within 5% of sigma(level)/255 at the anchors.
bool criterion_severity(std::string& detail) {
  const std::vector<int> anchors = {1, 4, 7, 10};
  for (int idx = 0; idx < 10; ++idx) {
    const Image vi = synthetic_scene(idx, 48, 64);

    double prev_mean = 2.0;
    for (int level : anchors) {
      const ResolvedParams p =
          severity_to_params(DegradationKind::low_light, level, 0);
      const Image dark = apply_illumination(vi, p.gamma);
      const Image lum = luminance(dark);
      double mean = 0.0;
      for (double v : lum.data) mean += v;
      mean /= static_cast<double>(lum.data.size());
      if (mean > prev_mean + 1e-12) {
        detail = "low_light mean rose at level " + std::to_string(level);
        return false;
      }
      prev_mean = mean;
    }

    double prev_high = 2.0;
    for (int level : anchors) {
      const ResolvedParams p =
          severity_to_params(DegradationKind::blur, level, 33);
      const Image blurred = apply_noise_blur(
          vi, make_blur_kernel(p.blur_n, p.theta_deg), 0.0, 0);
      const SignatureVector sig = signature(luminance(blurred));
      if (sig.band_ratios[2] > prev_high + 1e-12) {
        detail = "blur high band rose at level " + std::to_string(level);
        return false;
      }
      prev_high = sig.band_ratios[2];
    }
  }

  for (int level : anchors) {
    const ResolvedParams p =
        severity_to_params(DegradationKind::gauss_noise, level, 0);
    const Image field = gaussian_field(128, 128, p.sigma, 17 + level);
    double mean = 0.0;
    for (double v : field.data) mean += v;
    mean /= static_cast<double>(field.data.size());
    double var = 0.0;
    for (double v : field.data) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(field.data.size()));
    const double target = p.sigma / 255.0;
    if (std::abs(sd - target) > 0.05 * target) {
      detail = "noise std off at level " + std::to_string(level);
      return false;
    }
  }
  detail = "10-image corpus, anchors {1,4,7,10}";
  return true;
}

// 6. Weather limits: t==1 identity; huge depth lands within 1e-3 of the
//    airlight; the scalar case 0.8*0.25 + 0.6*0.75 = 0.65 +/- 1e-9.
bool criterion_weather(std::string& detail) {
  const Image vi = synthetic_scene(2);
  SideMaps zero_depth;
  zero_depth.depth = Image::constant(vi.height, vi.width, 1, 0.0);
  if (apply_weather(vi, 1.0, 0.6, 0.0, zero_depth).data != vi.data) {
    detail = "t==1 identity failed";
    return false;
  }

  SideMaps deep;
  deep.depth = Image::constant(vi.height, vi.width, 1, 60.0);
  const Image far = apply_weather(vi, 0.5, 0.6, 0.0, deep);
  for (double v : far.data)
    if (std::abs(v - 0.6) > 1e-3) {
      detail = "deep-scene output strays from airlight";
      return false;
    }

  SideMaps quarter;
  quarter.depth = Image::constant(3, 3, 1, std::log(4.0));
  const Image scalar =
      apply_weather(Image::constant(3, 3, 3, 0.8), 1.0, 0.6, 0.0, quarter);
  for (double v : scalar.data)
    if (std::abs(v - 0.65) > 1e-9) {
      detail = "scalar case off: " + std::to_string(v);
      return false;
    }
  detail = "identity, airlight limit, scalar case";
  return true;
}

// 7. Loss suite: exact zero cases; ssim_loss vs the independent oracle
//    < 1e-6 on 20 random 16x16 triples; total respects 8:1:10:12 to 1e-9.
bool criterion_losses(std::string& detail) {
  const Image ir = synthetic_scene_gray(3, 24, 24);
  const Image vi = synthetic_scene(4, 24, 24);
  Image maxed(24, 24, 1);
  {
    const Image la = luminance(ir), lb = luminance(vi);
    for (std::size_t i = 0; i < maxed.data.size(); ++i)
      maxed.data[i] = std::max(la.data[i], lb.data[i]);
  }
  if (intensity_loss(maxed, ir, vi) != 0.0) {
    detail = "intensity zero case failed";
    return false;
  }
  if (gradient_loss(vi, vi, vi) != 0.0) {
    detail = "gradient zero case failed";
    return false;
  }
  if (color_loss(vi, vi) != 0.0) {
    detail = "color zero case failed";
    return false;
  }

  double worst_ssim = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Image f = random_image(16, 16, 1, 1000 + seed);
    const Image a = random_image(16, 16, 1, 2000 + seed);
    const Image b = random_image(16, 16, 1, 3000 + seed);
    const double got = ssim_loss(f, a, b);
    const double want = 2.0 - reference_ssim(f, a) - reference_ssim(f, b);
    worst_ssim = std::max(worst_ssim, std::abs(got - want));
  }

  const LossReport rep = total_loss(vi, ir, vi);
  const double want_total = 8.0 * rep.l_int + 1.0 * rep.l_ssim +
                            10.0 * rep.l_grad + 12.0 * rep.l_color;
  std::ostringstream os;
  os << "max ssim oracle err " << worst_ssim;
  detail = os.str();
  return worst_ssim < 1e-6 && std::abs(rep.total - want_total) < 1e-9;
}

// 8. Metrics: entropy of the uniform 256-level image = 8 +/- 1e-9; SD of the
//    half 0 / half 255 image = 127.5 +/- 1e-6; Qabf in [0,1] on 100 random
//    triples and >= 0.99 for fused == sources.
bool criterion_metrics(std::string& detail) {
  Image uniform(16, 16, 1);
  for (int i = 0; i < 256; ++i) uniform.data[i] = static_cast<double>(i) / 255.0;
  if (std::abs(entropy_metric(uniform) - 8.0) > 1e-9) {
    detail = "entropy of uniform histogram != 8";
    return false;
  }
  Image half(16, 16, 1);
  for (int i = 0; i < 256; ++i) half.data[i] = i < 128 ? 0.0 : 1.0;
  if (std::abs(sd_metric(half) - 127.5) > 1e-6) {
    detail = "sd of half/half != 127.5";
    return false;
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Image f = random_image(10, 10, 1, 4000 + seed);
    const Image a = random_image(10, 10, 1, 5000 + seed);
    const Image b = random_image(10, 10, 1, 6000 + seed);
    const double q = qabf_metric(f, a, b);
    if (q < 0.0 || q > 1.0) {
      detail = "qabf out of [0,1]";
      return false;
    }
  }
  const Image scene = synthetic_scene_gray(5, 32, 32);
  const double self = qabf_metric(scene, scene, scene);
  detail = "qabf(self) = " + std::to_string(self);
  return self >= 0.99;
}

// 9. Attention/PMM: softmax rows sum to 1 +/- 1e-6 on 100 random instances;
//    single-token case returns V exactly; modulation composition law to
//    1e-9; gamma = beta = 0 identity exact.
bool criterion_attention(std::string& detail) {
  double worst_row_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int t_q = 1 + static_cast<int>(seed % 7);
    const int t_kv = 1 + static_cast<int>((seed / 7) % 7);
    const int c = 2 + static_cast<int>(seed % 4);
    const FeatureMap q = FeatureMap::seeded(t_q, c, 10000 + seed);
    const FeatureMap k = FeatureMap::seeded(t_kv, c, 20000 + seed);
    // With all-ones values the attention output IS the softmax row sum.
    FeatureMap ones(t_kv, 1);
    for (double& v : ones.data) v = 1.0;
    const FeatureMap sums =
        scaled_softmax_attention(q, k, ones, std::sqrt(double(c)));
    for (double s : sums.data)
      worst_row_sum = std::max(worst_row_sum, std::abs(s - 1.0));
  }
  if (worst_row_sum > 1e-6) {
    detail = "softmax rows drift from 1 by " + std::to_string(worst_row_sum);
    return false;
  }

  // Single token: output must equal V bit for bit.
  const FeatureMap one = FeatureMap::seeded(1, 3, 1);
  const FeatureMap queries = FeatureMap::seeded(4, 3, 2);
  const AttentionWeights w{ModalWeights::identity(3), ModalWeights::identity(3)};
  const auto [out_ir, out_vi] = cross_attention_swap(one, queries, w);
  for (int t = 0; t < out_ir.tokens; ++t)
    for (int j = 0; j < 3; ++j)
      if (out_ir.at(t, j) != one.at(0, j)) {
        detail = "single-token attention is not exactly V";
        return false;
      }

  const FeatureMap f = FeatureMap::seeded(6, 8, 3);
  const ModulationParams zero{std::vector<double>(8, 0.0),
                              std::vector<double>(8, 0.0)};
  if (prompt_modulate(f, zero).data != f.data) {
    detail = "gamma = beta = 0 modulation is not exact identity";
    return false;
  }
  SeededRng rng(99);
  ModulationParams m1, m2, fused;
  for (int i = 0; i < 8; ++i) {
    m1.gamma.push_back(rng.gaussian());
    m1.beta.push_back(rng.gaussian());
    m2.gamma.push_back(rng.gaussian());
    m2.beta.push_back(rng.gaussian());
    fused.gamma.push_back(m1.gamma[i] + m2.gamma[i] + m1.gamma[i] * m2.gamma[i]);
    fused.beta.push_back((1.0 + m2.gamma[i]) * m1.beta[i] + m2.beta[i]);
  }
  const FeatureMap chained = prompt_modulate(prompt_modulate(f, m1), m2);
  const FeatureMap direct = prompt_modulate(f, fused);
  for (std::size_t i = 0; i < chained.data.size(); ++i)
    if (std::abs(chained.data[i] - direct.data[i]) > 1e-9) {
      detail = "modulation composition law violated";
      return false;
    }
  detail = "100 instances, exact single-token and identity cases";
  return true;
}

// 10. Prompt grammar: render -> parse identity over the full bank x 200
//     random spec sets; the canonical composite instantiation is exact.
bool criterion_prompts(std::string& detail) {
  const std::string canonical = render_prompt(
      {make_spec(Modality::visible, DegradationKind::low_light, 6),
       make_spec(Modality::infrared, DegradationKind::stripe_noise, 8)});
  if (canonical !=
      "We are performing infrared and visible image fusion. Please handle a "
      "grade-6 low-light in the visible modality, and a grade-8 stripe noise "
      "in the infrared modality.") {
    detail = "canonical composite text drifted";
    return false;
  }
  if (template_bank().size() < 100) {
    detail = "bank smaller than 100";
    return false;
  }

  SeededRng rng(777);
  const auto& registry = kind_registry();
  long round_trips = 0;
  for (int draw = 0; draw < 200; ++draw) {
    // One random spec set per draw, exercised through every compatible
    // template in the bank.
    const KindInfo& a = registry[static_cast<std::size_t>(
        rng.uniform() * registry.size()) % registry.size()];
    const KindInfo& b = registry[static_cast<std::size_t>(
        rng.uniform() * registry.size()) % registry.size()];
    const int level = 1 + static_cast<int>(rng.uniform() * 10) % 10;
    const int level_b = 1 + static_cast<int>(rng.uniform() * 10) % 10;
    std::vector<DegradationSpec> one = {make_spec(a.modality, a.kind, level)};
    std::vector<DegradationSpec> two = {
        make_spec(a.modality, a.kind, level),
        make_spec(b.modality, b.kind, level_b)};

    for (const PromptTemplate& tpl : template_bank()) {
      for (const auto* specs : {&one, &two}) {
        std::string text;
        try {
          text = render_prompt(*specs, tpl.id);
        } catch (const std::invalid_argument&) {
          continue;  // template/spec arity mismatch; not a valid input
        }
        const auto parsed = parse_prompt(text);
        if (parsed.size() != specs->size()) {
          detail = "round trip changed arity for " + tpl.id;
          return false;
        }
        for (std::size_t i = 0; i < parsed.size(); ++i) {
          if (parsed[i].modality != (*specs)[i].modality ||
              parsed[i].kind != (*specs)[i].kind ||
              parsed[i].level != (*specs)[i].level) {
            detail = "round trip mismatch for " + tpl.id + ": " + text;
            return false;
          }
        }
        ++round_trips;
      }
    }
  }
  detail = std::to_string(round_trips) + " round trips over " +
           std::to_string(template_bank().size()) + " templates";
  return round_trips > 0;
}

// 11. Dataset determinism: the 5-pair fixture yields exactly 240 records;
//     two runs hash identically; verify reports zero mismatches; < 30 s.
bool criterion_dataset(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / "degradekit_acceptance";
  const fs::path pairs_dir = root / "pairs";
  fs::remove_all(root);
  fs::create_directories(pairs_dir / "ir");
  fs::create_directories(pairs_dir / "vi");
  for (int i = 0; i < 5; ++i) {
    const std::string name = "pair" + std::to_string(i) + ".png";
    write_png((pairs_dir / "ir" / name).string(),
              synthetic_scene_gray(i, 32, 40));
    write_png((pairs_dir / "vi" / name).string(),
              synthetic_scene(50 + i, 32, 40));
  }
  const auto pairs = scan_pairs(pairs_dir.string());
  if (pairs.size() != 5) {
    detail = "fixture pair count wrong";
    return false;
  }

  SynthConfig config;
  config.levels = {1, 4, 7, 10};
  config.global_seed = 7;
  config.out_dir = (root / "out_a").string();
  const DatasetManifest a = synthesize(pairs, config);
  if (a.records.size() != 240) {
    detail = "record count " + std::to_string(a.records.size()) + " != 240";
    return false;
  }
  for (const ManifestRecord& rec : a.records)
    if (rec.skipped) {
      detail = "unexpected skip: " + rec.key;
      return false;
    }

  config.out_dir = (root / "out_b").string();
  const DatasetManifest b = synthesize(pairs, config);
  if (manifest_body_hash(a) != manifest_body_hash(b)) {
    detail = "manifest hashes differ between runs";
    return false;
  }

  const VerificationReport report = verify(a, (root / "out_a").string(), 1.0);
  if (!report.ok()) {
    detail = "verify found " + std::to_string(report.mismatched.size()) +
             " mismatches, " + std::to_string(report.missing.size()) +
             " missing";
    return false;
  }
  const double secs = elapsed_since(t0);
  std::ostringstream os;
  os << "240 records, equal hashes, verify clean, " << secs << "s";
  detail = os.str();
  return secs < 30.0;
}

// 12. Alignment loss: identical embeddings -> 0; cosine term scale
//     invariant; orthogonal unit vectors -> 5.0 under the 1:3 ratio.
bool criterion_alignment(std::string& detail) {
  SeededRng rng(31337);
  Embedding a;
  for (int i = 0; i < 512; ++i) a.values.push_back(rng.gaussian());
  if (alignment_loss(a, a) != 0.0) {
    detail = "identical embeddings scored nonzero";
    return false;
  }

  Embedding b;
  for (int i = 0; i < 512; ++i) b.values.push_back(rng.gaussian());
  const double cos_term = alignment_loss(a, b, 0.0, 1.0);
  Embedding a_scaled = a, b_scaled = b;
  for (double& v : a_scaled.values) v *= 11.5;
  for (double& v : b_scaled.values) v *= 0.037;
  if (std::abs(alignment_loss(a_scaled, b_scaled, 0.0, 1.0) - cos_term) >
      1e-9) {
    detail = "cosine term is not scale invariant";
    return false;
  }

  Embedding e1, e2;
  e1.values.assign(8, 0.0);
  e2.values.assign(8, 0.0);
  e1.values[0] = 1.0;
  e2.values[1] = 1.0;
  const double loss = alignment_loss(e1, e2, 1.0, 3.0);
  detail = "orthogonal case = " + std::to_string(loss);
  return std::abs(loss - 5.0) <= 1e-12;
}

}  // namespace

int main() {
  Harness h;
  h.run(1, "identity parameter points are exact", criterion_identity);
  h.run(2, "dft2 matches the naive transform and Parseval", criterion_dft);
  h.run(3, "blur kernels normalized and point-symmetric", criterion_blur_kernel);
  h.run(4, "stripe noise is column-constant pre-clamp", criterion_stripe);
  h.run(5, "severity mappings are monotone at the anchors", criterion_severity);
  h.run(6, "weather limits and scalar case", criterion_weather);
  h.run(7, "loss suite zero cases, ssim oracle, weighting", criterion_losses);
  h.run(8, "entropy/sd references and qabf bounds", criterion_metrics);
  h.run(9, "attention and modulation contracts", criterion_attention);
  h.run(10, "prompt render/parse round trip over the bank", criterion_prompts);
  h.run(11, "dataset synthesis is deterministic and verifiable", criterion_dataset);
  h.run(12, "alignment loss reference values", criterion_alignment);

  if (h.failures == 0) {
    std::printf("acceptance: all 12 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", h.failures);
  return 1;
}
