#include "degradekit/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "degradekit/rng.hpp"

namespace degradekit {

const std::vector<KindInfo>& kind_registry() {
  using K = DegradationKind;
  static const std::vector<KindInfo> registry = {
      {K::blur, Modality::visible, "blur", "blur", kStageSensor, {}},
      {K::gauss_noise, Modality::visible, "gauss_noise", "noise", kStageSensor, {}},
      {K::rain, Modality::visible, "rain", "rain", kStageWeather, {}},
      {K::haze, Modality::visible, "haze", "haze", kStageWeather, {}},
      {K::rain_haze, Modality::visible, "rain_haze", "rain and haze",
       kStageWeather, {K::rain, K::haze}},
      {K::low_light, Modality::visible, "low_light", "low-light",
       kStageIllumination, {}},
      {K::over_exposure, Modality::visible, "over_exposure", "over-exposure",
       kStageIllumination, {}},
      {K::low_light_noise, Modality::visible, "low_light_noise",
       "low-light and noise", kStageIllumination | kStageSensor,
       {K::low_light, K::gauss_noise}},
      {K::low_contrast, Modality::infrared, "low_contrast", "low-contrast",
       kStageSensor, {}},
      {K::random_noise, Modality::infrared, "random_noise", "random noise",
       kStageSensor, {}},
      {K::stripe_noise, Modality::infrared, "stripe_noise", "stripe noise",
       kStageSensor, {}},
      {K::contrast_stripe, Modality::infrared, "contrast_stripe",
       "low-contrast and stripe noise", kStageSensor,
       {K::low_contrast, K::stripe_noise}},
  };
  return registry;
}

const KindInfo& kind_info(DegradationKind kind) {
  for (const KindInfo& info : kind_registry())
    if (info.kind == kind) return info;
  throw std::logic_error("unregistered degradation kind");
}

std::optional<DegradationKind> kind_from_id(const std::string& id) {
  for (const KindInfo& info : kind_registry())
    if (info.id == id) return info.kind;
  return std::nullopt;
}

std::string modality_id(Modality m) {
  return m == Modality::infrared ? "infrared" : "visible";
}

Modality modality_from_id(const std::string& id) {
  if (id == "infrared" || id == "ir") return Modality::infrared;
  if (id == "visible" || id == "vi") return Modality::visible;
  throw std::invalid_argument("unknown modality: " + id);
}

ResolvedParams severity_to_params(DegradationKind kind, int level,
                                  std::uint64_t seed, bool jitter) {
  if (level < 1 || level > 10)
    throw std::invalid_argument("severity level must be in [1, 10]");
  SeededRng rng(seed);
  // Fixed draw order so theta/airlight do not depend on the jitter flag.
  const double jitter_u = rng.uniform();
  const double theta = rng.uniform(10.0, 80.0);
  const double airlight = rng.uniform(0.3, 0.9);

  double eff = static_cast<double>(level);
  if (jitter) eff = std::clamp(eff + (jitter_u - 0.5), 1.0, 10.0);
  const auto lerp = [eff](double lo, double hi) {
    return lo + (eff - 1.0) / 9.0 * (hi - lo);
  };

  ResolvedParams p;
  using K = DegradationKind;
  switch (kind) {
    case K::blur:
      p.blur_n = static_cast<int>(std::lround(lerp(3.0, 12.0)));
      p.theta_deg = theta;
      break;
    case K::gauss_noise:
    case K::random_noise:
      p.sigma = lerp(5.0, 20.0);
      break;
    case K::rain:
      p.rain = lerp(0.1, 1.0);
      p.airlight = airlight;
      break;
    case K::haze:
      p.beta = lerp(0.5, 2.0);
      p.airlight = airlight;
      break;
    case K::rain_haze:
      p.beta = lerp(0.5, 2.0);
      p.rain = lerp(0.1, 1.0);
      p.airlight = airlight;
      break;
    case K::low_light:
      p.gamma = lerp(1.2, 3.0);
      break;
    case K::over_exposure:
      p.gamma = lerp(0.83, 0.5);
      break;
    case K::low_light_noise:
      p.gamma = lerp(1.2, 3.0);
      p.sigma = lerp(5.0, 20.0);
      break;
    case K::low_contrast:
      p.alpha = 1.0 - 0.07 * eff;
      break;
    case K::stripe_noise:
      p.epsilon = lerp(1.0, 15.0);
      break;
    case K::contrast_stripe:
      p.alpha = 1.0 - 0.07 * eff;
      p.epsilon = lerp(1.0, 15.0);
      break;
  }
  return p;
}

namespace {

void validate_params(DegradationKind kind, const ResolvedParams& p) {
  using K = DegradationKind;
  const auto fail = [](const std::string& what) {
    throw std::invalid_argument("parameter out of range: " + what);
  };
  switch (kind) {
    case K::blur:
      if (p.blur_n < 3 || p.blur_n > 12) fail("blur_n");
      if (p.theta_deg < 10.0 || p.theta_deg > 80.0) fail("theta_deg");
      break;
    case K::gauss_noise:
    case K::random_noise:
      if (p.sigma < 5.0 || p.sigma > 20.0) fail("sigma");
      break;
    case K::rain:
      if (p.rain < 0.0) fail("rain");
      if (p.beta != 0.0 && (p.beta < 0.5 || p.beta > 2.0)) fail("beta");
      if (p.airlight < 0.3 || p.airlight > 0.9) fail("airlight");
      break;
    case K::haze:
    case K::rain_haze:
      if (p.beta < 0.5 || p.beta > 2.0) fail("beta");
      if (p.airlight < 0.3 || p.airlight > 0.9) fail("airlight");
      if (p.rain < 0.0) fail("rain");
      break;
    case K::low_light:
    case K::over_exposure:
      if (p.gamma < 0.5 || p.gamma > 3.0) fail("gamma");
      break;
    case K::low_light_noise:
      if (p.gamma < 0.5 || p.gamma > 3.0) fail("gamma");
      if (p.sigma < 5.0 || p.sigma > 20.0) fail("sigma");
      break;
    case K::low_contrast:
      if (p.alpha <= 0.0 || p.alpha >= 1.0) fail("alpha");
      break;
    case K::stripe_noise:
      if (p.epsilon < 1.0 || p.epsilon > 15.0) fail("epsilon");
      break;
    case K::contrast_stripe:
      if (p.alpha <= 0.0 || p.alpha >= 1.0) fail("alpha");
      if (p.epsilon < 1.0 || p.epsilon > 15.0) fail("epsilon");
      break;
  }
}

}  // namespace

void validate_spec(const DegradationSpec& spec) {
  if (spec.level < 1 || spec.level > 10)
    throw std::invalid_argument("severity level must be in [1, 10]");
  const KindInfo& info = kind_info(spec.kind);
  if (info.modality != spec.modality)
    throw std::invalid_argument("kind '" + info.id + "' applies to the " +
                                modality_id(info.modality) + " modality");
  if (spec.params) validate_params(spec.kind, *spec.params);
}

ResolvedParams resolve(const DegradationSpec& spec, bool jitter) {
  validate_spec(spec);
  if (spec.params) return *spec.params;
  return severity_to_params(spec.kind, spec.level, spec.seed, jitter);
}

BlurKernel BlurKernel::identity() {
  BlurKernel b;
  b.kernel = Kernel::identity();
  b.angle_deg = 0.0;
  b.length = 1;
  return b;
}

namespace {

// Rasterizes a length-n segment through the kernel center at the given
// angle, one unit-spaced bilinear splat per sample. Symmetric sample pairs
// write the same weight values at point-reflected cells, so 180-degree
// symmetry holds bit-exactly.
Kernel line_kernel(int n, double theta_deg) {
  const int size = (n % 2 == 1) ? n : n + 1;
  const int c = size / 2;
  Kernel k(size, size);
  const double rad = theta_deg * M_PI / 180.0;
  const double dx = std::cos(rad);
  const double dy = std::sin(rad);
  const double half = (n - 1) / 2.0;

  const auto splat = [&k](int row, int col, double w) {
    if (w != 0.0) k.at(row, col) += w;
  };

  if (n % 2 == 1) k.at(c, c) += 1.0;  // the t = 0 sample
  for (int i = 0; i < n; ++i) {
    const double t = i - half;
    if (t <= 0.0) continue;  // mirrored below
    const double px = t * dx;
    const double py = t * dy;
    const int bx = static_cast<int>(std::floor(px));
    const int by = static_cast<int>(std::floor(py));
    const double fx = px - bx;
    const double fy = py - by;
    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w10 = fx * (1.0 - fy);
    const double w01 = (1.0 - fx) * fy;
    const double w11 = fx * fy;
    splat(c + by, c + bx, w00);
    splat(c + by, c + bx + 1, w10);
    splat(c + by + 1, c + bx, w01);
    splat(c + by + 1, c + bx + 1, w11);
    splat(c - by, c - bx, w00);
    splat(c - by, c - bx - 1, w10);
    splat(c - by - 1, c - bx, w01);
    splat(c - by - 1, c - bx - 1, w11);
  }
  const double s = k.sum();
  for (double& w : k.weights) w /= s;
  return k;
}

}  // namespace

BlurKernel make_blur_kernel(int n, double theta_deg) {
  if (n < 3 || n > 12)
    throw std::invalid_argument("blur length must be in [3, 12]");
  if (theta_deg < 10.0 || theta_deg > 80.0)
    throw std::invalid_argument("blur angle must be in [10, 80] degrees");
  BlurKernel b;
  b.kernel = line_kernel(n, theta_deg);
  b.angle_deg = theta_deg;
  b.length = n;
  return b;
}

Image apply_contrast_stripe(const Image& ir, double alpha, double epsilon,
                            std::uint64_t seed, double scale) {
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::invalid_argument("contrast alpha must be in (0, 1]");
  if (epsilon < 0.0) throw std::invalid_argument("stripe epsilon must be >= 0");
  if (!ir.is_gray())
    throw std::invalid_argument("apply_contrast_stripe expects a gray image");

  std::vector<double> noise(ir.width, 0.0);
  if (epsilon > 0.0) {
    SeededRng rng(seed);
    const double s = epsilon / scale;
    for (double& v : noise) v = s * rng.gaussian();
  }
  Image out(ir.height, ir.width, 1);
  for (int y = 0; y < ir.height; ++y)
    for (int x = 0; x < ir.width; ++x)
      out.at(y, x) = alpha * ir.at(y, x) + noise[x];
  return clamp01(std::move(out));
}

Image apply_noise_blur(const Image& img, const BlurKernel& kernel,
                       double sigma, std::uint64_t seed, double scale) {
  if (sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
  Image out = convolve2d(img, kernel.kernel);
  if (sigma > 0.0) {
    for (int c = 0; c < img.channels; ++c) {
      const Image field = gaussian_field(img.height, img.width, sigma,
                                         seed + static_cast<std::uint64_t>(c),
                                         scale);
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
          out.at(y, x, c) += field.at(y, x);
    }
  }
  return clamp01(std::move(out));
}

Image estimate_illumination(const Image& rgb) {
  if (!rgb.is_rgb())
    throw std::invalid_argument("estimate_illumination expects an RGB image");
  Image maxc(rgb.height, rgb.width, 1);
  for (int y = 0; y < rgb.height; ++y)
    for (int x = 0; x < rgb.width; ++x)
      maxc.at(y, x) = std::max({rgb.at(y, x, 0), rgb.at(y, x, 1), rgb.at(y, x, 2)});
  Image smooth = box_blur(maxc, 7, 7);  // 15x15 window
  for (double& v : smooth.data) v = std::max(v, 1e-3);
  return smooth;
}

Image apply_illumination(const Image& rgb, double gamma, const SideMaps& maps,
                         std::uint64_t /*seed*/) {
  if (!rgb.is_rgb())
    throw std::invalid_argument("apply_illumination expects an RGB image");
  if (gamma < 0.5 || gamma > 3.0)
    throw std::invalid_argument("illumination gamma must be in [0.5, 3]");

  Image illum;
  if (maps.illumination) {
    illum = *maps.illumination;
    if (!illum.is_gray() || illum.height != rgb.height || illum.width != rgb.width)
      throw std::invalid_argument("illumination map must be gray and match the image");
    for (double v : illum.data)
      if (v <= 0.0)
        throw std::invalid_argument("illumination map must be strictly positive");
  } else {
    illum = estimate_illumination(rgb);
  }

  Image out(rgb.height, rgb.width, 3);
  for (int y = 0; y < rgb.height; ++y) {
    for (int x = 0; x < rgb.width; ++x) {
      const double l = std::max(illum.at(y, x), 1e-3);
      // (I/L) * L^gamma, folded to I * L^(gamma-1); exact identity at gamma 1.
      const double f = std::pow(l, gamma - 1.0);
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = rgb.at(y, x, c) * f;
    }
  }
  return clamp01(std::move(out));
}

namespace {

Image fallback_depth(int h, int w, bool sky_far) {
  Image d(h, w, 1);
  for (int y = 0; y < h; ++y) {
    const double v = static_cast<double>(sky_far ? (h - 1 - y) : y) / h;
    for (int x = 0; x < w; ++x) d.at(y, x) = v;
  }
  return d;
}

// Unit gaussian noise thresholded at its 98th percentile, smeared into
// streaks by a length-9 line kernel at a seeded angle in [70, 110] degrees.
Image rain_layer(int h, int w, double intensity, std::uint64_t seed) {
  SeededRng rng(seed);
  const double angle = rng.uniform(70.0, 110.0);
  Image field(h, w, 1);
  for (double& v : field.data) v = rng.gaussian();

  std::vector<double> sorted = field.data;
  const std::size_t qi =
      static_cast<std::size_t>(0.98 * static_cast<double>(sorted.size() - 1));
  std::nth_element(sorted.begin(), sorted.begin() + qi, sorted.end());
  const double q = sorted[qi];

  Image mask(h, w, 1);
  for (std::size_t i = 0; i < field.data.size(); ++i)
    mask.data[i] = field.data[i] > q ? 1.0 : 0.0;

  Image streaks = convolve2d(mask, line_kernel(9, angle));
  for (double& v : streaks.data) v *= intensity;
  return streaks;
}

}  // namespace

Image apply_weather(const Image& rgb, double beta, double airlight,
                    double rain_intensity, const SideMaps& maps,
                    std::uint64_t seed) {
  if (!rgb.is_rgb())
    throw std::invalid_argument("apply_weather expects an RGB image");
  if (beta != 0.0 && (beta < 0.5 || beta > 2.0))
    throw std::invalid_argument("haze beta must be 0 or in [0.5, 2.0]");
  if (airlight < 0.3 || airlight > 0.9)
    throw std::invalid_argument("airlight must be in [0.3, 0.9]");
  if (rain_intensity < 0.0)
    throw std::invalid_argument("rain intensity must be >= 0");

  Image depth;
  if (maps.depth) {
    depth = *maps.depth;
    if (!depth.is_gray() || depth.height != rgb.height || depth.width != rgb.width)
      throw std::invalid_argument("depth map must be gray and match the image");
    for (double v : depth.data)
      if (v < 0.0) throw std::invalid_argument("depth map must be nonnegative");
  } else {
    depth = fallback_depth(rgb.height, rgb.width, maps.sky_far_ramp);
  }

  Image out(rgb.height, rgb.width, 3);
  for (int y = 0; y < rgb.height; ++y) {
    for (int x = 0; x < rgb.width; ++x) {
      const double t = std::exp(-beta * depth.at(y, x));
      for (int c = 0; c < 3; ++c)
        out.at(y, x, c) = rgb.at(y, x, c) * t + airlight * (1.0 - t);
    }
  }
  if (rain_intensity > 0.0) {
    const Image rain = rain_layer(rgb.height, rgb.width, rain_intensity, seed);
    for (int y = 0; y < rgb.height; ++y)
      for (int x = 0; x < rgb.width; ++x)
        for (int c = 0; c < 3; ++c) out.at(y, x, c) += rain.at(y, x);
  }
  return clamp01(std::move(out));
}

namespace {

Image apply_sensor_stage(const Image& img, const DegradationSpec& spec,
                         const ResolvedParams& p) {
  using K = DegradationKind;
  switch (spec.kind) {
    case K::blur:
      return apply_noise_blur(img, make_blur_kernel(p.blur_n, p.theta_deg),
                              0.0, spec.seed);
    case K::gauss_noise:
    case K::random_noise:
    case K::low_light_noise:
      return apply_noise_blur(img, BlurKernel::identity(), p.sigma, spec.seed);
    case K::low_contrast:
      return apply_contrast_stripe(img, p.alpha, 0.0, spec.seed);
    case K::stripe_noise:
      return apply_contrast_stripe(img, 1.0, p.epsilon, spec.seed);
    case K::contrast_stripe:
      return apply_contrast_stripe(img, p.alpha, p.epsilon, spec.seed);
    default:
      throw std::logic_error("kind has no sensor stage");
  }
}

}  // namespace

std::pair<Image, Image> compose(const Image& ir, const Image& vi,
                                const std::vector<DegradationSpec>& specs,
                                const SideMaps& maps) {
  // Stage slots per modality; list order is irrelevant by design.
  const DegradationSpec* slot[2][3] = {};
  unsigned used[2] = {0, 0};
  for (const DegradationSpec& spec : specs) {
    validate_spec(spec);
    const KindInfo& info = kind_info(spec.kind);
    const int m = spec.modality == Modality::infrared ? 0 : 1;
    if (used[m] & info.stages)
      throw std::invalid_argument(
          "multiple specs target the same stage of one modality");
    used[m] |= info.stages;
    if (info.stages & kStageIllumination) slot[m][0] = &spec;
    if (info.stages & kStageWeather) slot[m][1] = &spec;
    if (info.stages & kStageSensor) slot[m][2] = &spec;
  }

  const auto run = [&](Image img, int m) {
    if (const DegradationSpec* s = slot[m][0]) {
      const ResolvedParams p = resolve(*s);
      img = apply_illumination(img, p.gamma, maps, s->seed);
    }
    if (const DegradationSpec* s = slot[m][1]) {
      const ResolvedParams p = resolve(*s);
      img = apply_weather(img, p.beta, p.airlight, p.rain, maps, s->seed);
    }
    if (const DegradationSpec* s = slot[m][2]) {
      const ResolvedParams p = resolve(*s);
      img = apply_sensor_stage(img, *s, p);
    }
    return img;
  };

  return {run(ir, 0), run(vi, 1)};
}

nlohmann::json spec_to_json(const DegradationSpec& spec) {
  nlohmann::json j{
      {"modality", modality_id(spec.modality)},
      {"kind", kind_info(spec.kind).id},
      {"level", spec.level},
      {"seed", spec.seed},
  };
  if (spec.params) {
    const ResolvedParams& p = *spec.params;
    j["params"] = nlohmann::json{
        {"alpha", p.alpha},       {"epsilon", p.epsilon},
        {"sigma", p.sigma},       {"blur_n", p.blur_n},
        {"theta_deg", p.theta_deg}, {"gamma", p.gamma},
        {"beta", p.beta},         {"airlight", p.airlight},
        {"rain", p.rain},
    };
  }
  return j;
}

DegradationSpec spec_from_json(const nlohmann::json& j) {
  DegradationSpec spec;
  spec.modality = modality_from_id(j.at("modality").get<std::string>());
  const std::string kind_id = j.at("kind").get<std::string>();
  const auto kind = kind_from_id(kind_id);
  if (!kind) throw std::invalid_argument("unknown degradation kind: " + kind_id);
  spec.kind = *kind;
  spec.level = j.at("level").get<int>();
  spec.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("params")) {
    const nlohmann::json& pj = j.at("params");
    ResolvedParams p;
    p.alpha = pj.value("alpha", p.alpha);
    p.epsilon = pj.value("epsilon", p.epsilon);
    p.sigma = pj.value("sigma", p.sigma);
    p.blur_n = pj.value("blur_n", p.blur_n);
    p.theta_deg = pj.value("theta_deg", p.theta_deg);
    p.gamma = pj.value("gamma", p.gamma);
    p.beta = pj.value("beta", p.beta);
    p.airlight = pj.value("airlight", p.airlight);
    p.rain = pj.value("rain", p.rain);
    spec.params = p;
  }
  validate_spec(spec);
  return spec;
}

}  // namespace degradekit
