#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "degradekit/image.hpp"

namespace degradekit {

enum class Modality { infrared, visible };

// The twelve supported degradations. Visible-light kinds cover illumination,
// weather and sensor distortions; infrared kinds are all sensor-side.
// rain_haze, low_light_noise and contrast_stripe are composite kinds built
// from two atomic components applied in one pass.
enum class DegradationKind {
  blur,
  gauss_noise,
  rain,
  haze,
  rain_haze,
  low_light,
  over_exposure,
  low_light_noise,
  low_contrast,
  random_noise,
  stripe_noise,
  contrast_stripe,
};

// Imaging-chain stages; compose applies them in this fixed order regardless
// of how specs are listed.
enum StageMask : unsigned {
  kStageIllumination = 1u,
  kStageWeather = 2u,
  kStageSensor = 4u,
};

struct KindInfo {
  DegradationKind kind;
  Modality modality;
  std::string id;       // machine name, e.g. "gauss_noise"
  std::string display;  // prompt-facing name, e.g. "noise"
  unsigned stages;      // StageMask bits
  std::vector<DegradationKind> components;  // two entries for composite kinds
};

const std::vector<KindInfo>& kind_registry();
const KindInfo& kind_info(DegradationKind kind);
std::optional<DegradationKind> kind_from_id(const std::string& id);

// Concrete physical parameters for one degradation instance. Only the fields
// a kind uses are meaningful; the rest stay at their identity values.
struct ResolvedParams {
  double alpha = 1.0;      // contrast scale, (0,1]
  double epsilon = 0.0;    // stripe-noise sigma, 0-255 scale
  double sigma = 0.0;      // gaussian-noise sigma, 0-255 scale
  int blur_n = 1;          // motion-blur length in pixels
  double theta_deg = 0.0;  // motion-blur angle from horizontal
  double gamma = 1.0;      // illumination exponent
  double beta = 0.0;       // haze density; 0 keeps haze off
  double airlight = 0.6;
  double rain = 0.0;       // rain-layer strength
};

struct DegradationSpec {
  Modality modality = Modality::visible;
  DegradationKind kind = DegradationKind::gauss_noise;
  int level = 1;  // 1..10
  std::uint64_t seed = 0;
  std::optional<ResolvedParams> params;  // resolved on demand when absent
};

// Severity-to-parameter mapping. Level 1 sits at the mild end of each range,
// level 10 at the severe end, linearly in between:
//   sigma    5 -> 20      (gauss_noise, random_noise, low_light_noise)
//   epsilon  1 -> 15      (stripe_noise, contrast_stripe)
//   alpha    0.93 -> 0.30 (low_contrast, contrast_stripe)
//   blur_n   3 -> 12      (blur)
//   gamma    1.2 -> 3.0   (low_light, low_light_noise; darkens)
//   gamma    0.83 -> 0.5  (over_exposure; brightens)
//   beta     0.5 -> 2.0   (haze, rain_haze)
//   rain     0.1 -> 1.0   (rain, rain_haze)
// theta_deg and airlight are drawn from the seed (uniform over [10,80] and
// [0.3,0.9]) and do not vary with level. With jitter enabled the seed also
// shifts the effective level by at most half a step before interpolation.
ResolvedParams severity_to_params(DegradationKind kind, int level,
                                  std::uint64_t seed, bool jitter = false);

// Throws std::invalid_argument on level/modality/param violations.
void validate_spec(const DegradationSpec& spec);

// params if present (validated), otherwise severity_to_params.
ResolvedParams resolve(const DegradationSpec& spec, bool jitter = false);

// Normalized motion-blur kernel: a length-n segment through the center at
// angle theta, bilinearly rasterized. Point-symmetric about the center by
// construction and sums to 1.
struct BlurKernel {
  Kernel kernel;
  double angle_deg = 0.0;
  int length = 1;
  static BlurKernel identity();
};

// Optional externally supplied maps. When absent, apply_illumination falls
// back to estimate_illumination and apply_weather to a vertical depth ramp
// d(x,y) = y/H (sky_far_ramp flips it).
struct SideMaps {
  std::optional<Image> illumination;  // gray, strictly positive
  std::optional<Image> depth;         // gray, nonnegative, arbitrary units
  bool sky_far_ramp = false;
};

// alpha * I + ones_H * n^T with n_j ~ N(0, (epsilon/scale)^2) per column;
// every row sees the same noise vector. Clamped at the end.
Image apply_contrast_stripe(const Image& ir, double alpha, double epsilon,
                            std::uint64_t seed, double scale = 255.0);

// n in [3,12], theta in [10,80] degrees.
BlurKernel make_blur_kernel(int n, double theta_deg);

// Blur first, then add seeded gaussian noise, then clamp. RGB inputs get an
// independent noise field per channel (seed, seed+1, seed+2).
Image apply_noise_blur(const Image& img, const BlurKernel& kernel,
                       double sigma, std::uint64_t seed, double scale = 255.0);

// Max-RGB followed by 15x15 box smoothing, floored at 1e-3.
Image estimate_illumination(const Image& rgb);

// Retinex-style relighting D = (I/L) * L^gamma, evaluated as I * L^(gamma-1)
// per channel with the shared gray illumination map (floored at 1e-3).
// gamma in [0.5, 3]; gamma > 1 darkens, gamma < 1 brightens. Clamped.
Image apply_illumination(const Image& rgb, double gamma,
                         const SideMaps& maps = {}, std::uint64_t seed = 0);

// I * t + A * (1 - t) + R with t = exp(-beta * d) per pixel. The depth map is
// used in the units supplied (the built-in ramp spans [0,1); larger values
// push t toward 0). R is a seeded rain-streak layer: unit gaussian noise
// thresholded at its 98th percentile, smeared by a length-9 line kernel at a
// seeded angle in [70,110] degrees, scaled by rain_intensity. Clamped.
Image apply_weather(const Image& rgb, double beta, double airlight,
                    double rain_intensity, const SideMaps& maps = {},
                    std::uint64_t seed = 0);

// Applies the given specs to the (ir, vi) pair in the fixed stage order
// illumination -> weather -> sensor per modality. At most one spec may
// occupy a stage of a modality; list order never matters.
std::pair<Image, Image> compose(const Image& ir, const Image& vi,
                                const std::vector<DegradationSpec>& specs,
                                const SideMaps& maps = {});

std::string modality_id(Modality m);
Modality modality_from_id(const std::string& id);

// {"modality", "kind", "level", "seed", "params"?}; params may be omitted and
// is then resolved by severity_to_params at use time.
nlohmann::json spec_to_json(const DegradationSpec& spec);
DegradationSpec spec_from_json(const nlohmann::json& j);

}  // namespace degradekit
