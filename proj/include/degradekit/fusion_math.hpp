#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "json.hpp"

#include "degradekit/rng.hpp"

namespace degradekit {

// T x C token/channel feature matrix, row-major.
struct FeatureMap {
  int tokens = 0;
  int dim = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(int t, int c);
  static FeatureMap seeded(int t, int c, std::uint64_t seed);

  double& at(int t, int c) {
    return data[static_cast<std::size_t>(t) * dim + c];
  }
  double at(int t, int c) const {
    return data[static_cast<std::size_t>(t) * dim + c];
  }
};

// C x C query/key/value projections for one modality.
struct ModalWeights {
  int dim = 0;
  std::vector<double> w_q, w_k, w_v;  // each C*C, row-major

  static ModalWeights identity(int c);
  static ModalWeights seeded(int c, std::uint64_t seed);
};

struct AttentionWeights {
  ModalWeights ir;
  ModalWeights vi;
};

// softmax(q k^T / scale) v with a row-wise, max-stabilized softmax. q and k
// must share their channel dim; k and v their token count.
FeatureMap scaled_softmax_attention(const FeatureMap& q, const FeatureMap& k,
                                    const FeatureMap& v, double scale);

// Single-head cross attention with swapped queries:
//   out_ir = softmax(Q_vi K_ir^T / sqrt(C)) V_ir
//   out_vi = softmax(Q_ir K_vi^T / sqrt(C)) V_vi
// Row-wise softmax; the scaling factor is the channel dimension C. Token
// counts may differ per modality (out_ir has f_vi's token count and vice
// versa); channel dims must match.
std::pair<FeatureMap, FeatureMap> cross_attention_swap(
    const FeatureMap& f_ir, const FeatureMap& f_vi,
    const AttentionWeights& w);

// Channel concatenation [f_ir, f_vi]; token counts must match.
FeatureMap concat_fuse(const FeatureMap& f_ir, const FeatureMap& f_vi);

// Per-channel residual affine (1 + gamma) * F + beta, broadcast over tokens.
struct ModulationParams {
  std::vector<double> gamma;
  std::vector<double> beta;
};

FeatureMap prompt_modulate(const FeatureMap& f, const ModulationParams& m);

nlohmann::json feature_map_to_json(const FeatureMap& f);
FeatureMap feature_map_from_json(const nlohmann::json& j);
nlohmann::json attention_weights_to_json(const AttentionWeights& w);
AttentionWeights attention_weights_from_json(const nlohmann::json& j);

}  // namespace degradekit
