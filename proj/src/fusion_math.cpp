#include "degradekit/fusion_math.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace degradekit {

FeatureMap::FeatureMap(int t, int c) : tokens(t), dim(c) {
  if (t < 1 || c < 0)
    throw std::invalid_argument("feature map needs tokens >= 1, dim >= 0");
  data.assign(static_cast<std::size_t>(t) * c, 0.0);
}

FeatureMap FeatureMap::seeded(int t, int c, std::uint64_t seed) {
  FeatureMap f(t, c);
  SeededRng rng(seed);
  for (double& v : f.data) v = rng.gaussian();
  return f;
}

ModalWeights ModalWeights::identity(int c) {
  ModalWeights w;
  w.dim = c;
  w.w_q.assign(static_cast<std::size_t>(c) * c, 0.0);
  for (int i = 0; i < c; ++i) w.w_q[static_cast<std::size_t>(i) * c + i] = 1.0;
  w.w_k = w.w_q;
  w.w_v = w.w_q;
  return w;
}

ModalWeights ModalWeights::seeded(int c, std::uint64_t seed) {
  ModalWeights w;
  w.dim = c;
  SeededRng rng(seed);
  const auto fill = [&](std::vector<double>& m) {
    m.resize(static_cast<std::size_t>(c) * c);
    for (double& v : m) v = rng.gaussian() / std::sqrt(static_cast<double>(c));
  };
  fill(w.w_q);
  fill(w.w_k);
  fill(w.w_v);
  return w;
}

namespace {

// (T x C) * (C x C)
FeatureMap project(const FeatureMap& f, const std::vector<double>& m) {
  FeatureMap out(f.tokens, f.dim);
  const int c = f.dim;
  for (int t = 0; t < f.tokens; ++t) {
    for (int j = 0; j < c; ++j) {
      double acc = 0.0;
      for (int k = 0; k < c; ++k)
        acc += f.at(t, k) * m[static_cast<std::size_t>(k) * c + j];
      out.at(t, j) = acc;
    }
  }
  return out;
}

void check_weights(const ModalWeights& w, int dim) {
  const std::size_t n = static_cast<std::size_t>(dim) * dim;
  if (w.dim != dim || w.w_q.size() != n || w.w_k.size() != n || w.w_v.size() != n)
    throw std::invalid_argument("attention weights must be C x C with matching dim");
}

}  // namespace

FeatureMap scaled_softmax_attention(const FeatureMap& q, const FeatureMap& k,
                                    const FeatureMap& v, double scale) {
  if (q.dim != k.dim)
    throw std::invalid_argument("query/key channel dims must match");
  if (k.tokens != v.tokens)
    throw std::invalid_argument("key/value token counts must match");
  if (scale <= 0.0) throw std::invalid_argument("scale must be positive");
  FeatureMap out(q.tokens, v.dim);
  std::vector<double> row(k.tokens);
  for (int i = 0; i < q.tokens; ++i) {
    double maxs = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k.tokens; ++j) {
      double s = 0.0;
      for (int c = 0; c < q.dim; ++c) s += q.at(i, c) * k.at(j, c);
      row[j] = s / scale;
      if (row[j] > maxs) maxs = row[j];
    }
    double z = 0.0;
    for (int j = 0; j < k.tokens; ++j) {
      row[j] = std::exp(row[j] - maxs);
      z += row[j];
    }
    for (int j = 0; j < k.tokens; ++j) row[j] /= z;
    for (int c = 0; c < v.dim; ++c) {
      double acc = 0.0;
      for (int j = 0; j < k.tokens; ++j) acc += row[j] * v.at(j, c);
      out.at(i, c) = acc;
    }
  }
  return out;
}

std::pair<FeatureMap, FeatureMap> cross_attention_swap(
    const FeatureMap& f_ir, const FeatureMap& f_vi,
    const AttentionWeights& w) {
  if (f_ir.dim != f_vi.dim)
    throw std::invalid_argument("feature maps must share the channel dim");
  if (f_ir.dim < 1) throw std::invalid_argument("channel dim must be >= 1");
  check_weights(w.ir, f_ir.dim);
  check_weights(w.vi, f_ir.dim);

  const FeatureMap q_ir = project(f_ir, w.ir.w_q);
  const FeatureMap k_ir = project(f_ir, w.ir.w_k);
  const FeatureMap v_ir = project(f_ir, w.ir.w_v);
  const FeatureMap q_vi = project(f_vi, w.vi.w_q);
  const FeatureMap k_vi = project(f_vi, w.vi.w_k);
  const FeatureMap v_vi = project(f_vi, w.vi.w_v);

  const double scale = std::sqrt(static_cast<double>(f_ir.dim));
  return {scaled_softmax_attention(q_vi, k_ir, v_ir, scale),
          scaled_softmax_attention(q_ir, k_vi, v_vi, scale)};
}

FeatureMap concat_fuse(const FeatureMap& f_ir, const FeatureMap& f_vi) {
  if (f_ir.tokens != f_vi.tokens)
    throw std::invalid_argument("token counts must match for concatenation");
  FeatureMap out(f_ir.tokens, f_ir.dim + f_vi.dim);
  for (int t = 0; t < out.tokens; ++t) {
    for (int c = 0; c < f_ir.dim; ++c) out.at(t, c) = f_ir.at(t, c);
    for (int c = 0; c < f_vi.dim; ++c) out.at(t, f_ir.dim + c) = f_vi.at(t, c);
  }
  return out;
}

FeatureMap prompt_modulate(const FeatureMap& f, const ModulationParams& m) {
  if (static_cast<int>(m.gamma.size()) != f.dim ||
      static_cast<int>(m.beta.size()) != f.dim)
    throw std::invalid_argument("modulation vectors must have length dim");
  FeatureMap out(f.tokens, f.dim);
  for (int t = 0; t < f.tokens; ++t)
    for (int c = 0; c < f.dim; ++c)
      out.at(t, c) = (1.0 + m.gamma[c]) * f.at(t, c) + m.beta[c];
  return out;
}

nlohmann::json feature_map_to_json(const FeatureMap& f) {
  return nlohmann::json{{"tokens", f.tokens}, {"dim", f.dim}, {"data", f.data}};
}

FeatureMap feature_map_from_json(const nlohmann::json& j) {
  FeatureMap f(j.at("tokens").get<int>(), j.at("dim").get<int>());
  f.data = j.at("data").get<std::vector<double>>();
  if (f.data.size() != static_cast<std::size_t>(f.tokens) * f.dim)
    throw std::invalid_argument("feature map data length mismatch");
  return f;
}

nlohmann::json attention_weights_to_json(const AttentionWeights& w) {
  const auto modal = [](const ModalWeights& m) {
    return nlohmann::json{
        {"dim", m.dim}, {"w_q", m.w_q}, {"w_k", m.w_k}, {"w_v", m.w_v}};
  };
  return nlohmann::json{{"ir", modal(w.ir)}, {"vi", modal(w.vi)}};
}

AttentionWeights attention_weights_from_json(const nlohmann::json& j) {
  const auto modal = [](const nlohmann::json& mj) {
    ModalWeights m;
    m.dim = mj.at("dim").get<int>();
    m.w_q = mj.at("w_q").get<std::vector<double>>();
    m.w_k = mj.at("w_k").get<std::vector<double>>();
    m.w_v = mj.at("w_v").get<std::vector<double>>();
    const std::size_t n = static_cast<std::size_t>(m.dim) * m.dim;
    if (m.w_q.size() != n || m.w_k.size() != n || m.w_v.size() != n)
      throw std::invalid_argument("weight matrix length mismatch");
    return m;
  };
  return {modal(j.at("ir")), modal(j.at("vi"))};
}

}  // namespace degradekit
