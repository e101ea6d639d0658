// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tap/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tap/error.hpp"
#include "tap/random.hpp"
#include "tap/taploss.hpp"

namespace tap {

EstimatorConfig EstimatorConfig::ForStft(const StftConfig& stft) {
  EstimatorConfig cfg;
  cfg.input_size = static_cast<int>(2 * stft.bins());
  return cfg;
}

void EstimatorConfig::Validate() const {
  if (num_layers < 1) throw ConfigError("num_layers must be >= 1");
  if (hidden_size < 1) throw ConfigError("hidden_size must be >= 1");
  if (input_size < 2 || input_size % 2 != 0)
    throw ConfigError("input_size must be 2*F");
  if (output_size != static_cast<int>(kNumParams))
    throw ConfigError("output_size must be 25");
}

ParamLayout::ParamLayout(const EstimatorConfig& cfg) : dirs_(cfg.directions()) {
  cfg.Validate();
  const std::size_t h = static_cast<std::size_t>(cfg.hidden_size);
  auto add = [this](std::string name, std::size_t rows, std::size_t cols) {
    tensors_.push_back({std::move(name), rows, cols, total_});
    total_ += rows * cols;
  };
  for (int l = 0; l < cfg.num_layers; ++l) {
    const std::size_t in = l == 0 ? static_cast<std::size_t>(cfg.input_size)
                                  : h * static_cast<std::size_t>(dirs_);
    for (int d = 0; d < dirs_; ++d) {
      const std::string tag = "l" + std::to_string(l) + (d == 0 ? "" : "_rev");
      add("w_ih_" + tag, 4 * h, in);
      add("w_hh_" + tag, 4 * h, h);
      add("bias_" + tag, 4 * h, 1);
    }
  }
  add("w_out", static_cast<std::size_t>(cfg.output_size),
      h * static_cast<std::size_t>(dirs_));
  add("b_out", static_cast<std::size_t>(cfg.output_size), 1);
}

bool EstimatorParams::AllFinite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

EstimatorParams InitEstimator(const EstimatorConfig& cfg) {
  cfg.Validate();
  EstimatorParams params{cfg, {}};
  const ParamLayout layout(cfg);
  params.values.assign(layout.total(), 0.0);
  Rng rng(cfg.seed);
  const double k = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_size));
  const std::size_t h = static_cast<std::size_t>(cfg.hidden_size);
  for (const TensorSpec& t : layout.tensors()) {
    if (t.cols == 1) {
      // Bias vectors: forget-gate block at rows [H, 2H) is 1, rest 0.
      if (t.name.rfind("bias_", 0) == 0)
        for (std::size_t r = h; r < 2 * h; ++r) params.values[t.offset + r] = 1.0;
      continue;
    }
    for (std::size_t i = 0; i < t.size(); ++i)
      params.values[t.offset + i] = rng.Uniform(-k, k);
  }
  return params;
}

std::vector<double> SpectrogramFeatures(const ComplexSpectrogram& spec) {
  const std::size_t bins = spec.bins();
  std::vector<double> features(spec.frames() * 2 * bins);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    const auto frame = spec.frame(t);
    double* row = features.data() + t * 2 * bins;
    for (std::size_t f = 0; f < bins; ++f) {
      row[f] = frame[f].real();
      row[bins + f] = frame[f].imag();
    }
  }
  return features;
}

AdamState AdamState::For(const EstimatorParams& params) {
  AdamState s;
  s.m.assign(params.values.size(), 0.0);
  s.v.assign(params.values.size(), 0.0);
  return s;
}

void AdamStep(EstimatorParams& params, std::span<const double> grads,
              AdamState& state) {
  const std::size_t n = params.values.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n)
    throw DimensionError("Adam: gradient/state size does not match params");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads[i]))
      throw TrainingError("non-finite gradient at parameter index " +
                          std::to_string(i) + " (step " +
                          std::to_string(state.step + 1) + ")");
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    params.values[i] -= state.alpha * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

double ClipGradNorm(std::span<double> grads, double max_norm) {
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (double& g : grads) g *= s;
  }
  return norm;
}

TrainingExample MakeExample(std::string id, const ComplexSpectrogram& spec,
                            TapMatrix target) {
  if (target.frames() != spec.frames())
    throw DimensionError(id + ": target frames do not match spectrogram");
  return {std::move(id), SpectrogramFeatures(spec), spec.frames(),
          std::move(target)};
}

void TrainingHistory::WriteCsv(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "epoch,train_mae,val_mae\n";
  char buf[96];
  for (std::size_t e = 0; e < train_mae.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", e + 1, train_mae[e],
                  e < val_mae.size() ? val_mae[e] : std::nan(""));
    out << buf;
  }
}

double GradRelativeError(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult EstimatorGradientCheck(std::uint64_t seed, int points,
                                       int num_layers) {
  constexpr std::size_t kFrames = 3;
  constexpr std::size_t kBins = 5;
  constexpr double kStep = 1e-5;
  EstimatorConfig cfg;
  cfg.num_layers = num_layers;
  cfg.hidden_size = 2;
  cfg.input_size = 2 * kBins;
  cfg.seed = seed;
  EstimatorParams params = InitEstimator(cfg);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  // Perturb the biases too so every parameter has a generic value.
  for (double& v : params.values) v += rng.Uniform(-0.2, 0.2);

  std::vector<double> features(kFrames * cfg.input_size);
  for (double& v : features) v = rng.Uniform(-1.0, 1.0);
  TapMatrix target = ForwardFeatures(params, features, kFrames);
  for (double& v : target.data()) {
    const double offset = rng.Uniform(0.1, 1.0);
    v += rng.Uniform() < 0.5 ? -offset : offset;
  }

  const LossAndGrads analytic =
      LossAndGradientsFeatures(params, features, kFrames, target);
  auto loss_at = [&](const EstimatorParams& p) {
    return Mae(ForwardFeatures(p, features, kFrames), target);
  };

  std::vector<std::size_t> indices(params.values.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  rng.Shuffle(indices);
  if (points > 0 && static_cast<std::size_t>(points) < indices.size())
    indices.resize(static_cast<std::size_t>(points));

  GradCheckResult result;
  EstimatorParams probe = params;
  for (std::size_t idx : indices) {
    const double orig = probe.values[idx];
    probe.values[idx] = orig + kStep;
    const double up = loss_at(probe);
    probe.values[idx] = orig - kStep;
    const double down = loss_at(probe);
    probe.values[idx] = orig;
    const double numeric = (up - down) / (2.0 * kStep);
    const double a = analytic.grads[idx];
    result.max_abs_error = std::max(result.max_abs_error, std::abs(a - numeric));
    result.max_rel_error =
        std::max(result.max_rel_error, GradRelativeError(a, numeric));
    ++result.checked;
  }
  return result;
}

}  // namespace tap
