// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Forward pass and backpropagation through time for the stacked LSTM.

#include <Eigen/Dense>
#include <cmath>

#include "tap/error.hpp"
#include "tap/estimator.hpp"

namespace tap {
namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const Mat>;
using MutMap = Eigen::Map<Mat>;
using Vec = Eigen::VectorXd;

ConstMap View(const std::vector<double>& v, const TensorSpec& t) {
  return ConstMap(v.data() + t.offset, static_cast<Eigen::Index>(t.rows),
                  static_cast<Eigen::Index>(t.cols));
}

MutMap View(std::vector<double>& v, const TensorSpec& t) {
  return MutMap(v.data() + t.offset, static_cast<Eigen::Index>(t.rows),
                static_cast<Eigen::Index>(t.cols));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Activations of one direction of one layer, T rows each.
struct DirectionCache {
  Mat gate_i, gate_f, gate_g, gate_o;  // post-activation
  Mat cell, cell_tanh, hidden;
};

struct LayerCache {
  Mat input;  // T x in
  std::vector<DirectionCache> dirs;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Mat top;     // T x H*dirs
  Mat output;  // T x out
};

void RunDirection(const Mat& input, ConstMap w_ih, ConstMap w_hh, ConstMap bias,
                  bool reverse, DirectionCache& c) {
  const Eigen::Index frames = input.rows();
  const Eigen::Index h = w_hh.cols();
  Mat pre = input * w_ih.transpose();
  pre.rowwise() += bias.transpose().row(0);
  c.gate_i.resize(frames, h);
  c.gate_f.resize(frames, h);
  c.gate_g.resize(frames, h);
  c.gate_o.resize(frames, h);
  c.cell.resize(frames, h);
  c.cell_tanh.resize(frames, h);
  c.hidden.resize(frames, h);

  Vec h_prev = Vec::Zero(h), c_prev = Vec::Zero(h), g(4 * h);
  for (Eigen::Index step = 0; step < frames; ++step) {
    const Eigen::Index t = reverse ? frames - 1 - step : step;
    g = pre.row(t).transpose() + w_hh * h_prev;
    for (Eigen::Index k = 0; k < h; ++k) {
      const double i = Sigmoid(g[k]);
      const double f = Sigmoid(g[h + k]);
      const double cc = std::tanh(g[2 * h + k]);
      const double o = Sigmoid(g[3 * h + k]);
      const double cell = f * c_prev[k] + i * cc;
      const double ct = std::tanh(cell);
      c.gate_i(t, k) = i;
      c.gate_f(t, k) = f;
      c.gate_g(t, k) = cc;
      c.gate_o(t, k) = o;
      c.cell(t, k) = cell;
      c.cell_tanh(t, k) = ct;
      c.hidden(t, k) = o * ct;
    }
    h_prev = c.hidden.row(t).transpose();
    c_prev = c.cell.row(t).transpose();
  }
}

ForwardCache RunForward(const EstimatorParams& params,
                        std::span<const double> features, std::size_t frames) {
  const EstimatorConfig& cfg = params.config;
  const ParamLayout layout(cfg);
  if (features.size() != frames * static_cast<std::size_t>(cfg.input_size))
    throw DimensionError("feature size " + std::to_string(features.size()) +
                         " does not match T x input_size");
  const auto t_rows = static_cast<Eigen::Index>(frames);
  const int dirs = cfg.directions();
  const Eigen::Index h = cfg.hidden_size;

  ForwardCache cache;
  cache.layers.resize(static_cast<std::size_t>(cfg.num_layers));
  Mat x = Eigen::Map<const Mat>(features.data(), t_rows, cfg.input_size);
  for (int l = 0; l < cfg.num_layers; ++l) {
    LayerCache& lc = cache.layers[static_cast<std::size_t>(l)];
    lc.input = std::move(x);
    lc.dirs.resize(static_cast<std::size_t>(dirs));
    for (int d = 0; d < dirs; ++d)
      RunDirection(lc.input, View(params.values, layout.w_ih(l, d)),
                   View(params.values, layout.w_hh(l, d)),
                   View(params.values, layout.bias(l, d)), d == 1,
                   lc.dirs[static_cast<std::size_t>(d)]);
    x.resize(t_rows, h * dirs);
    for (int d = 0; d < dirs; ++d)
      x.middleCols(d * h, h) = lc.dirs[static_cast<std::size_t>(d)].hidden;
  }
  cache.top = std::move(x);
  cache.output = cache.top * View(params.values, layout.w_out()).transpose();
  cache.output.rowwise() +=
      View(params.values, layout.b_out()).transpose().row(0);
  return cache;
}

TapMatrix ToTap(const Mat& out) {
  TapMatrix m(static_cast<std::size_t>(out.rows()));
  MutMap(m.data().data(), out.rows(), out.cols()) = out;
  m.set_standardized(true);
  return m;
}

}  // namespace

TapMatrix ForwardFeatures(const EstimatorParams& params,
                          std::span<const double> features, std::size_t frames) {
  params.config.Validate();
  return ToTap(RunForward(params, features, frames).output);
}

TapMatrix Forward(const EstimatorParams& params, const ComplexSpectrogram& spec) {
  if (static_cast<int>(2 * spec.bins()) != params.config.input_size)
    throw DimensionError("spectrogram has F = " + std::to_string(spec.bins()) +
                         " but the estimator expects input_size " +
                         std::to_string(params.config.input_size));
  const std::vector<double> features = SpectrogramFeatures(spec);
  return ForwardFeatures(params, features, spec.frames());
}

LossAndGrads LossAndGradientsFeatures(const EstimatorParams& params,
                                      std::span<const double> features,
                                      std::size_t frames,
                                      const TapMatrix& target) {
  const EstimatorConfig& cfg = params.config;
  cfg.Validate();
  if (target.frames() != frames)
    throw DimensionError("target has " + std::to_string(target.frames()) +
                         " frames, input has " + std::to_string(frames));
  const ParamLayout layout(cfg);
  ForwardCache cache = RunForward(params, features, frames);
  const auto t_rows = static_cast<Eigen::Index>(frames);
  const Eigen::Index h = cfg.hidden_size;
  const int dirs = cfg.directions();

  LossAndGrads result;
  result.grads.assign(layout.total(), 0.0);
  if (frames == 0) return result;

  // MAE and its subgradient.
  const ConstMap tgt(target.data().data(), t_rows, cfg.output_size);
  const double scale = 1.0 / static_cast<double>(frames * cfg.output_size);
  Mat d_out(t_rows, cfg.output_size);
  double sum = 0.0;
  for (Eigen::Index t = 0; t < t_rows; ++t) {
    for (Eigen::Index p = 0; p < cfg.output_size; ++p) {
      const double diff = cache.output(t, p) - tgt(t, p);
      sum += std::abs(diff);
      d_out(t, p) = diff > 0.0 ? scale : (diff < 0.0 ? -scale : 0.0);
    }
  }
  result.loss = sum * scale;

  View(result.grads, layout.w_out()) = d_out.transpose() * cache.top;
  View(result.grads, layout.b_out()) = d_out.colwise().sum().transpose();
  Mat d_upper = d_out * View(params.values, layout.w_out());  // T x H*dirs

  for (int l = cfg.num_layers - 1; l >= 0; --l) {
    const LayerCache& lc = cache.layers[static_cast<std::size_t>(l)];
    Mat d_input = Mat::Zero(t_rows, lc.input.cols());
    for (int d = 0; d < dirs; ++d) {
      const DirectionCache& c = lc.dirs[static_cast<std::size_t>(d)];
      const bool reverse = d == 1;
      const ConstMap w_hh = View(params.values, layout.w_hh(l, d));
      Mat d_pre(t_rows, 4 * h);
      Mat h_prev_rows = Mat::Zero(t_rows, h);
      Vec dh_next = Vec::Zero(h), dc_next = Vec::Zero(h);
      for (Eigen::Index step = t_rows - 1; step >= 0; --step) {
        const Eigen::Index t = reverse ? t_rows - 1 - step : step;
        const Eigen::Index prev = reverse ? t + 1 : t - 1;
        const bool has_prev = step > 0;
        Vec dh = d_upper.row(t).segment(d * h, h).transpose() + dh_next;
        for (Eigen::Index k = 0; k < h; ++k) {
          const double i = c.gate_i(t, k), f = c.gate_f(t, k);
          const double g = c.gate_g(t, k), o = c.gate_o(t, k);
          const double ct = c.cell_tanh(t, k);
          const double c_prev = has_prev ? c.cell(prev, k) : 0.0;
          const double d_o = dh[k] * ct;
          const double d_c = dh[k] * o * (1.0 - ct * ct) + dc_next[k];
          d_pre(t, k) = d_c * g * i * (1.0 - i);
          d_pre(t, h + k) = d_c * c_prev * f * (1.0 - f);
          d_pre(t, 2 * h + k) = d_c * i * (1.0 - g * g);
          d_pre(t, 3 * h + k) = d_o * o * (1.0 - o);
          dc_next[k] = d_c * f;
        }
        dh_next = w_hh.transpose() * d_pre.row(t).transpose();
        if (has_prev) h_prev_rows.row(t) = c.hidden.row(prev);
      }
      View(result.grads, layout.w_hh(l, d)) = d_pre.transpose() * h_prev_rows;
      View(result.grads, layout.w_ih(l, d)) = d_pre.transpose() * lc.input;
      View(result.grads, layout.bias(l, d)) = d_pre.colwise().sum().transpose();
      d_input += d_pre * View(params.values, layout.w_ih(l, d));
    }
    d_upper = std::move(d_input);
  }
  return result;
}

LossAndGrads LossAndGradients(const EstimatorParams& params,
                              const ComplexSpectrogram& spec,
                              const TapMatrix& target) {
  if (static_cast<int>(2 * spec.bins()) != params.config.input_size)
    throw DimensionError("spectrogram F does not match estimator input_size");
  const std::vector<double> features = SpectrogramFeatures(spec);
  return LossAndGradientsFeatures(params, features, spec.frames(), target);
}

}  // namespace tap
