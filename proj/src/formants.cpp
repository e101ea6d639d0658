// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Formant tracking: pre-emphasis, autocorrelation LPC, Durand-Kerner roots.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tap/acoustics.hpp"

namespace tap {

std::optional<std::vector<double>> LevinsonDurbin(std::span<const double> r,
                                                  int order) {
  if (order < 1 || r.size() < static_cast<std::size_t>(order) + 1)
    return std::nullopt;
  if (!(r[0] > 1e-20)) return std::nullopt;

  std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0);
  std::vector<double> prev(a.size(), 0.0);
  a[0] = 1.0;
  double err = r[0];
  for (int i = 1; i <= order; ++i) {
    double acc = r[static_cast<std::size_t>(i)];
    for (int j = 1; j < i; ++j)
      acc += a[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(i - j)];
    const double k = -acc / err;
    prev = a;
    for (int j = 1; j < i; ++j)
      a[static_cast<std::size_t>(j)] =
          prev[static_cast<std::size_t>(j)] + k * prev[static_cast<std::size_t>(i - j)];
    a[static_cast<std::size_t>(i)] = k;
    err *= 1.0 - k * k;
    // Perfectly predictable input: higher orders add nothing.
    if (!(err > 0.0)) break;
  }
  return a;
}

std::vector<std::complex<double>> PolynomialRoots(std::span<const double> coeffs,
                                                  int max_iter, double tol) {
  using cd = std::complex<double>;
  if (coeffs.empty() || coeffs[0] == 0.0) return {};
  const std::size_t n = coeffs.size() - 1;
  if (n == 0) return {};
  // Normalize to monic.
  std::vector<double> c(coeffs.begin(), coeffs.end());
  for (double& v : c) v /= coeffs[0];

  auto eval = [&](cd z) {
    cd acc = c[0];
    for (std::size_t k = 1; k <= n; ++k) acc = acc * z + c[k];
    return acc;
  };

  std::vector<cd> roots(n);
  const cd seed(0.4, 0.9);
  cd p = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    roots[i] = p;
    p *= seed;
  }
  for (int iter = 0; iter < max_iter; ++iter) {
    double max_step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cd denom = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= roots[i] - roots[j];
      if (std::abs(denom) == 0.0) denom = cd(1e-300, 0.0);
      const cd step = eval(roots[i]) / denom;
      roots[i] -= step;
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step < tol) break;
  }
  return roots;
}

FormantRow FormantsFromRoots(std::span<const std::complex<double>> roots,
                             int sample_rate, const AnalysisConfig& cfg) {
  const double fs = static_cast<double>(sample_rate);
  std::vector<std::pair<double, double>> cands;
  for (const auto& r : roots) {
    if (!(r.imag() > 0.0)) continue;
    const double mag = std::abs(r);
    if (!(mag > 0.0)) continue;
    const double freq = fs / (2.0 * std::numbers::pi) * std::arg(r);
    const double bw = -fs / std::numbers::pi * std::log(mag);
    if (freq >= cfg.formant_min_hz && freq <= cfg.formant_max_hz &&
        bw < cfg.formant_max_bw)
      cands.emplace_back(freq, bw);
  }
  std::sort(cands.begin(), cands.end());
  FormantRow row{};
  for (std::size_t i = 0; i < 3 && i < cands.size(); ++i) {
    row[i] = cands[i].first;
    row[i + 3] = cands[i].second;
  }
  return row;
}

std::vector<FormantRow> ExtractFormants(const Waveform& w,
                                        const AnalysisConfig& cfg) {
  const std::size_t frames = StftFrameCount(w.size(), cfg.stft());
  const std::size_t len = cfg.formant_window;
  const std::size_t order = static_cast<std::size_t>(cfg.lpc_order);
  std::vector<FormantRow> out(frames, FormantRow{});

  // Hamming analysis window.
  std::vector<double> window(len);
  for (std::size_t i = 0; i < len; ++i)
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (len - 1));

  std::vector<double> frame(len), r(order + 1);
  for (std::size_t t = 0; t < frames; ++t) {
    // One extra leading sample feeds the pre-emphasis filter.
    const auto seg = CenteredSegment(
        w.samples, static_cast<long long>(t * cfg.hop) - 1, len + 1);
    for (std::size_t i = 0; i < len; ++i)
      frame[i] = (seg[i + 1] - cfg.preemphasis * seg[i]) * window[i];
    for (std::size_t k = 0; k <= order; ++k) {
      double acc = 0.0;
      for (std::size_t i = k; i < len; ++i) acc += frame[i] * frame[i - k];
      r[k] = acc;
    }
    const auto lpc = LevinsonDurbin(r, cfg.lpc_order);
    if (!lpc) continue;
    const auto roots = PolynomialRoots(*lpc, cfg.root_max_iter, cfg.root_tol);
    out[t] = FormantsFromRoots(roots, w.sample_rate, cfg);
  }
  return out;
}

}  // namespace tap
