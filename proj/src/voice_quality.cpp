// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Cycle-level perturbation (jitter, shimmer) and harmonics-to-noise ratio.

#include <algorithm>
#include <cmath>

#include "tap/acoustics.hpp"

namespace tap {
namespace {

struct Peak {
  double position;
  double value;
};

// Parabolic refinement of a local maximum at integer index i.
Peak RefinePeak(std::span<const double> x, std::size_t i) {
  if (i == 0 || i + 1 >= x.size()) return {static_cast<double>(i), x[i]};
  const double a = x[i - 1], b = x[i], c = x[i + 1];
  const double denom = a - 2.0 * b + c;
  if (denom >= 0.0) return {static_cast<double>(i), b};
  const double shift = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  return {static_cast<double>(i) + shift, b - 0.25 * (a - c) * shift};
}

// Index of the maximum of x over [lo, hi], clipped to the signal.
std::optional<std::size_t> ArgMax(std::span<const double> x, double lo,
                                  double hi) {
  const long long n = static_cast<long long>(x.size());
  const long long a = std::max(0LL, static_cast<long long>(std::ceil(lo)));
  const long long b = std::min(n - 1, static_cast<long long>(std::floor(hi)));
  if (a > b) return std::nullopt;
  long long best = a;
  for (long long k = a + 1; k <= b; ++k)
    if (x[static_cast<std::size_t>(k)] > x[static_cast<std::size_t>(best)])
      best = k;
  return static_cast<std::size_t>(best);
}

}  // namespace

CycleStats MeasureCycles(std::span<const double> x, double period) {
  CycleStats stats;
  if (x.empty() || !(period > 1.0)) return stats;

  const auto anchor = ArgMax(x, 0.0, static_cast<double>(x.size() - 1));
  if (!anchor || x[*anchor] <= 0.0) return stats;

  std::vector<Peak> peaks{RefinePeak(x, *anchor)};
  // Walk backward, then forward, one expected period at a time.
  for (int dir : {-1, 1}) {
    Peak prev = peaks.front();
    if (dir > 0) prev = peaks.back();
    for (;;) {
      const double expect = prev.position + dir * period;
      const auto idx = ArgMax(x, expect - 0.25 * period, expect + 0.25 * period);
      if (!idx) break;
      // Reject edge hits: a true cycle peak is an interior local maximum.
      if (*idx == 0 || *idx + 1 >= x.size()) break;
      if (x[*idx] <= 0.0 || x[*idx] < x[*idx - 1] || x[*idx] < x[*idx + 1])
        break;
      const Peak p = RefinePeak(x, *idx);
      if (dir < 0)
        peaks.insert(peaks.begin(), p);
      else
        peaks.push_back(p);
      prev = p;
    }
  }
  if (peaks.size() < 4) return stats;  // need >= 3 periods

  std::vector<double> periods;
  for (std::size_t i = 1; i < peaks.size(); ++i)
    periods.push_back(peaks[i].position - peaks[i - 1].position);
  double period_mean = 0.0, period_diff = 0.0;
  for (double p : periods) period_mean += p;
  period_mean /= static_cast<double>(periods.size());
  for (std::size_t i = 1; i < periods.size(); ++i)
    period_diff += std::abs(periods[i] - periods[i - 1]);
  period_diff /= static_cast<double>(periods.size() - 1);

  double amp_mean = 0.0, amp_diff = 0.0;
  for (const Peak& p : peaks) amp_mean += p.value;
  amp_mean /= static_cast<double>(peaks.size());
  for (std::size_t i = 1; i < peaks.size(); ++i)
    amp_diff += std::abs(peaks[i].value - peaks[i - 1].value);
  amp_diff /= static_cast<double>(peaks.size() - 1);

  stats.periods = periods.size();
  stats.jitter = period_mean > 0.0 ? period_diff / period_mean : 0.0;
  stats.shimmer = amp_mean > 0.0 ? amp_diff / amp_mean : 0.0;
  return stats;
}

JitterShimmer ExtractJitterShimmer(const Waveform& w, const PitchTrack& pitch,
                                   const AnalysisConfig& cfg) {
  const std::size_t frames = pitch.frames();
  JitterShimmer out{std::vector<double>(frames, 0.0),
                    std::vector<double>(frames, 0.0)};
  const auto context = static_cast<long long>(
      std::llround(cfg.cycle_context_s * w.sample_rate));
  const long long n = static_cast<long long>(w.size());
  for (std::size_t t = 0; t < frames; ++t) {
    if (!pitch.voiced[t]) continue;
    const long long center = static_cast<long long>(t * cfg.hop);
    const long long lo = std::max(0LL, center - context / 2);
    const long long hi = std::min(n, center - context / 2 + context);
    if (hi - lo < 3) continue;
    const std::span<const double> seg(w.samples.data() + lo,
                                      static_cast<std::size_t>(hi - lo));
    const CycleStats s = MeasureCycles(seg, w.sample_rate / pitch.f0[t]);
    out.jitter[t] = s.jitter;
    out.shimmer[t] = s.shimmer;
  }
  return out;
}

std::vector<double> ExtractHnr(const Waveform& w, const PitchTrack& pitch,
                               const AnalysisConfig& cfg) {
  const std::size_t frames = pitch.frames();
  const double floor_db = -cfg.hnr_clamp_db;
  std::vector<double> hnr(frames, floor_db);
  const double fs = static_cast<double>(w.sample_rate);
  const auto max_lag = static_cast<std::size_t>(std::ceil(fs / cfg.f0_min)) + 2;
  const std::size_t win = cfg.pitch_window;
  const std::size_t seg_len = win + max_lag;

  for (std::size_t t = 0; t < frames; ++t) {
    if (!pitch.voiced[t]) continue;
    const auto seg = CenteredSegment(
        w.samples, static_cast<long long>(t * cfg.hop), seg_len);
    auto corr = [&](std::size_t lag) {
      if (lag == 0 || lag + win > seg.size()) return -1.0;
      double xy = 0.0, xx = 0.0, yy = 0.0;
      for (std::size_t j = 0; j < win; ++j) {
        xy += seg[j] * seg[j + lag];
        xx += seg[j] * seg[j];
        yy += seg[j + lag] * seg[j + lag];
      }
      const double den = std::sqrt(xx * yy);
      return den > 0.0 ? xy / den : 0.0;
    };
    // Local maximum of the normalized autocorrelation near the pitch lag.
    auto lag = static_cast<std::size_t>(std::llround(pitch.period[t]));
    lag = std::clamp<std::size_t>(lag, 2, max_lag - 1);
    for (int step = 0; step < 3; ++step) {
      if (corr(lag + 1) > corr(lag) && lag + 1 < max_lag) {
        ++lag;
      } else if (corr(lag - 1) > corr(lag) && lag > 2) {
        --lag;
      } else {
        break;
      }
    }
    const double a = corr(lag - 1), b = corr(lag), c = corr(lag + 1);
    double r = b;
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) {
      const double shift = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
      r = b - 0.25 * (a - c) * shift;
    }
    if (!(r > 0.0)) continue;
    if (r >= 1.0) {
      hnr[t] = cfg.hnr_clamp_db;
      continue;
    }
    hnr[t] = std::clamp(10.0 * std::log10(r / (1.0 - r)), floor_db,
                        cfg.hnr_clamp_db);
  }
  return hnr;
}

}  // namespace tap
