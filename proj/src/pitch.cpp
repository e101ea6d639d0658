// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>

#include "tap/acoustics.hpp"

namespace tap {

std::vector<double> CenteredSegment(std::span<const double> x,
                                    long long center, std::size_t length) {
  std::vector<double> seg(length, 0.0);
  const long long start = center - static_cast<long long>(length / 2);
  const long long n = static_cast<long long>(x.size());
  for (std::size_t i = 0; i < length; ++i) {
    const long long k = start + static_cast<long long>(i);
    if (k >= 0 && k < n) seg[i] = x[static_cast<std::size_t>(k)];
  }
  return seg;
}

YinResult YinFrame(std::span<const double> segment, std::size_t window,
                   std::size_t min_lag, std::size_t max_lag,
                   double dip_threshold) {
  YinResult result;
  if (segment.size() < window + max_lag || min_lag < 1 || min_lag >= max_lag)
    return result;

  double energy = 0.0;
  for (double v : segment) energy += v * v;
  if (energy <= 0.0) return result;

  // Difference function and its cumulative-mean normalization.
  std::vector<double> cmnd(max_lag + 1, 1.0);
  double running = 0.0;
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    double d = 0.0;
    for (std::size_t j = 0; j < window; ++j) {
      const double diff = segment[j] - segment[j + tau];
      d += diff * diff;
    }
    running += d;
    cmnd[tau] = running > 0.0 ? d * static_cast<double>(tau) / running : 1.0;
  }

  std::size_t best = 0;
  for (std::size_t tau = min_lag; tau <= max_lag; ++tau) {
    if (cmnd[tau] < dip_threshold) {
      while (tau + 1 <= max_lag && cmnd[tau + 1] < cmnd[tau]) ++tau;
      best = tau;
      break;
    }
  }
  if (best == 0) {
    best = min_lag;
    for (std::size_t tau = min_lag + 1; tau <= max_lag; ++tau)
      if (cmnd[tau] < cmnd[best]) best = tau;
  }

  double period = static_cast<double>(best);
  double value = cmnd[best];
  if (best > 1 && best < max_lag) {
    const double a = cmnd[best - 1], b = cmnd[best], c = cmnd[best + 1];
    const double denom = a - 2.0 * b + c;
    if (denom > 0.0) {
      const double shift = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
      period += shift;
      value = b - 0.25 * (a - c) * shift;
    }
  }
  result.period = period;
  result.aperiodicity = std::clamp(value, 0.0, 1.0);
  return result;
}

PitchTrack ExtractPitch(const Waveform& w, const AnalysisConfig& cfg) {
  const double fs = static_cast<double>(w.sample_rate);
  const StftConfig grid = cfg.stft();
  const std::size_t frames = StftFrameCount(w.size(), grid);
  const auto min_lag = static_cast<std::size_t>(std::floor(fs / cfg.f0_max));
  const auto max_lag = static_cast<std::size_t>(std::ceil(fs / cfg.f0_min));
  const std::size_t seg_len = cfg.pitch_window + max_lag;

  PitchTrack track;
  track.f0.assign(frames, 0.0);
  track.voiced.assign(frames, false);
  track.aperiodicity.assign(frames, 1.0);
  track.period.assign(frames, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto seg = CenteredSegment(
        w.samples, static_cast<long long>(t * cfg.hop), seg_len);
    const YinResult r = YinFrame(seg, cfg.pitch_window, min_lag, max_lag,
                                 cfg.yin_threshold);
    track.aperiodicity[t] = r.aperiodicity;
    if (r.period <= 0.0) continue;
    const double f0 = fs / r.period;
    if (r.aperiodicity < cfg.voicing_threshold && f0 >= cfg.f0_min &&
        f0 <= cfg.f0_max) {
      track.f0[t] = f0;
      track.voiced[t] = true;
      track.period[t] = r.period;
    }
  }
  return track;
}

}  // namespace tap
