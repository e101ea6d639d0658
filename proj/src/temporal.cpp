// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>

#include "tap/acoustics.hpp"

namespace tap {
namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd Moments(const std::vector<double>& v) {
  MeanStd m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(var / static_cast<double>(v.size()));
  return m;
}

}  // namespace

// Statistics are computed over a centered window of frames, truncated at the
// utterance edges. Segments are voicing runs clipped to the window.
std::vector<TemporalRow> ExtractTemporalStats(const PitchTrack& pitch,
                                              std::span<const double> loudness,
                                              const AnalysisConfig& cfg) {
  const std::size_t frames = pitch.frames();
  std::vector<TemporalRow> out(frames);
  if (frames == 0) return out;
  const double frame_s = static_cast<double>(cfg.hop) / kPipelineRate;
  const auto half = static_cast<long long>(
      std::llround(0.5 * cfg.stats_window_s / frame_s));

  std::vector<double> voiced_runs, unvoiced_runs;
  for (std::size_t t = 0; t < frames; ++t) {
    const long long c = static_cast<long long>(t);
    const auto lo = static_cast<std::size_t>(std::max(0LL, c - half));
    const auto hi = static_cast<std::size_t>(
        std::min(static_cast<long long>(frames), c + half));
    const double duration = static_cast<double>(hi - lo) * frame_s;
    TemporalRow& row = out[t];

    voiced_runs.clear();
    unvoiced_runs.clear();
    std::size_t run_start = lo;
    for (std::size_t k = lo + 1; k <= hi; ++k) {
      if (k == hi || pitch.voiced[k] != pitch.voiced[run_start]) {
        const double len = static_cast<double>(k - run_start) * frame_s;
        (pitch.voiced[run_start] ? voiced_runs : unvoiced_runs).push_back(len);
        run_start = k;
      }
    }
    const MeanStd v = Moments(voiced_runs);
    const MeanStd u = Moments(unvoiced_runs);
    row.voiced_mean = v.mean;
    row.voiced_std = v.std;
    row.unvoiced_mean = u.mean;
    row.unvoiced_std = u.std;
    row.voiced_per_second =
        duration > 0.0 ? static_cast<double>(voiced_runs.size()) / duration : 0.0;

    if (loudness.size() == frames && hi - lo >= 3) {
      std::vector<double> window(loudness.begin() + static_cast<long long>(lo),
                                 loudness.begin() + static_cast<long long>(hi));
      const MeanStd m = Moments(window);
      const double threshold = m.mean + cfg.peak_threshold_std * m.std;
      std::size_t peaks = 0;
      for (std::size_t k = 1; k + 1 < window.size(); ++k)
        if (window[k] > window[k - 1] && window[k] >= window[k + 1] &&
            window[k] > threshold)
          ++peaks;
      row.loudness_peak_rate = static_cast<double>(peaks) / duration;
    }
  }
  return out;
}

}  // namespace tap
