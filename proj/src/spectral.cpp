// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Spectrum-domain descriptors: mel-band loudness and spectral balance.

#include <algorithm>
#include <cmath>

#include "tap/acoustics.hpp"

namespace tap {
namespace {

constexpr double kPowerFloor = 1e-12;

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

double Db(double power) { return 10.0 * std::log10(std::max(power, kPowerFloor)); }

// Power spectrum of one frame with helpers for band queries.
class FramePower {
 public:
  FramePower(const ComplexSpectrogram& spec, std::size_t t)
      : bin_hz_(static_cast<double>(spec.sample_rate()) / spec.config().n_fft) {
    const auto frame = spec.frame(t);
    power_.resize(frame.size());
    for (std::size_t f = 0; f < frame.size(); ++f) power_[f] = std::norm(frame[f]);
  }

  // Inclusive bin range whose centers lie in [lo_hz, hi_hz].
  std::pair<std::size_t, std::size_t> Bins(double lo_hz, double hi_hz) const {
    const auto lo = static_cast<long long>(std::ceil(std::max(lo_hz, 0.0) / bin_hz_ - 1e-9));
    const auto hi = static_cast<long long>(std::floor(hi_hz / bin_hz_ + 1e-9));
    const long long last = static_cast<long long>(power_.size()) - 1;
    return {static_cast<std::size_t>(std::clamp(lo, 0LL, last + 1)),
            static_cast<std::size_t>(std::clamp(hi, -1LL, last))};
  }

  // Sum of power over bins in [lo_hz, hi_hz) (upper edge exclusive).
  double Energy(double lo_hz, double hi_hz, bool include_hi) const {
    double sum = 0.0;
    for (std::size_t f = 0; f < power_.size(); ++f) {
      const double hz = f * bin_hz_;
      if (hz >= lo_hz && (include_hi ? hz <= hi_hz : hz < hi_hz)) sum += power_[f];
    }
    return sum;
  }

  // dB of the strongest bin in [lo_hz, hi_hz]; quadratic interpolation on the
  // dB values when refine is set and the maximum has two neighbours.
  double PeakDb(double lo_hz, double hi_hz, bool refine) const {
    const auto [lo, hi] = Bins(lo_hz, hi_hz);
    if (lo > hi) return Db(0.0);
    std::size_t best = lo;
    for (std::size_t f = lo + 1; f <= hi; ++f)
      if (power_[f] > power_[best]) best = f;
    const double b = Db(power_[best]);
    if (!refine || best == 0 || best + 1 >= power_.size()) return b;
    const double a = Db(power_[best - 1]);
    const double c = Db(power_[best + 1]);
    const double denom = a - 2.0 * b + c;
    if (!(denom < 0.0)) return b;
    const double shift = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    return b - 0.25 * (a - c) * shift;
  }

  // Least-squares slope of the dB spectrum against frequency (dB/Hz).
  double Slope(double lo_hz, double hi_hz) const {
    const auto [lo, hi] = Bins(lo_hz, hi_hz);
    if (hi <= lo) return 0.0;
    const double n = static_cast<double>(hi - lo + 1);
    double mx = 0.0, my = 0.0;
    for (std::size_t f = lo; f <= hi; ++f) {
      mx += f * bin_hz_;
      my += Db(power_[f]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t f = lo; f <= hi; ++f) {
      const double dx = f * bin_hz_ - mx;
      sxy += dx * (Db(power_[f]) - my);
      sxx += dx * dx;
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
  }

 private:
  double bin_hz_;
  std::vector<double> power_;
};

}  // namespace

std::vector<std::vector<double>> MelFilterbank(int bands, std::size_t bins,
                                               int sample_rate, double low_hz,
                                               double high_hz) {
  const double n_fft = 2.0 * static_cast<double>(bins - 1);
  const double mel_lo = HzToMel(low_hz), mel_hi = HzToMel(high_hz);
  std::vector<double> edges(static_cast<std::size_t>(bands) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (bands + 1));
  std::vector<std::vector<double>> fb(static_cast<std::size_t>(bands),
                                      std::vector<double>(bins, 0.0));
  for (std::size_t b = 0; b < fb.size(); ++b) {
    const double left = edges[b], center = edges[b + 1], right = edges[b + 2];
    for (std::size_t f = 0; f < bins; ++f) {
      const double hz = f * sample_rate / n_fft;
      if (hz > left && hz < center)
        fb[b][f] = (hz - left) / (center - left);
      else if (hz >= center && hz < right)
        fb[b][f] = (right - hz) / (right - center);
    }
  }
  return fb;
}

std::vector<double> ExtractLoudness(const ComplexSpectrogram& spec,
                                    const AnalysisConfig& cfg) {
  const auto fb = MelFilterbank(cfg.mel_bands, spec.bins(), spec.sample_rate(),
                                cfg.mel_low_hz, cfg.mel_high_hz);
  std::vector<double> loud(spec.frames(), 0.0);
  std::vector<double> power(spec.bins());
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    const auto frame = spec.frame(t);
    for (std::size_t f = 0; f < power.size(); ++f) power[f] = std::norm(frame[f]);
    double sum = 0.0;
    for (const auto& band : fb) {
      double p = 0.0;
      for (std::size_t f = 0; f < power.size(); ++f) p += band[f] * power[f];
      sum += std::pow(p, cfg.loudness_exponent);
    }
    loud[t] = sum;
  }
  return loud;
}

std::vector<BalanceRow> ExtractSpectralBalance(const ComplexSpectrogram& spec,
                                               const PitchTrack& pitch,
                                               std::span<const FormantRow> formants) {
  const std::size_t frames = spec.frames();
  std::vector<BalanceRow> out(frames, BalanceRow{});
  for (std::size_t t = 0; t < frames; ++t) {
    const FramePower fp(spec, t);
    BalanceRow& row = out[t];
    row[0] = Db(fp.Energy(50.0, 1000.0, false)) - Db(fp.Energy(1000.0, 5000.0, true));
    row[1] = fp.PeakDb(0.0, 2000.0, false) - fp.PeakDb(2000.0, 5000.0, false);
    row[2] = fp.Slope(0.0, 500.0);
    row[3] = fp.Slope(500.0, 1500.0);

    const bool voiced = t < pitch.frames() && pitch.voiced[t] && pitch.f0[t] > 0.0;
    if (!voiced) continue;
    const double f0 = pitch.f0[t];
    const double h1 = fp.PeakDb(0.5 * f0, 1.5 * f0, true);
    const double h2 = fp.PeakDb(1.5 * f0, 2.5 * f0, true);
    const FormantRow fr = t < formants.size() ? formants[t] : FormantRow{};
    for (std::size_t k = 0; k < 3; ++k) {
      if (fr[k] > 0.0)
        row[4 + k] = fp.PeakDb(fr[k] - 0.5 * f0, fr[k] + 0.5 * f0, true) - h1;
    }
    row[7] = h1 - h2;
    if (fr[2] > 0.0) row[8] = h1 - fp.PeakDb(fr[2] - 200.0, fr[2] + 200.0, true);
  }
  return out;
}

}  // namespace tap
