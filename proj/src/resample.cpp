// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <numbers>
#include <numeric>

#include "tap/error.hpp"
#include "tap/signal.hpp"

namespace tap {
namespace {

constexpr double kHalfTaps = 32.0;   // 64 taps at the lower rate
constexpr double kKaiserBeta = 8.6;
constexpr double kRolloff = 0.94;    // cutoff relative to the lower Nyquist
constexpr long long kMaxTablePhases = 4096;

double BesselI0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

class SincKernel {
 public:
  SincKernel(double cutoff, double half_width)
      : cutoff_(cutoff), half_(half_width), norm_(BesselI0(kKaiserBeta)) {}

  double half_width() const { return half_; }

  // x in input samples.
  double operator()(double x) const {
    if (std::abs(x) >= half_) return 0.0;
    const double r = x / half_;
    const double kaiser = BesselI0(kKaiserBeta * std::sqrt(1.0 - r * r)) / norm_;
    const double arg = std::numbers::pi * cutoff_ * x;
    const double sinc = arg == 0.0 ? 1.0 : std::sin(arg) / arg;
    return cutoff_ * sinc * kaiser;
  }

 private:
  double cutoff_;
  double half_;
  double norm_;
};

}  // namespace

Waveform Resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw ConfigError("target rate must be positive");
  if (w.sample_rate <= 0) throw ConfigError("source rate must be positive");
  if (target_rate == w.sample_rate) return w;

  const long long g = std::gcd(static_cast<long long>(w.sample_rate),
                               static_cast<long long>(target_rate));
  const long long up = target_rate / g;     // L
  const long long down = w.sample_rate / g;  // M
  const double ratio = static_cast<double>(up) / static_cast<double>(down);
  const double lower = std::min(1.0, ratio);
  const SincKernel kernel(kRolloff * lower, kHalfTaps / lower);

  const long long n_in = static_cast<long long>(w.size());
  const long long n_out = (n_in * up + down / 2) / down;
  const long long reach = static_cast<long long>(std::ceil(kernel.half_width()));
  const long long taps = 2 * reach + 1;

  // Phase table: taps for output position base + phase/L, offsets -reach..reach.
  std::vector<std::vector<double>> table;
  const bool tabulate = up <= kMaxTablePhases;
  auto make_phase = [&](long long phase) {
    std::vector<double> h(static_cast<std::size_t>(taps));
    const double frac = static_cast<double>(phase) / static_cast<double>(up);
    for (long long j = -reach; j <= reach; ++j)
      h[static_cast<std::size_t>(j + reach)] = kernel(frac - static_cast<double>(j));
    return h;
  };
  if (tabulate) {
    table.reserve(static_cast<std::size_t>(up));
    for (long long p = 0; p < up; ++p) table.push_back(make_phase(p));
  }

  Waveform out;
  out.sample_rate = target_rate;
  out.samples.assign(static_cast<std::size_t>(n_out), 0.0);
  std::vector<double> scratch;
  for (long long n = 0; n < n_out; ++n) {
    const long long pos = n * down;
    const long long base = pos / up;
    const long long phase = pos % up;
    const std::vector<double>* h;
    if (tabulate) {
      h = &table[static_cast<std::size_t>(phase)];
    } else {
      scratch = make_phase(phase);
      h = &scratch;
    }
    double acc = 0.0;
    for (long long j = -reach; j <= reach; ++j) {
      const long long i = base + j;
      if (i < 0 || i >= n_in) continue;
      acc += w.samples[static_cast<std::size_t>(i)] *
             (*h)[static_cast<std::size_t>(j + reach)];
    }
    out.samples[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

}  // namespace tap
