// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "tap/acoustics.hpp"
#include "tap/dataset.hpp"
#include "tap/error.hpp"
#include "tap/random.hpp"

using namespace tap;

namespace {

Waveform Sine(double hz, double seconds, double amp = 0.5) {
  SignalParams p;
  p.frequency = hz;
  p.duration = seconds;
  p.amplitude = amp;
  return GenTestSignal(SignalKind::kSine, p);
}

Waveform Scaled(Waveform w, double c) {
  for (double& v : w.samples) v *= c;
  return w;
}

// Cumulative-mean-normalized difference written straight from its
// definition: d'(tau) = d(tau) / ((1/tau) sum_{j=1..tau} d(j)).
std::vector<double> BruteCmnd(const std::vector<double>& seg, std::size_t window,
                              std::size_t max_lag) {
  std::vector<double> d(max_lag + 1, 0.0), out(max_lag + 1, 1.0);
  for (std::size_t tau = 1; tau <= max_lag; ++tau)
    for (std::size_t j = 0; j < window; ++j)
      d[tau] += (seg[j] - seg[j + tau]) * (seg[j] - seg[j + tau]);
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    double mean = 0.0;
    for (std::size_t j = 1; j <= tau; ++j) mean += d[j];
    mean /= static_cast<double>(tau);
    out[tau] = mean > 0.0 ? d[tau] / mean : 1.0;
  }
  return out;
}

// Lag search by exhaustive scan: first lag under the threshold followed
// down to its local minimum, otherwise the global minimum.
std::size_t BruteLag(const std::vector<double>& cmnd, std::size_t lo, std::size_t hi,
                     double threshold) {
  for (std::size_t tau = lo; tau <= hi; ++tau) {
    if (cmnd[tau] < threshold) {
      while (tau < hi && cmnd[tau + 1] < cmnd[tau]) ++tau;
      return tau;
    }
  }
  std::size_t best = lo;
  for (std::size_t tau = lo; tau <= hi; ++tau)
    if (cmnd[tau] < cmnd[best]) best = tau;
  return best;
}

std::vector<double> VoicedF0(const PitchTrack& p) {
  std::vector<double> f;
  for (std::size_t t = 0; t < p.frames(); ++t)
    if (p.voiced[t]) f.push_back(p.f0[t]);
  return f;
}

PitchTrack TrackFromMask(const std::vector<bool>& voiced, double f0 = 150.0) {
  PitchTrack p;
  p.voiced = voiced;
  for (bool v : voiced) {
    p.f0.push_back(v ? f0 : 0.0);
    p.aperiodicity.push_back(v ? 0.0 : 1.0);
    p.period.push_back(v ? kPipelineRate / f0 : 0.0);
  }
  return p;
}

// Run lengths (seconds) of each voicing state inside frames [lo, hi).
void RunLengths(const std::vector<bool>& mask, std::size_t lo, std::size_t hi,
                std::vector<double>& voiced, std::vector<double>& unvoiced) {
  std::size_t k = lo;
  while (k < hi) {
    std::size_t e = k;
    while (e < hi && mask[e] == mask[k]) ++e;
    (mask[k] ? voiced : unvoiced).push_back((e - k) * 0.01);
    k = e;
  }
}

double PopStd(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = 0.0, s = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  return m / v.size();
}

}  // namespace

TEST_SUITE("acoustics") {

TEST_CASE("yin lag choice agrees with an exhaustive search") {
  const AnalysisConfig cfg;
  Rng rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    SignalParams p;
    p.duration = 0.2;
    p.f0 = rng.Uniform(70.0, 400.0);
    p.formants = {rng.Uniform(300, 900), rng.Uniform(1000, 2000), rng.Uniform(2200, 3500)};
    Waveform w = GenTestSignal(SignalKind::kPulseTrainVowel, p);
    for (double& v : w.samples) v += 0.05 * rng.Gaussian();
    const std::size_t min_lag = 32, max_lag = 267, win = cfg.pitch_window;
    const auto seg = CenteredSegment(w.samples, 1600, win + max_lag);
    const auto cmnd = BruteCmnd(seg, win, max_lag);
    const std::size_t lag = BruteLag(cmnd, min_lag, max_lag, cfg.yin_threshold);
    const YinResult r = YinFrame(seg, win, min_lag, max_lag, cfg.yin_threshold);
    CHECK(std::abs(r.period - static_cast<double>(lag)) <= 0.5);
    CHECK(r.aperiodicity <= cmnd[lag] + 1e-12);
    CHECK(r.aperiodicity >= 0.0);
  }
}

TEST_CASE("pitch of a 220 Hz sine") {
  const PitchTrack p = ExtractPitch(Sine(220.0, 1.0));
  const auto f = VoicedF0(p);
  REQUIRE(f.size() > 0.9 * p.frames());
  CHECK(std::abs(oracle::Median(f) - 220.0) < 2.0);
  for (std::size_t t = 0; t < p.frames(); ++t)
    CHECK((p.f0[t] > 0.0) == static_cast<bool>(p.voiced[t]));
}

TEST_CASE("pitch follows a linear chirp") {
  SignalParams c;
  c.frequency = 100.0;
  c.end_frequency = 400.0;
  c.duration = 2.0;
  const PitchTrack p = ExtractPitch(GenTestSignal(SignalKind::kChirp, c));
  std::size_t voiced = 0, good = 0;
  for (std::size_t t = 0; t < p.frames(); ++t) {
    if (!p.voiced[t]) continue;
    ++voiced;
    const double truth = 100.0 + 150.0 * (t * 0.01);
    if (std::abs(p.f0[t] - truth) <= 0.05 * truth) ++good;
  }
  REQUIRE(voiced > 150);
  CHECK(good >= 0.9 * voiced);
}

TEST_CASE("voicing rates of a long sine and of white noise") {
  const PitchTrack sine = ExtractPitch(Sine(220.0, 2.0));
  CHECK(VoicedF0(sine).size() >= 0.95 * sine.frames());
  SignalParams n;
  n.duration = 2.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const PitchTrack p = ExtractPitch(GenTestSignal(SignalKind::kWhiteNoise, n, seed));
    CHECK(VoicedF0(p).size() <= 0.10 * p.frames());
  }
}

TEST_CASE("silence is unvoiced everywhere") {
  SignalParams s;
  const PitchTrack p = ExtractPitch(GenTestSignal(SignalKind::kSilence, s));
  for (std::size_t t = 0; t < p.frames(); ++t) {
    CHECK_FALSE(p.voiced[t]);
    CHECK(p.f0[t] == 0.0);
  }
}

TEST_CASE("pitch is amplitude invariant") {
  const Waveform base = SynthUtterance(21, 1.5);
  const PitchTrack ref = ExtractPitch(base);
  for (double c : {0.1, 0.37, 1.0}) {
    const PitchTrack p = ExtractPitch(Scaled(base, c));
    REQUIRE(p.frames() == ref.frames());
    for (std::size_t t = 0; t < p.frames(); ++t) {
      CHECK(p.voiced[t] == ref.voiced[t]);
      CHECK(std::abs(p.f0[t] - ref.f0[t]) < 0.1);
    }
  }
}

TEST_CASE("cycle perturbation of a constructed pulse sequence") {
  // Gaussian bumps with alternating periods 100/104 and amplitudes 1/0.8.
  std::vector<double> x(1600, 0.0);
  std::vector<double> pos, amp;
  double p = 60.0;
  for (int i = 0; p < 1540.0; ++i) {
    pos.push_back(p);
    amp.push_back(i % 2 ? 0.8 : 1.0);
    p += i % 2 ? 104.0 : 100.0;
  }
  for (std::size_t k = 0; k < pos.size(); ++k)
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double d = static_cast<double>(n) - pos[k];
      x[n] += amp[k] * std::exp(-0.5 * d * d / 9.0);
    }
  std::vector<double> periods;
  for (std::size_t k = 1; k < pos.size(); ++k) periods.push_back(pos[k] - pos[k - 1]);
  double dp = 0.0, da = 0.0;
  for (std::size_t k = 1; k < periods.size(); ++k) dp += std::abs(periods[k] - periods[k - 1]);
  for (std::size_t k = 1; k < amp.size(); ++k) da += std::abs(amp[k] - amp[k - 1]);
  const double jitter = dp / (periods.size() - 1) / Mean(periods);
  const double shimmer = da / (amp.size() - 1) / Mean(amp);

  const CycleStats s = MeasureCycles(x, 102.0);
  CHECK(s.periods == periods.size());
  CHECK(s.jitter == doctest::Approx(jitter).epsilon(1e-6));
  CHECK(s.shimmer == doctest::Approx(shimmer).epsilon(1e-6));

  // Too few cycles.
  std::vector<double> short_x(x.begin(), x.begin() + 300);
  CHECK(MeasureCycles(short_x, 102.0).jitter == 0.0);
}

TEST_CASE("a pure sine has negligible jitter and shimmer") {
  const Waveform w = Sine(200.0, 1.0);
  const PitchTrack p = ExtractPitch(w);
  const JitterShimmer js = ExtractJitterShimmer(w, p);
  for (std::size_t t = 10; t + 10 < p.frames(); ++t) {
    CHECK(js.jitter[t] < 1e-3);
    CHECK(js.shimmer[t] < 1e-3);
  }
}

TEST_CASE("hnr clamps for a sine and floors when unvoiced") {
  const Waveform w = Sine(220.0, 1.0);
  const PitchTrack p = ExtractPitch(w);
  const auto h = ExtractHnr(w, p);
  for (std::size_t t = 5; t + 5 < p.frames(); ++t) {
    REQUIRE(p.voiced[t]);
    CHECK(h[t] == doctest::Approx(40.0).epsilon(1e-3));
  }
  SignalParams s;
  const Waveform sil = GenTestSignal(SignalKind::kSilence, s);
  for (double v : ExtractHnr(sil, ExtractPitch(sil))) CHECK(v == -40.0);
}

TEST_CASE("hnr of a sine in white noise tracks the mixture autocorrelation") {
  const double fs = kPipelineRate;
  Waveform w = Sine(200.0, 1.0, 0.5);
  SignalParams np;
  np.amplitude = 0.5 / std::sqrt(2.0) / std::sqrt(10.0);  // 10 dB SNR
  const Waveform noise = GenTestSignal(SignalKind::kWhiteNoise, np, 5);
  for (std::size_t i = 0; i < w.size(); ++i) w.samples[i] += noise.samples[i];
  const AnalysisConfig cfg;
  const PitchTrack p = ExtractPitch(w, cfg);
  const auto h = ExtractHnr(w, p, cfg);

  std::vector<double> lib, ref;
  const std::size_t win = cfg.pitch_window;
  const std::size_t seg_len = win + static_cast<std::size_t>(std::ceil(fs / 60.0)) + 2;
  for (std::size_t t = 0; t < p.frames(); ++t) {
    if (!p.voiced[t]) continue;
    const auto seg = CenteredSegment(w.samples, static_cast<long long>(t * 160), seg_len);
    double best = -1.0;
    const auto center = static_cast<long long>(std::llround(p.period[t]));
    for (long long lag = center - 3; lag <= center + 3; ++lag) {
      double xy = 0, xx = 0, yy = 0;
      for (std::size_t j = 0; j < win; ++j) {
        xy += seg[j] * seg[j + lag];
        xx += seg[j] * seg[j];
        yy += seg[j + lag] * seg[j + lag];
      }
      best = std::max(best, xy / std::sqrt(xx * yy));
    }
    ref.push_back(10.0 * std::log10(best / (1.0 - best)));
    lib.push_back(h[t]);
  }
  REQUIRE(lib.size() > 50);
  CHECK(std::abs(oracle::Median(lib) - oracle::Median(ref)) < 0.5);
  CHECK(std::abs(oracle::Median(lib) - 10.0) < 3.0);
}

TEST_CASE("loudness scales as power to the 0.33") {
  const Waveform w = SynthUtterance(4, 0.5);
  const auto a = ExtractLoudness(Stft(w));
  const auto b = ExtractLoudness(Stft(Scaled(w, 2.0)));
  const double gain = std::pow(4.0, 0.33);
  for (std::size_t t = 0; t < a.size(); ++t)
    CHECK(b[t] == doctest::Approx(gain * a[t]).epsilon(1e-9));
  SignalParams s;
  for (double v : ExtractLoudness(Stft(GenTestSignal(SignalKind::kSilence, s)))) CHECK(v == 0.0);
}

TEST_CASE("loudness is comparable for equal-amplitude tones across the band") {
  const auto lo = ExtractLoudness(Stft(Sine(1000.0, 1.0)));
  const auto hi = ExtractLoudness(Stft(Sine(4000.0, 1.0)));
  const double a = oracle::Median(lo), b = oracle::Median(hi);
  CHECK(std::abs(a - b) < 0.2 * a);
}

TEST_CASE("mel filterbank triangles") {
  const auto fb = MelFilterbank(26, 257, 16000, 20.0, 8000.0);
  REQUIRE(fb.size() == 26);
  for (const auto& band : fb) {
    double peak = 0.0;
    for (double v : band) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      peak = std::max(peak, v);
    }
    CHECK(peak > 0.3);
  }
}

TEST_CASE("levinson-durbin solves the normal equations") {
  Rng rng(8);
  std::vector<double> x(400);
  double y1 = 0, y2 = 0;
  for (double& v : x) {
    const double y = rng.Gaussian() + 1.3 * y1 - 0.6 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
  const int order = 10;
  std::vector<double> r(order + 1, 0.0);
  for (int k = 0; k <= order; ++k)
    for (std::size_t i = k; i < x.size(); ++i) r[k] += x[i] * x[i - k];
  const auto a = LevinsonDurbin(r, order);
  REQUIRE(a);
  Eigen::MatrixXd R(order, order);
  Eigen::VectorXd rhs(order);
  for (int i = 0; i < order; ++i) {
    rhs(i) = -r[i + 1];
    for (int j = 0; j < order; ++j) R(i, j) = r[std::abs(i - j)];
  }
  const Eigen::VectorXd sol = R.ldlt().solve(rhs);
  CHECK((*a)[0] == 1.0);
  for (int i = 0; i < order; ++i) CHECK((*a)[i + 1] == doctest::Approx(sol(i)).epsilon(1e-8));
  CHECK_FALSE(LevinsonDurbin(std::vector<double>(order + 1, 0.0), order));
}

TEST_CASE("durand-kerner roots match companion-matrix eigenvalues") {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 16;
    std::vector<double> c(n + 1);
    c[0] = 1.0;
    for (int k = 1; k <= n; ++k) c[k] = rng.Uniform(-0.5, 0.5) / k;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) comp(0, k) = -c[k + 1];
    for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
    const Eigen::VectorXcd eig = comp.eigenvalues();
    const auto roots = PolynomialRoots(c);
    REQUIRE(roots.size() == static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      double nearest = 1e9;
      for (const auto& z : roots) nearest = std::min(nearest, std::abs(z - eig(k)));
      CHECK(nearest < 1e-7);
    }
  }
}

TEST_CASE("formants from a known conjugate pair") {
  const double fs = 16000.0, r = 0.95, theta = 2.0 * oracle::kPi * 1000.0 / fs;
  const std::vector<double> c{1.0, -2.0 * r * std::cos(theta), r * r};
  const auto roots = PolynomialRoots(c);
  const FormantRow row = FormantsFromRoots(roots, 16000);
  CHECK(std::abs(row[0] - 1000.0) < 1.0);
  CHECK(std::abs(row[3] - (-fs / oracle::kPi * std::log(r))) < 1.0);
  CHECK(row[1] == 0.0);
  CHECK(row[2] == 0.0);
}

TEST_CASE("formants of a synthetic resonator vowel") {
  SignalParams v;
  v.duration = 1.0;
  v.formants = {700.0, 1220.0, 2600.0};
  v.bandwidths = {130.0, 70.0, 160.0};
  v.f0 = 100.0;
  const auto fm = ExtractFormants(GenTestSignal(SignalKind::kPulseTrainVowel, v));
  for (int k = 0; k < 3; ++k) {
    std::vector<double> f;
    for (std::size_t t = 3; t + 3 < fm.size(); ++t) f.push_back(fm[t][k]);
    CHECK(std::abs(oracle::Median(f) - v.formants[k]) < 0.1 * v.formants[k]);
  }
}

TEST_CASE("silent frames give all-zero formant rows") {
  SignalParams s;
  for (const auto& row : ExtractFormants(GenTestSignal(SignalKind::kSilence, s)))
    for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("spectral slopes of a flat spectrum vanish") {
  // A unit impulse under the window peak has an exactly flat spectrum.
  Waveform w;
  w.samples.assign(16000, 0.0);
  w.samples[8000] = 1.0;
  const ComplexSpectrogram s = Stft(w);
  const PitchTrack p = TrackFromMask(std::vector<bool>(s.frames(), false));
  const auto rows = ExtractSpectralBalance(s, p, std::vector<FormantRow>(s.frames()));
  CHECK(std::abs(rows[50][2]) < 1e-3);
  CHECK(std::abs(rows[50][3]) < 1e-3);
}

TEST_CASE("spectral balance of white noise matches explicit fits") {
  SignalParams np;
  np.amplitude = 0.1;
  const Waveform w = GenTestSignal(SignalKind::kWhiteNoise, np, 17);
  const ComplexSpectrogram s = Stft(w);
  const PitchTrack p = TrackFromMask(std::vector<bool>(s.frames(), false));
  const auto rows = ExtractSpectralBalance(s, p, std::vector<FormantRow>(s.frames()));
  auto db = [](double pw) { return 10.0 * std::log10(std::max(pw, 1e-12)); };
  for (std::size_t t = 0; t < s.frames(); t += 7) {
    std::vector<double> x1, y1, x2, y2;
    double low = 0.0, high = 0.0, peak_lo = 0.0, peak_hi = 0.0;
    for (std::size_t f = 0; f < s.bins(); ++f) {
      const double hz = s.bin_hz(f), pw = std::norm(s.at(t, f));
      if (hz <= 500.0) { x1.push_back(hz); y1.push_back(db(pw)); }
      if (hz >= 500.0 && hz <= 1500.0) { x2.push_back(hz); y2.push_back(db(pw)); }
      if (hz >= 50.0 && hz < 1000.0) low += pw;
      if (hz >= 1000.0 && hz <= 5000.0) high += pw;
      if (hz <= 2000.0) peak_lo = std::max(peak_lo, pw);
      if (hz >= 2000.0 && hz <= 5000.0) peak_hi = std::max(peak_hi, pw);
    }
    CHECK(rows[t][0] == doctest::Approx(db(low) - db(high)).epsilon(1e-9));
    CHECK(rows[t][1] == doctest::Approx(db(peak_lo) - db(peak_hi)).epsilon(1e-9));
    CHECK(rows[t][2] == doctest::Approx(oracle::LsSlope(x1, y1)).epsilon(1e-9));
    CHECK(rows[t][3] == doctest::Approx(oracle::LsSlope(x2, y2)).epsilon(1e-9));
    for (int k = 4; k < 9; ++k) CHECK(rows[t][k] == 0.0);
  }
}

TEST_CASE("h1-h2 of a two-tone frame") {
  Waveform w;
  for (int i = 0; i < 8000; ++i)
    w.samples.push_back(std::sin(2 * oracle::kPi * 200.0 * i / 16000.0) +
                        0.5 * std::sin(2 * oracle::kPi * 400.0 * i / 16000.0));
  const ComplexSpectrogram s = Stft(w);
  const PitchTrack p = TrackFromMask(std::vector<bool>(s.frames(), true), 200.0);
  const auto rows = ExtractSpectralBalance(s, p, std::vector<FormantRow>(s.frames()));
  CHECK(std::abs(rows[25][7] - 20.0 * std::log10(2.0)) < 0.5);
}

TEST_CASE("temporal statistics of a fully voiced second") {
  const PitchTrack p = TrackFromMask(std::vector<bool>(101, true));
  const auto rows = ExtractTemporalStats(p, std::vector<double>(101, 1.0));
  const TemporalRow& r = rows[50];
  CHECK(r.voiced_mean == doctest::Approx(1.0).epsilon(0.02));
  CHECK(r.voiced_std == 0.0);
  CHECK(r.voiced_per_second == doctest::Approx(1.0).epsilon(0.02));
  CHECK(r.unvoiced_mean == 0.0);
  CHECK(r.unvoiced_std == 0.0);
  CHECK(r.loudness_peak_rate == 0.0);
}

TEST_CASE("temporal statistics of an all-unvoiced window") {
  const PitchTrack p = TrackFromMask(std::vector<bool>(301, false));
  const auto rows = ExtractTemporalStats(p, std::vector<double>(301, 0.0));
  const TemporalRow& r = rows[150];
  CHECK(r.voiced_mean == 0.0);
  CHECK(r.voiced_per_second == 0.0);
  CHECK(r.unvoiced_mean == doctest::Approx(1.0));
  CHECK(r.unvoiced_std == 0.0);
}

TEST_CASE("temporal statistics of alternating 100 ms voicing") {
  std::vector<bool> mask(400);
  for (std::size_t t = 0; t < mask.size(); ++t) mask[t] = (t / 10) % 2 == 0;
  std::vector<double> loud(mask.size());
  for (std::size_t t = 0; t < loud.size(); ++t) loud[t] = std::sin(2 * oracle::kPi * t / 20.0);
  const PitchTrack p = TrackFromMask(mask);
  const auto rows = ExtractTemporalStats(p, loud);
  for (std::size_t t = 0; t < mask.size(); ++t) {
    const std::size_t lo = t >= 50 ? t - 50 : 0, hi = std::min<std::size_t>(mask.size(), t + 50);
    std::vector<double> v, u;
    RunLengths(mask, lo, hi, v, u);
    CHECK(rows[t].voiced_mean == doctest::Approx(Mean(v)).epsilon(1e-12));
    CHECK(rows[t].voiced_std == doctest::Approx(PopStd(v)).epsilon(1e-12));
    CHECK(rows[t].unvoiced_mean == doctest::Approx(Mean(u)).epsilon(1e-12));
    CHECK(rows[t].unvoiced_std == doctest::Approx(PopStd(u)).epsilon(1e-12));
    const double dur = (hi - lo) * 0.01;
    CHECK(rows[t].voiced_per_second == doctest::Approx(v.size() / dur));
    if (t >= 50 && t + 50 <= mask.size()) {
      CHECK(std::abs(rows[t].voiced_per_second - 5.0) <= 1.0);
      // Loudness peaks once per 200 ms cycle; only interior window frames
      // can be peaks.
      double mean = 0.0, var = 0.0;
      for (std::size_t k = lo; k < hi; ++k) mean += loud[k];
      mean /= (hi - lo);
      for (std::size_t k = lo; k < hi; ++k) var += (loud[k] - mean) * (loud[k] - mean);
      const double thr = mean + 0.25 * std::sqrt(var / (hi - lo));
      int peaks = 0;
      for (std::size_t k = lo + 1; k + 1 < hi; ++k)
        if (loud[k] > loud[k - 1] && loud[k] >= loud[k + 1] && loud[k] > thr) ++peaks;
      CHECK(rows[t].loudness_peak_rate == doctest::Approx(peaks / dur));
      CHECK(std::abs(rows[t].loudness_peak_rate - 5.0) <= 1.0);
      if ((t - 50) % 20 == 0) {
        CHECK(std::abs(rows[t].voiced_mean - 0.1) <= 0.01);
        CHECK(std::abs(rows[t].unvoiced_mean - 0.1) <= 0.01);
      }
    }
  }
}

TEST_CASE("extract_all row count equals the stft frame count") {
  const Waveform w = SynthUtterance(2, 10.0);
  const TapMatrix m = ExtractAll(w);
  CHECK(m.frames() == 1001);
  CHECK(m.frames() == Stft(w).frames());
  CHECK(m.AllFinite());
}

TEST_CASE("extract_all pitch column of a sine and resampled input") {
  const TapMatrix m = ExtractAll(Sine(220.0, 1.0));
  std::vector<double> f;
  for (double v : m.column(kPitch))
    if (v > 0) f.push_back(v);
  CHECK(std::abs(oracle::Median(f) - 220.0) < 2.0);

  Waveform w44;
  w44.sample_rate = 44100;
  for (int i = 0; i < 44100; ++i) w44.samples.push_back(0.5 * std::sin(2 * oracle::kPi * 220.0 * i / 44100.0));
  const TapMatrix r = ExtractAll(w44);
  CHECK(r.frames() == 101);
  std::vector<double> g;
  for (double v : r.column(kPitch))
    if (v > 0) g.push_back(v);
  CHECK(std::abs(oracle::Median(g) - 220.0) < 2.0);
}

TEST_CASE("extract_all on silence keeps conditional columns constant") {
  SignalParams s;
  const TapMatrix m = ExtractAll(GenTestSignal(SignalKind::kSilence, s));
  for (std::size_t p : {kPitch, kJitter, kShimmer, kHnr, kF1Freq, kF2Freq, kF3Freq, kF1Bandwidth,
                        kF1RelEnergy, kF2RelEnergy, kF3RelEnergy, kH1MinusH2, kH1MinusA3}) {
    const auto col = m.column(p);
    for (double v : col) CHECK(v == col[0]);
  }
  for (double v : m.column(kHnr)) CHECK(v == -40.0);
}

TEST_CASE("extract_all stays finite on hostile inputs") {
  Rng rng(99);
  std::vector<Waveform> inputs;
  Waveform noise;
  for (int i = 0; i < 16000; ++i) noise.samples.push_back(rng.Uniform(-1, 1));
  inputs.push_back(noise);
  Waveform clipped = SynthUtterance(5, 1.0);
  for (double& v : clipped.samples) v = std::clamp(v * 50.0, -1.0, 1.0);
  inputs.push_back(clipped);
  Waveform tiny;
  tiny.samples = {0.3};
  inputs.push_back(tiny);
  Waveform dc;
  dc.samples.assign(5000, 0.7);
  inputs.push_back(dc);
  Waveform sparse;
  sparse.samples.assign(8000, 0.0);
  sparse.samples[4000] = 1.0;
  inputs.push_back(sparse);
  for (const auto& w : inputs) {
    const TapMatrix m = ExtractAll(w);
    CHECK(m.frames() == StftFrameCount(w.size(), {}));
    CHECK(m.AllFinite());
  }
}

TEST_CASE("extract_all is deterministic") {
  const Waveform w = SynthUtterance(6, 1.0);
  CHECK(ExtractAll(w).data() == ExtractAll(w).data());
}

TEST_CASE("standardize: hand-computed column and guards") {
  TapMatrix m(3);
  for (std::size_t t = 0; t < 3; ++t) {
    m.at(t, 0) = static_cast<double>(t + 1);
    m.at(t, 1) = 7.0;
    for (std::size_t p = 2; p < kNumParams; ++p) m.at(t, p) = t * t + p;
  }
  StandardizationStats st;
  const TapMatrix z = Standardize(m, &st);
  CHECK(z.standardized());
  CHECK(z.at(0, 0) == doctest::Approx(-1.224744871391589));
  CHECK(z.at(1, 0) == doctest::Approx(0.0));
  CHECK(z.at(2, 0) == doctest::Approx(1.224744871391589));
  CHECK(st.mean[0] == doctest::Approx(2.0));
  CHECK(st.std[0] == doctest::Approx(0.816496580927726));
  for (std::size_t t = 0; t < 3; ++t) CHECK(z.at(t, 1) == 0.0);
  CHECK(st.std[1] == 0.0);
}

TEST_CASE("standardized columns have zero mean and unit variance") {
  const TapMatrix z = Standardize(ExtractAll(SynthUtterance(7, 2.0)));
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const auto col = z.column(p);
    double mean = 0.0, var = 0.0;
    for (double v : col) mean += v;
    mean /= col.size();
    for (double v : col) var += (v - mean) * (v - mean);
    var /= col.size();
    if (z.stats()->std[p] == 0.0) {
      for (double v : col) CHECK(v == 0.0);
    } else {
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(var - 1.0) < 1e-6);
    }
  }
  const TapMatrix twice = Standardize(z);
  for (std::size_t i = 0; i < z.data().size(); ++i)
    CHECK(std::abs(twice.data()[i] - z.data()[i]) < 1e-9);
}

TEST_CASE("apply standardization with external statistics") {
  const TapMatrix a = ExtractAll(SynthUtterance(8, 1.0));
  StandardizationStats st;
  const TapMatrix z = Standardize(a, &st);
  const TapMatrix again = ApplyStandardization(a, st);
  for (std::size_t i = 0; i < z.data().size(); ++i)
    CHECK(again.data()[i] == doctest::Approx(z.data()[i]).epsilon(1e-12));
  CHECK_THROWS_AS(CheckSameShape(a, TapMatrix(a.frames() + 1)), DimensionError);
}

TEST_CASE("tap csv format and round trips") {
  oracle::TempDir dir("tapcsv");
  const TapMatrix m = ExtractAll(SynthUtterance(9, 0.5));
  WriteTapCsv(m, dir / "m.csv");
  const std::string text = oracle::ReadAll(dir / "m.csv");
  const std::string header = text.substr(0, text.find('\n'));
  CHECK(header ==
        "frame,pitch,jitter,f1_freq,f2_freq,f3_freq,f1_bw,f2_bw,f3_bw,shimmer,loudness,hnr,"
        "alpha_ratio,hammarberg,slope_0_500,slope_500_1500,f1_rel_energy,f2_rel_energy,"
        "f3_rel_energy,h1_h2,h1_a3,loudness_peak_rate,voiced_len_mean,voiced_len_std,"
        "unvoiced_len_mean,unvoiced_len_std");
  const TapMatrix r = ReadTapCsv(dir / "m.csv");
  REQUIRE(r.frames() == m.frames());
  for (std::size_t i = 0; i < m.data().size(); ++i)
    CHECK(r.data()[i] == doctest::Approx(m.data()[i]).epsilon(1e-8));

  StandardizationStats st;
  const TapMatrix z = Standardize(m, &st);
  WriteTapBinary(z, dir / "z.tapm");
  const TapMatrix zb = ReadTapFile(dir / "z.tapm");
  CHECK(zb.data() == z.data());
  CHECK(zb.standardized());
  REQUIRE(zb.stats());
  CHECK(zb.stats()->mean == st.mean);
  CHECK(zb.stats()->std == st.std);

  WriteStatsCsv(st, dir / "s.csv");
  const StandardizationStats back = ReadStatsCsv(dir / "s.csv");
  for (std::size_t p = 0; p < kNumParams; ++p) {
    CHECK(back.mean[p] == doctest::Approx(st.mean[p]).epsilon(1e-15));
    CHECK(back.std[p] == doctest::Approx(st.std[p]).epsilon(1e-15));
  }
}

TEST_CASE("analysis config overrides and rejects unknown keys") {
  const AnalysisConfig c = ParseAnalysisConfig("# comment\nvoicing_threshold = 0.25\nlpc_order=12\n\n");
  CHECK(c.voicing_threshold == 0.25);
  CHECK(c.lpc_order == 12);
  CHECK(c.f0_min == 60.0);
  CHECK_THROWS_AS(ParseAnalysisConfig("no_such_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(ParseAnalysisConfig("f0_min = 600\n"), ConfigError);
}

}  // TEST_SUITE
