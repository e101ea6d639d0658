// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_ACOUSTICS_HPP_
#define TAP_ACOUSTICS_HPP_

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tap/signal.hpp"
#include "tap/tap_matrix.hpp"

namespace tap {

// Thresholds and window sizes for ground-truth extraction. Every field can be
// overridden from a key=value file (see ParseAnalysisConfig); the defaults
// are the frozen values the tests rely on.
struct AnalysisConfig {
  std::size_t hop = 160;  // 10 ms at 16 kHz

  // Pitch (YIN).
  double f0_min = 60.0;
  double f0_max = 500.0;
  double voicing_threshold = 0.30;  // voiced iff aperiodicity below this
  double yin_threshold = 0.15;      // first-dip threshold for lag selection
  std::size_t pitch_window = 512;   // integration window, samples

  // Jitter / shimmer.
  double cycle_context_s = 0.100;

  // HNR.
  double hnr_clamp_db = 40.0;

  // Loudness.
  int mel_bands = 26;
  double mel_low_hz = 20.0;
  double mel_high_hz = 8000.0;
  double loudness_exponent = 0.33;

  // Formants.
  int lpc_order = 16;
  double preemphasis = 0.97;
  std::size_t formant_window = 512;
  double formant_min_hz = 90.0;
  double formant_max_hz = 5500.0;
  double formant_max_bw = 1000.0;
  int root_max_iter = 100;
  double root_tol = 1e-10;

  // Temporal statistics.
  double stats_window_s = 1.0;
  double peak_threshold_std = 0.25;

  StftConfig stft() const;
  void Validate() const;
};

AnalysisConfig ParseAnalysisConfig(const std::string& text);
AnalysisConfig LoadAnalysisConfig(const std::string& path);

struct PitchTrack {
  std::vector<double> f0;             // Hz, 0 when unvoiced
  std::vector<bool> voiced;
  std::vector<double> aperiodicity;   // [0, 1]
  std::vector<double> period;         // samples (fractional), 0 when unvoiced

  std::size_t frames() const { return f0.size(); }
};

// Samples [center - length/2, center - length/2 + length) with zeros outside
// the signal.
std::vector<double> CenteredSegment(std::span<const double> x,
                                    long long center, std::size_t length);

struct YinResult {
  double period = 0.0;        // fractional lag in samples; 0 if none found
  double aperiodicity = 1.0;
};

// One frame of YIN on `segment` (length >= window + max_lag).
YinResult YinFrame(std::span<const double> segment, std::size_t window,
                   std::size_t min_lag, std::size_t max_lag,
                   double dip_threshold);

PitchTrack ExtractPitch(const Waveform& w, const AnalysisConfig& cfg = {});

struct CycleStats {
  double jitter = 0.0;
  double shimmer = 0.0;
  std::size_t periods = 0;
};

// Peak-picks pitch cycles in `x` given the expected period (samples) and
// returns relative period / amplitude perturbation. Zero when fewer than
// three periods are found.
CycleStats MeasureCycles(std::span<const double> x, double period);

struct JitterShimmer {
  std::vector<double> jitter;
  std::vector<double> shimmer;
};

JitterShimmer ExtractJitterShimmer(const Waveform& w, const PitchTrack& pitch,
                                   const AnalysisConfig& cfg = {});

// Triangular mel filterbank weights, bands x bins.
std::vector<std::vector<double>> MelFilterbank(int bands, std::size_t bins,
                                               int sample_rate, double low_hz,
                                               double high_hz);

std::vector<double> ExtractLoudness(const ComplexSpectrogram& spec,
                                    const AnalysisConfig& cfg = {});

std::vector<double> ExtractHnr(const Waveform& w, const PitchTrack& pitch,
                               const AnalysisConfig& cfg = {});

// LPC by the autocorrelation method. Returns {1, a1, ..., ap}, or nullopt on
// a zero-energy frame.
std::optional<std::vector<double>> LevinsonDurbin(std::span<const double> autocorr,
                                                  int order);

// Roots of the monic polynomial z^n + c[1] z^{n-1} + ... + c[n]
// (coefficients given as {1, c1, ..., cn}) by Durand-Kerner iteration.
std::vector<std::complex<double>> PolynomialRoots(std::span<const double> coeffs,
                                                  int max_iter = 100,
                                                  double tol = 1e-10);

// F1, F2, F3 (Hz) then B1, B2, B3 (Hz); missing formants are 0.
using FormantRow = std::array<double, 6>;

FormantRow FormantsFromRoots(std::span<const std::complex<double>> roots,
                             int sample_rate, const AnalysisConfig& cfg = {});

std::vector<FormantRow> ExtractFormants(const Waveform& w,
                                        const AnalysisConfig& cfg = {});

// Alpha ratio, Hammarberg index, slope 0-500, slope 500-1500,
// F1/F2/F3 relative energy, H1-H2, H1-A3 (canonical columns 11..19).
using BalanceRow = std::array<double, 9>;

std::vector<BalanceRow> ExtractSpectralBalance(const ComplexSpectrogram& spec,
                                               const PitchTrack& pitch,
                                               std::span<const FormantRow> formants);

struct TemporalRow {
  double loudness_peak_rate = 0.0;  // peaks / s
  double voiced_mean = 0.0;         // s
  double voiced_std = 0.0;
  double unvoiced_mean = 0.0;
  double unvoiced_std = 0.0;
  double voiced_per_second = 0.0;   // not part of the 25 columns
};

std::vector<TemporalRow> ExtractTemporalStats(const PitchTrack& pitch,
                                              std::span<const double> loudness,
                                              const AnalysisConfig& cfg = {});

// Runs every extractor on the shared 10 ms grid (resampling to 16 kHz first)
// and assembles the raw T x 25 matrix.
TapMatrix ExtractAll(const Waveform& w, const AnalysisConfig& cfg = {});

}  // namespace tap

#endif  // TAP_ACOUSTICS_HPP_
