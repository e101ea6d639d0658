// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_DATASET_HPP_
#define TAP_DATASET_HPP_

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tap/signal.hpp"

namespace tap {

inline constexpr double kMixPeak = 0.99;

double Rms(const std::vector<double>& x);

// 20*log10(rms(clean) / rms(noisy - clean)).
double MeasureSnrDb(const Waveform& clean, const Waveform& noisy);

struct MixResult {
  Waveform noisy;
  Waveform clean;  // the stored reference (after peak normalization)
  Waveform noise;  // scaled noise actually added: noisy = clean + noise
  double scale = 0.0;      // noise gain g before peak normalization
  double peak_norm = 1.0;  // common factor applied to clean and noise
  double snr_realized_db = 0.0;
};

// x = s + g*n with noise tiled/trimmed to the clean length. Clean and scaled
// noise are snapped to the 2^-24 grid so that float-32 storage keeps
// noisy - clean == noise exactly.
MixResult Mix(const Waveform& clean, const Waveform& noise, double snr_db);

struct MixSpec {
  std::string id;
  std::string clean_path;
  std::string noise_path;
  std::optional<double> snr_db;  // drawn from the configured range if absent
  std::optional<std::uint64_t> seed;
  std::optional<double> target_len;  // seconds; clean is trimmed to it
  std::string split = "train";
};

// JSON lines: {"id","clean","noise","snr_db"?,"seed"?,"target_len"?,"split"?}.
// Relative paths resolve against the manifest's directory.
std::vector<MixSpec> LoadMixManifest(const std::string& path);

struct CorpusOptions {
  std::string out_dir;
  std::uint64_t seed = 0;
  double snr_min_db = 0.0;
  double snr_max_db = 20.0;
  int jobs = 1;
};

struct CorpusRecord {
  std::string id;
  std::string clean;
  std::string noise;
  std::string noisy;
  double snr_requested_db = 0.0;
  double snr_realized_db = 0.0;
  double scale = 0.0;
  double peak_norm = 1.0;
  std::string split;
};

struct CorpusEntryError {
  std::string id;
  std::string message;
};

struct CorpusResult {
  std::vector<CorpusRecord> records;  // manifest order, failures skipped
  std::vector<CorpusEntryError> errors;
  std::string manifest_path;
};

// Writes <out>/{clean,noise,noisy}/<id>.wav (float-32, 16 kHz) and
// <out>/manifest.jsonl. Entry failures are collected, not thrown.
CorpusResult SynthesizeCorpus(const std::vector<MixSpec>& specs,
                              const CorpusOptions& options);

std::string CorpusRecordJson(const CorpusRecord& r);

enum class SignalKind { kSine, kPulseTrainVowel, kWhiteNoise, kChirp, kSilence };

SignalKind ParseSignalKind(const std::string& name);

struct SignalParams {
  double duration = 1.0;
  int sample_rate = kPipelineRate;
  double amplitude = 0.5;
  double frequency = 220.0;      // sine; chirp start
  double end_frequency = 400.0;  // chirp end
  double f0 = 100.0;             // pulse_train_vowel
  std::array<double, 3> formants{700.0, 1220.0, 2600.0};
  std::array<double, 3> bandwidths{130.0, 70.0, 160.0};
  // Two-pole low-pass at 0 Hz shaping the pulse train like a glottal
  // source (about -12 dB/octave); 0 leaves the pulse train flat.
  double glottal_bandwidth = 100.0;
};

Waveform GenTestSignal(SignalKind kind, const SignalParams& params,
                       std::uint64_t seed = 0);

// Pole (upper half plane) of each two-pole resonator of the vowel cascade.
std::array<std::complex<double>, 3> ResonatorPoles(const SignalParams& params);

// Speech-like test utterance: voiced vowel segments with gliding f0 and
// varying formants separated by pauses and faint noise.
Waveform SynthUtterance(std::uint64_t seed, double duration,
                        int sample_rate = kPipelineRate);

}  // namespace tap

#endif  // TAP_DATASET_HPP_
