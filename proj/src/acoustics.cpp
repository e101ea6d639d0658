// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tap/acoustics.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tap/error.hpp"

namespace tap {

StftConfig AnalysisConfig::stft() const {
  StftConfig s;
  s.hop = hop;
  return s;
}

void AnalysisConfig::Validate() const {
  if (hop == 0) throw ConfigError("hop must be positive");
  if (!(f0_min > 0.0) || !(f0_max > f0_min))
    throw ConfigError("need 0 < f0_min < f0_max");
  if (!(voicing_threshold > 0.0) || !(yin_threshold > 0.0))
    throw ConfigError("thresholds must be positive");
  if (pitch_window < 16) throw ConfigError("pitch_window too small");
  if (mel_bands < 1 || !(mel_high_hz > mel_low_hz))
    throw ConfigError("bad mel band layout");
  if (lpc_order < 2) throw ConfigError("lpc_order must be >= 2");
  if (formant_window <= static_cast<std::size_t>(lpc_order))
    throw ConfigError("formant_window must exceed lpc_order");
  if (!(stats_window_s > 0.0)) throw ConfigError("stats_window_s must be > 0");
  if (!(cycle_context_s > 0.0)) throw ConfigError("cycle_context_s must be > 0");
}

AnalysisConfig ParseAnalysisConfig(const std::string& text) {
  AnalysisConfig cfg;
  using Setter = std::function<void(const std::string&)>;
  auto real = [](double& field) -> Setter {
    return [&field](const std::string& v) { field = std::stod(v); };
  };
  auto count = [](std::size_t& field) -> Setter {
    return [&field](const std::string& v) { field = std::stoul(v); };
  };
  auto integer = [](int& field) -> Setter {
    return [&field](const std::string& v) { field = std::stoi(v); };
  };
  const std::map<std::string, Setter> setters = {
      {"hop", count(cfg.hop)},
      {"f0_min", real(cfg.f0_min)},
      {"f0_max", real(cfg.f0_max)},
      {"voicing_threshold", real(cfg.voicing_threshold)},
      {"yin_threshold", real(cfg.yin_threshold)},
      {"pitch_window", count(cfg.pitch_window)},
      {"cycle_context_s", real(cfg.cycle_context_s)},
      {"hnr_clamp_db", real(cfg.hnr_clamp_db)},
      {"mel_bands", integer(cfg.mel_bands)},
      {"mel_low_hz", real(cfg.mel_low_hz)},
      {"mel_high_hz", real(cfg.mel_high_hz)},
      {"loudness_exponent", real(cfg.loudness_exponent)},
      {"lpc_order", integer(cfg.lpc_order)},
      {"preemphasis", real(cfg.preemphasis)},
      {"formant_window", count(cfg.formant_window)},
      {"formant_min_hz", real(cfg.formant_min_hz)},
      {"formant_max_hz", real(cfg.formant_max_hz)},
      {"formant_max_bw", real(cfg.formant_max_bw)},
      {"root_max_iter", integer(cfg.root_max_iter)},
      {"root_tol", real(cfg.root_tol)},
      {"stats_window_s", real(cfg.stats_window_s)},
      {"peak_threshold_std", real(cfg.peak_threshold_std)},
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
    try {
      it->second(value);
    } catch (const std::logic_error&) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad value for " +
                        key);
    }
  }
  cfg.Validate();
  return cfg;
}

AnalysisConfig LoadAnalysisConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseAnalysisConfig(ss.str());
}

TapMatrix ExtractAll(const Waveform& input, const AnalysisConfig& cfg) {
  cfg.Validate();
  if (input.empty()) throw SizeError("cannot extract from an empty waveform");
  const Waveform w = input.sample_rate == kPipelineRate
                         ? input
                         : Resample(input, kPipelineRate);

  const ComplexSpectrogram spec = Stft(w, cfg.stft());
  const PitchTrack pitch = ExtractPitch(w, cfg);
  const JitterShimmer js = ExtractJitterShimmer(w, pitch, cfg);
  const std::vector<double> loudness = ExtractLoudness(spec, cfg);
  const std::vector<double> hnr = ExtractHnr(w, pitch, cfg);
  const std::vector<FormantRow> formants = ExtractFormants(w, cfg);
  const std::vector<BalanceRow> balance =
      ExtractSpectralBalance(spec, pitch, formants);
  const std::vector<TemporalRow> temporal =
      ExtractTemporalStats(pitch, loudness, cfg);

  const std::size_t frames = spec.frames();
  TapMatrix m(frames, cfg.hop, kPipelineRate);
  for (std::size_t t = 0; t < frames; ++t) {
    auto row = m.row(t);
    row[kPitch] = pitch.f0[t];
    row[kJitter] = js.jitter[t];
    for (std::size_t k = 0; k < 3; ++k) {
      row[kF1Freq + k] = formants[t][k];
      row[kF1Bandwidth + k] = formants[t][k + 3];
    }
    row[kShimmer] = js.shimmer[t];
    row[kLoudness] = loudness[t];
    row[kHnr] = hnr[t];
    for (std::size_t k = 0; k < balance[t].size(); ++k)
      row[kAlphaRatio + k] = balance[t][k];
    row[kLoudnessPeakRate] = temporal[t].loudness_peak_rate;
    row[kVoicedLenMean] = temporal[t].voiced_mean;
    row[kVoicedLenStd] = temporal[t].voiced_std;
    row[kUnvoicedLenMean] = temporal[t].unvoiced_mean;
    row[kUnvoicedLenStd] = temporal[t].unvoiced_std;
  }
  return m;
}

}  // namespace tap
