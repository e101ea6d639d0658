// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tap/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <set>
#include <thread>

#include "tap/binary_io.hpp"
#include "tap/error.hpp"
#include "tap/random.hpp"
#include "tap/wav.hpp"

namespace tap {
namespace {

constexpr double kGrid = 0x1.0p24;

double Snap(double v) { return std::nearbyint(v * kGrid) / kGrid; }

double MaxAbs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> FitLength(const std::vector<double>& x, std::size_t n,
                              std::size_t offset) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[(offset + i) % x.size()];
  return out;
}

MixResult MixAt(const Waveform& clean, const Waveform& noise, double snr_db,
                std::size_t noise_offset) {
  if (clean.sample_rate != noise.sample_rate)
    throw ConfigError("clean and noise sample rates differ (" +
                      std::to_string(clean.sample_rate) + " vs " +
                      std::to_string(noise.sample_rate) + ")");
  if (!std::isfinite(snr_db)) throw ConfigError("snr must be finite");
  const double rs = Rms(clean.samples);
  const double rn = noise.empty() ? 0.0 : Rms(noise.samples);
  if (clean.empty() || rs <= 0.0) throw DegenerateInputError("clean signal is silent");
  if (rn <= 0.0) throw DegenerateInputError("noise signal is silent");

  const std::size_t n = clean.size();
  std::vector<double> nz = FitLength(noise.samples, n, noise_offset % noise.size());
  const double rn_fit = Rms(nz);
  if (rn_fit <= 0.0) throw DegenerateInputError("noise is silent over the clean span");
  const double g = rs / (rn_fit * std::pow(10.0, snr_db / 20.0));

  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gn = g * nz[i];
    peak = std::max({peak, std::abs(clean.samples[i]), std::abs(gn),
                     std::abs(clean.samples[i] + gn)});
  }
  // Headroom for the rounding of the two snapped terms.
  const double limit = kMixPeak - 0x1.0p-23;
  const double p = peak > limit ? limit / peak : 1.0;

  MixResult r;
  r.scale = g;
  r.peak_norm = p;
  r.clean.sample_rate = r.noise.sample_rate = r.noisy.sample_rate = clean.sample_rate;
  r.clean.samples.resize(n);
  r.noise.samples.resize(n);
  r.noisy.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.clean.samples[i] = Snap(p * clean.samples[i]);
    r.noise.samples[i] = Snap(p * g * nz[i]);
    r.noisy.samples[i] = r.clean.samples[i] + r.noise.samples[i];
  }
  r.snr_realized_db = MeasureSnrDb(r.clean, r.noisy);
  return r;
}

std::string ResolvePath(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path fp(p);
  return fp.is_absolute() ? p : (base / fp).string();
}

CorpusRecord SynthesizeEntry(const MixSpec& spec, std::size_t index,
                             const CorpusOptions& options) {
  if (spec.id.empty() || spec.id.find_first_of("/\\") != std::string::npos)
    throw ConfigError("invalid utterance id '" + spec.id + "'");
  Rng rng(spec.seed ? *spec.seed
                    : options.seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  const double snr =
      spec.snr_db ? *spec.snr_db : rng.Uniform(options.snr_min_db, options.snr_max_db);

  Waveform clean = LoadWav(spec.clean_path);
  Waveform noise = LoadWav(spec.noise_path);
  if (clean.sample_rate != kPipelineRate) clean = Resample(clean, kPipelineRate);
  if (noise.sample_rate != kPipelineRate) noise = Resample(noise, kPipelineRate);
  if (spec.target_len) {
    if (!(*spec.target_len > 0.0)) throw ConfigError("target_len must be > 0");
    const auto want = static_cast<std::size_t>(
        std::llround(*spec.target_len * clean.sample_rate));
    if (clean.size() > want) clean.samples.resize(want);
  }
  const std::size_t offset = noise.empty() ? 0 : rng.Below(noise.size());
  const MixResult m = MixAt(clean, noise, snr, offset);

  namespace fs = std::filesystem;
  const fs::path out(options.out_dir);
  CorpusRecord rec;
  rec.id = spec.id;
  rec.clean = "clean/" + spec.id + ".wav";
  rec.noise = "noise/" + spec.id + ".wav";
  rec.noisy = "noisy/" + spec.id + ".wav";
  SaveWav(m.clean, (out / rec.clean).string());
  SaveWav(m.noise, (out / rec.noise).string());
  SaveWav(m.noisy, (out / rec.noisy).string());
  rec.snr_requested_db = snr;
  rec.snr_realized_db = m.snr_realized_db;
  rec.scale = m.scale;
  rec.peak_norm = m.peak_norm;
  rec.split = spec.split;
  return rec;
}

// Direct-form two-pole resonator with unit gain at DC.
void Resonate(std::vector<double>& x, double freq, double bw, int fs) {
  const double r = std::exp(-std::numbers::pi * bw / fs);
  const double c = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / fs);
  const double gain = 1.0 - c + r * r;
  double y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    const double y = gain * v + c * y1 - r * r * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

void NormalizePeak(std::vector<double>& x, double amplitude) {
  const double m = MaxAbs(x);
  if (m > 0.0)
    for (double& v : x) v *= amplitude / m;
}

void CheckFrequency(double f, int fs, const char* what) {
  if (!(f > 0.0 && f < fs / 2.0))
    throw ConfigError(std::string(what) + " must lie in (0, fs/2)");
}

// Band-limited pulse train driven by an instantaneous f0 contour.
std::vector<double> PulseTrain(const std::vector<double>& f0, int fs) {
  std::vector<double> out(f0.size());
  double phase = 0.0;
  for (std::size_t i = 0; i < f0.size(); ++i) {
    const int harmonics = static_cast<int>((fs / 2.0 - 1.0) / f0[i]);
    double s = 0.0;
    for (int k = 1; k <= harmonics; ++k) s += std::cos(k * phase);
    out[i] = s / std::max(1, harmonics);
    phase += 2.0 * std::numbers::pi * f0[i] / fs;
    if (phase > 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;
  }
  return out;
}

}  // namespace

double Rms(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

double MeasureSnrDb(const Waveform& clean, const Waveform& noisy) {
  if (clean.size() != noisy.size())
    throw DimensionError("clean/noisy length mismatch");
  std::vector<double> d(clean.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = noisy.samples[i] - clean.samples[i];
  return 20.0 * std::log10(Rms(clean.samples) / Rms(d));
}

MixResult Mix(const Waveform& clean, const Waveform& noise, double snr_db) {
  return MixAt(clean, noise, snr_db, 0);
}

std::vector<MixSpec> LoadMixManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<MixSpec> specs;
  std::set<std::string> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    try {
      const auto j = nlohmann::json::parse(line);
      MixSpec s;
      s.id = j.at("id").get<std::string>();
      s.clean_path = ResolvePath(base, j.at("clean").get<std::string>());
      s.noise_path = ResolvePath(base, j.at("noise").get<std::string>());
      if (j.contains("snr_db")) s.snr_db = j["snr_db"].get<double>();
      if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("target_len")) s.target_len = j["target_len"].get<double>();
      s.split = j.value("split", std::string("train"));
      if (s.split != "train" && s.split != "dev" && s.split != "test")
        throw FormatError(where + ": unknown split '" + s.split + "'");
      if (!ids.insert(s.id).second)
        throw FormatError(where + ": duplicate id '" + s.id + "'");
      specs.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return specs;
}

std::string CorpusRecordJson(const CorpusRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["clean"] = r.clean;
  j["noise"] = r.noise;
  j["noisy"] = r.noisy;
  j["snr_requested_db"] = r.snr_requested_db;
  j["snr_realized_db"] = r.snr_realized_db;
  j["scale"] = r.scale;
  j["peak_norm"] = r.peak_norm;
  j["split"] = r.split;
  return j.dump();
}

CorpusResult SynthesizeCorpus(const std::vector<MixSpec>& specs,
                              const CorpusOptions& options) {
  if (options.out_dir.empty()) throw ConfigError("output directory required");
  if (!(options.snr_min_db <= options.snr_max_db))
    throw ConfigError("snr range is empty");
  namespace fs = std::filesystem;
  const fs::path out(options.out_dir);
  for (const char* sub : {"clean", "noise", "noisy"}) {
    std::error_code ec;
    fs::create_directories(out / sub, ec);
    if (ec) throw IoError("cannot create " + (out / sub).string() + ": " + ec.message());
  }

  std::vector<std::optional<CorpusRecord>> done(specs.size());
  std::vector<std::string> failures(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        done[i] = SynthesizeEntry(specs[i], i, options);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(specs.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CorpusResult result;
  result.manifest_path = (out / "manifest.jsonl").string();
  std::string text;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (done[i]) {
      text += CorpusRecordJson(*done[i]) + "\n";
      result.records.push_back(std::move(*done[i]));
    } else {
      result.errors.push_back({specs[i].id, failures[i]});
    }
  }
  WriteFileBytes(result.manifest_path,
                 std::vector<std::uint8_t>(text.begin(), text.end()));
  return result;
}

SignalKind ParseSignalKind(const std::string& name) {
  if (name == "sine") return SignalKind::kSine;
  if (name == "pulse_train_vowel") return SignalKind::kPulseTrainVowel;
  if (name == "white_noise") return SignalKind::kWhiteNoise;
  if (name == "chirp") return SignalKind::kChirp;
  if (name == "silence") return SignalKind::kSilence;
  throw ConfigError("unknown signal kind '" + name + "'");
}

std::array<std::complex<double>, 3> ResonatorPoles(const SignalParams& p) {
  std::array<std::complex<double>, 3> poles;
  for (int k = 0; k < 3; ++k) {
    CheckFrequency(p.formants[k], p.sample_rate, "formant");
    if (!(p.bandwidths[k] > 0.0)) throw ConfigError("bandwidth must be > 0");
    poles[k] = std::polar(std::exp(-std::numbers::pi * p.bandwidths[k] / p.sample_rate),
                          2.0 * std::numbers::pi * p.formants[k] / p.sample_rate);
  }
  return poles;
}

Waveform GenTestSignal(SignalKind kind, const SignalParams& p, std::uint64_t seed) {
  if (p.sample_rate <= 0) throw ConfigError("sample rate must be positive");
  if (!(p.duration > 0.0)) throw ConfigError("duration must be > 0");
  const int fs = p.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(p.duration * fs));
  Waveform w;
  w.sample_rate = fs;
  w.samples.assign(n, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  switch (kind) {
    case SignalKind::kSine:
      CheckFrequency(p.frequency, fs, "frequency");
      for (std::size_t i = 0; i < n; ++i)
        w.samples[i] = p.amplitude * std::sin(two_pi * p.frequency * i / fs);
      break;
    case SignalKind::kChirp: {
      CheckFrequency(p.frequency, fs, "frequency");
      CheckFrequency(p.end_frequency, fs, "end frequency");
      const double k = (p.end_frequency - p.frequency) / p.duration;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        w.samples[i] = p.amplitude * std::sin(two_pi * (p.frequency * t + 0.5 * k * t * t));
      }
      break;
    }
    case SignalKind::kWhiteNoise: {
      Rng rng(seed);
      for (double& v : w.samples) v = p.amplitude * rng.Gaussian();
      break;
    }
    case SignalKind::kPulseTrainVowel: {
      CheckFrequency(p.f0, fs, "f0");
      ResonatorPoles(p);  // validates formants and bandwidths
      if (p.glottal_bandwidth < 0.0) throw ConfigError("glottal bandwidth must be >= 0");
      w.samples = PulseTrain(std::vector<double>(n, p.f0), fs);
      if (p.glottal_bandwidth > 0.0) Resonate(w.samples, 0.0, p.glottal_bandwidth, fs);
      for (int k = 0; k < 3; ++k) Resonate(w.samples, p.formants[k], p.bandwidths[k], fs);
      NormalizePeak(w.samples, p.amplitude);
      break;
    }
    case SignalKind::kSilence:
      break;
  }
  return w;
}

Waveform SynthUtterance(std::uint64_t seed, double duration, int sample_rate) {
  if (!(duration > 0.0)) throw ConfigError("duration must be > 0");
  Rng rng(seed);
  const int fs = sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  Waveform w;
  w.sample_rate = fs;
  w.samples.assign(n, 0.0);

  std::size_t pos = static_cast<std::size_t>(rng.Uniform(0.05, 0.15) * fs);
  while (pos < n) {
    const auto len = std::min(n - pos, static_cast<std::size_t>(rng.Uniform(0.12, 0.35) * fs));
    const double f_start = rng.Uniform(90.0, 220.0);
    const double f_end = f_start * rng.Uniform(0.8, 1.25);
    std::vector<double> f0(len);
    for (std::size_t i = 0; i < len; ++i)
      f0[i] = f_start + (f_end - f_start) * static_cast<double>(i) / len;
    std::vector<double> seg = PulseTrain(f0, fs);
    Resonate(seg, 0.0, 100.0, fs);
    const double formants[3] = {rng.Uniform(300.0, 850.0), rng.Uniform(900.0, 2200.0),
                                rng.Uniform(2300.0, 3200.0)};
    const double bws[3] = {rng.Uniform(60.0, 120.0), rng.Uniform(70.0, 150.0),
                           rng.Uniform(100.0, 200.0)};
    for (int k = 0; k < 3; ++k) Resonate(seg, formants[k], bws[k], fs);
    NormalizePeak(seg, rng.Uniform(0.2, 0.6));
    const std::size_t ramp = std::min<std::size_t>(len / 4, fs / 100);
    for (std::size_t i = 0; i < len; ++i) {
      double env = 1.0;
      if (i < ramp) env = static_cast<double>(i) / ramp;
      if (len - 1 - i < ramp) env = static_cast<double>(len - 1 - i) / ramp;
      w.samples[pos + i] = seg[i] * env;
    }
    pos += len + static_cast<std::size_t>(rng.Uniform(0.05, 0.2) * fs);
  }
  for (double& v : w.samples) v += 1e-3 * rng.Gaussian();
  return w;
}

}  // namespace tap
