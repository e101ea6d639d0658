// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tap/signal.hpp"

#include <cmath>
#include <numbers>

#include "tap/binary_io.hpp"
#include "tap/error.hpp"
#include "tap/fft.hpp"

namespace tap {

void StftConfig::Validate() const {
  if (n_fft < 2 || (n_fft & (n_fft - 1)) != 0)
    throw ConfigError("n_fft must be a power of two >= 2");
  if (hop == 0 || hop > n_fft) throw ConfigError("need 0 < hop <= n_fft");
  if (window_length() > n_fft) throw ConfigError("win_length exceeds n_fft");
}

ComplexSpectrogram::ComplexSpectrogram(std::size_t frames,
                                       const StftConfig& config,
                                       int sample_rate)
    : frames_(frames),
      config_(config),
      sample_rate_(sample_rate),
      data_(frames * config.bins()) {}

std::vector<double> MakeWindow(WindowType type, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (type == WindowType::kHann) {
    // Periodic hann: satisfies COLA for hop = n/2, n/4.
    for (std::size_t i = 0; i < length; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
  }
  return w;
}

std::vector<double> FrameWindow(const StftConfig& cfg) {
  const std::size_t len = cfg.window_length();
  std::vector<double> w(cfg.n_fft, 0.0);
  const std::vector<double> core = MakeWindow(cfg.window, len);
  const std::size_t offset = (cfg.n_fft - len) / 2;
  for (std::size_t i = 0; i < len; ++i) w[offset + i] = core[i];
  return w;
}

std::size_t StftFrameCount(std::size_t num_samples, const StftConfig& cfg) {
  const std::size_t padded = cfg.center_pad ? num_samples + cfg.n_fft
                                            : num_samples;
  if (padded < cfg.n_fft) return 0;
  return 1 + (padded - cfg.n_fft) / cfg.hop;
}

std::vector<double> ReflectPad(std::span<const double> x, std::size_t pad) {
  const std::size_t n = x.size();
  std::vector<double> out(n + 2 * pad);
  if (n == 1) {
    std::fill(out.begin(), out.end(), x[0]);
    return out;
  }
  const long long period = 2 * (static_cast<long long>(n) - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    long long k = static_cast<long long>(i) - static_cast<long long>(pad);
    k %= period;
    if (k < 0) k += period;
    if (k >= static_cast<long long>(n)) k = period - k;
    out[i] = x[static_cast<std::size_t>(k)];
  }
  return out;
}

ComplexSpectrogram Stft(const Waveform& w, const StftConfig& cfg) {
  cfg.Validate();
  if (w.empty()) throw SizeError("stft of an empty waveform");
  if (!cfg.center_pad && w.size() < cfg.n_fft)
    throw SizeError("signal shorter than n_fft without center padding");

  std::vector<double> padded = cfg.center_pad
                                   ? ReflectPad(w.samples, cfg.n_fft / 2)
                                   : w.samples;
  const std::size_t frames = StftFrameCount(w.size(), cfg);
  ComplexSpectrogram spec(frames, cfg, w.sample_rate);
  const std::vector<double> window = FrameWindow(cfg);
  const RealFft fft(cfg.n_fft);
  std::vector<double> buf(cfg.n_fft);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* src = padded.data() + t * cfg.hop;
    for (std::size_t i = 0; i < cfg.n_fft; ++i) buf[i] = src[i] * window[i];
    fft.Forward(buf, spec.frame(t));
  }
  return spec;
}

Waveform Istft(const ComplexSpectrogram& spec, std::size_t length) {
  const StftConfig& cfg = spec.config();
  cfg.Validate();
  if (cfg.window != WindowType::kHann || cfg.hop > cfg.n_fft / 2)
    throw ConfigError("istft needs a hann window with hop <= n_fft/2");

  const std::size_t frames = spec.frames();
  const std::size_t n = cfg.n_fft;
  const std::size_t full = frames == 0 ? 0 : (frames - 1) * cfg.hop + n;
  std::vector<double> acc(full, 0.0), norm(full, 0.0);
  const std::vector<double> window = FrameWindow(cfg);
  const RealFft fft(n);
  std::vector<double> buf(n);
  for (std::size_t t = 0; t < frames; ++t) {
    fft.Inverse(spec.frame(t), buf);
    const std::size_t start = t * cfg.hop;
    for (std::size_t i = 0; i < n; ++i) {
      acc[start + i] += buf[i] * window[i];
      norm[start + i] += window[i] * window[i];
    }
  }
  for (std::size_t i = 0; i < full; ++i)
    if (norm[i] > 1e-11) acc[i] /= norm[i];

  Waveform out;
  out.sample_rate = spec.sample_rate();
  const std::size_t offset = cfg.center_pad ? n / 2 : 0;
  std::size_t avail = full > 2 * offset ? full - 2 * offset : 0;
  if (!cfg.center_pad) avail = full;
  const std::size_t out_len = length == 0 ? avail : length;
  out.samples.assign(out_len, 0.0);
  for (std::size_t i = 0; i < out_len && offset + i < full; ++i)
    out.samples[i] = acc[offset + i];
  return out;
}

std::vector<double> FrameEnergy(const ComplexSpectrogram& spec) {
  std::vector<double> omega(spec.frames(), 0.0);
  const double inv_f = 1.0 / static_cast<double>(spec.bins());
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    double sum = 0.0;
    for (const auto& v : spec.frame(t)) sum += std::norm(v);
    omega[t] = sum * inv_f;
  }
  return omega;
}

namespace {
constexpr std::uint32_t kSpecVersion = 1;
}

void WriteSpectrogram(const ComplexSpectrogram& spec, const std::string& path) {
  ByteWriter out;
  out.PutMagic("TAPS");
  out.Put<std::uint32_t>(kSpecVersion);
  out.Put<std::uint64_t>(spec.frames());
  out.Put<std::uint64_t>(spec.bins());
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(spec.sample_rate()));
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(spec.config().n_fft));
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(spec.config().hop));
  for (const auto& v : spec.data()) {
    out.Put<double>(v.real());
    out.Put<double>(v.imag());
  }
  WriteFileBytes(path, out.bytes());
}

ComplexSpectrogram ReadSpectrogram(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  ByteReader in(bytes);
  if (!in.MagicIs("TAPS")) throw FormatError(path + ": bad magic");
  if (in.Get<std::uint32_t>() != kSpecVersion)
    throw FormatError(path + ": unsupported version");
  const auto frames = in.Get<std::uint64_t>();
  const auto bins = in.Get<std::uint64_t>();
  StftConfig cfg;
  const int rate = static_cast<int>(in.Get<std::uint32_t>());
  cfg.n_fft = in.Get<std::uint32_t>();
  cfg.hop = in.Get<std::uint32_t>();
  if (cfg.bins() != bins) throw FormatError(path + ": F inconsistent with n_fft");
  const std::vector<double> raw = in.GetDoubles(2 * frames * bins);
  ComplexSpectrogram spec(frames, cfg, rate);
  for (std::size_t i = 0; i < spec.data().size(); ++i)
    spec.data()[i] = {raw[2 * i], raw[2 * i + 1]};
  return spec;
}

}  // namespace tap
