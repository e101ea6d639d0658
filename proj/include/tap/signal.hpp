// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_SIGNAL_HPP_
#define TAP_SIGNAL_HPP_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tap {

inline constexpr int kPipelineRate = 16000;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kPipelineRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WindowType { kHann, kRect };

// Framing parameters. win_length == 0 means "same as n_fft"; a shorter window
// is centered inside the n_fft frame and the remainder zero-filled.
struct StftConfig {
  std::size_t n_fft = 512;
  std::size_t hop = 160;
  WindowType window = WindowType::kHann;
  bool center_pad = true;
  std::size_t win_length = 0;

  std::size_t bins() const { return n_fft / 2 + 1; }
  std::size_t window_length() const {
    return win_length == 0 ? n_fft : win_length;
  }
  void Validate() const;
};

// T x F complex matrix stored row-major by frame.
class ComplexSpectrogram {
 public:
  ComplexSpectrogram() = default;
  ComplexSpectrogram(std::size_t frames, const StftConfig& config,
                     int sample_rate);

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return config_.bins(); }
  const StftConfig& config() const { return config_; }
  int sample_rate() const { return sample_rate_; }

  std::complex<double>& at(std::size_t t, std::size_t f) {
    return data_[t * bins() + f];
  }
  const std::complex<double>& at(std::size_t t, std::size_t f) const {
    return data_[t * bins() + f];
  }
  std::span<std::complex<double>> frame(std::size_t t) {
    return {data_.data() + t * bins(), bins()};
  }
  std::span<const std::complex<double>> frame(std::size_t t) const {
    return {data_.data() + t * bins(), bins()};
  }
  std::vector<std::complex<double>>& data() { return data_; }
  const std::vector<std::complex<double>>& data() const { return data_; }

  // Center frequency of bin f in Hz.
  double bin_hz(std::size_t f) const {
    return static_cast<double>(f) * sample_rate_ / config_.n_fft;
  }

 private:
  std::size_t frames_ = 0;
  StftConfig config_;
  int sample_rate_ = kPipelineRate;
  std::vector<std::complex<double>> data_;
};

std::vector<double> MakeWindow(WindowType type, std::size_t length);

// Analysis window of cfg.window_length() zero-padded (centered) to n_fft.
std::vector<double> FrameWindow(const StftConfig& cfg);

// Number of frames stft() produces for a signal of the given length.
std::size_t StftFrameCount(std::size_t num_samples, const StftConfig& cfg);

// Reflect padding (numpy "reflect" mode), folding repeatedly when the pad is
// longer than the signal.
std::vector<double> ReflectPad(std::span<const double> x, std::size_t pad);

// Unnormalized forward STFT; frame t covers padded samples
// [t*hop, t*hop + n_fft).
ComplexSpectrogram Stft(const Waveform& w, const StftConfig& cfg = {});

// Weighted overlap-add inverse with window-square normalization. Requires a
// hann window and hop <= n_fft/2. When center padding was used the padding
// is stripped, giving (T-1)*hop samples unless `length` is given.
Waveform Istft(const ComplexSpectrogram& spec, std::size_t length = 0);

// omega_t = (1/F) * sum_f |S(t,f)|^2
std::vector<double> FrameEnergy(const ComplexSpectrogram& spec);

// Windowed-sinc polyphase resampler (Kaiser window, 64 zero crossings at the
// lower of the two rates). Output length round(len * target / source).
Waveform Resample(const Waveform& w, int target_rate);

// Debug dump of a spectrogram ("TAPS" layout, little-endian).
void WriteSpectrogram(const ComplexSpectrogram& spec, const std::string& path);
ComplexSpectrogram ReadSpectrogram(const std::string& path);

}  // namespace tap

#endif  // TAP_SIGNAL_HPP_
