// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cstring>

#include "oracles.hpp"
#include "tap/binary_io.hpp"
#include "tap/error.hpp"
#include "tap/fft.hpp"
#include "tap/signal.hpp"
#include "tap/wav.hpp"

using namespace tap;

namespace {

Waveform Noise(std::size_t n, std::uint64_t seed, int rate = kPipelineRate) {
  Waveform w;
  w.sample_rate = rate;
  w.samples = oracle::RandomVector(n, seed);
  return w;
}

Waveform Sine(double hz, double seconds, int rate, double amp = 0.5) {
  Waveform w;
  w.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  for (std::size_t i = 0; i < n; ++i)
    w.samples.push_back(amp * std::sin(2.0 * oracle::kPi * hz * i / rate));
  return w;
}

std::size_t PeakBin(const std::vector<oracle::cd>& spec) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < spec.size(); ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  return best;
}

void PutU32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void PutU16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("real fft matches the naive DFT") {
  for (std::size_t n : {2u, 8u, 64u, 512u, 1024u}) {
    const auto x = oracle::RandomVector(n, n);
    const RealFft fft(n);
    std::vector<std::complex<double>> got(n / 2 + 1);
    fft.Forward(x, got);
    const auto want = oracle::NaiveRdft(x);
    for (std::size_t k = 0; k < want.size(); ++k)
      CHECK(std::abs(got[k] - want[k]) < 1e-9 * n);
    std::vector<double> back(n);
    fft.Inverse(got, back);
    for (std::size_t i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
  }
}

TEST_CASE("reflect padding folds like numpy") {
  const std::vector<double> x{1, 2, 3};
  const auto got = ReflectPad(x, 2);
  CHECK(got == std::vector<double>{3, 2, 1, 2, 3, 2, 1});
  // Pad longer than the signal folds repeatedly.
  const auto x2 = oracle::RandomVector(5, 3);
  CHECK(ReflectPad(x2, 11) == oracle::ReflectPad(x2, 11));
  CHECK(ReflectPad(std::vector<double>{4.0}, 3) == std::vector<double>(7, 4.0));
}

TEST_CASE("default stft shape") {
  const Waveform w = Noise(16000, 1);
  const ComplexSpectrogram s = Stft(w);
  CHECK(s.bins() == 257);
  CHECK(s.frames() == 101);
  CHECK(StftFrameCount(160000, {}) == 1001);
  CHECK(s.bin_hz(1) == doctest::Approx(31.25));
}

TEST_CASE("stft frames equal windowed DFTs of the padded signal") {
  const Waveform w = Noise(3000, 2);
  const StftConfig cfg;
  const ComplexSpectrogram s = Stft(w, cfg);
  const auto padded = oracle::ReflectPad(w.samples, cfg.n_fft / 2);
  const auto win = oracle::Hann(cfg.n_fft);
  for (std::size_t t : {std::size_t{0}, std::size_t{1}, std::size_t{7}, s.frames() - 1}) {
    std::vector<double> frame(cfg.n_fft);
    for (std::size_t i = 0; i < cfg.n_fft; ++i) frame[i] = padded[t * cfg.hop + i] * win[i];
    const auto want = oracle::NaiveRdft(frame);
    double err = 0.0;
    for (std::size_t k = 0; k < want.size(); ++k)
      err = std::max(err, std::abs(s.at(t, k) - want[k]));
    CHECK(err < 1e-9);
  }
}

TEST_CASE("shorter analysis window is centered in the frame") {
  StftConfig cfg;
  cfg.win_length = 400;
  const auto w = FrameWindow(cfg);
  CHECK(w[55] == 0.0);
  CHECK(w[56] == 0.0);  // first sample of the periodic hann
  CHECK(w[56 + 200] == doctest::Approx(1.0));
  CHECK(w[456] == 0.0);
}

TEST_CASE("istft inverts stft") {
  const Waveform w = Noise(16000, 5);
  const Waveform back = Istft(Stft(w));
  REQUIRE(back.size() == w.size());
  double err = 0.0;
  for (std::size_t i = 256; i + 256 < w.size(); ++i)
    err = std::max(err, std::abs(back.samples[i] - w.samples[i]));
  CHECK(err < 1e-6);

  StftConfig cfg;
  cfg.window = WindowType::kRect;
  CHECK_THROWS_AS(Istft(Stft(w, cfg)), ConfigError);
}

TEST_CASE("frame energy obeys Parseval over the Hermitian spectrum") {
  const Waveform w = Noise(8000, 9);
  StftConfig cfg;
  cfg.window = WindowType::kRect;
  const ComplexSpectrogram s = Stft(w, cfg);
  const auto omega = FrameEnergy(s);
  const auto padded = oracle::ReflectPad(w.samples, cfg.n_fft / 2);
  const double n = static_cast<double>(cfg.n_fft);
  for (std::size_t t = 0; t < s.frames(); t += 5) {
    double sq = 0.0, sum = 0.0, alt = 0.0;
    for (std::size_t i = 0; i < cfg.n_fft; ++i) {
      const double y = padded[t * cfg.hop + i];
      sq += y * y;
      sum += y;
      alt += (i % 2 ? -y : y);
    }
    // One-sided bins 0..N/2 carry half the two-sided energy plus half of
    // the DC and Nyquist terms.
    const double want = (n * sq + sum * sum + alt * alt) / 2.0 / s.bins();
    CHECK(omega[t] == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("unpadded rect frames satisfy Parseval over the full spectrum") {
  const Waveform w = Noise(5120, 12);
  StftConfig cfg;
  cfg.window = WindowType::kRect;
  cfg.hop = cfg.n_fft;
  cfg.center_pad = false;
  const ComplexSpectrogram s = Stft(w, cfg);
  REQUIRE(s.frames() == 10);
  for (std::size_t t = 0; t < s.frames(); ++t) {
    // Rebuild the two-sided sum from the Hermitian half.
    double two_sided = 0.0;
    for (std::size_t k = 0; k < s.bins(); ++k) {
      const double e = std::norm(s.at(t, k));
      two_sided += (k == 0 || k + 1 == s.bins()) ? e : 2.0 * e;
    }
    double time = 0.0;
    for (std::size_t i = 0; i < cfg.n_fft; ++i) time += w.samples[t * cfg.hop + i] * w.samples[t * cfg.hop + i];
    CHECK(two_sided == doctest::Approx(cfg.n_fft * time).epsilon(1e-9));
  }
}

TEST_CASE("frame energy of trivial spectrograms") {
  ComplexSpectrogram s(3, StftConfig{}, kPipelineRate);
  for (double v : FrameEnergy(s)) CHECK(v == 0.0);
  for (std::size_t i = 0; i < s.data().size(); ++i)
    s.data()[i] = std::polar(1.0, 0.1 * static_cast<double>(i));
  for (double v : FrameEnergy(s)) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("stft is linear") {
  const Waveform a = Noise(4000, 13), b = Noise(4000, 14);
  Waveform mix = a;
  for (std::size_t i = 0; i < mix.size(); ++i) mix.samples[i] = 0.7 * a.samples[i] - 1.9 * b.samples[i];
  const ComplexSpectrogram sa = Stft(a), sb = Stft(b), sm = Stft(mix);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < sm.data().size(); ++i) {
    worst = std::max(worst, std::abs(sm.data()[i] - (0.7 * sa.data()[i] - 1.9 * sb.data()[i])));
    scale = std::max(scale, std::abs(sm.data()[i]));
  }
  CHECK(worst <= 1e-9 * scale);
}

TEST_CASE("istft of silence is silence") {
  ComplexSpectrogram s(20, StftConfig{}, kPipelineRate);
  for (double v : Istft(s).samples) CHECK(v == 0.0);
}

TEST_CASE("stft rejects bad configs and empty input") {
  StftConfig cfg;
  cfg.n_fft = 500;
  CHECK_THROWS_AS(Stft(Noise(1000, 1), cfg), ConfigError);
  CHECK_THROWS_AS(Stft(Waveform{}), SizeError);
}

TEST_CASE("resampling keeps a tone at its frequency") {
  const Waveform w = Sine(1000.0, 1.0, 44100);
  const Waveform r = Resample(w, 16000);
  CHECK(r.sample_rate == 16000);
  CHECK(r.size() == 16000);
  std::vector<double> mid(r.samples.begin() + 4000, r.samples.begin() + 12000);
  const auto spec = oracle::NaiveRdft(mid);
  CHECK(PeakBin(spec) == 500);  // 1000 Hz at 2 Hz per bin
  // Amplitude preserved in the passband.
  CHECK(oracle::Rms(mid) == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(2e-3));

  const Waveform up = Resample(Sine(440.0, 0.5, 8000), 16000);
  CHECK(up.size() == 8000);
  std::vector<double> up_mid(up.samples.begin() + 2000, up.samples.begin() + 6000);
  CHECK(PeakBin(oracle::NaiveRdft(up_mid)) == 110);

  const Waveform same = Resample(w, 44100);
  CHECK(same.samples == w.samples);
}

TEST_CASE("float wav round trip is exact for float-representable data") {
  oracle::TempDir dir("wav");
  Waveform w = Noise(1234, 4, 22050);
  for (double& v : w.samples) v = static_cast<float>(v);
  SaveWav(w, dir / "a.wav");
  const Waveform r = LoadWav(dir / "a.wav");
  CHECK(r.sample_rate == 22050);
  CHECK(r.samples == w.samples);
}

TEST_CASE("pcm16 wav scales by 1/32768") {
  oracle::TempDir dir("wav16");
  Waveform w;
  w.samples = {0.0, 0.5, -0.5, 1.0, -1.0, 0.25};
  SaveWavPcm16(w, dir / "p.wav");
  const Waveform r = LoadWav(dir / "p.wav");
  REQUIRE(r.size() == w.size());
  CHECK(r.samples[1] == 16384.0 / 32768.0);
  CHECK(r.samples[3] == 32767.0 / 32768.0);
  CHECK(r.samples[4] == -1.0);
}

TEST_CASE("stereo pcm16 is averaged to mono and extra chunks are skipped") {
  std::vector<std::uint8_t> b;
  auto tag = [&](const char* s) { b.insert(b.end(), s, s + 4); };
  tag("RIFF");
  PutU32(b, 0);
  tag("WAVE");
  tag("LIST");
  PutU32(b, 3);
  b.insert(b.end(), {1, 2, 3, 0});  // odd chunk with pad byte
  tag("fmt ");
  PutU32(b, 16);
  PutU16(b, 1);
  PutU16(b, 2);
  PutU32(b, 8000);
  PutU32(b, 8000 * 4);
  PutU16(b, 4);
  PutU16(b, 16);
  tag("data");
  PutU32(b, 8);
  for (std::int16_t v : {std::int16_t(1000), std::int16_t(3000), std::int16_t(-200), std::int16_t(200)})
    PutU16(b, static_cast<std::uint16_t>(v));
  const std::uint32_t riff = static_cast<std::uint32_t>(b.size() - 8);
  std::memcpy(b.data() + 4, &riff, 4);
  oracle::TempDir dir("wavst");
  WriteFileBytes(dir / "s.wav", b);
  const Waveform w = LoadWav(dir / "s.wav");
  CHECK(w.sample_rate == 8000);
  REQUIRE(w.size() == 2);
  CHECK(w.samples[0] == doctest::Approx(2000.0 / 32768.0));
  CHECK(w.samples[1] == 0.0);
}

TEST_CASE("malformed wav files are rejected") {
  oracle::TempDir dir("wavbad");
  WriteFileBytes(dir / "junk.wav", {'n', 'o', 'p', 'e'});
  CHECK_THROWS_AS(LoadWav(dir / "junk.wav"), FormatError);
  CHECK_THROWS_AS(LoadWav(dir / "missing.wav"), IoError);
}

TEST_CASE("spectrogram dump round trip") {
  oracle::TempDir dir("taps");
  const ComplexSpectrogram s = Stft(Noise(2000, 8));
  WriteSpectrogram(s, dir / "s.taps");
  const ComplexSpectrogram r = ReadSpectrogram(dir / "s.taps");
  CHECK(r.frames() == s.frames());
  CHECK(r.bins() == s.bins());
  CHECK(r.data() == s.data());
}

}  // TEST_SUITE
