// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tap/taploss.hpp"

#include <cmath>

#include "tap/error.hpp"

namespace tap {

double Mae(const TapMatrix& a, const TapMatrix& b) {
  CheckSameShape(a, b);
  if (a.frames() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    sum += std::abs(a.data()[i] - b.data()[i]);
  return sum / static_cast<double>(a.data().size());
}

ParamVector MaePerParameter(const TapMatrix& a, const TapMatrix& b) {
  CheckSameShape(a, b);
  ParamVector out{};
  if (a.frames() == 0) return out;
  for (std::size_t t = 0; t < a.frames(); ++t)
    for (std::size_t p = 0; p < kNumParams; ++p)
      out[p] += std::abs(a.at(t, p) - b.at(t, p));
  for (double& v : out) v /= static_cast<double>(a.frames());
  return out;
}

namespace {

double Sigmoid(double x) {
  // Symmetric form stays accurate for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void CheckWeightsLength(const TapMatrix& m, std::span<const double> omega) {
  if (omega.size() != m.frames())
    throw DimensionError("energy vector length " + std::to_string(omega.size()) +
                         " does not match T = " + std::to_string(m.frames()));
}

}  // namespace

std::vector<double> SmoothEnergyWeights(std::span<const double> omega,
                                        EnergyWeightMode mode) {
  std::vector<double> w(omega.size());
  if (mode == EnergyWeightMode::kRaw) {
    for (std::size_t t = 0; t < omega.size(); ++t) w[t] = Sigmoid(omega[t]);
    return w;
  }
  std::vector<double> z(omega.size());
  for (std::size_t t = 0; t < omega.size(); ++t)
    z[t] = std::log10(omega[t] + 1e-10);
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= omega.empty() ? 1.0 : static_cast<double>(omega.size());
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= omega.empty() ? 1.0 : static_cast<double>(omega.size());
  const double sd = std::sqrt(var);
  for (std::size_t t = 0; t < z.size(); ++t)
    w[t] = Sigmoid(sd < kMinStd ? 0.0 : (z[t] - mean) / sd);
  return w;
}

double TapLoss(const TapMatrix& clean, const TapMatrix& enhanced,
               std::span<const double> omega, EnergyWeightMode mode) {
  CheckSameShape(clean, enhanced);
  CheckWeightsLength(clean, omega);
  if (clean.frames() == 0) return 0.0;
  const std::vector<double> w = SmoothEnergyWeights(omega, mode);
  double sum = 0.0;
  for (std::size_t t = 0; t < clean.frames(); ++t) {
    double row = 0.0;
    for (std::size_t p = 0; p < kNumParams; ++p)
      row += std::abs(clean.at(t, p) - enhanced.at(t, p));
    sum += w[t] * row;
  }
  return sum / static_cast<double>(clean.frames() * kNumParams);
}

TapMatrix TapLossGrad(const TapMatrix& clean, const TapMatrix& enhanced,
                      std::span<const double> omega, EnergyWeightMode mode) {
  CheckSameShape(clean, enhanced);
  CheckWeightsLength(clean, omega);
  TapMatrix grad(enhanced.frames(), enhanced.frame_hop(), enhanced.sample_rate());
  if (clean.frames() == 0) return grad;
  const std::vector<double> w = SmoothEnergyWeights(omega, mode);
  const double scale = 1.0 / static_cast<double>(clean.frames() * kNumParams);
  for (std::size_t t = 0; t < clean.frames(); ++t) {
    for (std::size_t p = 0; p < kNumParams; ++p) {
      const double d = enhanced.at(t, p) - clean.at(t, p);
      const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      grad.at(t, p) = w[t] * sign * scale;
    }
  }
  return grad;
}

double WaveformL1Loss(const Waveform& s, const Waveform& s_hat) {
  if (s.size() != s_hat.size())
    throw DimensionError("waveform lengths differ (" + std::to_string(s.size()) +
                         " vs " + std::to_string(s_hat.size()) + ")");
  if (s.sample_rate != s_hat.sample_rate)
    throw DimensionError("waveform sample rates differ");
  if (s.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    sum += std::abs(s.samples[i] - s_hat.samples[i]);
  return sum / static_cast<double>(s.size());
}

const std::array<StftResolution, 3>& MultiResolutions() {
  static const std::array<StftResolution, 3> res = {
      StftResolution{512, 50, 240},
      StftResolution{1024, 120, 600},
      StftResolution{2048, 240, 1200}};
  return res;
}

StftLossTerms StftLossAt(const Waveform& s, const Waveform& s_hat,
                         const StftResolution& res) {
  if (s.size() != s_hat.size())
    throw DimensionError("waveform lengths differ");
  StftConfig cfg;
  cfg.n_fft = res.n_fft;
  cfg.hop = res.hop;
  cfg.win_length = res.win_length;
  const ComplexSpectrogram a = Stft(s, cfg);
  const ComplexSpectrogram b = Stft(s_hat, cfg);
  double diff2 = 0.0, ref2 = 0.0, log_l1 = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double ma = std::abs(a.data()[i]);
    const double mb = std::abs(b.data()[i]);
    diff2 += (ma - mb) * (ma - mb);
    ref2 += ma * ma;
    log_l1 += std::abs(std::log(ma + 1e-7) - std::log(mb + 1e-7));
  }
  StftLossTerms terms;
  terms.spectral_convergence = diff2 == 0.0 ? 0.0
                                            : std::sqrt(diff2) /
                                                  std::max(std::sqrt(ref2), 1e-12);
  terms.log_magnitude = log_l1 / static_cast<double>(a.data().size());
  return terms;
}

double MultiResStftLoss(const Waveform& s, const Waveform& s_hat) {
  if (s.size() != s_hat.size())
    throw DimensionError("waveform lengths differ");
  const std::size_t longest = MultiResolutions().back().n_fft;
  if (s.size() < longest)
    throw SizeError("signal shorter than the largest STFT frame (" +
                    std::to_string(longest) + " samples)");
  double total = 0.0;
  for (const auto& res : MultiResolutions()) {
    const StftLossTerms t = StftLossAt(s, s_hat, res);
    total += t.spectral_convergence + t.log_magnitude;
  }
  return total;
}

void LossWeights::Validate() const {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !(gamma >= 0.0))
    throw ConfigError("loss weights must be nonnegative");
}

double CompositeDemucsLoss(const Waveform& s, const Waveform& s_hat,
                           const TapMatrix& clean, const TapMatrix& enhanced,
                           std::span<const double> omega,
                           const LossWeights& weights, EnergyWeightMode mode) {
  weights.Validate();
  double loss = WaveformL1Loss(s, s_hat);
  if (weights.lambda1 != 0.0)
    loss += weights.lambda1 * TapLoss(clean, enhanced, omega, mode);
  if (weights.lambda2 != 0.0) loss += weights.lambda2 * MultiResStftLoss(s, s_hat);
  return loss;
}

double CompositeFullSubNetLoss(double cirm_mse, double tap_loss,
                               const LossWeights& weights) {
  weights.Validate();
  return cirm_mse + weights.gamma * tap_loss;
}

namespace {

void CheckSameGrid(const ComplexSpectrogram& a, const ComplexSpectrogram& b) {
  if (a.frames() != b.frames() || a.bins() != b.bins())
    throw DimensionError("spectrogram shapes differ");
}

// K(1 - e^{-Cm}) / (1 + e^{-Cm}) written as K tanh(Cm/2), finite for any m.
double Compress(double m) { return kCirmK * std::tanh(0.5 * kCirmC * m); }

}  // namespace

ComplexSpectrogram ComputeCirm(const ComplexSpectrogram& clean,
                               const ComplexSpectrogram& noisy, bool compress) {
  CheckSameGrid(clean, noisy);
  ComplexSpectrogram mask(clean.frames(), clean.config(), clean.sample_rate());
  for (std::size_t i = 0; i < mask.data().size(); ++i) {
    const std::complex<double> s = clean.data()[i];
    std::complex<double> x = noisy.data()[i];
    const double mag = std::abs(x);
    if (mag < kCirmDenominatorFloor)
      x = mag > 0.0 ? x * (kCirmDenominatorFloor / mag)
                    : std::complex<double>(kCirmDenominatorFloor, 0.0);
    std::complex<double> m = s / x;
    if (compress) m = {Compress(m.real()), Compress(m.imag())};
    mask.data()[i] = m;
  }
  return mask;
}

double CirmMseLoss(const ComplexSpectrogram& truth,
                   const ComplexSpectrogram& estimate) {
  CheckSameGrid(truth, estimate);
  if (truth.data().empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.data().size(); ++i) {
    const auto d = truth.data()[i] - estimate.data()[i];
    sum += d.real() * d.real() + d.imag() * d.imag();
  }
  return sum / (2.0 * static_cast<double>(truth.data().size()));
}

PaiComparison PercentImprovement(const ParamVector& err_num,
                                 const ParamVector& err_den) {
  PaiComparison c;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    if (err_den[p] < kPaiFloor) {
      c.degenerate[p] = true;
      c.percent[p] = err_num[p] < kPaiFloor
                         ? 0.0
                         : 100.0 * (1.0 - err_num[p] / kPaiFloor);
      continue;
    }
    c.percent[p] = 100.0 * (1.0 - err_num[p] / err_den[p]);
    sum += c.percent[p];
    ++used;
  }
  c.mean = used > 0 ? sum / static_cast<double>(used) : 0.0;
  return c;
}

PaiReport PaiFromErrors(const ParamVector& err_noisy,
                        const ParamVector& err_baseline,
                        const ParamVector& err_ours) {
  return {PercentImprovement(err_baseline, err_noisy),
          PercentImprovement(err_ours, err_noisy),
          PercentImprovement(err_ours, err_baseline)};
}

PaiReport ComputePai(const TapMatrix& clean, const TapMatrix& noisy,
                     const TapMatrix& baseline, const TapMatrix& ours) {
  CheckSameShape(clean, noisy);
  CheckSameShape(clean, baseline);
  CheckSameShape(clean, ours);
  return PaiFromErrors(MaePerParameter(noisy, clean),
                       MaePerParameter(baseline, clean),
                       MaePerParameter(ours, clean));
}

}  // namespace tap
