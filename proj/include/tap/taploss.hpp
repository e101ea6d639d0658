// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_TAPLOSS_HPP_
#define TAP_TAPLOSS_HPP_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tap/signal.hpp"
#include "tap/tap_matrix.hpp"

namespace tap {

using ParamVector = std::array<double, kNumParams>;

// (1/(T*P)) * sum |a - b|
double Mae(const TapMatrix& a, const TapMatrix& b);

// Mean absolute error over time, one value per parameter.
ParamVector MaePerParameter(const TapMatrix& a, const TapMatrix& b);

enum class EnergyWeightMode {
  kRaw,         // sigmoid(omega)
  kNormalized,  // sigmoid(z-score of log10(omega + 1e-10)) over the utterance
};

std::vector<double> SmoothEnergyWeights(
    std::span<const double> omega,
    EnergyWeightMode mode = EnergyWeightMode::kNormalized);

// Energy-weighted MAE between clean and enhanced parameter matrices.
double TapLoss(const TapMatrix& clean, const TapMatrix& enhanced,
               std::span<const double> omega,
               EnergyWeightMode mode = EnergyWeightMode::kNormalized);

// d TapLoss / d enhanced, with the weights held constant and sign(0) = 0.
TapMatrix TapLossGrad(const TapMatrix& clean, const TapMatrix& enhanced,
                      std::span<const double> omega,
                      EnergyWeightMode mode = EnergyWeightMode::kNormalized);

double WaveformL1Loss(const Waveform& s, const Waveform& s_hat);

struct StftResolution {
  std::size_t n_fft;
  std::size_t hop;
  std::size_t win_length;
};

const std::array<StftResolution, 3>& MultiResolutions();

struct StftLossTerms {
  double spectral_convergence = 0.0;
  double log_magnitude = 0.0;
};

// Single-resolution terms (hann window, center padding).
StftLossTerms StftLossAt(const Waveform& s, const Waveform& s_hat,
                         const StftResolution& res);

double MultiResStftLoss(const Waveform& s, const Waveform& s_hat);

struct LossWeights {
  double lambda1 = 1.0;   // TAP weight, time-domain composite
  double lambda2 = 0.3;   // STFT weight, time-domain composite
  double gamma = 0.03;    // TAP weight, mask-based composite

  void Validate() const;
};

// L_wave + lambda1 * L_TAP + lambda2 * L_STFT
double CompositeDemucsLoss(const Waveform& s, const Waveform& s_hat,
                           const TapMatrix& clean, const TapMatrix& enhanced,
                           std::span<const double> omega,
                           const LossWeights& weights,
                           EnergyWeightMode mode = EnergyWeightMode::kNormalized);

// L_cIRM + gamma * L_TAP
double CompositeFullSubNetLoss(double cirm_mse, double tap_loss,
                               const LossWeights& weights);

inline constexpr double kCirmDenominatorFloor = 1e-8;
inline constexpr double kCirmK = 10.0;
inline constexpr double kCirmC = 0.1;

// Complex ratio S / X (|X| floored at 1e-8), optionally hyperbolically
// compressed per component: K * (1 - e^{-C m}) / (1 + e^{-C m}).
ComplexSpectrogram ComputeCirm(const ComplexSpectrogram& clean,
                               const ComplexSpectrogram& noisy, bool compress);

// Mean over T*F*2 real components of the squared difference.
double CirmMseLoss(const ComplexSpectrogram& truth,
                   const ComplexSpectrogram& estimate);

inline constexpr double kPaiFloor = 1e-12;

struct PaiComparison {
  ParamVector percent{};
  std::array<bool, kNumParams> degenerate{};
  double mean = 0.0;  // over non-degenerate parameters
};

struct PaiReport {
  PaiComparison baseline_vs_noisy;
  PaiComparison ours_vs_noisy;
  PaiComparison ours_vs_baseline;
};

// 100 * (1 - err_num / err_den) per parameter. A denominator below 1e-12 marks
// the entry degenerate: it scores 0 if the numerator is also below the floor,
// otherwise the numerator is divided by the floor.
PaiComparison PercentImprovement(const ParamVector& err_num,
                                 const ParamVector& err_den);

// Errors are per-parameter MAE to clean.
PaiReport PaiFromErrors(const ParamVector& err_noisy,
                        const ParamVector& err_baseline,
                        const ParamVector& err_ours);

PaiReport ComputePai(const TapMatrix& clean, const TapMatrix& noisy,
                     const TapMatrix& baseline, const TapMatrix& ours);

}  // namespace tap

#endif  // TAP_TAPLOSS_HPP_
