// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_ESTIMATOR_HPP_
#define TAP_ESTIMATOR_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tap/acoustics.hpp"
#include "tap/signal.hpp"
#include "tap/tap_matrix.hpp"

namespace tap {

// Stacked (optionally bidirectional) LSTM mapping per-frame complex spectra
// (real parts then imaginary parts) to the 25 standardized parameters.
struct EstimatorConfig {
  int num_layers = 3;
  int hidden_size = 64;
  bool bidirectional = true;
  int input_size = 514;  // 2 * F for the default 512-point STFT
  int output_size = static_cast<int>(kNumParams);
  std::uint64_t seed = 0;

  int directions() const { return bidirectional ? 2 : 1; }
  static EstimatorConfig ForStft(const StftConfig& stft);
  void Validate() const;
  bool operator==(const EstimatorConfig&) const = default;
};

struct TensorSpec {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;

  std::size_t size() const { return rows * cols; }
};

// Order of the tensors inside the flat parameter vector; fixed per config
// and used verbatim by the checkpoint format.
//   per layer, per direction: w_ih (4H x in), w_hh (4H x H), bias (4H x 1)
//   then w_out (out x H*dirs), b_out (out x 1)
// Gate blocks are stacked in the order input, forget, cell, output.
class ParamLayout {
 public:
  explicit ParamLayout(const EstimatorConfig& cfg);

  const std::vector<TensorSpec>& tensors() const { return tensors_; }
  std::size_t total() const { return total_; }
  const TensorSpec& w_ih(int layer, int dir) const { return tensors_[Index(layer, dir)]; }
  const TensorSpec& w_hh(int layer, int dir) const { return tensors_[Index(layer, dir) + 1]; }
  const TensorSpec& bias(int layer, int dir) const { return tensors_[Index(layer, dir) + 2]; }
  const TensorSpec& w_out() const { return tensors_[tensors_.size() - 2]; }
  const TensorSpec& b_out() const { return tensors_.back(); }

 private:
  std::size_t Index(int layer, int dir) const {
    return 3 * static_cast<std::size_t>(layer * dirs_ + dir);
  }
  int dirs_;
  std::vector<TensorSpec> tensors_;
  std::size_t total_ = 0;
};

struct EstimatorParams {
  EstimatorConfig config;
  std::vector<double> values;

  ParamLayout layout() const { return ParamLayout(config); }
  bool AllFinite() const;
};

// Uniform(-k, k) with k = 1/sqrt(hidden_size) for every matrix; forget-gate
// biases 1, all other biases 0. Deterministic in cfg.seed.
EstimatorParams InitEstimator(const EstimatorConfig& cfg);

// Frame features: real parts followed by imaginary parts (T x 2F, row-major).
std::vector<double> SpectrogramFeatures(const ComplexSpectrogram& spec);

TapMatrix Forward(const EstimatorParams& params, const ComplexSpectrogram& spec);

// Same, on precomputed features (T rows of input_size).
TapMatrix ForwardFeatures(const EstimatorParams& params,
                          std::span<const double> features, std::size_t frames);

struct LossAndGrads {
  double loss = 0.0;
  std::vector<double> grads;  // same layout as EstimatorParams::values
};

// MAE against `target` and its gradient by backpropagation through time
// (sign(0) = 0).
LossAndGrads LossAndGradients(const EstimatorParams& params,
                              const ComplexSpectrogram& spec,
                              const TapMatrix& target);
LossAndGrads LossAndGradientsFeatures(const EstimatorParams& params,
                                      std::span<const double> features,
                                      std::size_t frames,
                                      const TapMatrix& target);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState For(const EstimatorParams& params);
};

// Bias-corrected Adam update in place. Throws TrainingError on a non-finite
// gradient, leaving params and state untouched.
void AdamStep(EstimatorParams& params, std::span<const double> grads,
              AdamState& state);

// Rescales grads so their global L2 norm is at most max_norm; returns the
// norm before clipping.
double ClipGradNorm(std::span<double> grads, double max_norm);

struct TrainingExample {
  std::string id;
  std::vector<double> features;
  std::size_t frames = 0;
  TapMatrix target;
};

TrainingExample MakeExample(std::string id, const ComplexSpectrogram& spec,
                            TapMatrix target);

struct TrainingHistory {
  std::vector<double> train_mae;
  std::vector<double> val_mae;  // NaN when no validation data

  void WriteCsv(const std::string& path) const;
};

struct TrainOptions {
  int epochs = 200;
  std::uint64_t shuffle_seed = 0;
  double clip_norm = 5.0;
  // Called after every epoch with (epoch, train_mae, val_mae).
  std::function<void(int, double, double)> on_epoch;
};

struct TrainResult {
  EstimatorParams params;
  AdamState adam;
  TrainingHistory history;
};

// One utterance per optimizer step, seeded shuffle each epoch. The reported
// training MAE of an epoch is the mean of the per-step losses.
TrainResult Train(std::span<const TrainingExample> train,
                  std::span<const TrainingExample> validation,
                  const EstimatorConfig& cfg, const TrainOptions& options);

// Resumes from existing params/optimizer state.
TrainResult TrainFrom(EstimatorParams params, AdamState adam,
                      std::span<const TrainingExample> train,
                      std::span<const TrainingExample> validation,
                      const TrainOptions& options);

struct ManifestRecord {
  std::string id;
  std::string clean;
  std::string tap;    // optional cached target path
  std::string noisy;  // optional; used as input with --noisy-inputs
  std::string split;  // "train" (default), "dev", "test"
};

// JSON-lines training manifest: {"id", "clean", "tap"?, "noisy"?, "split"?}.
std::vector<ManifestRecord> LoadTrainingManifest(const std::string& path);

struct PreparedCorpus {
  std::vector<TrainingExample> train;
  std::vector<TrainingExample> validation;
};

// Extracts (or loads cached) standardized targets and spectrogram features.
// A missing cache file named by "tap" is written after extraction.
PreparedCorpus PrepareCorpus(const std::vector<ManifestRecord>& records,
                             const AnalysisConfig& analysis,
                             bool noisy_inputs = false);

void SaveCheckpoint(const EstimatorParams& params, const AdamState& state,
                    const std::string& path);

struct Checkpoint {
  EstimatorParams params;
  AdamState adam;
};

// Throws IntegrityError on checksum, version or (when `expected` is given)
// configuration mismatch.
Checkpoint LoadCheckpoint(const std::string& path,
                          const std::optional<EstimatorConfig>& expected = {});

struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
};

inline constexpr double kGradCheckTolerance = 1e-4;

// Relative error used by the gradient checks: |a - n| / max(|a|, |n|, 1e-6).
double GradRelativeError(double analytic, double numeric);

// Central finite differences (step 1e-5) on a tiny estimator (T = 3,
// hidden = 2, F = 5) at `points` randomly chosen parameters. Targets are
// offset from the network output so no |.| kink is crossed.
GradCheckResult EstimatorGradientCheck(std::uint64_t seed, int points = 100,
                                       int num_layers = 3);

}  // namespace tap

#endif  // TAP_ESTIMATOR_HPP_
