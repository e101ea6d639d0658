// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_TAP_MATRIX_HPP_
#define TAP_TAP_MATRIX_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tap/signal.hpp"

namespace tap {

inline constexpr std::size_t kNumParams = 25;

// Canonical column order. Frozen: it is part of the CSV and binary formats.
enum Param : std::size_t {
  kPitch = 0,
  kJitter,
  kF1Freq,
  kF2Freq,
  kF3Freq,
  kF1Bandwidth,
  kF2Bandwidth,
  kF3Bandwidth,
  kShimmer,
  kLoudness,
  kHnr,
  kAlphaRatio,
  kHammarberg,
  kSlope0To500,
  kSlope500To1500,
  kF1RelEnergy,
  kF2RelEnergy,
  kF3RelEnergy,
  kH1MinusH2,
  kH1MinusA3,
  kLoudnessPeakRate,
  kVoicedLenMean,
  kVoicedLenStd,
  kUnvoicedLenMean,
  kUnvoicedLenStd,
};

const std::array<std::string_view, kNumParams>& ParamNames();

struct StandardizationStats {
  std::array<double, kNumParams> mean{};
  std::array<double, kNumParams> std{};
};

// T x 25 row-major matrix of per-frame acoustic parameters.
class TapMatrix {
 public:
  TapMatrix() = default;
  explicit TapMatrix(std::size_t frames, std::size_t hop = 160,
                     int sample_rate = kPipelineRate);

  std::size_t frames() const { return frames_; }
  static constexpr std::size_t params() { return kNumParams; }

  double& at(std::size_t t, std::size_t p) { return data_[t * kNumParams + p]; }
  double at(std::size_t t, std::size_t p) const {
    return data_[t * kNumParams + p];
  }
  std::span<double> row(std::size_t t) {
    return {data_.data() + t * kNumParams, kNumParams};
  }
  std::span<const double> row(std::size_t t) const {
    return {data_.data() + t * kNumParams, kNumParams};
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  std::vector<double> column(std::size_t p) const;
  void set_column(std::size_t p, std::span<const double> values);

  std::size_t frame_hop() const { return hop_; }
  int sample_rate() const { return sample_rate_; }
  bool standardized() const { return standardized_; }
  void set_standardized(bool s) { standardized_ = s; }

  // Present only when the matrix came out of Standardize().
  const std::optional<StandardizationStats>& stats() const { return stats_; }
  void set_stats(std::optional<StandardizationStats> s) { stats_ = std::move(s); }

  bool AllFinite() const;

 private:
  std::size_t frames_ = 0;
  std::size_t hop_ = 160;
  int sample_rate_ = kPipelineRate;
  bool standardized_ = false;
  std::optional<StandardizationStats> stats_;
  std::vector<double> data_;
};

inline constexpr double kMinStd = 1e-8;

// Per-column z-score over time with population std. Columns whose std is
// below kMinStd become all-zero and record std 0.
TapMatrix Standardize(const TapMatrix& m, StandardizationStats* stats = nullptr);

// Applies externally computed statistics (e.g. the clean reference's) to
// another matrix. Columns with std 0 are zeroed.
TapMatrix ApplyStandardization(const TapMatrix& m,
                               const StandardizationStats& stats);

void CheckSameShape(const TapMatrix& a, const TapMatrix& b);

// TAP CSV: "frame,<25 names>", 9 significant digits.
void WriteTapCsv(const TapMatrix& m, const std::string& path);
TapMatrix ReadTapCsv(const std::string& path);

// TAP binary ("TAPM"). Statistics are appended when standardized.
void WriteTapBinary(const TapMatrix& m, const std::string& path);
TapMatrix ReadTapBinary(const std::string& path);

// Dispatches on extension: ".tapm" binary, anything else CSV.
TapMatrix ReadTapFile(const std::string& path);

void WriteStatsCsv(const StandardizationStats& stats, const std::string& path);
StandardizationStats ReadStatsCsv(const std::string& path);

}  // namespace tap

#endif  // TAP_TAP_MATRIX_HPP_
