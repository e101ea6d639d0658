// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tap/tap_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tap/binary_io.hpp"
#include "tap/error.hpp"

namespace tap {

const std::array<std::string_view, kNumParams>& ParamNames() {
  static const std::array<std::string_view, kNumParams> names = {
      "pitch",          "jitter",         "f1_freq",
      "f2_freq",        "f3_freq",        "f1_bw",
      "f2_bw",          "f3_bw",          "shimmer",
      "loudness",       "hnr",            "alpha_ratio",
      "hammarberg",     "slope_0_500",    "slope_500_1500",
      "f1_rel_energy",  "f2_rel_energy",  "f3_rel_energy",
      "h1_h2",          "h1_a3",          "loudness_peak_rate",
      "voiced_len_mean", "voiced_len_std", "unvoiced_len_mean",
      "unvoiced_len_std"};
  return names;
}

TapMatrix::TapMatrix(std::size_t frames, std::size_t hop, int sample_rate)
    : frames_(frames),
      hop_(hop),
      sample_rate_(sample_rate),
      data_(frames * kNumParams, 0.0) {}

std::vector<double> TapMatrix::column(std::size_t p) const {
  std::vector<double> c(frames_);
  for (std::size_t t = 0; t < frames_; ++t) c[t] = at(t, p);
  return c;
}

void TapMatrix::set_column(std::size_t p, std::span<const double> values) {
  if (values.size() != frames_)
    throw DimensionError("column length does not match frame count");
  for (std::size_t t = 0; t < frames_; ++t) at(t, p) = values[t];
}

bool TapMatrix::AllFinite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void CheckSameShape(const TapMatrix& a, const TapMatrix& b) {
  if (a.frames() != b.frames())
    throw DimensionError("TAP matrices differ in frame count (" +
                         std::to_string(a.frames()) + " vs " +
                         std::to_string(b.frames()) + ")");
}

TapMatrix Standardize(const TapMatrix& m, StandardizationStats* stats_out) {
  StandardizationStats stats;
  const std::size_t frames = m.frames();
  for (std::size_t p = 0; p < kNumParams; ++p) {
    double mean = 0.0;
    for (std::size_t t = 0; t < frames; ++t) mean += m.at(t, p);
    mean = frames > 0 ? mean / static_cast<double>(frames) : 0.0;
    double var = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      const double d = m.at(t, p) - mean;
      var += d * d;
    }
    var = frames > 0 ? var / static_cast<double>(frames) : 0.0;
    const double sd = std::sqrt(var);
    stats.mean[p] = mean;
    stats.std[p] = sd < kMinStd ? 0.0 : sd;
  }
  TapMatrix out = ApplyStandardization(m, stats);
  if (stats_out != nullptr) *stats_out = stats;
  return out;
}

TapMatrix ApplyStandardization(const TapMatrix& m,
                               const StandardizationStats& stats) {
  TapMatrix out(m.frames(), m.frame_hop(), m.sample_rate());
  for (std::size_t t = 0; t < m.frames(); ++t) {
    for (std::size_t p = 0; p < kNumParams; ++p) {
      out.at(t, p) = stats.std[p] == 0.0
                         ? 0.0
                         : (m.at(t, p) - stats.mean[p]) / stats.std[p];
    }
  }
  out.set_standardized(true);
  out.set_stats(stats);
  return out;
}

namespace {

std::string FormatValue(double v, int digits = 9) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseDouble(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw FormatError(where + ": bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError(where + ": bad number '" + s + "'");
  }
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void WriteTapCsv(const TapMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "frame";
  for (auto name : ParamNames()) out << ',' << name;
  out << '\n';
  for (std::size_t t = 0; t < m.frames(); ++t) {
    out << t;
    for (std::size_t p = 0; p < kNumParams; ++p)
      out << ',' << FormatValue(m.at(t, p));
    out << '\n';
  }
  if (!out) throw IoError("short write on " + path);
}

TapMatrix ReadTapCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path + ": empty file");
  const auto header = SplitCsv(StripCr(line));
  if (header.size() != kNumParams + 1 || header[0] != "frame")
    throw FormatError(path + ": unexpected TAP CSV header");
  for (std::size_t p = 0; p < kNumParams; ++p)
    if (header[p + 1] != ParamNames()[p])
      throw FormatError(path + ": column " + std::to_string(p + 1) +
                        " should be " + std::string(ParamNames()[p]));
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    line = StripCr(line);
    if (line.empty()) continue;
    const auto cells = SplitCsv(line);
    const std::string where = path + ":" + std::to_string(rows + 2);
    if (cells.size() != kNumParams + 1)
      throw FormatError(where + ": expected 26 fields");
    for (std::size_t p = 1; p <= kNumParams; ++p)
      values.push_back(ParseDouble(cells[p], where));
    ++rows;
  }
  TapMatrix m(rows);
  m.data() = std::move(values);
  return m;
}

namespace {
constexpr std::uint32_t kTapVersion = 1;
}

void WriteTapBinary(const TapMatrix& m, const std::string& path) {
  ByteWriter out;
  out.PutMagic("TAPM");
  out.Put<std::uint32_t>(kTapVersion);
  out.Put<std::uint64_t>(m.frames());
  out.Put<std::uint64_t>(kNumParams);
  out.Put<std::uint8_t>(m.standardized() ? 1 : 0);
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(m.frame_hop()));
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(m.sample_rate()));
  out.PutDoubles(m.data());
  if (m.standardized()) {
    const StandardizationStats stats = m.stats().value_or(StandardizationStats{});
    for (double v : stats.mean) out.Put<double>(v);
    for (double v : stats.std) out.Put<double>(v);
  }
  WriteFileBytes(path, out.bytes());
}

TapMatrix ReadTapBinary(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  ByteReader in(bytes);
  if (!in.MagicIs("TAPM")) throw FormatError(path + ": bad magic");
  if (in.Get<std::uint32_t>() != kTapVersion)
    throw FormatError(path + ": unsupported version");
  const auto frames = in.Get<std::uint64_t>();
  if (in.Get<std::uint64_t>() != kNumParams)
    throw FormatError(path + ": parameter count must be 25");
  const bool standardized = in.Get<std::uint8_t>() != 0;
  const auto hop = in.Get<std::uint32_t>();
  const auto rate = in.Get<std::uint32_t>();
  TapMatrix m(frames, hop, static_cast<int>(rate));
  m.data() = in.GetDoubles(frames * kNumParams);
  m.set_standardized(standardized);
  if (standardized) {
    StandardizationStats stats;
    const auto mean = in.GetDoubles(kNumParams);
    const auto sd = in.GetDoubles(kNumParams);
    std::copy(mean.begin(), mean.end(), stats.mean.begin());
    std::copy(sd.begin(), sd.end(), stats.std.begin());
    m.set_stats(stats);
  }
  if (in.remaining() != 0) throw FormatError(path + ": trailing bytes");
  return m;
}

TapMatrix ReadTapFile(const std::string& path) {
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".tapm") == 0)
    return ReadTapBinary(path);
  return ReadTapCsv(path);
}

void WriteStatsCsv(const StandardizationStats& stats, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "parameter,mean,std\n";
  for (std::size_t p = 0; p < kNumParams; ++p)
    out << ParamNames()[p] << ',' << FormatValue(stats.mean[p], 17) << ','
        << FormatValue(stats.std[p], 17) << '\n';
}

StandardizationStats ReadStatsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (StripCr(line) != "parameter,mean,std")
    throw FormatError(path + ": unexpected stats header");
  StandardizationStats stats;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    if (!std::getline(in, line)) throw FormatError(path + ": truncated");
    const auto cells = SplitCsv(StripCr(line));
    if (cells.size() != 3 || cells[0] != ParamNames()[p])
      throw FormatError(path + ": bad stats row " + std::to_string(p));
    stats.mean[p] = ParseDouble(cells[1], path);
    stats.std[p] = ParseDouble(cells[2], path);
  }
  return stats;
}

}  // namespace tap
