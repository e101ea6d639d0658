// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Reference computations written directly from the definitions, used to
// check the optimized library code.

#ifndef TAP_TESTS_ORACLES_HPP_
#define TAP_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// X[k] = sum_n x[n] e^{-2 pi i k n / N}, k = 0..N/2.
inline std::vector<cd> NaiveRdft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<cd> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    cd acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += x[j] * std::polar(1.0, -2.0 * kPi * static_cast<double>(k * j % n) / n);
    out[k] = acc;
  }
  return out;
}

inline std::vector<double> Hann(std::size_t n) {  // periodic
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

// numpy.pad(..., mode="reflect") by index folding.
inline std::vector<double> ReflectPad(const std::vector<double>& x, std::size_t pad) {
  const long long n = static_cast<long long>(x.size());
  std::vector<double> out;
  for (long long i = -static_cast<long long>(pad); i < n + static_cast<long long>(pad); ++i) {
    long long j = i;
    if (n == 1) {
      j = 0;
    } else {
      const long long period = 2 * (n - 1);
      j = ((j % period) + period) % period;
      if (j >= n) j = period - j;
    }
    out.push_back(x[static_cast<std::size_t>(j)]);
  }
  return out;
}

inline double Rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

inline double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  if (v.empty()) return 0.0;
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Least-squares slope of y against x.
inline double LsSlope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

inline std::vector<double> RandomVector(std::size_t n, std::uint64_t seed,
                                        double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

inline std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tapkit_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle

#endif  // TAP_TESTS_ORACLES_HPP_
