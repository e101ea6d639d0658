// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tap/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "tap/error.hpp"

namespace tap {
namespace {

// FFTW planning is not thread-safe; execution with the new-array API is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n == 0) throw SizeError("FFT size must be positive");
  std::vector<double> real(n);
  std::vector<std::complex<double>> spec(n / 2 + 1);
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(PlannerMutex());
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(), cplx,
                                       flags);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx, real.data(),
                                       flags | FFTW_PRESERVE_INPUT);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr)
    throw Error("FFTW planning failed");
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  if (in.size() != n_ || out.size() != n_ / 2 + 1)
    throw SizeError("RealFft::Forward size mismatch");
  // r2c does not modify its input.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_),
                       const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  if (out.size() != n_ || in.size() != n_ / 2 + 1)
    throw SizeError("RealFft::Inverse size mismatch");
  fftw_execute_dft_c2r(
      static_cast<fftw_plan>(inverse_plan_),
      reinterpret_cast<fftw_complex*>(
          const_cast<std::complex<double>*>(in.data())),
      out.data());
  const double scale = 1.0 / static_cast<double>(n_);
  for (double& v : out) v *= scale;
}

}  // namespace tap
