// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_FFT_HPP_
#define TAP_FFT_HPP_

#include <complex>
#include <cstddef>
#include <span>

namespace tap {

// Real-input DFT of fixed size backed by FFTW. Planning is serialized
// internally; Forward/Inverse are safe to call concurrently on one object.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }

  // out.size() == n/2 + 1; unnormalized.
  void Forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;
  // in.size() == n/2 + 1; includes the 1/n factor.
  void Inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace tap

#endif  // TAP_FFT_HPP_
