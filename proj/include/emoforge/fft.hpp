/* Copyright 2026 The emoforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <complex>

#include <fftw3.h>

#include "emoforge/common.hpp"

namespace emoforge {

// FFTW planning is not thread-safe; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Real-input transform of a fixed size with owned buffers. One instance per
/// thread; the object is movable but not shareable across threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    require(n >= 1, ErrorKind::kParameter, "FFT size must be positive");
    real_ = fftw_alloc_real(n_);
    spectrum_ = fftw_alloc_complex(n_ / 2 + 1);
    std::lock_guard lock(fftw_planner_mutex());
    const int size = static_cast<int>(n_);
    forward_ = fftw_plan_dft_r2c_1d(size, real_, spectrum_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(size, spectrum_, real_, FFTW_ESTIMATE);
  }

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  ~RealFft() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spectrum_);
  }

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  /// |X[k]| for k in [0, n/2]. Input shorter than n is zero-padded.
  void magnitude(std::span<const double> input, std::span<double> out) {
    load(input);
    fftw_execute(forward_);
    for (std::size_t k = 0; k < bins(); ++k) {
      out[k] = std::sqrt(spectrum_[k][0] * spectrum_[k][0] + spectrum_[k][1] * spectrum_[k][1]);
    }
  }

  /// Linear (non-circular) autocorrelation r[tau] = sum_n x[n] x[n+tau] for
  /// tau in [0, out.size()). Requires n >= 2 * input.size().
  void autocorrelation(std::span<const double> input, std::span<double> out) {
    require(n_ >= 2 * input.size(), ErrorKind::kParameter, "FFT too short for linear autocorrelation");
    load(input);
    fftw_execute(forward_);
    for (std::size_t k = 0; k < bins(); ++k) {
      spectrum_[k][0] = spectrum_[k][0] * spectrum_[k][0] + spectrum_[k][1] * spectrum_[k][1];
      spectrum_[k][1] = 0.0;
    }
    fftw_execute(inverse_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = real_[t] * scale;
  }

 private:
  void load(std::span<const double> input) {
    const std::size_t m = std::min(input.size(), n_);
    std::copy_n(input.begin(), m, real_);
    std::fill(real_ + m, real_ + n_, 0.0);
  }

  std::size_t n_;
  double* real_ = nullptr;
  fftw_complex* spectrum_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace emoforge
