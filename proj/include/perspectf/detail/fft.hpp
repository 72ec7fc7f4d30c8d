// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <unsupported/Eigen/FFT>

namespace perspectf::detail {

/// Unscaled complex FFT: fwd computes sum x_n e^{-2 pi i k n / M} and inv the
/// same sum with a positive exponent. One engine per thread, since the
/// backend caches plans internally.
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return engine;
}

}  // namespace perspectf::detail
