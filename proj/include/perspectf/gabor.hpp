// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perspectf/detail/fft.hpp"
#include "perspectf/error.hpp"
#include "perspectf/grid.hpp"

namespace perspectf {

enum class WindowKind { Hann, Rectangular, Custom };

/// Painless Gabor frame on a periodic signal of length L.
///
/// Windows are stored as length-L real vectors. Sample i of a length-L_w
/// window sits at index (i - L_w/2) mod L, so every window is centered on the
/// frame origin and wraps around the signal boundary.
class GaborSystem {
 public:
  std::size_t hop() const noexcept { return hop_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t signal_length() const noexcept { return length_; }
  std::size_t window_length() const noexcept { return window_length_; }
  std::size_t coefficient_count() const noexcept { return channels_ * frames_; }

  const std::vector<double>& window() const noexcept { return window_; }
  const std::vector<double>& dual_window() const noexcept { return dual_; }
  /// Indices (into the length-L window) where the window is nonzero.
  const std::vector<std::size_t>& support() const noexcept { return support_; }
  /// Diagonal of G_w^H G_w; hop-periodic.
  const std::vector<double>& frame_diagonal() const noexcept { return diagonal_; }

  friend GaborSystem build_system(std::span<const double>, std::size_t, std::size_t, std::size_t);

 private:
  std::size_t hop_ = 0;
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t length_ = 0;
  std::size_t window_length_ = 0;
  std::vector<double> window_;
  std::vector<double> dual_;
  std::vector<std::size_t> support_;
  std::vector<double> diagonal_;
};

inline std::vector<double> make_window(WindowKind kind, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::Hann) {
    for (std::size_t i = 0; i < length; ++i)
      w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(i) / double(length)));
  } else if (kind == WindowKind::Custom) {
    throw Error(ErrorKind::PreconditionViolated, "custom windows must be passed as sample vectors");
  }
  return w;
}

/// Builds the frame from explicit window samples and computes the canonical
/// dual window gamma(l) = w(l) / (M * sum_n w(l - a n)^2).
inline GaborSystem build_system(std::span<const double> window_samples, std::size_t hop,
                                std::size_t channels, std::size_t signal_length) {
  const std::size_t lw = window_samples.size();
  if (signal_length == 0) throw Error(ErrorKind::LengthMismatch, "signal length must be positive");
  if (hop == 0 || signal_length % hop != 0)
    throw Error(ErrorKind::NonDivisibleHop, "hop " + std::to_string(hop) +
                                                " does not divide signal length " +
                                                std::to_string(signal_length));
  if (channels == 0 || lw == 0 || lw > channels)
    throw Error(ErrorKind::NotPainless, "window length " + std::to_string(lw) +
                                            " exceeds channel count " + std::to_string(channels));
  if (channels < signal_length && signal_length % channels != 0)
    throw Error(ErrorKind::AliasedModulation,
                "channel count must divide the signal length (or exceed it) for a diagonal frame operator");

  GaborSystem sys;
  sys.hop_ = hop;
  sys.channels_ = channels;
  sys.frames_ = signal_length / hop;
  sys.length_ = signal_length;
  sys.window_length_ = lw;
  sys.window_.assign(signal_length, 0.0);

  bool any_nonzero = false;
  for (std::size_t i = 0; i < lw; ++i) {
    const std::size_t idx = (i + signal_length * (lw / signal_length + 1) - lw / 2) % signal_length;
    sys.window_[idx] += window_samples[i];
    any_nonzero = any_nonzero || window_samples[i] != 0.0;
  }
  if (!any_nonzero) throw Error(ErrorKind::PreconditionViolated, "window is identically zero");

  for (std::size_t j = 0; j < signal_length; ++j)
    if (sys.window_[j] != 0.0) sys.support_.push_back(j);

  // Frame operator diagonal M * sum_n |w(l - a n)|^2 is hop-periodic.
  sys.diagonal_.assign(signal_length, 0.0);
  std::vector<double> periodic(hop, 0.0);
  for (std::size_t j : sys.support_) periodic[j % hop] += sys.window_[j] * sys.window_[j];
  for (std::size_t l = 0; l < signal_length; ++l) {
    sys.diagonal_[l] = double(channels) * periodic[l % hop];
    if (!(sys.diagonal_[l] > 0.0))
      throw Error(ErrorKind::IncompleteCover,
                  "window and hop leave sample " + std::to_string(l) + " uncovered");
  }

  sys.dual_.assign(signal_length, 0.0);
  for (std::size_t j : sys.support_) sys.dual_[j] = sys.window_[j] / sys.diagonal_[j];
  return sys;
}

inline GaborSystem build_system(WindowKind kind, std::size_t window_length, std::size_t hop,
                                std::size_t channels, std::size_t signal_length) {
  const auto w = make_window(kind, window_length);
  return build_system(std::span<const double>(w), hop, channels, signal_length);
}

/// Complex windows are not supported; accepts a complex vector only if it is real.
inline GaborSystem build_system(std::span<const Complex> window_samples, std::size_t hop,
                                std::size_t channels, std::size_t signal_length) {
  std::vector<double> w;
  w.reserve(window_samples.size());
  for (const auto& c : window_samples) {
    if (c.imag() != 0.0) throw Error(ErrorKind::ComplexWindow, "window samples must be real");
    w.push_back(c.real());
  }
  return build_system(std::span<const double>(w), hop, channels, signal_length);
}

enum class WindowChoice { Analysis, Dual };

/// x_{m,n} = sum_l d_l w_{l-an} e^{-2 pi i m l / M}, one length-M FFT per frame.
inline CoefficientGrid dgt(const GaborSystem& sys, std::span<const Complex> d,
                           WindowChoice which = WindowChoice::Analysis) {
  const std::size_t L = sys.signal_length(), M = sys.channels(), N = sys.frames(), a = sys.hop();
  if (d.size() != L)
    throw Error(ErrorKind::LengthMismatch, "signal length " + std::to_string(d.size()) +
                                               " != system length " + std::to_string(L));
  const auto& w = which == WindowChoice::Analysis ? sys.window() : sys.dual_window();
  auto& fft = detail::fft_engine();
  CoefficientGrid x(M, N);
  std::vector<Complex> buf(M);
  for (std::size_t n = 0; n < N; ++n) {
    std::fill(buf.begin(), buf.end(), Complex{});
    for (std::size_t j : sys.support()) {
      const std::size_t l = (a * n + j) % L;
      buf[l % M] += d[l] * w[j];
    }
    fft.fwd(x.frame(n).data(), buf.data(), static_cast<Eigen::Index>(M));
  }
  return x;
}

inline CoefficientGrid dgt(const GaborSystem& sys, const Signal& d,
                           WindowChoice which = WindowChoice::Analysis) {
  return dgt(sys, std::span<const Complex>(d.samples), which);
}

/// (G_g^H x)_l = sum_{m,n} g_{l-an} e^{2 pi i m l / M} x_{m,n}; frames are
/// overlap-added in ascending order.
inline std::vector<Complex> adjoint_dgt(const GaborSystem& sys, const CoefficientGrid& x,
                                        WindowChoice which) {
  const std::size_t L = sys.signal_length(), M = sys.channels(), N = sys.frames(), a = sys.hop();
  if (x.channels() != M || x.frames() != N)
    throw Error(ErrorKind::ShapeMismatch, "coefficient grid does not match the Gabor system");
  const auto& g = which == WindowChoice::Analysis ? sys.window() : sys.dual_window();
  auto& fft = detail::fft_engine();
  std::vector<Complex> out(L);
  std::vector<Complex> buf(M);
  for (std::size_t n = 0; n < N; ++n) {
    fft.inv(buf.data(), x.frame(n).data(), static_cast<Eigen::Index>(M));
    for (std::size_t j : sys.support()) {
      const std::size_t l = (a * n + j) % L;
      out[l] += g[j] * buf[l % M];
    }
  }
  return out;
}

inline Signal synthesize_dual(const GaborSystem& sys, const CoefficientGrid& x,
                              std::optional<double> sample_rate = std::nullopt) {
  return Signal{adjoint_dgt(sys, x, WindowChoice::Dual), sample_rate};
}

/// The affine set {x : G_gamma^H x = d}.
struct ConstraintSet {
  GaborSystem system;
  std::vector<Complex> target;

  ConstraintSet(GaborSystem sys, std::vector<Complex> d) : system(std::move(sys)), target(std::move(d)) {
    if (target.size() != system.signal_length())
      throw Error(ErrorKind::LengthMismatch, "constraint target length does not match the system");
  }
  ConstraintSet(GaborSystem sys, const Signal& d) : ConstraintSet(std::move(sys), d.samples) {}

  /// ||G_gamma^H x - d|| / ||d||; absolute norm when d = 0.
  double residual(const CoefficientGrid& x) const {
    const auto synth = adjoint_dgt(system, x, WindowChoice::Dual);
    double num = 0.0, den = 0.0;
    for (std::size_t l = 0; l < synth.size(); ++l) {
      num += std::norm(synth[l] - target[l]);
      den += std::norm(target[l]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  }

  bool contains(const CoefficientGrid& x, double tol = 1e-10) const { return residual(x) <= tol; }
};

/// P_C(x) = x - G_w (G_gamma^H x - d).
inline CoefficientGrid project_constraint(const ConstraintSet& cs, const CoefficientGrid& x) {
  auto r = adjoint_dgt(cs.system, x, WindowChoice::Dual);
  for (std::size_t l = 0; l < r.size(); ++l) r[l] -= cs.target[l];
  const auto correction = dgt(cs.system, std::span<const Complex>(r));
  CoefficientGrid out = x;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= correction[k];
  return out;
}

}  // namespace perspectf
