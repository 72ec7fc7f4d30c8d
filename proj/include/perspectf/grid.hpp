// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "perspectf/error.hpp"

namespace perspectf {

using Complex = std::complex<double>;

/// M x N time-frequency array. Entry (m, n) lives at flat index m + n*M, so
/// each time frame is a contiguous run of M frequency bins.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(std::size_t channels, std::size_t frames, T fill = T{})
      : channels_(channels), frames_(frames), data_(channels * frames, fill) {}
  Grid(std::size_t channels, std::size_t frames, std::vector<T> data)
      : channels_(channels), frames_(frames), data_(std::move(data)) {
    if (data_.size() != channels_ * frames_)
      throw Error(ErrorKind::ShapeMismatch, "grid data length does not match M*N");
  }

  std::size_t channels() const noexcept { return channels_; }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t m, std::size_t n) { return data_[m + n * channels_]; }
  const T& operator()(std::size_t m, std::size_t n) const { return data_[m + n * channels_]; }
  T& operator[](std::size_t k) { return data_[k]; }
  const T& operator[](std::size_t k) const { return data_[k]; }

  std::span<T> frame(std::size_t n) { return {data_.data() + n * channels_, channels_}; }
  std::span<const T> frame(std::size_t n) const { return {data_.data() + n * channels_, channels_}; }

  std::vector<T>& values() noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return channels_ == other.channels() && frames_ == other.frames();
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::vector<T> data_;
};

using CoefficientGrid = Grid<Complex>;
using WeightGrid = Grid<double>;

/// Discrete signal; real inputs carry zero imaginary parts.
struct Signal {
  std::vector<Complex> samples;
  std::optional<double> sample_rate;

  std::size_t size() const noexcept { return samples.size(); }
};

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* where) {
  if (!a.same_shape(b))
    throw Error(ErrorKind::ShapeMismatch, std::string(where) + ": grid shapes differ");
}

inline WeightGrid magnitude(const CoefficientGrid& x) {
  WeightGrid out(x.channels(), x.frames());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::abs(x[k]);
  return out;
}

inline CoefficientGrid to_complex(const WeightGrid& g) {
  CoefficientGrid out(g.channels(), g.frames());
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = g[k];
  return out;
}

template <typename T>
double norm2(std::span<const T> v) {
  double acc = 0.0;
  for (const auto& e : v) acc += std::norm(e);
  return std::sqrt(acc);
}

template <typename T>
double norm2(const std::vector<T>& v) {
  return norm2(std::span<const T>(v));
}

template <typename T>
double norm2(const Grid<T>& g) {
  return norm2(std::span<const T>(g.values()));
}

}  // namespace perspectf
