// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "perspectf/error.hpp"
#include "perspectf/grid.hpp"
#include "perspectf/metrics.hpp"

namespace perspectf {

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "short write to '" + path.string() + "'");
}

inline std::uint32_t le_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
inline std::uint16_t le_u16(const std::uint8_t* p) { return std::uint16_t(p[0] | p[1] << 8); }

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}
inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(std::uint8_t(v));
  out.push_back(std::uint8_t(v >> 8));
}
inline void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}
inline double get_f32(const std::uint8_t* p) { return std::bit_cast<float>(le_u32(p)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// WAV

struct WavData {
  Signal signal;
  int channels = 1;
  int bits_per_sample = 16;
  std::size_t samples_in_file = 0;  // per channel, before truncation
  std::vector<std::string> warnings;
};

/// Reads 16- or 24-bit PCM, keeps the first channel, scales to [-1, 1) and
/// truncates the length to a multiple of `hop`.
inline WavData read_wav(const std::filesystem::path& path, std::size_t hop = 1) {
  const auto bytes = detail::read_file_bytes(path);
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorKind::UnsupportedFormat, "'" + name + "' is not a RIFF/WAVE file");

  WavData out;
  std::optional<std::size_t> data_offset;
  std::size_t data_size = 0;
  bool have_fmt = false;
  int format = 0;
  std::size_t block_align = 0;
  std::uint32_t rate = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* hdr = bytes.data() + pos;
    const std::size_t size = detail::le_u32(hdr + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, bytes.size() - body);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (avail < 16) throw Error(ErrorKind::UnsupportedFormat, "truncated fmt chunk in '" + name + "'");
      const std::uint8_t* f = bytes.data() + body;
      format = detail::le_u16(f);
      out.channels = detail::le_u16(f + 2);
      rate = detail::le_u32(f + 4);
      block_align = detail::le_u16(f + 12);
      out.bits_per_sample = detail::le_u16(f + 14);
      if (format == 0xFFFE && avail >= 26) format = detail::le_u16(f + 24);  // extensible sub-format
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data_offset = body;
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || !data_offset) throw Error(ErrorKind::UnsupportedFormat, "'" + name + "' lacks fmt or data chunk");
  if (format != 1) throw Error(ErrorKind::UnsupportedFormat, "'" + name + "' is not PCM (format " + std::to_string(format) + ")");
  if (out.bits_per_sample != 16 && out.bits_per_sample != 24)
    throw Error(ErrorKind::UnsupportedFormat, "unsupported bit depth " + std::to_string(out.bits_per_sample));
  const std::size_t width = std::size_t(out.bits_per_sample / 8);
  if (out.channels < 1 || block_align < width * std::size_t(out.channels))
    throw Error(ErrorKind::UnsupportedFormat, "inconsistent block alignment in '" + name + "'");
  if (out.channels > 1)
    out.warnings.push_back(std::to_string(out.channels) + "-channel input; using the first channel only");

  out.samples_in_file = data_size / block_align;
  const std::size_t step = std::max<std::size_t>(hop, 1);
  const std::size_t length = out.samples_in_file / step * step;
  if (length == 0) throw Error(ErrorKind::EmptyFile, "'" + name + "' holds fewer samples than one hop");

  out.signal.sample_rate = double(rate);
  out.signal.samples.resize(length);
  const double full_scale = out.bits_per_sample == 16 ? 32768.0 : 8388608.0;
  for (std::size_t i = 0; i < length; ++i) {
    const std::uint8_t* s = bytes.data() + *data_offset + i * block_align;
    std::int32_t v;
    if (width == 2) {
      v = std::int16_t(detail::le_u16(s));
    } else {
      v = std::int32_t(std::uint32_t(s[0]) << 8 | std::uint32_t(s[1]) << 16 | std::uint32_t(s[2]) << 24) >> 8;
    }
    out.signal.samples[i] = double(v) / full_scale;
  }
  return out;
}

/// 16-bit mono PCM from the real part of the signal, clipped to [-1, 1].
inline void write_wav(const std::filesystem::path& path, const Signal& signal, std::uint32_t sample_rate) {
  std::vector<std::uint8_t> out;
  const auto data_bytes = std::uint32_t(signal.size() * 2);
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::put_u32(out, 16);
  detail::put_u16(out, 1);
  detail::put_u16(out, 1);
  detail::put_u32(out, sample_rate);
  detail::put_u32(out, sample_rate * 2);
  detail::put_u16(out, 2);
  detail::put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::put_u32(out, data_bytes);
  for (const auto& c : signal.samples) {
    const double v = std::clamp(c.real(), -1.0, 1.0);
    detail::put_u16(out, std::uint16_t(std::int16_t(std::lround(v * 32767.0))));
  }
  detail::write_file_bytes(path, out);
}

// ---------------------------------------------------------------------------
// Synthetic signals

enum class SynthKind { Tone, TwoTone, LinearChirp, ImpulseTrain, TonePlusImpulses };

struct SynthSpec {
  SynthKind kind = SynthKind::Tone;
  double f1 = 440.0;  // tone frequency, first tone, or chirp start
  double f2 = 880.0;  // second tone or chirp end
  std::size_t period = 1024;
};

/// Deterministic signals with peak amplitude at most 1.
inline Signal synthesize(const SynthSpec& spec, std::size_t length, double sample_rate) {
  if (!(sample_rate > 0.0)) throw Error(ErrorKind::PreconditionViolated, "sample rate must be positive");
  const double nyquist = sample_rate / 2.0;
  auto check = [&](double f) {
    if (!(f >= 0.0 && f < nyquist))
      throw Error(ErrorKind::AboveNyquist, "frequency " + std::to_string(f) + " Hz not below Nyquist " +
                                               std::to_string(nyquist) + " Hz");
  };
  const bool uses_f1 = spec.kind != SynthKind::ImpulseTrain;
  const bool uses_f2 = spec.kind == SynthKind::TwoTone || spec.kind == SynthKind::LinearChirp;
  if (uses_f1) check(spec.f1);
  if (uses_f2) check(spec.f2);
  if ((spec.kind == SynthKind::ImpulseTrain || spec.kind == SynthKind::TonePlusImpulses) && spec.period == 0)
    throw Error(ErrorKind::PreconditionViolated, "impulse period must be positive");

  Signal out;
  out.sample_rate = sample_rate;
  out.samples.resize(length);
  const double two_pi = 2.0 * std::numbers::pi;
  const double duration = double(length) / sample_rate;
  for (std::size_t l = 0; l < length; ++l) {
    const double t = double(l) / sample_rate;
    double v = 0.0;
    switch (spec.kind) {
      case SynthKind::Tone:
        v = std::cos(two_pi * spec.f1 * t);
        break;
      case SynthKind::TwoTone:
        v = 0.5 * (std::cos(two_pi * spec.f1 * t) + std::cos(two_pi * spec.f2 * t));
        break;
      case SynthKind::LinearChirp:
        v = std::cos(two_pi * (spec.f1 * t + (spec.f2 - spec.f1) * t * t / (2.0 * duration)));
        break;
      case SynthKind::ImpulseTrain:
        v = l % spec.period == 0 ? 1.0 : 0.0;
        break;
      case SynthKind::TonePlusImpulses:
        v = 0.5 * std::cos(two_pi * spec.f1 * t) + (l % spec.period == 0 ? 0.5 : 0.0);
        break;
    }
    out.samples[l] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix files: raw little-endian float32 payload plus a JSON sidecar at
// <payload>.json. Payload order is row-major M x N (frequency rows).

struct MatrixSidecar {
  std::size_t rows = 0;  // M
  std::size_t cols = 0;  // N
  std::string dtype = "f32";  // or "c64-interleaved-f32"
  std::optional<std::size_t> hop;
  std::optional<std::size_t> channels;
  std::optional<std::size_t> window_length;
  std::optional<double> sample_rate;
  std::optional<double> lambda;
  std::optional<std::string> penalty_kind;

  bool is_complex() const { return dtype == "c64-interleaved-f32"; }
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& payload) {
  return std::filesystem::path(payload.string() + ".json");
}

inline nlohmann::json to_json(const MatrixSidecar& s) {
  nlohmann::json j;
  j["shape"] = {s.rows, s.cols};
  j["dtype"] = s.dtype;
  auto opt = [&](const char* key, const auto& v) {
    if (v) j[key] = *v; else j[key] = nullptr;
  };
  opt("hop", s.hop);
  opt("channels", s.channels);
  opt("window_length", s.window_length);
  opt("sample_rate", s.sample_rate);
  opt("lambda", s.lambda);
  opt("penalty_kind", s.penalty_kind);
  return j;
}

inline MatrixSidecar sidecar_from_json(const nlohmann::json& j) {
  MatrixSidecar s;
  try {
    const auto& shape = j.at("shape");
    if (!shape.is_array() || shape.size() != 2) throw Error(ErrorKind::SidecarMismatch, "shape must be [M, N]");
    s.rows = shape[0].get<std::size_t>();
    s.cols = shape[1].get<std::size_t>();
    s.dtype = j.at("dtype").get<std::string>();
    auto opt = [&](const char* key, auto& v) {
      if (j.contains(key) && !j[key].is_null()) v = j[key].get<typename std::decay_t<decltype(v)>::value_type>();
    };
    opt("hop", s.hop);
    opt("channels", s.channels);
    opt("window_length", s.window_length);
    opt("sample_rate", s.sample_rate);
    opt("lambda", s.lambda);
    opt("penalty_kind", s.penalty_kind);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SidecarMismatch, std::string("malformed sidecar: ") + e.what());
  }
  if (s.dtype != "f32" && s.dtype != "c64-interleaved-f32")
    throw Error(ErrorKind::SidecarMismatch, "unknown dtype '" + s.dtype + "'");
  return s;
}

struct MatrixData {
  MatrixSidecar meta;
  CoefficientGrid values;  // imaginary parts are zero for f32 payloads

  WeightGrid real() const {
    WeightGrid g(values.channels(), values.frames());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = values[k].real();
    return g;
  }
};

namespace detail {

inline void write_matrix_payload(const std::filesystem::path& path, MatrixSidecar meta, bool complex,
                                 std::size_t M, std::size_t N, auto&& value_at) {
  meta.rows = M;
  meta.cols = N;
  meta.dtype = complex ? "c64-interleaved-f32" : "f32";
  std::vector<std::uint8_t> bytes;
  bytes.reserve(M * N * (complex ? 8 : 4));
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < N; ++n) {
      const Complex v = value_at(m, n);
      put_f32(bytes, v.real());
      if (complex) put_f32(bytes, v.imag());
    }
  }
  write_file_bytes(path, bytes);
  std::ofstream side(sidecar_path(path), std::ios::trunc);
  if (!side) throw Error(ErrorKind::IoError, "cannot write sidecar for '" + path.string() + "'");
  side << to_json(meta).dump(2) << '\n';
}

}  // namespace detail

inline void write_matrix(const std::filesystem::path& path, const CoefficientGrid& grid, MatrixSidecar meta = {}) {
  detail::write_matrix_payload(path, std::move(meta), true, grid.channels(), grid.frames(),
                               [&](std::size_t m, std::size_t n) { return grid(m, n); });
}

inline void write_matrix(const std::filesystem::path& path, const WeightGrid& grid, MatrixSidecar meta = {}) {
  detail::write_matrix_payload(path, std::move(meta), false, grid.channels(), grid.frames(),
                               [&](std::size_t m, std::size_t n) { return Complex(grid(m, n)); });
}

inline MatrixSidecar read_sidecar(const std::filesystem::path& payload) {
  std::ifstream side(sidecar_path(payload));
  if (!side) throw Error(ErrorKind::IoError, "cannot open sidecar for '" + payload.string() + "'");
  nlohmann::json j;
  try {
    side >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SidecarMismatch, std::string("unparsable sidecar: ") + e.what());
  }
  return sidecar_from_json(j);
}

inline MatrixData read_matrix(const std::filesystem::path& path) {
  MatrixData out;
  out.meta = read_sidecar(path);
  const auto bytes = detail::read_file_bytes(path);
  const std::size_t M = out.meta.rows, N = out.meta.cols;
  const std::size_t width = out.meta.is_complex() ? 8 : 4;
  if (bytes.size() != M * N * width)
    throw Error(ErrorKind::SidecarMismatch, "payload holds " + std::to_string(bytes.size()) + " bytes, sidecar declares " +
                                                std::to_string(M) + "x" + std::to_string(N) + " " + out.meta.dtype);
  out.values = CoefficientGrid(M, N);
  const std::uint8_t* p = bytes.data();
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < N; ++n) {
      const double re = detail::get_f32(p);
      const double im = out.meta.is_complex() ? detail::get_f32(p + 4) : 0.0;
      out.values(m, n) = Complex(re, im);
      p += width;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectrogram images (binary PGM, one pixel per bin, low frequency at bottom).

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, top row first
};

inline GrayImage spectrogram_image(const WeightGrid& magnitudes, double range_db = 100.0) {
  if (magnitudes.size() == 0) throw Error(ErrorKind::PreconditionViolated, "cannot render an empty grid");
  const auto db = db_magnitude(magnitudes, range_db);
  const std::size_t M = magnitudes.channels(), N = magnitudes.frames();
  GrayImage img{N, M, std::vector<std::uint8_t>(M * N)};
  for (std::size_t row = 0; row < M; ++row) {
    const std::size_t m = M - 1 - row;
    for (std::size_t n = 0; n < N; ++n) {
      const double level = (db.db(m, n) + range_db) / range_db;
      img.pixels[row * N + n] = std::uint8_t(std::lround(255.0 * std::clamp(level, 0.0, 1.0)));
    }
  }
  return img;
}

/// Images placed left to right on a black background with `gap` columns between them.
inline GrayImage side_by_side(std::span<const GrayImage> images, std::size_t gap = 4) {
  GrayImage out;
  for (const auto& im : images) {
    out.width += im.width;
    out.height = std::max(out.height, im.height);
  }
  if (!images.empty()) out.width += gap * (images.size() - 1);
  out.pixels.assign(out.width * out.height, 0);
  std::size_t x0 = 0;
  for (const auto& im : images) {
    for (std::size_t r = 0; r < im.height; ++r)
      std::copy_n(im.pixels.begin() + std::ptrdiff_t(r * im.width), im.width,
                  out.pixels.begin() + std::ptrdiff_t(r * out.width + x0));
    x0 += im.width + gap;
  }
  return out;
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), img.pixels.begin(), img.pixels.end());
  detail::write_file_bytes(path, bytes);
}

inline GrayImage read_pgm(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  std::size_t pos = 0;
  auto token = [&] {
    while (pos < bytes.size() && (std::isspace(bytes[pos]) || bytes[pos] == '#')) {
      if (bytes[pos] == '#')
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      else
        ++pos;
    }
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(char(bytes[pos++]));
    return t;
  };
  if (token() != "P5") throw Error(ErrorKind::UnsupportedFormat, "not a binary PGM");
  GrayImage img;
  try {
    img.width = std::stoul(token());
    img.height = std::stoul(token());
    if (std::stoul(token()) != 255) throw Error(ErrorKind::UnsupportedFormat, "only 8-bit PGM is supported");
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::UnsupportedFormat, "malformed PGM header");
  }
  ++pos;
  if (bytes.size() - pos != img.width * img.height) throw Error(ErrorKind::UnsupportedFormat, "PGM payload size mismatch");
  img.pixels.assign(bytes.begin() + std::ptrdiff_t(pos), bytes.end());
  return img;
}

inline void render_spectrogram(const std::filesystem::path& path, const WeightGrid& magnitudes, double range_db = 100.0) {
  write_pgm(path, spectrogram_image(magnitudes, range_db));
}

inline void render_spectrogram(const std::filesystem::path& path, const CoefficientGrid& grid, double range_db = 100.0) {
  render_spectrogram(path, magnitude(grid), range_db);
}

}  // namespace perspectf
