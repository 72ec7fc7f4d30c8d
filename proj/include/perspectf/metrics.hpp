// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "perspectf/error.hpp"
#include "perspectf/grid.hpp"
#include "perspectf/penalties.hpp"

namespace perspectf {

/// psi(B|x|) / psi(B|reference|).
inline double penalty_ratio(const PenaltyConfig& cfg, const CoefficientGrid& x, const CoefficientGrid& reference) {
  require_same_shape(x, reference, "penalty_ratio");
  const double den = psi_value(cfg, apply_operator(cfg.op, magnitude(reference)));
  if (!(den > 0.0)) throw Error(ErrorKind::DegenerateReference, "reference penalty is not positive");
  return psi_value(cfg, apply_operator(cfg.op, magnitude(x))) / den;
}

inline double cosine_similarity(const WeightGrid& a, const WeightGrid& b) {
  require_same_shape(a, b, "cosine_similarity");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa == 0.0 || bb == 0.0) throw Error(ErrorKind::ZeroVector, "cosine similarity of a zero grid");
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

/// ||x||_1 / ||reference||_1 over entry magnitudes.
inline double normalized_l1(const CoefficientGrid& x, const CoefficientGrid& reference) {
  require_same_shape(x, reference, "normalized_l1");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    num += std::abs(x[k]);
    den += std::abs(reference[k]);
  }
  if (!(den > 0.0)) throw Error(ErrorKind::DegenerateReference, "reference l1 norm is zero");
  return num / den;
}

struct DbImage {
  WeightGrid db;          // values in [-range_db, 0]
  bool all_zero = false;  // input had no nonzero entry; db is uniformly -range_db
};

/// 20 log10 |entry| relative to the peak, clipped to [-range_db, 0].
inline DbImage db_magnitude(const WeightGrid& magnitudes, double range_db = 100.0) {
  if (!(range_db > 0.0)) throw Error(ErrorKind::PreconditionViolated, "dB range must be positive");
  DbImage out{WeightGrid(magnitudes.channels(), magnitudes.frames(), -range_db), false};
  double peak = 0.0;
  for (double v : magnitudes) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) {
    out.all_zero = true;
    return out;
  }
  const double peak_db = 20.0 * std::log10(peak);
  for (std::size_t k = 0; k < magnitudes.size(); ++k) {
    const double mag = std::abs(magnitudes[k]);
    if (mag == 0.0) continue;
    out.db[k] = std::clamp(20.0 * std::log10(mag) - peak_db, -range_db, 0.0);
  }
  return out;
}

inline DbImage db_magnitude(const CoefficientGrid& grid, double range_db = 100.0) {
  return db_magnitude(magnitude(grid), range_db);
}

struct SweepRecord {
  std::string penalty;
  double lambda = 0.0;
  double penalty_ratio = 0.0;
  double cosine_sim = 0.0;
  double normalized_l1 = 0.0;
  double feasibility_residual = 0.0;
};

inline constexpr const char* kSweepCsvHeader = "lambda,penalty_ratio,cosine_sim,normalized_l1,feasibility_residual";

/// One CSV row in the classic locale with round-trip precision. The penalty
/// name is emitted as a trailing column only when `with_penalty` is set.
inline std::string to_csv_row(const SweepRecord& rec, bool with_penalty = false) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << rec.lambda << ',' << rec.penalty_ratio << ','
     << rec.cosine_sim << ',' << rec.normalized_l1 << ',' << rec.feasibility_residual;
  if (with_penalty) os << ',' << rec.penalty;
  return os.str();
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records, bool with_penalty = false) {
  os << kSweepCsvHeader << (with_penalty ? ",penalty" : "") << '\n';
  for (const auto& r : records) os << to_csv_row(r, with_penalty) << '\n';
}

}  // namespace perspectf
