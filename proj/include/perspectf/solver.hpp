// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "perspectf/error.hpp"
#include "perspectf/gabor.hpp"
#include "perspectf/grid.hpp"
#include "perspectf/penalties.hpp"
#include "perspectf/perspective.hpp"

namespace perspectf {

struct SolverParams {
  double tau = 0.5;
  double mu = 0.2;
  double rho = 1.99;
  /// Overrides `rho` when set; called with the zero-based iteration index.
  std::function<double(std::size_t)> rho_schedule;
  int iterations = 5000;
  double feasibility_tol = 1e-4;  // reporting only
  std::optional<double> operator_norm_bound;
  bool snap_to_feasible = true;
  int diag_every = 10;

  double relaxation(std::size_t i) const { return rho_schedule ? rho_schedule(i) : rho; }
};

/// Fills in the operator-norm bound and checks tau * mu * ||L||^2 <= 1 with
/// ||L|| = max(1, ||B||).
inline SolverParams validate_params(SolverParams params, const LinearOperatorSpec& spec) {
  if (!(params.tau > 0.0) || !(params.mu > 0.0) || !std::isfinite(params.tau) || !std::isfinite(params.mu))
    throw Error(ErrorKind::ParamsInvalid, "tau and mu must be positive and finite");
  if (params.iterations < 1) throw Error(ErrorKind::ParamsInvalid, "iterations must be at least 1");
  if (params.diag_every < 1) throw Error(ErrorKind::ParamsInvalid, "diagnostic interval must be at least 1");
  if (!params.rho_schedule && !(params.rho > 0.0 && params.rho < 2.0))
    throw Error(ErrorKind::ParamsInvalid, "rho must lie in (0, 2)");
  if (!params.operator_norm_bound) params.operator_norm_bound = estimate_operator_norm(spec).bound;
  if (!(*params.operator_norm_bound >= 1.0))
    throw Error(ErrorKind::ParamsInvalid, "operator norm bound must be at least 1");
  const double product = params.tau * params.mu * *params.operator_norm_bound * *params.operator_norm_bound;
  if (product > 1.0) {
    std::ostringstream msg;
    msg << "tau * mu * ||L||_op^2 = " << params.tau << " * " << params.mu << " * "
        << *params.operator_norm_bound << "^2 = " << product << " exceeds 1";
    throw Error(ErrorKind::StepSizeViolation, msg.str());
  }
  return params;
}

struct SolverState {
  CoefficientGrid x;
  WeightGrid sigma;
  CoefficientGrid u;      // dual of the constraint indicator
  std::vector<double> v;  // dual of lambda * psi(B .)
  std::size_t iteration = 0;
  // Output of the most recent perspective prox; lies in the domain of phi.
  CoefficientGrid x_prox;
  WeightGrid sigma_prox;
};

/// x = G_w d, sigma = |G_w d|, u = 0, v = 0.
inline SolverState init_state(const GaborSystem& system, const Signal& d, const LinearOperatorSpec& spec) {
  if (spec.channels != system.channels() || spec.frames != system.frames())
    throw Error(ErrorKind::ShapeMismatch, "operator shape does not match the Gabor system");
  SolverState s;
  s.x = dgt(system, d);
  s.sigma = magnitude(s.x);
  s.u = CoefficientGrid(system.channels(), system.frames());
  s.v.assign(spec.output_length(), 0.0);
  s.x_prox = s.x;
  s.sigma_prox = s.sigma;
  return s;
}

inline double objective(const CoefficientGrid& x, const WeightGrid& sigma, const PenaltyConfig& penalty) {
  const double f = varphi_value(x, sigma);
  if (!std::isfinite(f)) return f;
  return f + penalty_value(penalty, sigma);
}

/// One relaxed primal-dual iteration.
inline SolverState iterate(const SolverState& state, const ConstraintSet& cs, const PenaltyConfig& penalty,
                           const SolverParams& params) {
  const double tau = params.tau, mu = params.mu;
  const double rho = params.relaxation(state.iteration);
  if (!(rho > 0.0 && rho < 2.0))
    throw Error(ErrorKind::ParamsInvalid, "relaxation parameter outside (0, 2) at iteration " +
                                              std::to_string(state.iteration));
  if (!(tau > 0.0) || !(mu > 0.0)) throw Error(ErrorKind::ParamsInvalid, "tau and mu must be positive");
  const std::size_t K = state.x.size();
  const auto& op = penalty.op;

  // Primal step.
  CoefficientGrid x_tilde = state.x;
  for (std::size_t k = 0; k < K; ++k) x_tilde[k] -= tau * state.u[k];
  WeightGrid sigma_tilde = state.sigma;
  {
    const auto btv = apply_operator_adjoint(op, state.v);
    for (std::size_t k = 0; k < K; ++k) sigma_tilde[k] -= tau * btv[k];
  }
  auto [x_half, sigma_half] = prox_perspective(x_tilde, sigma_tilde, tau);

  // Dual step for the constraint, Moreau form.
  CoefficientGrid u_tilde = state.u;
  for (std::size_t k = 0; k < K; ++k) u_tilde[k] += mu * (2.0 * x_half[k] - state.x[k]);
  CoefficientGrid scaled = u_tilde;
  for (auto& e : scaled) e /= mu;
  const auto projected = project_constraint(cs, scaled);
  CoefficientGrid u_half = u_tilde;
  for (std::size_t k = 0; k < K; ++k) u_half[k] -= mu * projected[k];

  // Dual step for the penalty, Moreau form.
  WeightGrid extrapolated(state.sigma.channels(), state.sigma.frames());
  for (std::size_t k = 0; k < K; ++k) extrapolated[k] = 2.0 * sigma_half[k] - state.sigma[k];
  const auto b_ext = apply_operator(op, extrapolated);
  std::vector<double> v_tilde = state.v;
  for (std::size_t j = 0; j < v_tilde.size(); ++j) v_tilde[j] += mu * b_ext[j];
  std::vector<double> v_scaled = v_tilde;
  for (auto& e : v_scaled) e /= mu;
  const double gamma = penalty.psi == PsiKind::Zero ? 0.0 : penalty.scale * penalty.lambda / mu;
  const auto v_prox = prox_psi(penalty, gamma, v_scaled);
  std::vector<double> v_half = v_tilde;
  for (std::size_t j = 0; j < v_half.size(); ++j) v_half[j] -= mu * v_prox[j];

  // Relaxation.
  SolverState next;
  next.iteration = state.iteration + 1;
  next.x = state.x;
  next.sigma = state.sigma;
  next.u = state.u;
  next.v = state.v;
  for (std::size_t k = 0; k < K; ++k) {
    next.x[k] += rho * (x_half[k] - state.x[k]);
    next.sigma[k] += rho * (sigma_half[k] - state.sigma[k]);
    next.u[k] += rho * (u_half[k] - state.u[k]);
  }
  for (std::size_t j = 0; j < next.v.size(); ++j) next.v[j] += rho * (v_half[j] - state.v[j]);
  next.x_prox = std::move(x_half);
  next.sigma_prox = std::move(sigma_half);
  return next;
}

struct DiagnosticRecord {
  std::size_t iteration = 0;
  double objective = 0.0;  // at the prox output
  double residual = 0.0;   // feasibility of the prox output
  double change = 0.0;     // ||x[i+1] - x[i]||
};

struct Diagnostics {
  std::vector<DiagnosticRecord> records;
  double residual_pre_snap = 0.0;
  double residual_post_snap = 0.0;
  double objective = 0.0;  // at the returned (x, sigma) before snapping
};

struct RunResult {
  CoefficientGrid x;
  WeightGrid sigma;
  Diagnostics diagnostics;
};

/// Runs the iteration from init_state. The returned pair is the last prox
/// output; x is projected onto the constraint set when snap_to_feasible is set.
inline RunResult run(const GaborSystem& system, const Signal& d, const PenaltyConfig& penalty,
                     const SolverParams& raw_params) {
  penalty.validate();
  const SolverParams params = validate_params(raw_params, penalty.op);
  const ConstraintSet cs(system, d);
  SolverState state = init_state(system, d, penalty.op);

  RunResult out;
  for (int i = 0; i < params.iterations; ++i) {
    SolverState next = iterate(state, cs, penalty, params);
    if ((i + 1) % params.diag_every == 0) {
      DiagnosticRecord rec;
      rec.iteration = next.iteration;
      rec.objective = objective(next.x_prox, next.sigma_prox, penalty);
      rec.residual = cs.residual(next.x_prox);
      double change = 0.0;
      for (std::size_t k = 0; k < next.x.size(); ++k) change += std::norm(next.x[k] - state.x[k]);
      rec.change = std::sqrt(change);
      out.diagnostics.records.push_back(rec);
    }
    state = std::move(next);
  }

  out.x = std::move(state.x_prox);
  out.sigma = std::move(state.sigma_prox);
  out.diagnostics.residual_pre_snap = cs.residual(out.x);
  out.diagnostics.objective = objective(out.x, out.sigma, penalty);
  if (params.snap_to_feasible) out.x = project_constraint(cs, out.x);
  out.diagnostics.residual_post_snap = cs.residual(out.x);
  return out;
}

/// Minimizer of x^H diag(w)^{-1} x subject to G_gamma^H x = d for fixed
/// positive weights: diag(w) G_gamma z with (G_gamma^H diag(w) G_gamma) z = d
/// solved by Jacobi-preconditioned conjugate gradients.
inline CoefficientGrid fixed_weight_solution(const GaborSystem& system, const Signal& d, const WeightGrid& weights,
                                             double tol = 1e-10, int max_iters = 0) {
  const std::size_t L = system.signal_length(), M = system.channels(), N = system.frames(), a = system.hop();
  if (d.size() != L) throw Error(ErrorKind::LengthMismatch, "signal length does not match the system");
  if (weights.channels() != M || weights.frames() != N)
    throw Error(ErrorKind::ShapeMismatch, "weight grid does not match the system");
  for (double w : weights)
    if (!(w > 0.0)) throw Error(ErrorKind::NonPositiveWeights, "weights must be strictly positive");
  if (max_iters <= 0) max_iters = int(10 * L + 100);

  const auto& gamma = system.dual_window();
  auto apply = [&](std::span<const Complex> z) {
    auto c = dgt(system, z, WindowChoice::Dual);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= weights[k];
    return adjoint_dgt(system, c, WindowChoice::Dual);
  };

  std::vector<double> column_sum(N, 0.0);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = 0; m < M; ++m) column_sum[n] += weights(m, n);
  std::vector<double> diag(L, 0.0);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t j : system.support()) diag[(a * n + j) % L] += gamma[j] * gamma[j] * column_sum[n];

  const double dnorm = norm2(d.samples);
  std::vector<Complex> z(L), r = d.samples, p(L), pre(L);
  if (dnorm == 0.0) return CoefficientGrid(M, N);
  for (std::size_t l = 0; l < L; ++l) pre[l] = r[l] / diag[l];
  p = pre;
  auto dot = [](const std::vector<Complex>& x, const std::vector<Complex>& y) {
    Complex acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
  };
  double rz = dot(r, pre).real();
  bool converged = false;
  for (int it = 0; it < max_iters; ++it) {
    const auto ap = apply(p);
    const double alpha = rz / dot(p, ap).real();
    for (std::size_t l = 0; l < L; ++l) {
      z[l] += alpha * p[l];
      r[l] -= alpha * ap[l];
    }
    if (norm2(r) <= tol * dnorm) {
      converged = true;
      break;
    }
    for (std::size_t l = 0; l < L; ++l) pre[l] = r[l] / diag[l];
    const double rz_next = dot(r, pre).real();
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t l = 0; l < L; ++l) p[l] = pre[l] + beta * p[l];
  }
  if (!converged) throw Error(ErrorKind::CGNoConvergence, "conjugate gradients did not reach the tolerance");

  auto x = dgt(system, std::span<const Complex>(z), WindowChoice::Dual);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] *= weights[k];
  return x;
}

}  // namespace perspectf
