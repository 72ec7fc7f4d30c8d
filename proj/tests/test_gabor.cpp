// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "perspectf/gabor.hpp"

using namespace perspectf;

namespace {

struct Shape {
  std::size_t lw, hop, channels, length;
};

// Small shapes with L <= 256, plus one with M > L and one with non-power-of-two M.
const Shape kSmallShapes[] = {
    {16, 4, 16, 64}, {32, 8, 32, 128}, {24, 6, 32, 96}, {16, 2, 16, 48}, {64, 16, 128, 96}, {20, 5, 24, 120},
};

double rel(std::span<const Complex> a, std::span<const Complex> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST(BuildSystem, RectangularBlockBasisDualIsQuarterWindow) {
  const auto sys = build_system(WindowKind::Rectangular, 4, 4, 4, 8);
  EXPECT_EQ(sys.frames(), 2u);
  for (std::size_t l = 0; l < 8; ++l) {
    EXPECT_DOUBLE_EQ(sys.frame_diagonal()[l], 4.0);
    EXPECT_DOUBLE_EQ(sys.dual_window()[l], sys.window()[l] / 4.0);
  }
}

TEST(BuildSystem, LargeHannPassesFrameIdentity) {
  const auto sys = build_system(WindowKind::Hann, 512, 64, 4096, 8192);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = oracle::random_complex(8192, rng);
    const auto back = adjoint_dgt(sys, dgt(sys, d), WindowChoice::Dual);
    EXPECT_LE(rel(back, d), 1e-10);
  }
}

TEST(BuildSystem, Errors) {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::IoError;
  };
  EXPECT_EQ(kind_of([] { build_system(WindowKind::Hann, 512, 64, 256, 4096); }), ErrorKind::NotPainless);
  EXPECT_EQ(kind_of([] { build_system(WindowKind::Hann, 16, 5, 16, 64); }), ErrorKind::NonDivisibleHop);
  EXPECT_EQ(kind_of([] { build_system(WindowKind::Rectangular, 4, 8, 8, 64); }), ErrorKind::IncompleteCover);
  EXPECT_EQ(kind_of([] { build_system(WindowKind::Hann, 16, 4, 24, 64); }), ErrorKind::AliasedModulation);
  const std::vector<Complex> complex_window{{1, 0}, {0.5, 0.5}};
  EXPECT_EQ(kind_of([&] { build_system(std::span<const Complex>(complex_window), 1, 2, 8); }),
            ErrorKind::ComplexWindow);
  const std::vector<double> zeros(8, 0.0);
  EXPECT_EQ(kind_of([&] { build_system(std::span<const double>(zeros), 2, 8, 16); }),
            ErrorKind::PreconditionViolated);
}

TEST(BuildSystem, DualMatchesDenseFrameOperatorInverse) {
  for (const auto& s : kSmallShapes) {
    const auto sys = build_system(WindowKind::Hann, s.lw, s.hop, s.channels, s.length);
    const auto w = oracle::periodic_window(oracle::hann(s.lw), s.length);
    const auto g = oracle::dense_dual_window(w, s.hop, s.channels);
    for (std::size_t l = 0; l < s.length; ++l) {
      EXPECT_NEAR(sys.window()[l], w[long(l)], 1e-15);
      EXPECT_NEAR(sys.dual_window()[l], g[long(l)], 1e-12 * g.cwiseAbs().maxCoeff());
    }
  }
}

TEST(Dgt, ConstantSignalSingleFrame) {
  const auto sys = build_system(WindowKind::Rectangular, 4, 4, 4, 4);
  const std::vector<Complex> d(4, 1.0);
  const auto x = dgt(sys, d);
  ASSERT_EQ(x.size(), 4u);
  EXPECT_NEAR(std::abs(x[0] - Complex(4.0)), 0.0, 1e-14);
  for (std::size_t m = 1; m < 4; ++m) EXPECT_NEAR(std::abs(x[m]), 0.0, 1e-14);
}

TEST(Dgt, ImpulseGivesShiftedWindowInEveryBin) {
  const auto sys = build_system(WindowKind::Hann, 16, 4, 16, 64);
  std::vector<Complex> d(64);
  d[0] = 1.0;
  const auto x = dgt(sys, d);
  for (std::size_t n = 0; n < sys.frames(); ++n) {
    const std::size_t idx = (64 - 4 * n) % 64;
    for (std::size_t m = 0; m < 16; ++m) EXPECT_NEAR(std::abs(x(m, n) - sys.window()[idx]), 0.0, 1e-14);
  }
}

TEST(Dgt, LengthMismatch) {
  const auto sys = build_system(WindowKind::Hann, 16, 4, 16, 64);
  const std::vector<Complex> d(60);
  EXPECT_THROW(dgt(sys, d), Error);
  EXPECT_THROW(adjoint_dgt(sys, CoefficientGrid(16, 3), WindowChoice::Dual), Error);
}

TEST(Dgt, MatchesDenseMatrixOnSmallInstances) {
  std::mt19937_64 rng(3);
  for (const auto& s : kSmallShapes) {
    const auto sys = build_system(WindowKind::Hann, s.lw, s.hop, s.channels, s.length);
    const auto w = oracle::periodic_window(oracle::hann(s.lw), s.length);
    const auto G = oracle::dense_dgt_matrix(w, s.hop, s.channels);
    const auto d = oracle::random_complex(s.length, rng);
    const oracle::VectorXcd expect = G * oracle::to_eigen(d);
    EXPECT_LE(oracle::rel_err(oracle::to_eigen(dgt(sys, d)), expect), 1e-12);

    const auto x = oracle::random_complex(sys.coefficient_count(), rng);
    const CoefficientGrid xg(s.channels, sys.frames(), x);
    const oracle::VectorXcd adj = G.adjoint() * oracle::to_eigen(x);
    EXPECT_LE(oracle::rel_err(oracle::to_eigen(adjoint_dgt(sys, xg, WindowChoice::Analysis)), adj), 1e-12);
  }
}

TEST(Dgt, ZeroCoefficientsGiveZeroSignal) {
  const auto sys = build_system(WindowKind::Hann, 16, 4, 16, 64);
  for (const auto& v : adjoint_dgt(sys, CoefficientGrid(16, 16), WindowChoice::Dual)) EXPECT_EQ(v, Complex{});
}

TEST(FrameIdentity, BothOrdersAcrossShapes) {
  std::mt19937_64 rng(5);
  for (const auto& s : kSmallShapes) {
    const auto sys = build_system(WindowKind::Hann, s.lw, s.hop, s.channels, s.length);
    for (int trial = 0; trial < 20; ++trial) {
      const auto d = oracle::random_complex(s.length, rng);
      EXPECT_LE(rel(adjoint_dgt(sys, dgt(sys, d), WindowChoice::Dual), d), 1e-10);
      EXPECT_LE(rel(adjoint_dgt(sys, dgt(sys, d, WindowChoice::Dual), WindowChoice::Analysis), d), 1e-10);
    }
  }
}

TEST(AdjointProperty, InnerProductsAgree) {
  std::mt19937_64 rng(8);
  const auto sys = build_system(WindowKind::Hann, 32, 8, 40, 160);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = oracle::random_complex(160, rng);
    const CoefficientGrid x(40, 20, oracle::random_complex(800, rng));
    const auto gd = dgt(sys, d);
    const auto ghx = adjoint_dgt(sys, x, WindowChoice::Analysis);
    Complex lhs{}, rhs{};
    for (std::size_t k = 0; k < x.size(); ++k) lhs += std::conj(x[k]) * gd[k];
    for (std::size_t l = 0; l < d.size(); ++l) rhs += std::conj(ghx[l]) * d[l];
    EXPECT_LE(std::abs(lhs - rhs) / std::abs(lhs), 1e-10);
  }
}

TEST(Linearity, DgtAndAdjoint) {
  std::mt19937_64 rng(9);
  const auto sys = build_system(WindowKind::Hann, 16, 4, 16, 64);
  const auto a = oracle::random_complex(64, rng), b = oracle::random_complex(64, rng);
  const Complex alpha(0.3, -1.2), beta(2.0, 0.5);
  std::vector<Complex> mix(64);
  for (std::size_t i = 0; i < 64; ++i) mix[i] = alpha * a[i] + beta * b[i];
  const auto fa = dgt(sys, a), fb = dgt(sys, b), fm = dgt(sys, mix);
  std::vector<Complex> combo(fa.size());
  for (std::size_t k = 0; k < combo.size(); ++k) combo[k] = alpha * fa[k] + beta * fb[k];
  EXPECT_LE(rel(fm.values(), combo), 1e-12);

  const auto ga = adjoint_dgt(sys, fa, WindowChoice::Dual), gb = adjoint_dgt(sys, fb, WindowChoice::Dual);
  CoefficientGrid cm(16, 16);
  for (std::size_t k = 0; k < cm.size(); ++k) cm[k] = alpha * fa[k] + beta * fb[k];
  const auto gm = adjoint_dgt(sys, cm, WindowChoice::Dual);
  std::vector<Complex> gcombo(64);
  for (std::size_t l = 0; l < 64; ++l) gcombo[l] = alpha * ga[l] + beta * gb[l];
  EXPECT_LE(rel(gm, gcombo), 1e-12);
}

TEST(ProjectConstraint, FeasiblePointIsFixed) {
  std::mt19937_64 rng(10);
  const auto sys = build_system(WindowKind::Hann, 32, 8, 32, 128);
  const auto d = oracle::random_complex(128, rng);
  const ConstraintSet cs(sys, d);
  const auto x = dgt(sys, d);
  EXPECT_LE(rel(project_constraint(cs, x).values(), x.values()), 1e-12);
  EXPECT_TRUE(cs.contains(x));
}

TEST(ProjectConstraint, InfeasibleBecomesFeasibleAndIdempotent) {
  std::mt19937_64 rng(12);
  const auto sys = build_system(WindowKind::Hann, 32, 8, 32, 128);
  const ConstraintSet cs(sys, oracle::random_complex(128, rng));
  const CoefficientGrid x(32, 16, oracle::random_complex(512, rng));
  EXPECT_GT(cs.residual(x), 0.1);
  const auto p = project_constraint(cs, x);
  EXPECT_LE(cs.residual(p), 1e-10);
  EXPECT_LE(rel(project_constraint(cs, p).values(), p.values()), 1e-10);
}

TEST(ProjectConstraint, AffineInInput) {
  std::mt19937_64 rng(13);
  const auto sys = build_system(WindowKind::Hann, 16, 4, 16, 64);
  const ConstraintSet cs(sys, oracle::random_complex(64, rng));
  const CoefficientGrid x1(16, 16, oracle::random_complex(256, rng)), x2(16, 16, oracle::random_complex(256, rng));
  const double t = 0.37;
  CoefficientGrid mix(16, 16);
  for (std::size_t k = 0; k < mix.size(); ++k) mix[k] = t * x1[k] + (1 - t) * x2[k];
  const auto p1 = project_constraint(cs, x1), p2 = project_constraint(cs, x2), pm = project_constraint(cs, mix);
  std::vector<Complex> combo(mix.size());
  for (std::size_t k = 0; k < combo.size(); ++k) combo[k] = t * p1[k] + (1 - t) * p2[k];
  EXPECT_LE(rel(pm.values(), combo), 1e-12);
}

TEST(ProjectConstraint, MatchesDenseGeneralProjection) {
  std::mt19937_64 rng(14);
  for (const auto& s : kSmallShapes) {
    const auto sys = build_system(WindowKind::Hann, s.lw, s.hop, s.channels, s.length);
    const auto w = oracle::periodic_window(oracle::hann(s.lw), s.length);
    const auto Gg = oracle::dense_dgt_matrix(oracle::dense_dual_window(w, s.hop, s.channels), s.hop, s.channels);
    const auto d = oracle::random_complex(s.length, rng);
    const CoefficientGrid x(s.channels, sys.frames(), oracle::random_complex(sys.coefficient_count(), rng));
    const oracle::VectorXcd xv = oracle::to_eigen(x), dv = oracle::to_eigen(d);
    const oracle::VectorXcd expect = xv - Gg * (Gg.adjoint() * Gg).inverse() * (Gg.adjoint() * xv - dv);
    EXPECT_LE(oracle::rel_err(oracle::to_eigen(project_constraint(ConstraintSet(sys, d), x)), expect), 1e-10);
  }
}
