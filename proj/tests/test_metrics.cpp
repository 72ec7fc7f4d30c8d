// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "perspectf/metrics.hpp"

using namespace perspectf;

namespace {

CoefficientGrid random_grid(std::size_t M, std::size_t N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return CoefficientGrid(M, N, oracle::random_complex(M * N, rng));
}

CoefficientGrid scaled(const CoefficientGrid& g, double c) {
  CoefficientGrid out = g;
  for (auto& e : out) e *= c;
  return out;
}

}  // namespace

TEST(PenaltyRatio, Examples) {
  const auto ref = random_grid(6, 5, 1);
  for (const char* n : {"l1", "nuclear", "tv", "harmonic", "pow1", "pow2", "pow3", "pow4"}) {
    const auto cfg = make_penalty(n, 6, 5, 1.0);
    EXPECT_DOUBLE_EQ(penalty_ratio(cfg, ref, ref), 1.0) << n;
  }
  const auto l1 = make_penalty("l1", 6, 5);
  EXPECT_EQ(penalty_ratio(l1, CoefficientGrid(6, 5), ref), 0.0);
  try {
    penalty_ratio(l1, ref, CoefficientGrid(6, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateReference);
  }
  // Constant magnitude has zero gradient.
  EXPECT_THROW(penalty_ratio(make_penalty("tv", 6, 5), ref, CoefficientGrid(6, 5, Complex(0, 2))), Error);
  EXPECT_THROW(penalty_ratio(l1, ref, CoefficientGrid(5, 6, 1.0)), Error);
}

TEST(PenaltyRatio, ScaleInvariantInThePair) {
  const auto x = random_grid(8, 4, 2), ref = random_grid(8, 4, 3);
  for (const char* n : {"l1", "nuclear", "tv", "harmonic", "pow1", "pow2", "pow3", "pow4"}) {
    const auto cfg = make_penalty(n, 8, 4, 1.0);
    const double base = penalty_ratio(cfg, x, ref);
    for (double c : {0.01, 3.0, 250.0})
      EXPECT_NEAR(penalty_ratio(cfg, scaled(x, c), scaled(ref, c)), base, 1e-12 * base) << n;
  }
}

TEST(CosineSimilarity, Examples) {
  std::mt19937_64 rng(4);
  WeightGrid a(5, 5);
  for (auto& e : a) e = std::abs(std::normal_distribution<double>()(rng));
  EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-15);

  WeightGrid left(2, 2), right(2, 2);
  left[0] = 1.0;
  left[1] = 2.0;
  right[2] = 3.0;
  right[3] = 0.5;
  EXPECT_EQ(cosine_similarity(left, right), 0.0);

  WeightGrid b = a;
  for (auto& e : b) e *= 17.0;
  EXPECT_NEAR(cosine_similarity(a, b), 1.0, 1e-15);

  try {
    cosine_similarity(a, WeightGrid(5, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroVector);
  }
}

TEST(CosineSimilarity, NonnegativeInputsGiveUnitInterval) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    WeightGrid a(4, 4), b(4, 4);
    for (auto& e : a) e = u(rng);
    for (auto& e : b) e = u(rng);
    const double c = cosine_similarity(a, b);
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0 + 1e-15);
  }
}

TEST(NormalizedL1, Examples) {
  const auto ref = random_grid(4, 4, 6);
  EXPECT_DOUBLE_EQ(normalized_l1(ref, ref), 1.0);
  EXPECT_EQ(normalized_l1(CoefficientGrid(4, 4), ref), 0.0);
  EXPECT_NEAR(normalized_l1(scaled(ref, 0.5), ref), 0.5, 1e-15);
  EXPECT_NEAR(normalized_l1(scaled(ref, 2.0), scaled(random_grid(4, 4, 7), 2.0)),
              normalized_l1(ref, random_grid(4, 4, 7)), 1e-14);
  try {
    normalized_l1(ref, CoefficientGrid(4, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateReference);
  }
}

TEST(DbMagnitude, Examples) {
  WeightGrid g(3, 2, 1.0);
  g[1] = 0.1;
  g[2] = 1e-7;
  g[3] = 0.0;
  const auto db = db_magnitude(g);
  EXPECT_FALSE(db.all_zero);
  EXPECT_EQ(db.db[0], 0.0);
  EXPECT_NEAR(db.db[1], -20.0, 1e-12);
  EXPECT_EQ(db.db[2], -100.0);
  EXPECT_EQ(db.db[3], -100.0);

  const auto uniform = db_magnitude(CoefficientGrid(4, 3, Complex(0.0, 3.0)));
  for (double v : uniform.db) EXPECT_EQ(v, 0.0);

  const auto zero = db_magnitude(WeightGrid(2, 2));
  EXPECT_TRUE(zero.all_zero);
  for (double v : zero.db) EXPECT_EQ(v, -100.0);

  const auto narrow = db_magnitude(g, 10.0);
  EXPECT_EQ(narrow.db[1], -10.0);
  EXPECT_THROW(db_magnitude(g, 0.0), Error);
}

TEST(DbMagnitude, Monotone) {
  std::mt19937_64 rng(8);
  std::lognormal_distribution<double> ln(0.0, 4.0);
  WeightGrid g(20, 10);
  for (auto& e : g) e = ln(rng);
  const auto db = db_magnitude(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (g[i] > g[j]) {
        EXPECT_GE(db.db[i], db.db[j]);
      }
}

TEST(SweepCsv, HeaderAndRoundTripPrecision) {
  SweepRecord r{"tv", 0.1, 0.123456789012345678, 0.99, 0.5, 1e-17};
  std::ostringstream os;
  write_sweep_csv(os, {r, r});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "lambda,penalty_ratio,cosine_sim,normalized_l1,feasibility_residual");
  std::getline(is, line);
  std::vector<double> fields;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(std::stod(f));
  ASSERT_EQ(fields.size(), 5u);
  EXPECT_EQ(fields[0], r.lambda);
  EXPECT_EQ(fields[1], r.penalty_ratio);
  EXPECT_EQ(fields[4], r.feasibility_residual);

  std::ostringstream with;
  write_sweep_csv(with, {r}, true);
  EXPECT_EQ(with.str().substr(0, with.str().find('\n')), std::string(kSweepCsvHeader) + ",penalty");
  EXPECT_NE(with.str().find(",tv\n"), std::string::npos);
}
