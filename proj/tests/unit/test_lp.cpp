#include <gtest/gtest.h>

#include <random>

#include "sinrflow/lp.hpp"
#include "support/helpers.hpp"

using namespace sinrflow;
using sinrflow::testing::vertex_enumeration_optimum;

TEST(Simplex, SingleBound) {
  LinearProgram lp;
  const std::size_t x = lp.add_variable("x", 1.0);
  lp.add_constraint("cap", {{x, 1.0}}, Sense::less_equal, 1.0);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.values[x], 1.0, 1e-12);
  EXPECT_NEAR(s.objective_value, 1.0, 1e-12);
}

TEST(Simplex, TwoVariables) {
  LinearProgram lp;
  const std::size_t x = lp.add_variable("x", 1.0), y = lp.add_variable("y", 1.0);
  lp.add_constraint("sum", {{x, 1.0}, {y, 1.0}}, Sense::less_equal, 1.0);
  lp.add_constraint("xcap", {{x, 1.0}}, Sense::less_equal, 0.3);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.objective_value, 1.0, 1e-12);
  EXPECT_LE(lp.max_violation(s.values), 1e-9);
}

TEST(Simplex, Infeasible) {
  LinearProgram lp;
  const std::size_t x = lp.add_variable("x", 1.0);
  lp.add_constraint("lo", {{x, 1.0}}, Sense::greater_equal, 2.0);
  lp.add_constraint("hi", {{x, 1.0}}, Sense::less_equal, 1.0);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::infeasible);
}

TEST(Simplex, Unbounded) {
  LinearProgram lp;
  const std::size_t x = lp.add_variable("x", 1.0), y = lp.add_variable("y");
  lp.add_constraint("diff", {{x, 1.0}, {y, -1.0}}, Sense::less_equal, 1.0);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::unbounded);
}

TEST(Simplex, EqualityAndNegativeRhs) {
  // max x - y  s.t.  x + y = 2,  -x <= -0.5,  y >= 0.25
  LinearProgram lp;
  const std::size_t x = lp.add_variable("x", 1.0), y = lp.add_variable("y", -1.0);
  lp.add_constraint("eq", {{x, 1.0}, {y, 1.0}}, Sense::equal, 2.0);
  lp.add_constraint("neg", {{x, -1.0}}, Sense::less_equal, -0.5);
  lp.add_constraint("ylo", {{y, 1.0}}, Sense::greater_equal, 0.25);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.values[x], 1.75, 1e-12);
  EXPECT_NEAR(s.values[y], 0.25, 1e-12);
  EXPECT_NEAR(s.objective_value, 1.5, 1e-12);
}

TEST(Simplex, NoConstraints) {
  LinearProgram lp;
  lp.add_variable("x", -1.0);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_EQ(s.objective_value, 0.0);
  LinearProgram up;
  up.add_variable("x", 1.0);
  EXPECT_EQ(solve_lp(up).status, LpStatus::unbounded);
}

TEST(Simplex, BealeCyclingExample) {
  // Degenerate program on which the textbook largest-coefficient rule cycles.
  LinearProgram lp;
  const std::size_t x4 = lp.add_variable("x4", 0.75), x5 = lp.add_variable("x5", -20.0),
                    x6 = lp.add_variable("x6", 0.5), x7 = lp.add_variable("x7", -6.0);
  lp.add_constraint("r1", {{x4, 0.25}, {x5, -8.0}, {x6, -1.0}, {x7, 9.0}}, Sense::less_equal, 0.0);
  lp.add_constraint("r2", {{x4, 0.5}, {x5, -12.0}, {x6, -0.5}, {x7, 3.0}}, Sense::less_equal, 0.0);
  lp.add_constraint("r3", {{x6, 1.0}}, Sense::less_equal, 1.0);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.objective_value, 1.25, 1e-12);
}

TEST(Simplex, UndeclaredVariableRejected) {
  LinearProgram lp;
  lp.add_variable("x");
  EXPECT_THROW(lp.add_constraint("bad", {{3, 1.0}}, Sense::less_equal, 1.0), InvalidInstance);
}

TEST(Simplex, RandomProgramsMatchVertexEnumeration) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), rhs(-1.0, 3.0);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    LinearProgram lp;
    const std::size_t n = 2 + rng() % 3;
    for (std::size_t j = 0; j < n; ++j) lp.add_variable("x" + std::to_string(j), coef(rng));
    // Box rows keep the region bounded.
    for (std::size_t j = 0; j < n; ++j) lp.add_constraint("box", {{j, 1.0}}, Sense::less_equal, 4.0);
    const std::size_t rows = 1 + rng() % 4;
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<Term> terms;
      for (std::size_t j = 0; j < n; ++j)
        if (rng() % 4 != 0) terms.push_back({j, std::round(coef(rng) * 4.0) / 4.0});
      const Sense sense = rng() % 5 == 0 ? Sense::equal : rng() % 3 == 0 ? Sense::greater_equal : Sense::less_equal;
      lp.add_constraint("r", terms, sense, std::round(rhs(rng) * 4.0) / 4.0);
    }
    const std::optional<double> expected = vertex_enumeration_optimum(lp);
    const LpSolution s = solve_lp(lp);
    if (!expected) {
      EXPECT_EQ(s.status, LpStatus::infeasible) << to_text(lp);
      ++infeasible;
      continue;
    }
    ASSERT_EQ(s.status, LpStatus::optimal) << to_text(lp);
    EXPECT_NEAR(s.objective_value, *expected, 1e-7) << to_text(lp);
    EXPECT_LE(lp.max_violation(s.values), 1e-7);
    ++optimal;
  }
  EXPECT_GT(optimal, 100);
  EXPECT_GT(infeasible, 10);
}

TEST(Simplex, Deterministic) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(0.0, 1.0);
  LinearProgram lp;
  for (int j = 0; j < 12; ++j) lp.add_variable("x", coef(rng));
  for (int i = 0; i < 10; ++i) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < 12; ++j) terms.push_back({j, coef(rng)});
    lp.add_constraint("r", terms, Sense::less_equal, 1.0);
  }
  const LpSolution a = solve_lp(lp), b = solve_lp(lp);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.objective_value, b.objective_value);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(LpText, OneRowPerConstraint) {
  LinearProgram lp;
  const std::size_t x = lp.add_variable("x", 1.0), y = lp.add_variable("y", 2.0);
  lp.add_constraint("c1", {{x, 1.0}, {y, -0.5}}, Sense::less_equal, 1.0);
  lp.add_constraint("c2", {{y, 1.0}}, Sense::equal, 0.25);
  EXPECT_EQ(to_text(lp), "maximize: 1 x + 2 y\nc1: 1 x - 0.5 y <= 1\nc2: 1 y = 0.25\nbounds: all variables >= 0\n");
}
