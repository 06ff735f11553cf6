#include "obp/geometry/lp.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

namespace obp {
namespace {

// Stationarity, sign conditions, complementary slackness and zero gap.
void expect_certificate(const LpSolution& s, const Vector& c, const Polytope& p, Sense sense) {
  ASSERT_TRUE(s.optimal());
  const double sigma = sense == Sense::Max ? 1.0 : -1.0;
  EXPECT_LE(p.max_violation(s.point), tol::feas);
  Vector resid = sigma * c + s.reduced_costs;
  if (!p.inequalities().empty())
    resid -= p.ineq_matrix().transpose() * s.duals_ineq;
  if (!p.equalities().empty())
    resid -= p.eq_matrix().transpose() * s.duals_eq;
  EXPECT_LE(resid.lpNorm<Eigen::Infinity>(), 1e-8);
  EXPECT_GE(s.duals_ineq.size() ? s.duals_ineq.minCoeff() : 0.0, 0.0);
  for (Index j = 0; j < p.dim(); ++j) {
    if (p.has_lower_bound(j)) {
      EXPECT_GE(s.reduced_costs(j), -1e-8);
      EXPECT_LE(std::abs(s.reduced_costs(j) * (s.point(j) - p.lower_bounds()(j))), tol::feas);
    } else {
      EXPECT_LE(std::abs(s.reduced_costs(j)), 1e-8);
    }
  }
  for (std::size_t i = 0; i < p.inequalities().size(); ++i) {
    const auto& r = p.inequalities()[i];
    EXPECT_LE(std::abs(s.duals_ineq(static_cast<Index>(i)) * (r.b - r.a.dot(s.point))), tol::feas);
  }
  EXPECT_LE(std::abs(lp_dual_value(s, p, sense) - s.value), tol::gap);
}

TEST(SolveLp, BoxMaximum) {
  const Polytope box = Polytope::box(Vector::Zero(2), Vector::Ones(2));
  const Vector c = Vector::Unit(2, 0);
  const LpSolution s = solve_lp(c, box, Sense::Max);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value, 1.0, 1e-12);
  EXPECT_NEAR(s.point(0), 1.0, 1e-12);
  expect_certificate(s, c, box, Sense::Max);
}

TEST(SolveLp, InfeasibleSystem) {
  Polytope p(1);
  p.add_inequality(-Vector::Ones(1), -1.0); // x ≥ 1
  p.add_inequality(Vector::Ones(1), 0.0);   // x ≤ 0
  EXPECT_EQ(solve_lp(Vector::Zero(1), p, Sense::Min).status, LpStatus::Infeasible);
  EXPECT_FALSE(p.is_feasible());
}

TEST(SolveLp, Unbounded) {
  const Polytope p = Polytope::nonnegative(2);
  EXPECT_EQ(solve_lp(Vector::Ones(2), p, Sense::Max).status, LpStatus::Unbounded);
}

TEST(SolveLp, FreeVariablesAndEqualities) {
  // min x + 2y  s.t. x + y = 1, x − y ≤ 3, y ≥ −5, x free
  Polytope p(2);
  p.set_lower_bound(1, -5.0);
  p.add_equality((Vector(2) << 1, 1).finished(), 1.0);
  p.add_inequality((Vector(2) << 1, -1).finished(), 3.0);
  const Vector c = (Vector(2) << 1, 2).finished();
  const LpSolution s = solve_lp(c, p, Sense::Min);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.point(0), 2.0, 1e-9);
  EXPECT_NEAR(s.point(1), -1.0, 1e-9);
  EXPECT_NEAR(s.value, 0.0, 1e-9);
  expect_certificate(s, c, p, Sense::Min);
}

TEST(SolveLp, RedundantEqualities) {
  // Simplex written twice plus a sum of the two.
  Polytope p = Polytope::nonnegative(3);
  p.add_equality(Vector::Ones(3), 1.0);
  p.add_equality(Vector::Ones(3), 1.0);
  p.add_equality(2.0 * Vector::Ones(3), 2.0);
  const Vector c = (Vector(3) << 0.2, 0.9, 0.4).finished();
  const LpSolution s = solve_lp(c, p, Sense::Max);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value, 0.9, 1e-10);
  expect_certificate(s, c, p, Sense::Max);
}

TEST(SolveLp, BealeCyclingExample) {
  // Classic example on which Dantzig's rule with naive ties cycles.
  Polytope p = Polytope::nonnegative(4);
  p.add_inequality((Vector(4) << 0.25, -60, -0.04, 9).finished(), 0.0);
  p.add_inequality((Vector(4) << 0.5, -90, -0.02, 3).finished(), 0.0);
  p.add_inequality((Vector(4) << 0, 0, 1, 0).finished(), 1.0);
  const Vector c = (Vector(4) << 0.75, -150, 0.02, -6).finished();
  const LpSolution s = solve_lp(c, p, Sense::Max);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value, 0.05, 1e-9);
  expect_certificate(s, c, p, Sense::Max);
}

TEST(SolveLp, MatchesVertexEnumerationOnRandomPolytopes) {
  CounterRng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Index dim = 2 + static_cast<Index>(rng.below(3));
    Polytope p = testing::random_simplex_like(dim, 3, rng);
    if (trial % 3 == 0)
      p.add_equality(Vector::Ones(dim), 0.6 + 0.3 * rng.uniform());
    const auto verts = testing::enumerate_vertices(p);
    ASSERT_FALSE(verts.empty());
    Vector c(dim);
    for (Index j = 0; j < dim; ++j)
      c(j) = rng.uniform(-1.0, 1.0);
    for (Sense sense : {Sense::Max, Sense::Min}) {
      const LpSolution s = solve_lp(c, p, sense);
      ASSERT_TRUE(s.optimal());
      const double expect = sense == Sense::Max ? testing::max_over_vertices(c, verts)
                                                : -testing::max_over_vertices(-c, verts);
      EXPECT_NEAR(s.value, expect, 1e-9);
      expect_certificate(s, c, p, sense);
    }
  }
}

TEST(SolveLp, DegenerateTransportationProblem) {
  // 3x3 transportation polytope with equal marginals: highly degenerate.
  Polytope p = Polytope::nonnegative(9);
  for (int i = 0; i < 3; ++i) {
    Vector r = Vector::Zero(9), c = Vector::Zero(9);
    for (int j = 0; j < 3; ++j) {
      r(3 * i + j) = 1.0;
      c(3 * j + i) = 1.0;
    }
    p.add_equality(r, 1.0 / 3.0);
    p.add_equality(c, 1.0 / 3.0);
  }
  CounterRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Vector cost(9);
    for (Index j = 0; j < 9; ++j)
      cost(j) = rng.uniform();
    const LpSolution s = solve_lp(cost, p, Sense::Max);
    ASSERT_TRUE(s.optimal());
    // Permutation matrices scaled by 1/3 are the vertices.
    double best = 0.0;
    int perm[3] = {0, 1, 2};
    do {
      double v = 0.0;
      for (int i = 0; i < 3; ++i)
        v += cost(3 * i + perm[i]) / 3.0;
      best = std::max(best, v);
    } while (std::next_permutation(perm, perm + 3));
    EXPECT_NEAR(s.value, best, 1e-10);
    expect_certificate(s, cost, p, Sense::Max);
  }
}

TEST(SolveLp, IterationLimitRaises) {
  Polytope p = Polytope::nonnegative(5);
  p.add_inequality(Vector::Ones(5), 1.0);
  LpOptions opts;
  opts.max_iterations = 1;
  EXPECT_THROW(solve_lp(Vector::Ones(5), p, Sense::Max, opts), NumericalFailure);
}

} // namespace
} // namespace obp
