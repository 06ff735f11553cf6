#include "obp/persuasion/polytope.hpp"
#include "obp/type_reporting/algorithm2.hpp"
#include "obp/type_reporting/ftrl.hpp"
#include "obp/type_reporting/g_value.hpp"
#include "obp/type_reporting/menu.hpp"
#include "obp/type_reporting/oracle.hpp"
#include "obp/type_reporting/single_receiver.hpp"

#include "support/instances.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

namespace obp {
namespace {

using testing::random_instance;
using testing::random_points;
using testing::random_set_function_instance;

std::vector<Vector> random_menus(const PersuasionInstance& inst, int count, CounterRng& rng) {
  const Polytope ext = build_extended_polytope(inst);
  std::vector<Vector> out;
  for (const Vector& x : random_points(ext, count, rng))
    out.push_back(x.head(MenuLayout(inst).menu_dim()));
  return out;
}

// g^k for two receivers with binary actions from the Fréchet bounds: the
// joint mass on (1, 1) ranges over [max(0, p + q − 1), min(p, q)] and the
// objective is linear in it.
double g_two_binary(const PersuasionInstance& inst, const Vector& menu, const TypeProfile& k) {
  const MenuLayout lay(inst);
  double total = 0.0;
  for (int th = 0; th < inst.d; ++th) {
    const double p = menu(lay.index(0, k[0], th, 1)), q = menu(lay.index(1, k[1], th, 1));
    auto value = [&](double both) {
      const double w11 = both, w10 = p - both, w01 = q - both, w00 = 1 - p - q + both;
      return inst.prior[static_cast<std::size_t>(th)] *
             (w00 * inst.sender_util(0, th) + w01 * inst.sender_util(1, th) +
              w10 * inst.sender_util(2, th) + w11 * inst.sender_util(3, th));
    };
    total += std::max(value(std::max(0.0, p + q - 1)), value(std::min(p, q)));
  }
  return total;
}

TEST(ExtendedPolytope, SingleTypeProjectsToPersuasiveSchemes) {
  CounterRng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto inst = random_instance(1, 3, 3, 1, rng);
    const Polytope l = build_extended_polytope_L(inst);
    const Polytope p = build_persuasive_polytope(inst);
    for (const Vector& x : random_points(l, 100, rng))
      EXPECT_TRUE(p.contains(x.head(9), 1e-8));
    for (const Vector& phi : random_points(p, 100, rng))
      EXPECT_TRUE(l.contains(extend_menu(inst, phi), 1e-8));
  }
}

TEST(ExtendedPolytope, IdenticalTypesAcceptSymmetricMenus) {
  CounterRng rng(2);
  auto inst = random_instance(1, 2, 2, 2, rng);
  for (int a = 0; a < 2; ++a)
    for (int th = 0; th < 2; ++th)
      inst.receiver_utils[static_cast<std::size_t>((2 + a) * 2 + th)] =
          inst.receiver_utils[static_cast<std::size_t>(a * 2 + th)];
  PersuasionInstance one = inst;
  one.m = 1;
  one.receiver_utils.resize(4);
  const Polytope l = build_extended_polytope_L(inst);
  for (const Vector& phi : random_points(build_persuasive_polytope(one), 50, rng)) {
    Vector menu(8);
    menu << phi, phi;
    EXPECT_TRUE(l.contains(extend_menu(inst, menu), 1e-9));
  }
}

TEST(ExtendedPolytope, SampledPointsPassDirectIcCheck) {
  CounterRng rng(3);
  const auto inst = random_instance(1, 2, 2, 2, rng);
  const Polytope l = build_extended_polytope_L(inst);
  for (const Vector& x : random_points(l, 10000, rng, 20)) {
    const Vector menu = x.head(8);
    ASSERT_LE(ic_violation(inst, menu), 1e-8);
    ASSERT_LE(misreport_gain(inst, menu), 1e-6);
  }
}

TEST(ExtendedPolytope, NonIcMenuIsRejected) {
  CounterRng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(1, 2, 2, 2, rng);
    const Polytope l = build_extended_polytope_L(inst);
    Vector menu(8);
    for (int i = 0; i < 8; i += 2) {
      menu(i) = rng.uniform();
      menu(i + 1) = 1 - menu(i);
    }
    EXPECT_EQ(l.contains(extend_menu(inst, menu), 1e-12), ic_violation(inst, menu) <= 1e-12);
  }
}

TEST(GValuePrimal, SingleReceiverIsSenderUtility) {
  CounterRng rng(5);
  const auto inst = random_instance(1, 3, 3, 2, rng);
  PersuasionInstance one = inst; // one entry as a single-type direct scheme
  one.m = 1;
  one.receiver_utils.resize(27);
  for (const Vector& menu : random_menus(inst, 20, rng))
    for (int k = 0; k < 2; ++k) {
      const Vector phi = menu.segment(k * 9, 9);
      EXPECT_NEAR(g_value_primal(inst, menu, {k}).value, sender_utility_direct(one, phi, {0}), 1e-9);
    }
}

TEST(GValuePrimal, AdditiveUtilityEqualsProductScheme) {
  CounterRng rng(6);
  auto inst = random_instance(2, 2, 3, 2, rng);
  const RadixCodec prof = inst.action_profiles();
  std::vector<double> part(12);
  for (auto& v : part)
    v = 0.5 * rng.uniform();
  for (int th = 0; th < 2; ++th)
    for (long a = 0; a < 9; ++a)
      inst.sender.tensor[static_cast<std::size_t>(th * 9 + a)] =
          part[static_cast<std::size_t>(th * 3 + prof.digit(a, 0))] +
          part[static_cast<std::size_t>(6 + th * 3 + prof.digit(a, 1))];
  const MenuLayout lay(inst);
  for (const Vector& menu : random_menus(inst, 20, rng)) {
    const TypeProfile k{1, 0};
    double product = 0.0;
    for (int th = 0; th < 2; ++th)
      for (long a = 0; a < 9; ++a)
        product += inst.prior[static_cast<std::size_t>(th)] * menu(lay.index(0, 1, th, prof.digit(a, 0))) *
                   menu(lay.index(1, 0, th, prof.digit(a, 1))) *
                   inst.sender.tensor[static_cast<std::size_t>(th * 9 + a)];
    EXPECT_NEAR(g_value_primal(inst, menu, k).value, product, 1e-9);
  }
}

TEST(GValuePrimal, MatchesTransportationVertices) {
  CounterRng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_set_function_instance(2, 2, 2, false, rng);
    for (const Vector& menu : random_menus(inst, 5, rng)) {
      const TypeProfile k{static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2))};
      const GValue g = g_value_primal(inst, menu, k);
      // Independent brute force: vertices of {ψ ≥ 0 : row/column sums} per state.
      const MenuLayout lay(inst);
      double brute = 0.0;
      for (int th = 0; th < 2; ++th) {
        Polytope t = Polytope::nonnegative(4);
        const double p = menu(lay.index(0, k[0], th, 1)), q = menu(lay.index(1, k[1], th, 1));
        Vector r0(4), r1(4), r2(4);
        r0 << 0, 0, 1, 1; // receiver 0 plays 1: profiles 2, 3
        r1 << 0, 1, 0, 1; // receiver 1 plays 1: profiles 1, 3
        r2 << 1, 1, 1, 1;
        t.add_equality(r0, p);
        t.add_equality(r1, q);
        t.add_equality(r2, 1.0);
        double best = -1.0;
        for (const Vector& v : testing::enumerate_vertices(t)) {
          double val = 0.0;
          for (long a = 0; a < 4; ++a)
            val += inst.prior[static_cast<std::size_t>(th)] * v(a) * inst.sender_util(a, th);
          best = std::max(best, val);
        }
        brute += best;
      }
      EXPECT_NEAR(g.value, brute, 1e-9);
      EXPECT_NEAR(g.value, g_two_binary(inst, menu, k), 1e-9);
      // The returned joint scheme is consistent with the reported entries.
      for (int th = 0; th < 2; ++th) {
        EXPECT_NEAR(g.joint(th * 4 + 2) + g.joint(th * 4 + 3), menu(lay.index(0, k[0], th, 1)), 1e-9);
        EXPECT_NEAR(g.joint(th * 4 + 1) + g.joint(th * 4 + 3), menu(lay.index(1, k[1], th, 1)), 1e-9);
      }
    }
  }
}

TEST(GSupergradient, SingleReceiverGradientIsExact) {
  CounterRng rng(8);
  const auto inst = random_instance(1, 2, 3, 2, rng);
  const MenuLayout lay(inst);
  const Vector menu = random_menus(inst, 1, rng).front();
  const Vector g = g_supergradient(inst, menu, {1});
  // Exact gradient up to adding a constant per (θ) block, which normalization absorbs.
  for (int th = 0; th < 2; ++th) {
    const double shift = g(lay.index(0, 1, th, 0)) -
                         inst.prior[static_cast<std::size_t>(th)] * inst.sender_util(0, th);
    for (int a = 0; a < 3; ++a) {
      EXPECT_NEAR(g(lay.index(0, 1, th, a)),
                  inst.prior[static_cast<std::size_t>(th)] * inst.sender_util(a, th) + shift, 1e-9);
      EXPECT_EQ(g(lay.index(0, 0, th, a)), 0.0);
    }
  }
}

TEST(GSupergradient, InequalityAndNormOnRandomPairs) {
  CounterRng rng(9);
  for (int trial = 0; trial < 4; ++trial) {
    const auto inst = trial % 2 ? random_instance(2, 2, 2, 2, rng)
                                : random_set_function_instance(3, 2, 2, true, rng);
    const double bound = std::sqrt(static_cast<double>(inst.n * inst.d * inst.actions));
    const auto menus = random_menus(inst, 100, rng);
    for (int i = 0; i < 50; ++i) {
      const Vector& a = menus[static_cast<std::size_t>(2 * i)];
      const Vector& b = menus[static_cast<std::size_t>(2 * i + 1)];
      const TypeProfile k(static_cast<std::size_t>(inst.n), i % 2);
      const Vector g = g_supergradient(inst, a, k);
      EXPECT_LE(g.norm(), bound + 1e-6);
      EXPECT_LE(g_value_primal(inst, b, k).value,
                g_value_primal(inst, a, k).value + g.dot(b - a) + 1e-6);
    }
  }
}

TEST(OptOracle, TrivialCases) {
  const SetFunction zero = SetFunction::table(2, {0, 0, 0, 0});
  EXPECT_EQ(opt_oracle(zero, {-1.0, -2.0}), 0u);
  EXPECT_EQ(opt_oracle(zero, {1.0, -1.0}), 1u);
  const SetFunction anon = SetFunction::anonymous(2, {0, 0, 0});
  EXPECT_EQ(opt_oracle(anon, {1.0, -1.0}), 1u);
}

TEST(OptOracle, AnonymousMatchesBruteForce) {
  CounterRng rng(10);
  const int n = 12;
  for (int trial = 0; trial < 1000; ++trial) {
    const SetFunction f = testing::random_anonymous(n, rng);
    std::vector<double> w(n);
    for (auto& x : w)
      x = rng.uniform(-0.3, 0.3);
    double best = -1e300;
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
      double v = f.values()[static_cast<std::size_t>(std::popcount(s))];
      for (int r = 0; r < n; ++r)
        if (s >> r & 1u)
          v += w[static_cast<std::size_t>(r)];
      best = std::max(best, v);
    }
    EXPECT_NEAR(oracle_objective(f, w, opt_oracle(f, w)), best, 1e-12);
  }
}

TEST(OptOracle, SupermodularTableMatchesBruteForce) {
  CounterRng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 6;
    const SetFunction f = testing::random_supermodular(n, rng);
    std::vector<double> w(static_cast<std::size_t>(n));
    for (auto& x : w)
      x = rng.uniform(-1, 0.2);
    const double got = oracle_objective(f, w, opt_oracle(f, w));
    for (std::uint32_t s = 0; s < (1u << n); ++s)
      EXPECT_GE(got, oracle_objective(f, w, s));
  }
}

TEST(GValueDualEllipsoid, SingleReceiverAndLinearAnonymous) {
  CounterRng rng(12);
  auto inst = random_set_function_instance(1, 3, 2, true, rng);
  for (const Vector& menu : random_menus(inst, 5, rng))
    EXPECT_NEAR(g_value_dual_ellipsoid(inst, menu, {1}), g_value_primal(inst, menu, {1}).value, 1e-6);

  // f(R) = |R|/n: the value is linear in the marginals, Σ_θ μ_θ Σ_r φ^r_θ(a₁)/n.
  inst = random_set_function_instance(3, 2, 1, true, rng);
  for (auto& f : inst.sender.per_state)
    f = SetFunction::anonymous(3, {0.0, 1.0 / 3, 2.0 / 3, 1.0}, true);
  const MenuLayout lay(inst);
  for (const Vector& menu : random_menus(inst, 5, rng)) {
    double expect = 0.0;
    for (int th = 0; th < 2; ++th)
      for (int r = 0; r < 3; ++r)
        expect += inst.prior[static_cast<std::size_t>(th)] * menu(lay.index(r, 0, th, 1)) / 3.0;
    EXPECT_NEAR(g_value_dual_ellipsoid(inst, menu, {0, 0, 0}), expect, 1e-6);
  }
}

TEST(GValueDualEllipsoid, AgreesWithPrimal) {
  CounterRng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 3;
    const auto inst = random_set_function_instance(n, 2, 2, trial % 2 == 0, rng);
    const Vector menu = random_menus(inst, 1, rng).front();
    TypeProfile k(static_cast<std::size_t>(n));
    for (auto& t : k)
      t = static_cast<int>(rng.below(2));
    EXPECT_NEAR(g_value_dual_ellipsoid(inst, menu, k), g_value_primal(inst, menu, k).value, 1e-4);
  }
}

TEST(Ftrl, EmptyHistoryGivesMinimumNormMenu) {
  CounterRng rng(14);
  const auto inst = random_instance(2, 2, 2, 2, rng);
  const FtrlResult r = ftrl_update(inst, ProfileCounts{}, 0.1);
  EXPECT_LE(ic_violation(inst, r.menu), 1e-8);
  // First-order optimality of min ‖φ‖² over Λ.
  for (const Vector& w : random_menus(inst, 500, rng))
    EXPECT_GE(r.menu.dot(w - r.menu), -1e-8);
}

TEST(Ftrl, SmallAlphaConvergesToMinimumNormMenu) {
  CounterRng rng(15);
  const auto inst = random_instance(2, 2, 2, 2, rng);
  ProfileCounts h;
  h.add({0, 1}, 3);
  h.add({1, 1}, 2);
  const Vector base = ftrl_update(inst, ProfileCounts{}, 1.0).menu;
  double prev = 1e300;
  for (double alpha : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double dist = (ftrl_update(inst, h, alpha).menu - base).norm();
    EXPECT_LE(dist, prev + 1e-9);
    prev = dist;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(Ftrl, LargeAlphaApproachesBestMenu) {
  CounterRng rng(16);
  const auto inst = random_set_function_instance(2, 2, 2, true, rng);
  ProfileCounts h;
  h.add({1, 0}, 1);
  const MenuHindsight best = best_menu_in_hindsight(inst, h);
  EXPECT_NEAR(best.value, g_value_primal(inst, best.menu, {1, 0}).value, 1e-8);
  const FtrlResult r = ftrl_update(inst, h, 1e4);
  EXPECT_NEAR(cumulative_g(inst, h, r.menu), best.value, 1e-3);
  // Unregularized supergradient ascent from the same start reaches no higher.
  FtrlOptions o;
  o.method = FtrlMethod::SupergradientAscent;
  o.max_iterations = 300;
  const FtrlResult a = ftrl_update(inst, h, 1e4, o);
  EXPECT_LE(cumulative_g(inst, h, a.menu), best.value + 1e-8);
}

TEST(Ftrl, ObjectiveMatchesGridOnTwoBinaryReceivers) {
  // n = 2, one type each, binary actions: Λ is parametrized by φ^r_θ(a₁) on a grid.
  CounterRng rng(17);
  const auto inst = random_set_function_instance(2, 2, 1, false, rng);
  ProfileCounts h;
  h.add({0, 0}, 2);
  const double alpha = 0.5;
  const FtrlResult r = ftrl_update(inst, h, alpha);
  const MenuLayout lay(inst);
  const int steps = 50;
  double best = -1e300;
  Vector menu(8);
  for (int i0 = 0; i0 <= steps; ++i0)
    for (int i1 = 0; i1 <= steps; ++i1)
      for (int j0 = 0; j0 <= steps; ++j0)
        for (int j1 = 0; j1 <= steps; ++j1) {
          const double v[4] = {double(i0) / steps, double(i1) / steps, double(j0) / steps,
                               double(j1) / steps};
          for (int r = 0; r < 2; ++r)
            for (int th = 0; th < 2; ++th) {
              menu(lay.index(r, 0, th, 1)) = v[r * 2 + th];
              menu(lay.index(r, 0, th, 0)) = 1 - v[r * 2 + th];
            }
          // Persuasiveness of each receiver's entry.
          bool ok = true;
          for (int r = 0; r < 2 && ok; ++r)
            for (int a = 0; a < 2 && ok; ++a) {
              double follow = 0.0, deviate = 0.0;
              for (int th = 0; th < 2; ++th) {
                const double w = inst.prior[static_cast<std::size_t>(th)] * menu(lay.index(r, 0, th, a));
                follow += w * inst.receiver_util(r, 0, a, th);
                deviate += w * inst.receiver_util(r, 0, 1 - a, th);
              }
              ok = deviate <= follow + 1e-12;
            }
          if (!ok)
            continue;
          best = std::max(best, 2 * g_two_binary(inst, menu, {0, 0}) - menu.squaredNorm() / (2 * alpha));
        }
  EXPECT_GE(r.objective, best - 1e-9);
  EXPECT_NEAR(r.objective, best, 1e-2);
  EXPECT_NEAR(r.objective, ftrl_objective(inst, h, alpha, r.menu), 1e-8);
}

TEST(Ftrl, DominatesRandomMenus) {
  CounterRng rng(18);
  const auto inst = random_set_function_instance(2, 2, 2, true, rng);
  ProfileCounts h;
  h.add({0, 1}, 2);
  h.add({1, 1}, 1);
  const double alpha = 0.2;
  const FtrlResult r = ftrl_update(inst, h, alpha);
  for (const Vector& w : random_menus(inst, 2000, rng))
    EXPECT_GE(r.objective, ftrl_objective(inst, h, alpha, w) - 1e-9);
}

TEST(Ftrl, DualEllipsoidAgreesWithExact) {
  CounterRng rng(19);
  {
    const auto inst = random_set_function_instance(2, 2, 1, true, rng);
    ProfileCounts h;
    h.add({0, 0});
    const double exact = ftrl_update(inst, h, 0.3).objective;
    EXPECT_NEAR(ftrl_update_dual_ellipsoid(inst, h, 0.3).objective, exact, 1e-3);
  }
  for (int trial = 0; trial < 3; ++trial) {
    const auto inst = random_set_function_instance(2, 2, 2, trial % 2 == 0, rng);
    ProfileCounts h;
    for (int t = 0; t < 3; ++t)
      h.add({static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2))});
    const double alpha = 0.25;
    const FtrlResult exact = ftrl_update(inst, h, alpha);
    const FtrlResult dual = ftrl_update_dual_ellipsoid(inst, h, alpha);
    EXPECT_NEAR(dual.objective, exact.objective, 1e-3);
    EXPECT_LE(ic_violation(inst, dual.menu), 1e-7);
  }
}

TEST(GValue, ConcaveAndLipschitz) {
  CounterRng rng(20);
  for (int trial = 0; trial < 3; ++trial) {
    const auto inst = random_instance(2, 2, 2, 2, rng);
    const double lip = std::sqrt(static_cast<double>(inst.n * inst.d * inst.actions));
    const auto menus = random_menus(inst, 40, rng);
    for (int i = 0; i < 20; ++i) {
      const Vector& a = menus[static_cast<std::size_t>(2 * i)];
      const Vector& b = menus[static_cast<std::size_t>(2 * i + 1)];
      const TypeProfile k{i % 2, (i / 2) % 2};
      const double ga = g_value_primal(inst, a, k).value, gb = g_value_primal(inst, b, k).value;
      for (double l : {0.25, 0.5, 0.75})
        EXPECT_GE(g_value_primal(inst, l * a + (1 - l) * b, k).value, l * ga + (1 - l) * gb - 1e-7);
      EXPECT_LE(std::abs(ga - gb), lip * (a - b).norm() + 1e-7);
    }
  }
}

TEST(Algorithm2, ConstantAdversaryMenusSettle) {
  CounterRng rng(21);
  const auto inst = random_set_function_instance(2, 2, 2, true, rng);
  Algorithm2 alg(inst, 400);
  Vector prev = alg.menu();
  double last_move = 0.0;
  for (int t = 0; t < 400; ++t) {
    const auto r = alg.step({1, 0});
    // Joint scheme consistent with the reported entries.
    const MenuLayout lay(inst);
    for (int th = 0; th < 2; ++th) {
      EXPECT_NEAR(r.joint(th * 4 + 2) + r.joint(th * 4 + 3), r.menu(lay.index(0, 1, th, 1)), 1e-8);
      EXPECT_NEAR(r.joint(th * 4 + 1) + r.joint(th * 4 + 3), r.menu(lay.index(1, 0, th, 1)), 1e-8);
    }
    EXPECT_LE(misreport_gain(inst, r.menu), 1e-6);
    last_move = (alg.menu() - prev).norm();
    prev = alg.menu();
  }
  EXPECT_LT(last_move, 1e-3);
}

TEST(Algorithm2, RegretWithinBoundOnRandomSequence) {
  CounterRng rng(22);
  const auto inst = random_set_function_instance(2, 2, 2, true, rng);
  const long T = 256;
  Algorithm2 alg(inst, T);
  double earned = 0.0;
  ProfileCounts h;
  for (long t = 0; t < T; ++t) {
    const TypeProfile k{static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2))};
    earned += alg.step(k).value;
    h.add(k);
  }
  const double regret = best_menu_in_hindsight(inst, h).value - earned;
  EXPECT_GE(regret, -1e-6);
  EXPECT_LE(regret, 2 * 2 * 2 * std::sqrt(2.0 * T));
}

TEST(SingleTypeReporting, LearnerCommitsIcMenus) {
  CounterRng rng(23);
  const auto inst = random_instance(1, 2, 2, 2, rng);
  auto learner = single_type_reporting_learner(inst, 200, 7);
  learner.problem.validate();
  for (int t = 0; t < 200; ++t) {
    auto [round, next] = algorithm1_round(learner.problem, std::move(learner.state), t % 2);
    learner.state = std::move(next);
    const Vector menu = round.play.x.head(MenuLayout(inst).menu_dim());
    EXPECT_LE(misreport_gain(inst, menu), 1e-6);
    EXPECT_EQ(strategic_report(inst, menu, 0, t % 2), t % 2);
  }
}

} // namespace
} // namespace obp
