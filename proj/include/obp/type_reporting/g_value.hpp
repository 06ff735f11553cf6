#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/ellipsoid.hpp"
#include "obp/geometry/lp.hpp"
#include "obp/geometry/qp.hpp"
#include "obp/persuasion/instance.hpp"
#include "obp/persuasion/utility.hpp"
#include "obp/type_reporting/menu.hpp"
#include "obp/type_reporting/oracle.hpp"

#include <cmath>
#include <vector>

namespace obp {

// Joint scheme ψ_θ(a) over action profiles at θ·|A|^n + profile.
struct GValue {
  double value = 0.0;
  Vector joint;
};

namespace detail {

// For state θ: max Σ_a μ_θ u_s(a,θ) ψ(a) s.t. Σ_{a : a_r = b} ψ(a) = φ^{r,k_r}_θ(b).
inline Polytope marginal_consistency(const PersuasionInstance& inst, const Vector& menu,
                                     const TypeProfile& k, int theta) {
  const MenuLayout lay(inst);
  const RadixCodec prof = inst.action_profiles();
  Polytope p = Polytope::nonnegative(static_cast<Index>(prof.size()));
  for (int r = 0; r < inst.n; ++r)
    for (int b = 0; b < inst.actions; ++b) {
      Vector row = Vector::Zero(p.dim());
      for (long a = 0; a < prof.size(); ++a)
        if (prof.digit(a, r) == b)
          row(a) = 1.0;
      p.add_equality(std::move(row), menu(lay.index(r, k[static_cast<std::size_t>(r)], theta, b)));
    }
  return p;
}

inline Vector state_objective(const PersuasionInstance& inst, int theta) {
  Vector c(inst.num_action_profiles());
  for (long a = 0; a < c.size(); ++a)
    c(a) = inst.prior[static_cast<std::size_t>(theta)] * inst.sender_util(a, theta);
  return c;
}

inline LpSolution solve_state_lp(const PersuasionInstance& inst, const Vector& menu,
                                 const TypeProfile& k, int theta) {
  const LpSolution s =
      solve_lp(state_objective(inst, theta), marginal_consistency(inst, menu, k, theta), Sense::Max);
  if (!s.optimal())
    throw NumericalFailure("g_value_primal: marginal-consistency LP did not solve");
  return s;
}

} // namespace detail

// g^k(menu): the sender's best joint scheme whose marginals are the menu
// entries of the reported profile k. Separable across states.
inline GValue g_value_primal(const PersuasionInstance& inst, const Vector& menu,
                             const TypeProfile& k) {
  const long np = inst.num_action_profiles();
  GValue out;
  out.joint = Vector::Zero(inst.d * np);
  for (int th = 0; th < inst.d; ++th) {
    const LpSolution s = detail::solve_state_lp(inst, menu, k, th);
    out.value += s.value;
    out.joint.segment(th * np, np) = s.point;
  }
  return out;
}

// Supergradient of g^k at the menu from optimal duals x_{r,θ,b} of the
// marginal rows. The dual set does not depend on the menu, so any optimal
// dual is a global supergradient. Among optimal duals we pick a small one:
// shifts x_{r,·} += c_r with Σ_r c_r = 0 are free and are removed; if the
// result is still large, the minimum-norm optimal dual is computed by a QP.
inline Vector g_supergradient(const PersuasionInstance& inst, const Vector& menu,
                              const TypeProfile& k) {
  const MenuLayout lay(inst);
  const RadixCodec prof = inst.action_profiles();
  const int na = inst.actions;
  Vector grad = Vector::Zero(lay.menu_dim());
  for (int th = 0; th < inst.d; ++th) {
    const LpSolution s = detail::solve_state_lp(inst, menu, k, th);
    Vector x = s.duals_eq; // (r, b) ↦ r·|A| + b
    Vector means(inst.n);
    for (int r = 0; r < inst.n; ++r)
      means(r) = x.segment(r * na, na).mean();
    const double avg = means.mean();
    for (int r = 0; r < inst.n; ++r)
      x.segment(r * na, na).array() -= means(r) - avg;

    if (x.lpNorm<Eigen::Infinity>() > 1.0 + 1e-9) {
      // min ‖x‖² over the optimal dual face.
      const Index nx = x.size();
      Polytope face(nx);
      Vector phi_k(nx);
      for (int r = 0; r < inst.n; ++r)
        for (int b = 0; b < na; ++b)
          phi_k(r * na + b) = menu(lay.index(r, k[static_cast<std::size_t>(r)], th, b));
      const Vector c = detail::state_objective(inst, th);
      for (long a = 0; a < prof.size(); ++a) {
        Vector row = Vector::Zero(nx);
        for (int r = 0; r < inst.n; ++r)
          row(r * na + prof.digit(a, r)) = -1.0;
        face.add_inequality(std::move(row), -c(a));
      }
      face.add_inequality(phi_k, s.value + 1e-10);
      const QpResult q = solve_qp(Matrix::Identity(nx, nx), Vector::Zero(nx), face, &x);
      if (q.status == QpStatus::Optimal)
        x = q.x;
    }
    for (int r = 0; r < inst.n; ++r)
      for (int b = 0; b < na; ++b)
        grad(lay.index(r, k[static_cast<std::size_t>(r)], th, b)) += x(r * na + b);
  }
  return grad;
}

struct DualEllipsoidOptions {
  double accuracy = 1e-9; // per state, on the dual objective
  long max_iterations = 0; // 0: 4·dim·(dim+1)·ln(R₀/ε) + 200
};

// g^k(menu) for binary actions and set-function sender utilities via the
// dual, one state at a time:
//   min_x Σ_r φ^{r,k_r}_θ(a₁) x_r + y   s.t.  Σ_{r∈R} x_r + y ≥ μ_θ f_θ(R) ∀R.
// For fixed x the smallest feasible y is max_R {μ_θ f_θ(R) − Σ_{r∈R} x_r},
// attained at R* = opt_oracle(f_θ, −x/μ_θ); the violated row (θ, R*) is the
// cut, so each ellipsoid step is a subgradient step on a convex function
// of x alone.
inline double g_value_dual_ellipsoid(const PersuasionInstance& inst, const Vector& menu,
                                     const TypeProfile& k, const DualEllipsoidOptions& opts = {}) {
  if (!inst.binary_set_function())
    throw std::invalid_argument("g_value_dual_ellipsoid: binary set-function instance required");
  const MenuLayout lay(inst);
  const int n = inst.n;
  double total = 0.0;
  for (int th = 0; th < inst.d; ++th) {
    const double mu = inst.prior[static_cast<std::size_t>(th)];
    const SetFunction& f = inst.sender.per_state[static_cast<std::size_t>(th)];
    Vector p1(n);
    for (int r = 0; r < n; ++r)
      p1(r) = menu(lay.index(r, k[static_cast<std::size_t>(r)], th, 1));
    double fmax = 0.0;
    for (double v : f.values())
      fmax = std::max(fmax, std::abs(v));
    auto oracle = [&](const Vector& x) {
      std::vector<double> w(static_cast<std::size_t>(n));
      for (int r = 0; r < n; ++r)
        w[static_cast<std::size_t>(r)] = -x(r) / mu;
      const std::uint32_t rs = opt_oracle(f, w);
      double y = mu * f(rs);
      Vector g = p1;
      for (int r = 0; r < n; ++r)
        if (rs >> r & 1u) {
          y -= x(r);
          g(r) -= 1.0;
        }
      EllipsoidQuery q;
      q.feasible = true;
      q.value = p1.dot(x) + y;
      q.normal = g;
      return q;
    };
    const double eps = opts.accuracy;
    EllipsoidOptions eo;
    eo.radius = std::sqrt(static_cast<double>(n)) * (1.0 + mu * fmax);
    eo.accuracy = eps;
    eo.max_iterations = opts.max_iterations > 0
                            ? opts.max_iterations
                            : static_cast<long>(4.0 * n * (n + 1) * std::log(eo.radius / eps)) + 200;
    const EllipsoidResult res = ellipsoid_minimize(Vector::Zero(n), oracle, eo);
    if (!res.converged)
      throw EllipsoidIterationLimit("g_value_dual_ellipsoid: iteration limit reached",
                                    res.best_value, res.lower_bound);
    total += res.best_value;
  }
  return total;
}

} // namespace obp
