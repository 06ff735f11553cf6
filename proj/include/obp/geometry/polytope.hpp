#pragma once

#include "obp/core/config.hpp"
#include "obp/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace obp {

// Half-space / hyperplane row: a·x ≤ b or a·x = b.
struct LinearRow {
  Vector a;
  double b = 0.0;
};

// {x : A_I x ≤ b_I, A_E x = b_E, x ≥ lb}; lb = -inf means the coordinate is free.
class Polytope {
public:
  static constexpr double free_bound = -std::numeric_limits<double>::infinity();

  Polytope() = default;
  explicit Polytope(Index dim, double lower_bound = free_bound)
      : dim_(dim), lower_(Vector::Constant(dim, lower_bound)) {}

  static Polytope nonnegative(Index dim) { return Polytope(dim, 0.0); }

  static Polytope box(const Vector& lo, const Vector& hi) {
    Polytope p(lo.size());
    p.lower_ = lo;
    for (Index i = 0; i < lo.size(); ++i)
      p.add_inequality(Vector::Unit(lo.size(), i), hi(i));
    return p;
  }

  // {x ≥ 0 : Σx = 1}
  static Polytope simplex(Index dim) {
    Polytope p = nonnegative(dim);
    p.add_equality(Vector::Ones(dim), 1.0);
    return p;
  }

  Index dim() const noexcept { return dim_; }

  void add_inequality(Vector a, double b) {
    check_row(a);
    ineq_.push_back({std::move(a), b});
  }
  void add_equality(Vector a, double b) {
    check_row(a);
    eq_.push_back({std::move(a), b});
  }
  void set_lower_bound(Index j, double v) { lower_(j) = v; }

  const std::vector<LinearRow>& inequalities() const noexcept { return ineq_; }
  const std::vector<LinearRow>& equalities() const noexcept { return eq_; }
  const Vector& lower_bounds() const noexcept { return lower_; }
  bool has_lower_bound(Index j) const { return std::isfinite(lower_(j)); }

  Matrix ineq_matrix() const { return stack(ineq_); }
  Vector ineq_rhs() const { return rhs(ineq_); }
  Matrix eq_matrix() const { return stack(eq_); }
  Vector eq_rhs() const { return rhs(eq_); }

  // Largest violation of any constraint at x (0 when feasible).
  double max_violation(const Vector& x) const {
    double v = 0.0;
    for (const auto& r : ineq_)
      v = std::max(v, r.a.dot(x) - r.b);
    for (const auto& r : eq_)
      v = std::max(v, std::abs(r.a.dot(x) - r.b));
    for (Index j = 0; j < dim_; ++j)
      if (std::isfinite(lower_(j)))
        v = std::max(v, lower_(j) - x(j));
    return v;
  }

  bool contains(const Vector& x, double tol = tol::feas) const {
    return x.size() == dim_ && max_violation(x) <= tol;
  }

  // Feasibility LP; defined in lp.hpp.
  bool is_feasible() const;

  // Same constraints on the first dim() coordinates of a larger space.
  Polytope embedded(Index new_dim) const {
    Polytope p(new_dim);
    p.lower_.head(dim_) = lower_;
    for (const auto& r : ineq_)
      p.add_inequality(pad(r.a, new_dim), r.b);
    for (const auto& r : eq_)
      p.add_equality(pad(r.a, new_dim), r.b);
    return p;
  }

private:
  void check_row(const Vector& a) const {
    if (a.size() != dim_)
      throw std::invalid_argument("Polytope: row length does not match dimension");
  }
  Matrix stack(const std::vector<LinearRow>& rows) const {
    Matrix m(static_cast<Index>(rows.size()), dim_);
    for (std::size_t i = 0; i < rows.size(); ++i)
      m.row(static_cast<Index>(i)) = rows[i].a.transpose();
    return m;
  }
  static Vector rhs(const std::vector<LinearRow>& rows) {
    Vector v(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      v(static_cast<Index>(i)) = rows[i].b;
    return v;
  }
  static Vector pad(const Vector& a, Index n) {
    Vector out = Vector::Zero(n);
    out.head(a.size()) = a;
    return out;
  }

  Index dim_ = 0;
  Vector lower_;
  std::vector<LinearRow> ineq_;
  std::vector<LinearRow> eq_;
};

} // namespace obp

// solve_lp and Polytope::is_feasible
#include "obp/geometry/lp.hpp"
