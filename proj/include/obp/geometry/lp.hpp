#pragma once

#include "obp/core/config.hpp"
#include "obp/core/errors.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/polytope.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace obp {

enum class LpStatus { Optimal, Infeasible, Unbounded };
enum class Sense { Max, Min };

// Duals refer to the maximization form  max σ c·x  (σ = +1 for Max, -1 for Min):
//   σ c = A_Iᵀ λ + A_Eᵀ ν − ρ,   λ ≥ 0,  ρ ≥ 0 on bounded coordinates,
//   σ value = b_I·λ + b_E·ν − lb·ρ   at optimality.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector point;
  double value = 0.0;
  Vector duals_eq;
  Vector duals_ineq;
  Vector reduced_costs;
  long iterations = 0;

  bool optimal() const noexcept { return status == LpStatus::Optimal; }
};

struct LpOptions {
  long max_iterations = 0; // 0: derived from problem size
};

namespace detail {

class RevisedSimplex {
public:
  RevisedSimplex(const Vector& objective, const Polytope& poly, Sense sense, const LpOptions& opts)
      : poly_(poly), sigma_(sense == Sense::Max ? 1.0 : -1.0) {
    build(objective);
    const long size = static_cast<long>(m_ + n_);
    max_iter_ = opts.max_iterations > 0 ? opts.max_iterations : 50 * size + 1000;
  }

  LpSolution solve() {
    LpSolution out;
    refactor();
    if (n_art_ > 0) {
      Vector c1 = Vector::Zero(n_);
      c1.tail(n_art_).setOnes();
      std::vector<char> allowed(static_cast<std::size_t>(n_), 1);
      if (run(c1, allowed) != 0)
        throw NumericalFailure("simplex: phase 1 reported unbounded");
      double infeas = 0.0;
      for (Index i = 0; i < m_; ++i)
        if (basis_[i] >= first_art_)
          infeas += x_b_(i);
      if (infeas > 1e-8 * std::max(1.0, b_.lpNorm<Eigen::Infinity>())) {
        out.status = LpStatus::Infeasible;
        out.iterations = iters_;
        return out;
      }
      drive_out_artificials();
    }
    std::vector<char> allowed(static_cast<std::size_t>(n_), 1);
    for (Index j = first_art_; j < n_; ++j)
      allowed[static_cast<std::size_t>(j)] = 0;
    const int code = run(c_, allowed);
    out.iterations = iters_;
    if (code != 0) {
      out.status = LpStatus::Unbounded;
      return out;
    }
    refactor();
    extract(out);
    return out;
  }

private:
  void build(const Vector& objective) {
    const Index dim = poly_.dim();
    if (objective.size() != dim)
      throw std::invalid_argument("solve_lp: objective length does not match polytope dimension");
    const Vector& lb = poly_.lower_bounds();
    const auto& ineq = poly_.inequalities();
    const auto& eq = poly_.equalities();
    m_i_ = static_cast<Index>(ineq.size());
    m_ = m_i_ + static_cast<Index>(eq.size());

    // Structural columns: shifted bounded variables, split free variables.
    col_of_.assign(static_cast<std::size_t>(dim), -1);
    neg_col_of_.assign(static_cast<std::size_t>(dim), -1);
    shift_ = Vector::Zero(dim);
    Index ns = 0;
    for (Index j = 0; j < dim; ++j) {
      col_of_[static_cast<std::size_t>(j)] = ns++;
      if (std::isfinite(lb(j)))
        shift_(j) = lb(j);
      else
        neg_col_of_[static_cast<std::size_t>(j)] = ns++;
    }
    n_struct_ = ns;

    Vector rhs(m_);
    row_sign_ = Vector::Ones(m_);
    for (Index i = 0; i < m_; ++i) {
      const LinearRow& r = i < m_i_ ? ineq[static_cast<std::size_t>(i)]
                                    : eq[static_cast<std::size_t>(i - m_i_)];
      rhs(i) = r.b - r.a.dot(shift_);
      if (rhs(i) < 0.0)
        row_sign_(i) = -1.0;
    }
    // Artificials for flipped inequalities and all equalities.
    n_art_ = 0;
    for (Index i = 0; i < m_; ++i)
      if (i >= m_i_ || row_sign_(i) < 0.0)
        ++n_art_;
    first_art_ = n_struct_ + m_i_;
    n_ = first_art_ + n_art_;

    a_ = Matrix::Zero(m_, n_);
    b_ = Vector(m_);
    basis_.assign(static_cast<std::size_t>(m_), -1);
    Index art = first_art_;
    for (Index i = 0; i < m_; ++i) {
      const LinearRow& r = i < m_i_ ? ineq[static_cast<std::size_t>(i)]
                                    : eq[static_cast<std::size_t>(i - m_i_)];
      const double s = row_sign_(i);
      for (Index j = 0; j < dim; ++j) {
        const double v = s * r.a(j);
        if (v == 0.0)
          continue;
        a_(i, col_of_[static_cast<std::size_t>(j)]) = v;
        if (neg_col_of_[static_cast<std::size_t>(j)] >= 0)
          a_(i, neg_col_of_[static_cast<std::size_t>(j)]) = -v;
      }
      b_(i) = s * rhs(i);
      if (i < m_i_)
        a_(i, n_struct_ + i) = s;
      if (i >= m_i_ || s < 0.0) {
        a_(i, art) = 1.0;
        basis_[static_cast<std::size_t>(i)] = art++;
      } else {
        basis_[static_cast<std::size_t>(i)] = n_struct_ + i;
      }
    }

    // Phase-2 costs: minimize -σ c.
    c_ = Vector::Zero(n_);
    for (Index j = 0; j < dim; ++j) {
      const double cj = -sigma_ * objective(j);
      c_(col_of_[static_cast<std::size_t>(j)]) = cj;
      if (neg_col_of_[static_cast<std::size_t>(j)] >= 0)
        c_(neg_col_of_[static_cast<std::size_t>(j)]) = -cj;
    }
    objective_ = objective;
  }

  void refactor() {
    is_basic_.assign(static_cast<std::size_t>(n_), 0);
    for (Index i = 0; i < m_; ++i)
      is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = 1;
    if (m_ == 0) {
      b_inv_.resize(0, 0);
      x_b_.resize(0);
      return;
    }
    Matrix bm(m_, m_);
    for (Index i = 0; i < m_; ++i)
      bm.col(i) = a_.col(basis_[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Matrix> lu(bm);
    if (!(lu.rcond() > 1e-14))
      throw NumericalFailure("simplex: basis matrix became singular");
    b_inv_ = lu.inverse();
    x_b_ = b_inv_ * b_;
    for (Index i = 0; i < m_; ++i)
      if (x_b_(i) < 0.0 && x_b_(i) > -1e-9)
        x_b_(i) = 0.0;
    since_refactor_ = 0;
  }

  // Minimizes cost over the current basis. Returns 0 at optimality, 1 if unbounded.
  int run(const Vector& cost, const std::vector<char>& allowed) {
    const double opt_tol = 1e-9 * std::max(1.0, cost.lpNorm<Eigen::Infinity>());
    int degenerate_streak = 0;
    bool bland = false;
    Vector c_b(m_);
    for (;;) {
      if (++iters_ > max_iter_)
        throw NumericalFailure("simplex: iteration limit of " + std::to_string(max_iter_) +
                               " exceeded");
      if (since_refactor_ >= 50)
        refactor();
      for (Index i = 0; i < m_; ++i)
        c_b(i) = cost(basis_[static_cast<std::size_t>(i)]);
      const Vector y = b_inv_.transpose() * c_b;
      const Vector d = cost - a_.transpose() * y;

      Index q = -1;
      double best = -opt_tol;
      for (Index j = 0; j < n_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)] || !allowed[static_cast<std::size_t>(j)])
          continue;
        if (d(j) < best) {
          q = j;
          if (bland)
            break;
          best = d(j);
        }
      }
      if (q < 0)
        return 0;

      const Vector u = b_inv_ * a_.col(q);
      Index r = -1;
      double theta = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        if (u(i) <= 1e-9)
          continue;
        const double ratio = std::max(x_b_(i), 0.0) / u(i);
        if (r < 0 || ratio < theta - 1e-12) {
          r = i;
          theta = ratio;
        } else if (ratio <= theta + 1e-12) {
          const bool take = bland ? basis_[static_cast<std::size_t>(i)] <
                                        basis_[static_cast<std::size_t>(r)]
                                  : u(i) > u(r);
          if (take) {
            r = i;
            theta = std::min(theta, ratio);
          }
        }
      }
      if (r < 0)
        return 1;

      pivot(r, q, u, theta);
      if (theta < 1e-12) {
        if (++degenerate_streak > 50)
          bland = true;
      } else {
        degenerate_streak = 0;
      }
    }
  }

  void pivot(Index r, Index q, const Vector& u, double step) {
    x_b_ -= step * u;
    x_b_(r) = step;
    const double piv = u(r);
    b_inv_.row(r) /= piv;
    for (Index i = 0; i < m_; ++i)
      if (i != r && u(i) != 0.0)
        b_inv_.row(i) -= u(i) * b_inv_.row(r);
    is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = 0;
    basis_[static_cast<std::size_t>(r)] = q;
    is_basic_[static_cast<std::size_t>(q)] = 1;
    ++since_refactor_;
  }

  // After phase 1, swap zero-valued artificials for structural or slack columns.
  // Rows where no such column exists are redundant; their artificial stays
  // basic at zero and can never re-enter.
  void drive_out_artificials() {
    for (Index r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < first_art_)
        continue;
      const Vector row = b_inv_.row(r) * a_.leftCols(first_art_);
      Index q = -1;
      double best = 1e-7;
      for (Index j = 0; j < first_art_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)])
          continue;
        if (std::abs(row(j)) > best) {
          best = std::abs(row(j));
          q = j;
        }
      }
      if (q < 0)
        continue;
      const Vector u = b_inv_ * a_.col(q);
      pivot(r, q, u, x_b_(r) / u(r));
    }
    refactor();
  }

  void extract(LpSolution& out) const {
    const Index dim = poly_.dim();
    Vector xs = Vector::Zero(n_);
    for (Index i = 0; i < m_; ++i)
      xs(basis_[static_cast<std::size_t>(i)]) = x_b_(i);
    out.point = shift_;
    for (Index j = 0; j < dim; ++j) {
      out.point(j) += xs(col_of_[static_cast<std::size_t>(j)]);
      if (neg_col_of_[static_cast<std::size_t>(j)] >= 0)
        out.point(j) -= xs(neg_col_of_[static_cast<std::size_t>(j)]);
    }
    out.value = objective_.dot(out.point);

    Vector c_b(m_);
    for (Index i = 0; i < m_; ++i)
      c_b(i) = c_(basis_[static_cast<std::size_t>(i)]);
    const Vector y = m_ > 0 ? Vector(b_inv_.transpose() * c_b) : Vector(Vector::Zero(0));
    const Vector d = c_ - a_.transpose() * y;
    out.duals_ineq.resize(m_i_);
    out.duals_eq.resize(m_ - m_i_);
    for (Index i = 0; i < m_; ++i) {
      const double lam = -row_sign_(i) * y(i);
      if (i < m_i_)
        out.duals_ineq(i) = std::max(lam, 0.0);
      else
        out.duals_eq(i - m_i_) = lam;
    }
    out.reduced_costs.resize(dim);
    for (Index j = 0; j < dim; ++j)
      out.reduced_costs(j) = d(col_of_[static_cast<std::size_t>(j)]);
    out.status = LpStatus::Optimal;
  }

  const Polytope& poly_;
  double sigma_;
  Vector objective_;
  Matrix a_;
  Vector b_, c_, row_sign_, shift_;
  std::vector<Index> col_of_, neg_col_of_;
  Index m_ = 0, m_i_ = 0, n_ = 0, n_struct_ = 0, n_art_ = 0, first_art_ = 0;
  std::vector<Index> basis_;
  std::vector<char> is_basic_;
  Matrix b_inv_;
  Vector x_b_;
  long iters_ = 0, max_iter_ = 0;
  int since_refactor_ = 0;
};

} // namespace detail

// Dense two-phase revised simplex (Dantzig pricing, Bland's rule after a run
// of degenerate pivots). Throws NumericalFailure on iteration limit or a
// singular basis.
inline LpSolution solve_lp(const Vector& objective, const Polytope& polytope, Sense sense,
                           const LpOptions& opts = {}) {
  detail::RevisedSimplex simplex(objective, polytope, sense, opts);
  return simplex.solve();
}

// Objective of the dual certificate carried by an Optimal solution, in the
// same sense as the primal value.
inline double lp_dual_value(const LpSolution& sol, const Polytope& poly, Sense sense) {
  double v = poly.ineq_rhs().dot(sol.duals_ineq) + poly.eq_rhs().dot(sol.duals_eq);
  const Vector& lb = poly.lower_bounds();
  for (Index j = 0; j < poly.dim(); ++j)
    if (std::isfinite(lb(j)))
      v -= lb(j) * sol.reduced_costs(j);
  return sense == Sense::Max ? v : -v;
}

inline bool Polytope::is_feasible() const {
  return solve_lp(Vector::Zero(dim_), *this, Sense::Max).status != LpStatus::Infeasible;
}

} // namespace obp
