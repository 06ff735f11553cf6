#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/lp.hpp"
#include "obp/geometry/polytope.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace obp {

enum class QpStatus { Optimal, Infeasible, Unbounded };

struct QpResult {
  QpStatus status = QpStatus::Infeasible;
  Vector x;
  double value = 0.0;
  long iterations = 0;
};

struct QpOptions {
  long max_iterations = 0;     // 0: derived from problem size
  double start_tolerance = 1e-9; // warm start accepted if violation is below this
};

namespace detail {

// Primal active-set method for  min ½xᵀHx + gᵀx  over a polytope, H ⪰ 0.
// Each iteration minimizes over the null space of the working set (QR of
// the active rows); zero-curvature descent directions become ray steps.
class ActiveSetQp {
public:
  ActiveSetQp(const Matrix& h, const Vector& g, const Polytope& poly, const QpOptions& opts)
      : h_(h), g_(g), poly_(poly), opts_(opts), n_(poly.dim()) {
    collect_rows();
    const long size = static_cast<long>(n_ + c_.rows());
    max_iter_ = opts.max_iterations > 0 ? opts.max_iterations : 20 * size + 200;
    curv_tol_ = 1e-10 * std::max(1.0, h_.cwiseAbs().maxCoeff());
  }

  QpResult solve(const Vector* warm) {
    QpResult out;
    if (warm && warm->size() == n_ && poly_.max_violation(*warm) <= opts_.start_tolerance) {
      x_ = *warm;
    } else {
      const LpSolution lp = solve_lp(-g_, poly_, Sense::Max);
      if (lp.status == LpStatus::Infeasible) {
        out.status = QpStatus::Infeasible;
        return out;
      }
      if (lp.status == LpStatus::Unbounded) {
        // Still feasible; find any point.
        const LpSolution any = solve_lp(Vector::Zero(n_), poly_, Sense::Max);
        x_ = any.point;
      } else {
        x_ = lp.point;
      }
    }
    init_working_set();

    for (long it = 0;; ++it) {
      if (it > max_iter_)
        throw NumericalFailure("active-set QP: iteration limit exceeded");
      out.iterations = it;
      const Vector grad = h_ * x_ + g_;
      const Index w = static_cast<Index>(eq_rows_.size() + work_.size());
      Matrix at(n_, w);
      Index col = 0;
      for (Index r : eq_rows_)
        at.col(col++) = e_.row(r).transpose();
      for (Index r : work_)
        at.col(col++) = c_.row(r).transpose();

      Eigen::HouseholderQR<Matrix> qr(at);
      Vector p = Vector::Zero(n_);
      bool ray = false;
      if (w < n_) {
        const Matrix q = qr.householderQ();
        const Matrix z = q.rightCols(n_ - w);
        const Matrix hz = z.transpose() * h_ * z;
        const Vector gz = z.transpose() * grad;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(hz);
        const Vector& lam = eig.eigenvalues();
        const Matrix& v = eig.eigenvectors();
        const Vector proj = v.transpose() * gz;
        const double gtol = 1e-11 * (1.0 + grad.lpNorm<Eigen::Infinity>());
        Vector pz = Vector::Zero(n_ - w);
        for (Index i = 0; i < lam.size(); ++i)
          if (lam(i) <= curv_tol_ && std::abs(proj(i)) > gtol) {
            pz -= proj(i) * v.col(i);
            ray = true;
          }
        if (!ray)
          for (Index i = 0; i < lam.size(); ++i)
            if (lam(i) > curv_tol_)
              pz -= (proj(i) / lam(i)) * v.col(i);
        p = z * pz;
      }

      const double step_tol = 1e-12 * (1.0 + x_.lpNorm<Eigen::Infinity>());
      if (!ray && p.lpNorm<Eigen::Infinity>() <= step_tol) {
        if (work_.empty())
          return finish(out);
        const Vector lambda = qr.solve(-grad);
        const double mtol = 1e-10 * (1.0 + grad.lpNorm<Eigen::Infinity>());
        Index drop = -1;
        double most = -mtol;
        for (std::size_t i = 0; i < work_.size(); ++i) {
          const double l = lambda(static_cast<Index>(eq_rows_.size() + i));
          if (l < most) {
            most = l;
            drop = static_cast<Index>(i);
          }
        }
        if (drop < 0)
          return finish(out);
        work_.erase(work_.begin() + drop);
        continue;
      }

      double alpha = ray ? std::numeric_limits<double>::infinity() : 1.0;
      Index block = -1;
      const Vector cp = c_ * p;
      const Vector slack = d_ - c_ * x_;
      const double ptol = 1e-12 * p.norm();
      for (Index i = 0; i < c_.rows(); ++i) {
        if (in_work_(i) || cp(i) <= ptol)
          continue;
        const double ratio = std::max(slack(i), 0.0) / cp(i);
        if (ratio < alpha) {
          alpha = ratio;
          block = i;
        }
      }
      if (!std::isfinite(alpha)) {
        out.status = QpStatus::Unbounded;
        out.x = x_;
        return out;
      }
      x_ += alpha * p;
      if (block >= 0)
        work_.push_back(block);
    }
  }

private:
  void collect_rows() {
    const auto& ineq = poly_.inequalities();
    const Vector& lb = poly_.lower_bounds();
    Index nb = 0;
    for (Index j = 0; j < n_; ++j)
      if (std::isfinite(lb(j)))
        ++nb;
    c_ = Matrix::Zero(static_cast<Index>(ineq.size()) + nb, n_);
    d_ = Vector(c_.rows());
    Index r = 0;
    for (const auto& row : ineq) {
      c_.row(r) = row.a.transpose();
      d_(r++) = row.b;
    }
    for (Index j = 0; j < n_; ++j)
      if (std::isfinite(lb(j))) {
        c_(r, j) = -1.0;
        d_(r++) = -lb(j);
      }
    e_ = poly_.eq_matrix();
    // Keep a linearly independent subset of the equality rows.
    eq_rows_.clear();
    if (e_.rows() > 0) {
      Eigen::ColPivHouseholderQR<Matrix> qr(e_.transpose());
      qr.setThreshold(1e-10);
      const Index rank = qr.rank();
      for (Index i = 0; i < rank; ++i)
        eq_rows_.push_back(qr.colsPermutation().indices()(i));
      std::sort(eq_rows_.begin(), eq_rows_.end());
    }
  }

  bool in_work_(Index i) const { return std::find(work_.begin(), work_.end(), i) != work_.end(); }

  void init_working_set() {
    work_.clear();
    Matrix basis(n_, n_);
    Index rank = 0;
    auto try_add = [&](const Vector& a) {
      Vector res = a;
      for (Index k = 0; k < rank; ++k)
        res -= basis.col(k).dot(res) * basis.col(k);
      const double nr = res.norm();
      if (nr <= 1e-8 * std::max(1.0, a.norm()) || rank >= n_)
        return false;
      basis.col(rank++) = res / nr;
      return true;
    };
    for (Index r : eq_rows_)
      try_add(e_.row(r).transpose());
    const Vector slack = d_ - c_ * x_;
    for (Index i = 0; i < c_.rows(); ++i)
      if (std::abs(slack(i)) <= 1e-9 * std::max(1.0, std::abs(d_(i))))
        if (try_add(c_.row(i).transpose()))
          work_.push_back(i);
  }

  QpResult& finish(QpResult& out) {
    out.status = QpStatus::Optimal;
    out.x = x_;
    out.value = 0.5 * x_.dot(h_ * x_) + g_.dot(x_);
    return out;
  }

  const Matrix& h_;
  const Vector& g_;
  const Polytope& poly_;
  QpOptions opts_;
  Index n_;
  Matrix c_, e_;
  Vector d_;
  std::vector<Index> eq_rows_;
  std::vector<Index> work_;
  Vector x_;
  long max_iter_ = 0;
  double curv_tol_ = 0.0;
};

} // namespace detail

// min ½xᵀHx + gᵀx over the polytope, H symmetric positive semidefinite.
// warm_start, if feasible, is used as the initial iterate.
inline QpResult solve_qp(const Matrix& h, const Vector& g, const Polytope& poly,
                         const Vector* warm_start = nullptr, const QpOptions& opts = {}) {
  detail::ActiveSetQp qp(h, g, poly, opts);
  return qp.solve(warm_start);
}

} // namespace obp
