#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/caratheodory.hpp"
#include "obp/geometry/lp.hpp"
#include "obp/geometry/polytope.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace obp {

// One atom of a decomposition of an image point: a point of the image set
// together with a decision that maps to it.
struct ImageAtom {
  Vector point;
  double weight = 0.0;
  Vector preimage;
};

// The convex hull Q = co ν(X) ⊂ R^D of the image of a decision set, stored in
// both V- and H-form. Points live in an affine subspace q0 + span(U) of
// dimension k ≤ D; facets are kept in local coordinates w = Uᵀ(q − q0).
//
// The hull is built from a linear-minimization oracle over Q (an LP over X
// for linear maps, a scan for point clouds): each candidate facet is checked
// by maximizing its normal; a point beyond it is added and the facets through
// it are regenerated from the affected vertices.
class ImagePolytope {
public:
  // Minimizer of c·q over Q: (q, preimage of q).
  using Oracle = std::function<std::pair<Vector, Vector>(const Vector&)>;

  static ImagePolytope from_linear_map(const Matrix& m, const Polytope& domain) {
    ImagePolytope q;
    q.linear_ = true;
    q.map_ = m;
    q.domain_ = domain;
    q.build(
        [&](const Vector& c) {
          const LpSolution s = solve_lp(m.transpose() * c, domain, Sense::Min);
          if (!s.optimal())
            throw NumericalFailure("ImagePolytope: oracle LP over the domain failed");
          return std::make_pair(Vector(m * s.point), s.point);
        },
        m.rows());
    return q;
  }

  static ImagePolytope from_points(const std::vector<Vector>& points,
                                   const std::vector<Vector>& preimages) {
    if (points.empty() || points.size() != preimages.size())
      throw std::invalid_argument("ImagePolytope::from_points: need one preimage per point");
    ImagePolytope q;
    q.build(
        [&](const Vector& c) {
          std::size_t best = 0;
          double bv = c.dot(points[0]);
          for (std::size_t i = 1; i < points.size(); ++i) {
            const double v = c.dot(points[i]);
            if (v < bv - 1e-15) {
              bv = v;
              best = i;
            }
          }
          return std::make_pair(points[best], preimages[best]);
        },
        points.front().size());
    return q;
  }

  Index ambient_dim() const noexcept { return origin_.size(); }
  Index dim() const noexcept { return basis_.cols(); }
  bool linear() const noexcept { return linear_; }

  const Vector& origin() const noexcept { return origin_; }
  const Matrix& basis() const noexcept { return basis_; }
  const Matrix& facet_normals() const noexcept { return normals_; }
  const Vector& facet_offsets() const noexcept { return offsets_; }
  Index num_facets() const noexcept { return normals_.rows(); }
  const std::vector<Vector>& vertices() const noexcept { return points_; }
  const std::vector<Vector>& vertex_preimages() const noexcept { return preimages_; }
  const std::vector<Vector>& local_vertices() const noexcept { return local_; }
  const Matrix& map() const noexcept { return map_; }
  const Polytope& domain() const noexcept { return domain_; }

  Vector to_local(const Vector& z) const { return basis_.transpose() * (z - origin_); }
  Vector to_global(const Vector& w) const { return origin_ + basis_ * w; }

  // {w : A w ≤ b} in local coordinates.
  Polytope local_polytope() const {
    Polytope p(dim());
    for (Index i = 0; i < normals_.rows(); ++i)
      p.add_inequality(normals_.row(i).transpose(), offsets_(i));
    return p;
  }

  // Distance of z from the affine hull plus the largest facet violation.
  double violation(const Vector& z) const {
    const Vector w = to_local(z);
    double v = (to_global(w) - z).lpNorm<Eigen::Infinity>();
    if (normals_.rows() > 0)
      v = std::max(v, (normals_ * w - offsets_).maxCoeff());
    return std::max(v, 0.0);
  }
  bool contains(const Vector& z, double tol = tol::feas) const { return violation(z) <= tol; }

  // z as a convex combination of at most k+1 stored vertices.
  std::vector<ImageAtom> vertex_combination(const Vector& z) const {
    std::vector<ImageAtom> out;
    if (dim() == 0) {
      out.push_back({points_[0], 1.0, preimages_[0]});
      return out;
    }
    for (const auto& [j, w] : convex_weights(to_local(z), local_))
      out.push_back({points_[j], w, preimages_[j]});
    return out;
  }

  // Decomposition used by the reduction: for a linear map the image of X is
  // already convex, so z is a single atom whose preimage is the matching
  // convex combination of vertex preimages. Otherwise the atoms are vertices
  // of Q, each an image point of its stored decision.
  std::vector<ImageAtom> decompose(const Vector& z) const {
    if (!linear_)
      return vertex_combination(z);
    const auto combo = vertex_combination(z);
    Vector x = Vector::Zero(combo.front().preimage.size());
    for (const auto& a : combo)
      x += a.weight * a.preimage;
    return {{z, 1.0, std::move(x)}};
  }

private:
  void build(const Oracle& oracle, Index ambient) {
    const double tol_aff = 1e-9;
    // Generic first direction avoids ties in structured problems.
    Vector c0(ambient);
    for (Index i = 0; i < ambient; ++i)
      c0(i) = 1.0 + 0.1 * std::sin(1.7 * static_cast<double>(i) + 0.3);
    auto [q0, x0] = oracle(c0);
    origin_ = q0;
    points_.push_back(q0);
    preimages_.push_back(x0);
    basis_ = Matrix(ambient, 0);

    // Affine hull: look for spread along directions orthogonal to the span so far.
    for (;;) {
      Matrix comp;
      if (basis_.cols() == 0) {
        comp = Matrix::Identity(ambient, ambient);
      } else {
        Eigen::HouseholderQR<Matrix> qr(basis_);
        const Matrix q = qr.householderQ();
        comp = q.rightCols(ambient - basis_.cols());
      }
      bool grew = false;
      for (Index j = 0; j < comp.cols() && !grew; ++j) {
        const Vector c = comp.col(j);
        auto lo = oracle(c);
        auto hi = oracle(-c);
        if (c.dot(hi.first - lo.first) <= tol_aff)
          continue;
        auto& pick = std::abs(c.dot(hi.first - q0)) >= std::abs(c.dot(lo.first - q0)) ? hi : lo;
        Vector u = pick.first - q0;
        u -= basis_ * (basis_.transpose() * u);
        basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
        basis_.col(basis_.cols() - 1) = u.normalized();
        points_.push_back(pick.first);
        preimages_.push_back(pick.second);
        grew = true;
      }
      if (!grew)
        break;
    }

    const Index k = basis_.cols();
    for (const auto& p : points_)
      local_.push_back(to_local(p));
    if (k == 0) {
      normals_ = Matrix(0, 0);
      offsets_ = Vector(0);
      return;
    }

    // Initial simplex.
    for (std::size_t omit = 0; omit < local_.size(); ++omit) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < local_.size(); ++i)
        if (i != omit)
          idx.push_back(i);
      add_facet_through(idx);
    }

    // Confirm facets one by one; a point beyond a facet refines the hull.
    for (std::size_t f = 0; f < facets_.size();) {
      if (facets_[f].confirmed) {
        ++f;
        continue;
      }
      const Vector dir = basis_ * facets_[f].a;
      auto [q, x] = oracle(-dir);
      const Vector w = to_local(q);
      if (facets_[f].a.dot(w) <= facets_[f].b + hull_tol_) {
        facets_[f].confirmed = true;
        ++f;
        continue;
      }
      add_point(q, x, w);
      f = 0;
    }

    normals_.resize(static_cast<Index>(facets_.size()), k);
    offsets_.resize(static_cast<Index>(facets_.size()));
    for (std::size_t i = 0; i < facets_.size(); ++i) {
      normals_.row(static_cast<Index>(i)) = facets_[i].a.transpose();
      offsets_(static_cast<Index>(i)) = facets_[i].b;
    }
    facets_.clear();
  }

  struct Facet {
    Vector a;
    double b;
    bool confirmed = false;
  };

  // Adds the hyperplane through the given k local points if it supports all
  // current points. Returns true when a new facet was recorded.
  bool add_facet_through(const std::vector<std::size_t>& idx) {
    const Index k = basis_.cols();
    Vector a;
    if (k == 1) {
      a = Vector::Ones(1);
    } else {
      Matrix diff(k - 1, k);
      for (Index i = 1; i < k; ++i)
        diff.row(i - 1) = (local_[idx[static_cast<std::size_t>(i)]] - local_[idx[0]]).transpose();
      Eigen::FullPivLU<Matrix> lu(diff);
      lu.setThreshold(1e-10);
      const Matrix ker = lu.kernel();
      if (ker.cols() != 1)
        return false;
      a = ker.col(0).normalized();
    }
    double b = a.dot(local_[idx[0]]);
    bool below = true, above = true;
    for (const auto& w : local_) {
      const double s = a.dot(w) - b;
      if (s > hull_tol_)
        below = false;
      if (s < -hull_tol_)
        above = false;
    }
    if (below == above)
      return false; // splits the points, or all points coplanar
    if (above) {
      a = -a;
      b = -b;
    }
    for (const auto& f : facets_)
      if ((f.a - a).lpNorm<Eigen::Infinity>() < 1e-9 && std::abs(f.b - b) < 1e-9)
        return false;
    facets_.push_back({std::move(a), b, false});
    return true;
  }

  void add_point(const Vector& q, const Vector& x, const Vector& w) {
    const Index k = basis_.cols();
    // Vertices on facets that see (or are coplanar with) the new point span
    // every new facet together with it.
    std::vector<char> cand(local_.size(), 0);
    std::vector<Facet> kept;
    for (auto& f : facets_) {
      const double s = f.a.dot(w) - f.b;
      if (s >= -hull_tol_)
        for (std::size_t i = 0; i < local_.size(); ++i)
          if (std::abs(f.a.dot(local_[i]) - f.b) <= hull_tol_)
            cand[i] = 1;
      if (s <= hull_tol_)
        kept.push_back(std::move(f));
    }
    facets_ = std::move(kept);
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < cand.size(); ++i)
      if (cand[i])
        pool.push_back(i);

    points_.push_back(q);
    preimages_.push_back(x);
    local_.push_back(w);
    const std::size_t p = local_.size() - 1;

    // All (k−1)-subsets of the pool, each completed by the new point.
    const std::size_t r = static_cast<std::size_t>(k - 1);
    std::vector<std::size_t> sel(r);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
      if (depth == r) {
        std::vector<std::size_t> idx{p};
        for (std::size_t i : sel)
          idx.push_back(pool[i]);
        add_facet_through(idx);
        return;
      }
      for (std::size_t i = start; i + (r - depth) <= pool.size(); ++i) {
        sel[depth] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
  }

  bool linear_ = false;
  Matrix map_;
  Polytope domain_;
  Vector origin_;
  Matrix basis_;
  std::vector<Vector> points_, preimages_, local_;
  std::vector<Facet> facets_;
  Matrix normals_;
  Vector offsets_;
  double hull_tol_ = 1e-9;
};

} // namespace obp
