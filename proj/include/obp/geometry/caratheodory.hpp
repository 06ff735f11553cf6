#pragma once

#include "obp/core/config.hpp"
#include "obp/core/errors.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/lp.hpp"
#include "obp/geometry/polytope.hpp"

#include <string>
#include <utility>
#include <vector>

namespace obp {

struct ConvexCombination {
  std::vector<Vector> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return points.size(); }

  Vector reconstruct() const {
    Vector z = Vector::Zero(points.empty() ? 0 : points.front().size());
    for (std::size_t i = 0; i < points.size(); ++i)
      z += weights[i] * points[i];
    return z;
  }
};

// When the image set is itself a polytope given by constraints, z is its own
// decomposition.
inline ConvexCombination caratheodory_decompose(const Vector& z, const Polytope& image) {
  if (!image.contains(z, tol::feas))
    throw NotAMember("caratheodory_decompose: point violates the polytope by " +
                     std::to_string(image.max_violation(z)));
  return {{z}, {1.0}};
}

// Convex weights (index, λ) expressing z over the given points, taken from a
// basic optimal solution of the elastic membership LP, so at most dim+1 of
// them are nonzero. Throws NotAMember when the residual exceeds 1e-7.
inline std::vector<std::pair<std::size_t, double>>
convex_weights(const Vector& z, const std::vector<Vector>& points) {
  const Index dim = z.size();
  const Index v = static_cast<Index>(points.size());
  if (v == 0)
    throw NotAMember("convex_weights: empty point set");
  // Variables: λ (v), e⁺ (dim), e⁻ (dim), all ≥ 0.
  Polytope lp = Polytope::nonnegative(v + 2 * dim);
  for (Index i = 0; i < dim; ++i) {
    Vector row = Vector::Zero(v + 2 * dim);
    for (Index j = 0; j < v; ++j)
      row(j) = points[static_cast<std::size_t>(j)](i);
    row(v + i) = 1.0;
    row(v + dim + i) = -1.0;
    lp.add_equality(std::move(row), z(i));
  }
  Vector ones = Vector::Zero(v + 2 * dim);
  ones.head(v).setOnes();
  lp.add_equality(std::move(ones), 1.0);
  Vector cost = Vector::Zero(v + 2 * dim);
  cost.tail(2 * dim).setOnes();
  const LpSolution sol = solve_lp(cost, lp, Sense::Min);
  if (!sol.optimal() || sol.value > 1e-7)
    throw NotAMember("convex_weights: point is not in the convex hull");

  std::vector<std::pair<std::size_t, double>> out;
  double total = 0.0;
  for (Index j = 0; j < v; ++j) {
    const double w = sol.point(j);
    if (w > 1e-13) {
      out.emplace_back(static_cast<std::size_t>(j), w);
      total += w;
    }
  }
  for (auto& [j, w] : out)
    w /= total;
  return out;
}

// Writes z as a convex combination of at most dim+1 of the given points.
inline ConvexCombination caratheodory_decompose(const Vector& z,
                                                const std::vector<Vector>& points) {
  ConvexCombination out;
  for (const auto& [j, w] : convex_weights(z, points)) {
    out.points.push_back(points[j]);
    out.weights.push_back(w);
  }
  return out;
}

// Some x in the domain with Mx = z, found by an elastic feasibility LP
// (a generalized inverse need not land in the domain).
inline Vector linear_preimage(const Matrix& m, const Vector& z, const Polytope& domain) {
  const Index n = domain.dim();
  const Index k = m.rows();
  if (m.cols() != n || z.size() != k)
    throw std::invalid_argument("linear_preimage: dimension mismatch");
  Polytope lp = domain.embedded(n + 2 * k);
  for (Index i = 0; i < 2 * k; ++i)
    lp.set_lower_bound(n + i, 0.0);
  for (Index i = 0; i < k; ++i) {
    Vector row = Vector::Zero(n + 2 * k);
    row.head(n) = m.row(i).transpose();
    row(n + i) = 1.0;
    row(n + k + i) = -1.0;
    lp.add_equality(std::move(row), z(i));
  }
  Vector cost = Vector::Zero(n + 2 * k);
  cost.tail(2 * k).setOnes();
  const LpSolution sol = solve_lp(cost, lp, Sense::Min);
  if (!sol.optimal())
    throw NotInImage("linear_preimage: domain is empty");
  const Vector x = sol.point.head(n);
  if ((m * x - z).lpNorm<Eigen::Infinity>() > tol::preimage)
    throw NotInImage("linear_preimage: point is not in the image of the domain");
  return x;
}

} // namespace obp
