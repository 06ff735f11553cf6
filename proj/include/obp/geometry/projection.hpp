#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/polytope.hpp"
#include "obp/geometry/qp.hpp"

#include <vector>

namespace obp {

// argmin_{y ∈ P} ‖y − z‖².
inline Vector project_euclidean(const Vector& z, const Polytope& poly,
                                const Vector* warm_start = nullptr) {
  if (z.size() != poly.dim())
    throw std::invalid_argument("project_euclidean: dimension mismatch");
  if (poly.contains(z, 1e-12))
    return z;
  const Matrix h = Matrix::Identity(poly.dim(), poly.dim());
  const Vector g = -z;
  const QpResult r = solve_qp(h, g, poly, warm_start);
  if (r.status != QpStatus::Optimal)
    throw NumericalFailure("project_euclidean: projection QP did not reach optimality");
  return r.x;
}

// Projection measured on the first `k` coordinates only: returns a point x of
// the polytope whose head minimizes ‖x_{0:k} − z‖². Used for polytopes lifted
// with auxiliary variables.
inline Vector project_euclidean_head(const Vector& z, const Polytope& poly,
                                     const Vector* warm_start = nullptr) {
  const Index k = z.size();
  Matrix h = Matrix::Zero(poly.dim(), poly.dim());
  h.topLeftCorner(k, k).setIdentity();
  Vector g = Vector::Zero(poly.dim());
  g.head(k) = -z;
  const QpResult r = solve_qp(h, g, poly, warm_start);
  if (r.status != QpStatus::Optimal)
    throw NumericalFailure("project_euclidean_head: projection QP did not reach optimality");
  return r.x;
}

} // namespace obp
