#pragma once

#include "obp/core/types.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace obp {

// Answer of a separation/evaluation oracle at the ellipsoid center c.
//  - infeasible: every feasible v satisfies normal·(v − c) ≤ −depth (depth ≥ 0);
//  - feasible:   value = f(c) and gradient is a subgradient of f at c.
struct EllipsoidQuery {
  bool feasible = false;
  Vector normal;
  double depth = 0.0;
  double value = 0.0;
};

struct EllipsoidResult {
  bool found_feasible = false;
  bool converged = false; // certified gap ≤ requested accuracy
  Vector best_point;
  double best_value = std::numeric_limits<double>::infinity();
  double lower_bound = -std::numeric_limits<double>::infinity();
  long iterations = 0;
};

struct EllipsoidOptions {
  double radius = 1.0;
  long max_iterations = 10000;
  double accuracy = 1e-6;
};

// Central-cut ellipsoid method with deep cuts, minimizing a convex function
// over the set described by the oracle. Objective cuts are deep cuts at the
// incumbent value; every feasible center gives the lower bound
// f(c) − √(gᵀPg), valid because the ellipsoid always contains the minimizer.
inline EllipsoidResult ellipsoid_minimize(const Vector& center,
                                          const std::function<EllipsoidQuery(const Vector&)>& oracle,
                                          const EllipsoidOptions& opts) {
  const Index n = center.size();
  const double dn = static_cast<double>(n);
  Vector c = center;
  Matrix p = Matrix::Identity(n, n) * (opts.radius * opts.radius);
  EllipsoidResult res;
  for (long it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    const EllipsoidQuery q = oracle(c);
    Vector a = q.normal;
    double depth = q.depth;
    if (q.feasible) {
      res.found_feasible = true;
      if (q.value < res.best_value) {
        res.best_value = q.value;
        res.best_point = c;
      }
      const double width = std::sqrt(std::max(a.dot(p * a), 0.0));
      res.lower_bound = std::max(res.lower_bound, q.value - width);
      if (res.best_value - res.lower_bound <= opts.accuracy) {
        res.converged = true;
        return res;
      }
      depth = q.value - res.best_value;
    }
    const Vector pa = p * a;
    const double apa = a.dot(pa);
    if (!(apa > 0.0) || !std::isfinite(apa))
      return res;
    const double root = std::sqrt(apa);
    const double alpha = depth / root;
    if (alpha >= 1.0)
      return res; // the remaining region is empty
    const Vector bt = pa / root;
    if (n == 1) {
      c -= 0.5 * (1.0 + alpha) * bt;
      p *= 0.25 * (1.0 - alpha) * (1.0 - alpha);
      continue;
    }
    const double tau = (1.0 + dn * alpha) / (dn + 1.0);
    const double delta = dn * dn * (1.0 - alpha * alpha) / (dn * dn - 1.0);
    const double sigma = 2.0 * (1.0 + dn * alpha) / ((dn + 1.0) * (1.0 + alpha));
    c -= tau * bt;
    p = delta * (p - sigma * bt * bt.transpose());
    p = 0.5 * (p + p.transpose()).eval();
  }
  return res;
}

} // namespace obp
