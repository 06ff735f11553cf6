#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/image_polytope.hpp"
#include "obp/geometry/lp.hpp"
#include "obp/geometry/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace obp {

// Online problem with finitely many linear losses: L_d(x) = M_d · x, x ∈ X.
struct FiniteLossProblem {
  Matrix loss_matrix; // D × N
  Polytope decision;  // X ⊂ R^N

  Index num_losses() const noexcept { return loss_matrix.rows(); }

  double loss(Index d, const Vector& x) const { return loss_matrix.row(d).dot(x); }

  // Every loss must take values in [0, 1] on X.
  void validate(double tol = 1e-9) const {
    if (loss_matrix.cols() != decision.dim())
      throw std::invalid_argument("FiniteLossProblem: loss matrix width does not match X");
    for (Index d = 0; d < num_losses(); ++d) {
      const Vector row = loss_matrix.row(d).transpose();
      const LpSolution hi = solve_lp(row, decision, Sense::Max);
      const LpSolution lo = solve_lp(row, decision, Sense::Min);
      if (!hi.optimal() || !lo.optimal() || hi.value > 1.0 + tol || lo.value < -tol)
        throw std::invalid_argument("FiniteLossProblem: loss " + std::to_string(d) +
                                    " leaves [0, 1] on the decision set");
    }
  }

  ImagePolytope image() const { return ImagePolytope::from_linear_map(loss_matrix, decision); }
};

// min_{z ∈ Q} Σ_d counts_d z_d: the cumulative loss of the best fixed decision.
// A linear objective is minimized at a vertex, so the V-form is scanned; this
// avoids LPs over near-degenerate facet systems.
inline double best_fixed_loss(const ImagePolytope& image, const Vector& counts) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& v : image.vertices())
    best = std::min(best, counts.dot(v));
  if (!std::isfinite(best))
    throw NumericalFailure("best_fixed_loss: image has no vertices");
  return best;
}

} // namespace obp
