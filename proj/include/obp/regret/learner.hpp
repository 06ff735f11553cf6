#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/rng.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/image_polytope.hpp"
#include "obp/geometry/projection.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <memory>

namespace obp {

enum class LearnerKind { OgdFull, BarrierBandit };

// State of a regret minimizer over Q = co ν(X). Steps are pure transitions
// on copies; the image polytope is shared and immutable.
//
// Internally the learner works in the local coordinates of Q's affine hull,
// where Q is full-dimensional; `z` is the play point in loss space.
struct LearnerState {
  LearnerKind kind = LearnerKind::OgdFull;
  std::shared_ptr<const ImagePolytope> image;
  std::shared_ptr<const Polytope> local; // {w : A w ≤ b}
  long horizon = 1;
  long round = 1;
  double eta = 0.0;
  Vector z; // z_t in loss coordinates
  Vector w; // OGD iterate / bandit FTRL center, local coordinates

  // Bandit only.
  Vector cum_estimate;     // Σ_τ f̃_τ in local coordinates
  Vector explore;          // ε λ_i^{1/2} e_i of the pending exploration
  double barrier_parameter = 0.0;
  CounterRng rng;
};

struct BanditOptions {
  // η = eta_constant · √(ϑ log T) / (k √T). The default minimizes the
  // standard bound ϑ log T / η + η k² T; 1/4 recovers the constant of the
  // original worst-case analysis.
  double eta_constant = 1.0;
};

namespace detail {

inline Vector vertex_centroid(const ImagePolytope& q) {
  Vector w = Vector::Zero(q.dim());
  for (const auto& v : q.local_vertices())
    w += v;
  return w / static_cast<double>(q.local_vertices().size());
}

// Hessian of −Σ log(b − A w).
inline Matrix barrier_hessian(const Matrix& a, const Vector& slack) {
  const Vector inv = slack.cwiseInverse();
  return a.transpose() * inv.cwiseAbs2().asDiagonal() * a;
}

// argmin_w  c·w − Σ log(b − A w)  by damped Newton from a strictly
// feasible start.
inline Vector barrier_minimize(const ImagePolytope& q, const Vector& c, Vector w) {
  const Matrix& a = q.facet_normals();
  const Vector& b = q.facet_offsets();
  // Each damped step lowers the objective by at least 0.25 − ln 1.25 ≈ 0.027,
  // so far-away minimizers (large η·estimate) need many steps; k is small.
  double best_dec = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < 20000; ++it) {
    const Vector slack = b - a * w;
    if (slack.minCoeff() <= 0.0)
      throw NumericalFailure("barrier_minimize: iterate left the polytope interior");
    const Vector grad = c + a.transpose() * slack.cwiseInverse();
    const Matrix hess = barrier_hessian(a, slack);
    Eigen::LLT<Matrix> llt(hess);
    if (llt.info() != Eigen::Success)
      throw NumericalFailure("barrier_minimize: barrier Hessian is singular");
    const Vector step = llt.solve(grad);
    const double dec = std::sqrt(std::max(grad.dot(step), 0.0));
    // dec²/2 bounds the suboptimality. Near the boundary the Hessian is badly
    // conditioned and roundoff puts a floor under dec; once dec is tiny and
    // full steps stop shrinking it, the iterate is optimal to working precision.
    if (dec < 1e-8)
      return w;
    if (dec < 1e-5) {
      if (dec < 0.5 * best_dec) {
        best_dec = dec;
        stalled = 0;
      } else if (++stalled >= 20) {
        return w;
      }
    }
    // Damped steps stay inside the Dikin ellipsoid, hence feasible.
    w -= (dec > 0.25 ? 1.0 / (1.0 + dec) : 1.0) * step;
  }
  throw NumericalFailure("barrier_minimize: Newton iteration did not converge");
}

// Picks the exploration direction for the next round and sets the play point.
inline void bandit_sample(LearnerState& s) {
  const ImagePolytope& q = *s.image;
  const Index k = q.dim();
  const Vector slack = q.facet_offsets() - q.facet_normals() * s.w;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(barrier_hessian(q.facet_normals(), slack));
  const Index i = static_cast<Index>(s.rng.below(static_cast<std::uint64_t>(k)));
  const double eps = s.rng.uniform() < 0.5 ? -1.0 : 1.0;
  const double lam = eig.eigenvalues()(i);
  if (!(lam > 0.0))
    throw NumericalFailure("barrier bandit: degenerate barrier Hessian");
  const Vector e = eig.eigenvectors().col(i);
  const Vector y = s.w + (eps / std::sqrt(lam)) * e;
  s.explore = (eps * std::sqrt(lam)) * e;
  s.z = q.to_global(y);
}

} // namespace detail

// Online gradient descent with η = √(D/T), started at the vertex centroid.
inline LearnerState make_ogd_learner(std::shared_ptr<const ImagePolytope> image, long horizon) {
  LearnerState s;
  s.kind = LearnerKind::OgdFull;
  s.horizon = horizon;
  s.eta = std::sqrt(static_cast<double>(image->ambient_dim()) / static_cast<double>(horizon));
  s.local = std::make_shared<const Polytope>(image->local_polytope());
  s.w = detail::vertex_centroid(*image);
  s.z = image->to_global(s.w);
  s.image = std::move(image);
  return s;
}

// z_{t+1} = Π_Q(z_t − η 1_d). The component of 1_d orthogonal to Q's affine
// hull does not change the projection, so the step is taken locally.
inline LearnerState ogd_full_step(LearnerState s, Index d) {
  if (s.kind != LearnerKind::OgdFull)
    throw std::logic_error("ogd_full_step: learner is not in full-feedback mode");
  const ImagePolytope& q = *s.image;
  if (d < 0 || d >= q.ambient_dim())
    throw std::out_of_range("ogd_full_step: loss index out of range");
  if (q.dim() > 0) {
    const Vector target = s.w - s.eta * q.basis().row(d).transpose();
    s.w = project_euclidean(target, *s.local, &s.w);
    s.z = q.to_global(s.w);
  }
  ++s.round;
  return s;
}

// Self-concordant-barrier bandit learner (FTRL with the log barrier of Q's
// facets, one-point estimates from Dikin-ellipsoid eigen-directions).
// ϑ is the number of facets and k = dim Q.
inline LearnerState make_barrier_bandit_learner(std::shared_ptr<const ImagePolytope> image,
                                                long horizon, std::uint64_t seed,
                                                const BanditOptions& opts = {}) {
  LearnerState s;
  s.kind = LearnerKind::BarrierBandit;
  s.horizon = horizon;
  s.rng = CounterRng(seed);
  const Index k = image->dim();
  s.local = std::make_shared<const Polytope>(image->local_polytope());
  s.cum_estimate = Vector::Zero(k);
  s.barrier_parameter = static_cast<double>(image->num_facets());
  if (k > 0) {
    const double t = static_cast<double>(horizon);
    s.eta = opts.eta_constant * std::sqrt(s.barrier_parameter * std::log(std::max(t, 1.0))) /
            (static_cast<double>(k) * std::sqrt(t));
    s.w = detail::barrier_minimize(*image, Vector::Zero(k), detail::vertex_centroid(*image));
  } else {
    s.w = Vector::Zero(0);
  }
  s.image = std::move(image);
  if (k > 0)
    detail::bandit_sample(s);
  else
    s.z = s.image->origin();
  return s;
}

// observed = L_{d_t}(x_t) for the play made from the pending sample.
inline LearnerState barrier_bandit_step(LearnerState s, double observed) {
  if (s.kind != LearnerKind::BarrierBandit)
    throw std::logic_error("barrier_bandit_step: learner is not in bandit mode");
  const Index k = s.image->dim();
  if (k > 0) {
    s.cum_estimate += (static_cast<double>(k) * observed) * s.explore;
    s.w = detail::barrier_minimize(*s.image, s.eta * s.cum_estimate, s.w);
    detail::bandit_sample(s);
  }
  ++s.round;
  return s;
}

} // namespace obp
