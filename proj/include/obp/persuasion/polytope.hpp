#pragma once

#include "obp/geometry/polytope.hpp"
#include "obp/persuasion/instance.hpp"
#include "obp/persuasion/scheme.hpp"

#include <vector>

namespace obp {

// P: direct persuasive schemes. For every receiver r, type k, own signal
// s ∈ A^m and deviation a′ ≠ s_k:
//   Σ_θ μ_θ φ^r_θ(s) (u^r_k(a′,θ) − u^r_k(s_k,θ)) ≤ 0,
// plus Σ_a φ_θ(a) = 1 for every θ and φ ≥ 0.
inline Polytope build_persuasive_polytope(const PersuasionInstance& inst) {
  inst.validate();
  const DirectLayout lay(inst);
  Polytope p = Polytope::nonnegative(lay.dim());
  const long per = lay.signals_per_state();
  for (int r = 0; r < inst.n; ++r) {
    // Joint codes grouped by receiver r's own signal.
    std::vector<std::vector<long>> groups(static_cast<std::size_t>(lay.receiver_signals()));
    for (long c = 0; c < per; ++c)
      groups[static_cast<std::size_t>(lay.receiver_signal(c, r))].push_back(c);
    for (int k = 0; k < inst.m; ++k)
      for (long s = 0; s < lay.receiver_signals(); ++s) {
        const int rec = lay.receiver().digit(s, k);
        for (int dev = 0; dev < inst.actions; ++dev) {
          if (dev == rec)
            continue;
          Vector row = Vector::Zero(lay.dim());
          for (int th = 0; th < inst.d; ++th) {
            const double coef = inst.prior[static_cast<std::size_t>(th)] *
                                (inst.receiver_util(r, k, dev, th) - inst.receiver_util(r, k, rec, th));
            if (coef == 0.0)
              continue;
            for (long c : groups[static_cast<std::size_t>(s)])
              row(lay.index(th, c)) = coef;
          }
          if (row.lpNorm<Eigen::Infinity>() > 0.0)
            p.add_inequality(std::move(row), 0.0);
        }
      }
  }
  for (int th = 0; th < inst.d; ++th) {
    Vector row = Vector::Zero(lay.dim());
    row.segment(lay.index(th, 0), per).setOnes();
    p.add_equality(std::move(row), 1.0);
  }
  return p;
}

// Largest violation of the obedience rows, evaluated signal by signal from
// the marginals (independent of the polytope rows).
inline double persuasiveness_violation(const PersuasionInstance& inst, const Vector& scheme) {
  const DirectLayout lay(inst);
  double worst = 0.0;
  for (int r = 0; r < inst.n; ++r) {
    const Matrix marg = marginal_of(inst, scheme, r);
    for (int k = 0; k < inst.m; ++k)
      for (long s = 0; s < lay.receiver_signals(); ++s) {
        const int rec = lay.receiver().digit(s, k);
        for (int dev = 0; dev < inst.actions; ++dev) {
          double v = 0.0;
          for (int th = 0; th < inst.d; ++th)
            v += inst.prior[static_cast<std::size_t>(th)] * marg(th, s) *
                 (inst.receiver_util(r, k, dev, th) - inst.receiver_util(r, k, rec, th));
          worst = std::max(worst, v);
        }
      }
  }
  for (int th = 0; th < inst.d; ++th)
    worst = std::max(worst, std::abs(scheme.segment(lay.index(th, 0), lay.signals_per_state()).sum() - 1.0));
  worst = std::max(worst, -scheme.minCoeff());
  return worst;
}

} // namespace obp
