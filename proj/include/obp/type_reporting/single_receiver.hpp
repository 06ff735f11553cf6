#pragma once

#include "obp/persuasion/instance.hpp"
#include "obp/regret/algorithm1.hpp"
#include "obp/regret/finite_loss.hpp"
#include "obp/regret/learner.hpp"
#include "obp/type_reporting/menu.hpp"

#include <memory>
#include <stdexcept>

namespace obp {

// Single receiver with type reporting as a finite-loss problem over L:
// loss k is 1 − u_s(φ^k, k) = Σ_θ μ_θ Σ_a φ^k_θ(a)(1 − u_s(a,θ)); extension
// coordinates get zero columns.
inline FiniteLossProblem type_reporting_loss_problem(const PersuasionInstance& inst) {
  if (inst.n != 1)
    throw std::invalid_argument("type_reporting_loss_problem: single receiver required");
  const MenuLayout lay(inst);
  FiniteLossProblem p;
  p.decision = build_extended_polytope_L(inst);
  p.loss_matrix = Matrix::Zero(inst.m, lay.dim());
  for (int k = 0; k < inst.m; ++k)
    for (int th = 0; th < inst.d; ++th)
      for (int a = 0; a < inst.actions; ++a)
        p.loss_matrix(k, lay.index(0, k, th, a)) =
            inst.prior[static_cast<std::size_t>(th)] * (1.0 - inst.sender_util(a, th));
  return p;
}

struct SingleTypeReportingLearner {
  FiniteLossProblem problem;
  std::shared_ptr<const ImagePolytope> image;
  Algorithm1State state;
};

// The sampled reduction with full feedback (the reported type) over L.
inline SingleTypeReportingLearner single_type_reporting_learner(const PersuasionInstance& inst,
                                                                long horizon, std::uint64_t seed) {
  SingleTypeReportingLearner out;
  out.problem = type_reporting_loss_problem(inst);
  out.image = std::make_shared<const ImagePolytope>(out.problem.image());
  out.state = make_algorithm1(make_ogd_learner(out.image, horizon), seed);
  return out;
}

} // namespace obp
