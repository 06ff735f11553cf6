#pragma once

#include "obp/core/rng.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/caratheodory.hpp"
#include "obp/geometry/image_polytope.hpp"
#include "obp/regret/finite_loss.hpp"
#include "obp/regret/learner.hpp"

#include <utility>
#include <vector>

namespace obp {

// Reduction from a finite-loss problem to regret minimization over
// co ν(X): decompose the inner iterate, sample an atom, play its preimage.
struct Algorithm1State {
  LearnerState learner;
  CounterRng rng;                   // atom sampling
  bool exact_preimage_lp = false;   // play ν†(z) from the elastic LP instead of
                                    // the stored vertex preimages (linear maps)
};

struct Algorithm1Play {
  Vector z;                      // inner iterate z_t
  std::vector<ImageAtom> atoms;  // decomposition of z_t
  std::size_t atom = 0;          // sampled index
  Vector x;                      // played decision
};

inline Algorithm1State make_algorithm1(LearnerState learner, std::uint64_t seed) {
  return {std::move(learner), CounterRng(seed).split(0xa1), false};
}

// Decomposes z_t and samples the atom to play. Only the sampling stream advances.
inline Algorithm1Play algorithm1_sample(Algorithm1State& s) {
  const ImagePolytope& q = *s.learner.image;
  Algorithm1Play p;
  p.z = s.learner.z;
  p.atoms = q.decompose(p.z);
  if (p.atoms.size() > 1) {
    std::vector<double> w;
    for (const auto& a : p.atoms)
      w.push_back(a.weight);
    p.atom = s.rng.categorical(w);
  }
  if (s.exact_preimage_lp && q.linear())
    p.x = linear_preimage(q.map(), p.atoms[p.atom].point, q.domain());
  else
    p.x = p.atoms[p.atom].preimage;
  return p;
}

inline void algorithm1_observe_index(Algorithm1State& s, Index d) {
  s.learner = ogd_full_step(std::move(s.learner), d);
}

inline void algorithm1_observe_value(Algorithm1State& s, double value) {
  s.learner = barrier_bandit_step(std::move(s.learner), value);
}

struct Algorithm1Round {
  Algorithm1Play play;
  double loss = 0.0; // L_{d_t}(x_t)
};

// One round against loss index d. In bandit mode the learner only receives
// the scalar L_d(x_t).
inline std::pair<Algorithm1Round, Algorithm1State>
algorithm1_round(const FiniteLossProblem& problem, Algorithm1State s, Index d) {
  Algorithm1Round r;
  r.play = algorithm1_sample(s);
  r.loss = problem.loss(d, r.play.x);
  if (s.learner.kind == LearnerKind::OgdFull)
    algorithm1_observe_index(s, d);
  else
    algorithm1_observe_value(s, r.loss);
  return {std::move(r), std::move(s)};
}

} // namespace obp
