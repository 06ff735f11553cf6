#pragma once

#include "obp/geometry/lp.hpp"
#include "obp/persuasion/instance.hpp"
#include "obp/persuasion/polytope.hpp"
#include "obp/persuasion/scheme.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace obp {

using TypeProfile = std::vector<int>;

// c with c·φ = u_s(φ, k).
inline Vector sender_utility_coefficients(const PersuasionInstance& inst, const TypeProfile& k) {
  if (static_cast<int>(k.size()) != inst.n)
    throw std::invalid_argument("sender_utility: type profile has the wrong length");
  const DirectLayout lay(inst);
  Vector c(lay.dim());
  for (long code = 0; code < lay.signals_per_state(); ++code) {
    const long prof = lay.action_profile(code, k);
    for (int th = 0; th < inst.d; ++th)
      c(lay.index(th, code)) = inst.prior[static_cast<std::size_t>(th)] * inst.sender_util(prof, th);
  }
  return c;
}

inline double sender_utility_direct(const PersuasionInstance& inst, const Vector& scheme,
                                    const TypeProfile& k) {
  return sender_utility_coefficients(inst, k).dot(scheme);
}

// Loss rows are indexed by type profile: a single receiver uses every type,
// several receivers use a known set K̄ (canonicalized: sorted, duplicates dropped).
struct NuMode {
  std::vector<TypeProfile> profiles;

  static NuMode single_receiver(const PersuasionInstance& inst) {
    if (inst.n != 1)
      throw std::invalid_argument("NuMode::single_receiver: instance has several receivers");
    NuMode mode;
    for (int k = 0; k < inst.m; ++k)
      mode.profiles.push_back({k});
    return mode;
  }

  static NuMode multi_receiver(const PersuasionInstance& inst, std::vector<TypeProfile> known) {
    for (const auto& k : known) {
      if (static_cast<int>(k.size()) != inst.n)
        throw std::invalid_argument("NuMode::multi_receiver: profile has the wrong length");
      for (int t : k)
        if (t < 0 || t >= inst.m)
          throw std::invalid_argument("NuMode::multi_receiver: type out of range");
    }
    std::sort(known.begin(), known.end());
    known.erase(std::unique(known.begin(), known.end()), known.end());
    if (known.empty())
      throw std::invalid_argument("NuMode::multi_receiver: empty profile set");
    return {std::move(known)};
  }

  std::size_t index_of(const TypeProfile& k) const {
    const auto it = std::lower_bound(profiles.begin(), profiles.end(), k);
    if (it == profiles.end() || *it != k)
      throw std::invalid_argument("NuMode: type profile not in the known set");
    return static_cast<std::size_t>(it - profiles.begin());
  }
};

// M with (Mφ)_k = −u_s(φ, k).
inline Matrix build_nu_matrix(const PersuasionInstance& inst, const NuMode& mode) {
  Matrix m(static_cast<Index>(mode.profiles.size()), DirectLayout(inst).dim());
  for (std::size_t i = 0; i < mode.profiles.size(); ++i)
    m.row(static_cast<Index>(i)) = -sender_utility_coefficients(inst, mode.profiles[i]).transpose();
  return m;
}

// Losses 1 − u_s(φ, k), written linearly using Σ_θ μ_θ Σ_a φ_θ(a) = 1.
inline Matrix build_loss_matrix(const PersuasionInstance& inst, const NuMode& mode) {
  const DirectLayout lay(inst);
  Matrix m = build_nu_matrix(inst, mode);
  for (int th = 0; th < inst.d; ++th)
    m.middleCols(lay.index(th, 0), lay.signals_per_state()).array() +=
        inst.prior[static_cast<std::size_t>(th)];
  return m;
}

struct HindsightResult {
  double value = 0.0;
  Vector scheme;
};

// max over P of Σ_t u_s(φ, k_t).
inline HindsightResult best_fixed_in_hindsight(const PersuasionInstance& inst, const Polytope& p,
                                               const std::vector<TypeProfile>& sequence) {
  if (sequence.empty())
    throw std::invalid_argument("best_fixed_in_hindsight: empty sequence");
  std::vector<TypeProfile> distinct = sequence;
  std::sort(distinct.begin(), distinct.end());
  Vector obj = Vector::Zero(p.dim());
  for (std::size_t i = 0; i < distinct.size();) {
    std::size_t j = i;
    while (j < distinct.size() && distinct[j] == distinct[i])
      ++j;
    obj += static_cast<double>(j - i) * sender_utility_coefficients(inst, distinct[i]);
    i = j;
  }
  const LpSolution s = solve_lp(obj, p, Sense::Max);
  if (!s.optimal())
    throw NumericalFailure("best_fixed_in_hindsight: LP over P did not solve");
  return {s.value, s.point};
}

inline HindsightResult best_fixed_in_hindsight(const PersuasionInstance& inst,
                                               const std::vector<TypeProfile>& sequence) {
  return best_fixed_in_hindsight(inst, build_persuasive_polytope(inst), sequence);
}

} // namespace obp
