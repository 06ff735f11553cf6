#pragma once

#include "obp/core/config.hpp"
#include "obp/core/errors.hpp"
#include "obp/core/indexing.hpp"
#include "obp/core/rng.hpp"
#include "obp/core/types.hpp"
#include "obp/persuasion/instance.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace obp {

// Coordinates of a direct scheme: φ_θ(a) at θ·|A|^{mn} + code(a), where the
// recommendation for receiver r of type k is digit r·m + k of the code.
struct DirectLayout {
  int n = 1, m = 1, actions = 2, d = 1;

  explicit DirectLayout(const PersuasionInstance& inst)
      : n(inst.n), m(inst.m), actions(inst.actions), d(inst.d) {}

  long signals_per_state() const { return ipow(actions, m * n); }
  long receiver_signals() const { return ipow(actions, m); }
  Index dim() const { return static_cast<Index>(d * signals_per_state()); }
  Index index(int theta, long code) const {
    return static_cast<Index>(theta * signals_per_state() + code);
  }
  RadixCodec joint() const { return {actions, m * n}; }
  RadixCodec receiver() const { return {actions, m}; }

  // Receiver r's own signal (its m recommendations) inside a joint code.
  long receiver_signal(long code, int r) const {
    return (code / ipow(actions, m * (n - 1 - r))) % receiver_signals();
  }
  int recommendation(long code, int r, int k) const { return joint().digit(code, r * m + k); }

  // Action profile index (receiver 0 most significant) for a type profile.
  long action_profile(long code, const std::vector<int>& types) const {
    long profile = 0;
    for (int r = 0; r < n; ++r)
      profile = profile * actions + recommendation(code, r, types[static_cast<std::size_t>(r)]);
    return profile;
  }
};

// φ^r_θ(s) = Σ_{a : a_r = s} φ_θ(a), as a d × |A|^m matrix.
inline Matrix marginal_of(const PersuasionInstance& inst, const Vector& scheme, int r) {
  const DirectLayout lay(inst);
  if (scheme.size() != lay.dim())
    throw std::invalid_argument("marginal_of: scheme has the wrong length");
  Matrix out = Matrix::Zero(inst.d, lay.receiver_signals());
  for (int th = 0; th < inst.d; ++th)
    for (long c = 0; c < lay.signals_per_state(); ++c)
      out(th, lay.receiver_signal(c, r)) += scheme(lay.index(th, c));
  return out;
}

// ξ_θ ∝ μ_θ φ_θ(s) for a marginal scheme given as a d × |S| matrix.
inline Vector posterior(const Matrix& marginal, const std::vector<double>& prior, long signal) {
  Vector xi(marginal.rows());
  for (Index th = 0; th < marginal.rows(); ++th)
    xi(th) = prior[static_cast<std::size_t>(th)] * marginal(th, signal);
  const double total = xi.sum();
  if (!(total > tol::zero_prob))
    throw ZeroProbabilitySignal("posterior: signal has zero probability");
  return xi / total;
}

// Expected utility of each action for receiver r of type k at a belief
// (which need not be normalized).
inline Vector action_values(const PersuasionInstance& inst, const Vector& belief, int r, int k) {
  Vector v = Vector::Zero(inst.actions);
  for (int a = 0; a < inst.actions; ++a)
    for (int th = 0; th < inst.d; ++th)
      v(a) += belief(th) * inst.receiver_util(r, k, a, th);
  return v;
}

// All maximizers within the tie tolerance, ordered by the sender's
// preference (if given, higher first) and then by action index.
inline std::vector<int> best_response(const PersuasionInstance& inst, const Vector& belief, int r,
                                      int k, const std::vector<double>* sender_pref = nullptr) {
  const Vector v = action_values(inst, belief, r, k);
  const double best = v.maxCoeff();
  std::vector<int> out;
  for (int a = 0; a < inst.actions; ++a)
    if (v(a) >= best - tol::tie)
      out.push_back(a);
  if (sender_pref)
    std::stable_sort(out.begin(), out.end(), [&](int x, int y) {
      return (*sender_pref)[static_cast<std::size_t>(x)] > (*sender_pref)[static_cast<std::size_t>(y)];
    });
  return out;
}

// Uninformative direct scheme recommending each type its prior-best action.
inline Vector uninformative_scheme(const PersuasionInstance& inst) {
  const DirectLayout lay(inst);
  const Vector mu = Eigen::Map<const Vector>(inst.prior.data(), inst.d);
  std::vector<int> digits(static_cast<std::size_t>(inst.m * inst.n));
  for (int r = 0; r < inst.n; ++r)
    for (int k = 0; k < inst.m; ++k)
      digits[static_cast<std::size_t>(r * inst.m + k)] = best_response(inst, mu, r, k).front();
  const long code = lay.joint().encode(digits);
  Vector phi = Vector::Zero(lay.dim());
  for (int th = 0; th < inst.d; ++th)
    phi(lay.index(th, code)) = 1.0;
  return phi;
}

// Largest expected gain any receiver type can obtain by deviating from the
// recommendations of a direct scheme (exact inner maxima per signal).
inline double obedience_gain(const PersuasionInstance& inst, const Vector& scheme) {
  const DirectLayout lay(inst);
  double worst = 0.0;
  for (int r = 0; r < inst.n; ++r) {
    const Matrix marg = marginal_of(inst, scheme, r);
    for (int k = 0; k < inst.m; ++k) {
      double gain = 0.0;
      for (long s = 0; s < lay.receiver_signals(); ++s) {
        Vector w(inst.d);
        for (int th = 0; th < inst.d; ++th)
          w(th) = inst.prior[static_cast<std::size_t>(th)] * marg(th, s);
        const Vector v = action_values(inst, w, r, k);
        gain += v.maxCoeff() - v(lay.receiver().digit(s, k));
      }
      worst = std::max(worst, gain);
    }
  }
  return worst;
}

inline long sample_joint_signal(const PersuasionInstance& inst, const Vector& scheme, int theta,
                                CounterRng& rng) {
  const DirectLayout lay(inst);
  const long s = lay.signals_per_state();
  std::vector<double> w(static_cast<std::size_t>(s));
  for (long c = 0; c < s; ++c)
    w[static_cast<std::size_t>(c)] = std::max(scheme(lay.index(theta, c)), 0.0);
  return static_cast<long>(rng.categorical(w));
}

// Receivers' actions after a joint recommendation: each plays its
// recommendation when it is a best response at its posterior (the
// revelation-principle reading of sender-favorable tie-breaking); otherwise
// the sender-best best-response profile, ties broken lexicographically.
inline std::vector<int> simulate_actions(const PersuasionInstance& inst, const Vector& scheme,
                                         long code, const std::vector<int>& types) {
  const DirectLayout lay(inst);
  std::vector<std::vector<int>> br(static_cast<std::size_t>(inst.n));
  std::vector<int> out(static_cast<std::size_t>(inst.n));
  bool obedient = true;
  for (int r = 0; r < inst.n; ++r) {
    const int k = types[static_cast<std::size_t>(r)];
    const Matrix marg = marginal_of(inst, scheme, r);
    const Vector xi = posterior(marg, inst.prior, lay.receiver_signal(code, r));
    br[static_cast<std::size_t>(r)] = best_response(inst, xi, r, k);
    const int rec = lay.recommendation(code, r, k);
    const auto& set = br[static_cast<std::size_t>(r)];
    out[static_cast<std::size_t>(r)] = rec;
    if (std::find(set.begin(), set.end(), rec) == set.end())
      obedient = false;
  }
  if (obedient)
    return out;
  // Sender-best profile among best responses, weighting states by μ_θ φ_θ(code).
  Vector w(inst.d);
  for (int th = 0; th < inst.d; ++th)
    w(th) = inst.prior[static_cast<std::size_t>(th)] * scheme(lay.index(th, code));
  const RadixCodec prof = inst.action_profiles();
  double best = -1.0;
  std::vector<int> idx(static_cast<std::size_t>(inst.n), 0);
  for (;;) {
    std::vector<int> acts(static_cast<std::size_t>(inst.n));
    for (int r = 0; r < inst.n; ++r)
      acts[static_cast<std::size_t>(r)] =
          br[static_cast<std::size_t>(r)][static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
    const long p = prof.encode(acts);
    double v = 0.0;
    for (int th = 0; th < inst.d; ++th)
      v += w(th) * inst.sender_util(p, th);
    if (v > best + tol::tie) {
      best = v;
      out = acts;
    }
    int r = inst.n - 1;
    while (r >= 0 && ++idx[static_cast<std::size_t>(r)] ==
                         static_cast<int>(br[static_cast<std::size_t>(r)].size())) {
      idx[static_cast<std::size_t>(r)] = 0;
      --r;
    }
    if (r < 0)
      break;
  }
  return out;
}

} // namespace obp
