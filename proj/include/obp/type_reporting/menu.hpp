#pragma once

#include "obp/core/config.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/polytope.hpp"
#include "obp/persuasion/instance.hpp"
#include "obp/persuasion/scheme.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace obp {

// Coordinates of a menu φ^{r,k}_θ(a) at ((r·m + k)·d + θ)·|A| + a, followed
// (in the extended space) by l^{r,k,k′}_a at menu_dim + ((r·m + k)·m + k′)·|A| + a:
// the best utility a type-k receiver can get from recommendation a of entry k′.
struct MenuLayout {
  int n = 1, m = 1, d = 1, actions = 2;

  MenuLayout() = default;
  explicit MenuLayout(const PersuasionInstance& inst)
      : n(inst.n), m(inst.m), d(inst.d), actions(inst.actions) {}

  Index receiver_menu_dim() const { return static_cast<Index>(m * d * actions); }
  Index receiver_ext_dim() const { return static_cast<Index>(m * m * actions); }
  Index menu_dim() const { return n * receiver_menu_dim(); }
  Index ext_dim() const { return n * receiver_ext_dim(); }
  Index dim() const { return menu_dim() + ext_dim(); }

  Index index(int r, int k, int theta, int a) const {
    return static_cast<Index>(((r * m + k) * d + theta) * actions + a);
  }
  Index ext_index(int r, int k, int kp, int a) const {
    return menu_dim() + static_cast<Index>(((r * m + k) * m + kp) * actions + a);
  }
  // Same coordinates inside a single receiver's block [φ^r, l^r].
  Index local_index(int k, int theta, int a) const {
    return static_cast<Index>((k * d + theta) * actions + a);
  }
  Index local_ext_index(int k, int kp, int a) const {
    return receiver_menu_dim() + static_cast<Index>((k * m + kp) * actions + a);
  }
};

namespace detail {

// Rows of L for receiver r written over the block layout [φ^r, l^r]
// starting at the given offsets of a polytope of dimension `dim`.
inline void add_receiver_rows(Polytope& p, const PersuasionInstance& inst, int r, Index menu_off,
                              Index ext_off) {
  const MenuLayout lay(inst);
  const Index dim = p.dim();
  auto phi = [&](int k, int th, int a) { return menu_off + lay.local_index(k, th, a); };
  auto ell = [&](int k, int kp, int a) {
    return ext_off + lay.local_ext_index(k, kp, a) - lay.receiver_menu_dim();
  };
  // Normalization of every marginal scheme.
  for (int k = 0; k < inst.m; ++k)
    for (int th = 0; th < inst.d; ++th) {
      Vector row = Vector::Zero(dim);
      for (int a = 0; a < inst.actions; ++a)
        row(phi(k, th, a)) = 1.0;
      p.add_equality(std::move(row), 1.0);
    }
  for (int k = 0; k < inst.m; ++k)
    for (int kp = 0; kp < inst.m; ++kp) {
      // Value of a deviation a′ after recommendation a of entry k′ is a lower bound on l.
      for (int a = 0; a < inst.actions; ++a)
        for (int dev = 0; dev < inst.actions; ++dev) {
          Vector row = Vector::Zero(dim);
          for (int th = 0; th < inst.d; ++th)
            row(phi(kp, th, a)) =
                inst.prior[static_cast<std::size_t>(th)] * inst.receiver_util(r, k, dev, th);
          row(ell(k, kp, a)) = -1.0;
          p.add_inequality(std::move(row), 0.0);
        }
      // Truthful obedient utility dominates the best use of any entry.
      Vector row = Vector::Zero(dim);
      for (int a = 0; a < inst.actions; ++a) {
        row(ell(k, kp, a)) = 1.0;
        for (int th = 0; th < inst.d; ++th)
          row(phi(k, th, a)) -=
              inst.prior[static_cast<std::size_t>(th)] * inst.receiver_util(r, k, a, th);
      }
      p.add_inequality(std::move(row), 0.0);
    }
}

} // namespace detail

// L for all receivers (a product over receivers), over [menu, extension].
inline Polytope build_extended_polytope(const PersuasionInstance& inst) {
  inst.validate();
  const MenuLayout lay(inst);
  Polytope p = Polytope::nonnegative(lay.dim());
  for (int r = 0; r < inst.n; ++r)
    detail::add_receiver_rows(p, inst, r, r * lay.receiver_menu_dim(),
                              lay.menu_dim() + r * lay.receiver_ext_dim());
  return p;
}

// L of a single-receiver instance.
inline Polytope build_extended_polytope_L(const PersuasionInstance& inst) {
  if (inst.n != 1)
    throw std::invalid_argument("build_extended_polytope_L: single receiver required");
  return build_extended_polytope(inst);
}

// L_r over receiver r's block [φ^r, l^r].
inline Polytope build_receiver_extended_polytope(const PersuasionInstance& inst, int r) {
  const MenuLayout lay(inst);
  Polytope p = Polytope::nonnegative(lay.receiver_menu_dim() + lay.receiver_ext_dim());
  detail::add_receiver_rows(p, inst, r, 0, lay.receiver_menu_dim());
  return p;
}

// Expected utility Σ_θ μ_θ φ^{r,k′}_θ(a) u^r_k(a′, θ) of playing a′ after
// recommendation a of entry k′, for a receiver of type k.
inline double entry_value(const PersuasionInstance& inst, const Vector& menu, int r, int k, int kp,
                          int a, int dev) {
  const MenuLayout lay(inst);
  double v = 0.0;
  for (int th = 0; th < inst.d; ++th)
    v += inst.prior[static_cast<std::size_t>(th)] * menu(lay.index(r, kp, th, a)) *
         inst.receiver_util(r, k, dev, th);
  return v;
}

// Smallest extension making (menu, l) satisfy the deviation rows.
inline Vector extend_menu(const PersuasionInstance& inst, const Vector& menu) {
  const MenuLayout lay(inst);
  Vector x = Vector::Zero(lay.dim());
  x.head(lay.menu_dim()) = menu.head(lay.menu_dim());
  for (int r = 0; r < inst.n; ++r)
    for (int k = 0; k < inst.m; ++k)
      for (int kp = 0; kp < inst.m; ++kp)
        for (int a = 0; a < inst.actions; ++a) {
          double best = 0.0;
          for (int dev = 0; dev < inst.actions; ++dev)
            best = std::max(best, entry_value(inst, menu, r, k, kp, a, dev));
          x(lay.ext_index(r, k, kp, a)) = best;
        }
  return x;
}

// Largest violation of IC written with explicit inner maxima: for every
// receiver, true type k and entry k′ (k′ = k gives persuasiveness),
//   Σ_a max_{a′} Σ_θ μ_θ φ^{r,k′}_θ(a) u_k(a′,θ) ≤ Σ_a Σ_θ μ_θ φ^{r,k}_θ(a) u_k(a,θ),
// together with normalization and nonnegativity.
inline double ic_violation(const PersuasionInstance& inst, const Vector& menu) {
  const MenuLayout lay(inst);
  double worst = std::max(0.0, -menu.head(lay.menu_dim()).minCoeff());
  for (int r = 0; r < inst.n; ++r)
    for (int k = 0; k < inst.m; ++k) {
      for (int th = 0; th < inst.d; ++th) {
        double s = 0.0;
        for (int a = 0; a < inst.actions; ++a)
          s += menu(lay.index(r, k, th, a));
        worst = std::max(worst, std::abs(s - 1.0));
      }
      double truthful = 0.0;
      for (int a = 0; a < inst.actions; ++a)
        truthful += entry_value(inst, menu, r, k, k, a, a);
      for (int kp = 0; kp < inst.m; ++kp) {
        double lie = 0.0;
        for (int a = 0; a < inst.actions; ++a) {
          double best = entry_value(inst, menu, r, k, kp, a, 0);
          for (int dev = 1; dev < inst.actions; ++dev)
            best = std::max(best, entry_value(inst, menu, r, k, kp, a, dev));
          lie += best;
        }
        worst = std::max(worst, lie - truthful);
      }
    }
  return worst;
}

// Expected utility of a type-k receiver r that selects entry k′ and then
// acts on each recommendation like a protocol receiver: it follows the
// recommendation when that is a best response at its posterior, and
// otherwise plays its first best response.
inline double report_value(const PersuasionInstance& inst, const Vector& menu, int r, int k, int kp) {
  const MenuLayout lay(inst);
  double total = 0.0;
  for (int a = 0; a < inst.actions; ++a) {
    Vector w(inst.d);
    for (int th = 0; th < inst.d; ++th)
      w(th) = inst.prior[static_cast<std::size_t>(th)] * menu(lay.index(r, kp, th, a));
    if (w.sum() <= tol::zero_prob)
      continue;
    const auto br = best_response(inst, w / w.sum(), r, k);
    const int act = std::find(br.begin(), br.end(), a) != br.end() ? a : br.front();
    for (int th = 0; th < inst.d; ++th)
      total += w(th) * inst.receiver_util(r, k, act, th);
  }
  return total;
}

// Type a strategic receiver reports: the best entry, ties resolved in favor
// of the truth and then the lowest index.
inline int strategic_report(const PersuasionInstance& inst, const Vector& menu, int r, int k) {
  const double truthful = report_value(inst, menu, r, k, k);
  int best_k = k;
  double best = truthful;
  for (int kp = 0; kp < inst.m; ++kp) {
    const double v = report_value(inst, menu, r, k, kp);
    if (v > best + tol::tie) {
      best = v;
      best_k = kp;
    }
  }
  return best_k;
}

// Largest gain any receiver type obtains by misreporting (exhaustive).
inline double misreport_gain(const PersuasionInstance& inst, const Vector& menu) {
  double worst = 0.0;
  for (int r = 0; r < inst.n; ++r)
    for (int k = 0; k < inst.m; ++k) {
      const double truthful = report_value(inst, menu, r, k, k);
      for (int kp = 0; kp < inst.m; ++kp)
        worst = std::max(worst, report_value(inst, menu, r, k, kp) - truthful);
    }
  return worst;
}

// Menu entry φ^{r,k} as a d × |A| matrix.
inline Matrix menu_entry(const PersuasionInstance& inst, const Vector& menu, int r, int k) {
  const MenuLayout lay(inst);
  Matrix out(inst.d, inst.actions);
  for (int th = 0; th < inst.d; ++th)
    for (int a = 0; a < inst.actions; ++a)
      out(th, a) = menu(lay.index(r, k, th, a));
  return out;
}

} // namespace obp
