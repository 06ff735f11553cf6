#pragma once

#include "obp/core/config.hpp"
#include "obp/core/errors.hpp"
#include "obp/type_reporting/set_function.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace obp {

// f(R) + Σ_{r∈R} w_r.
inline double oracle_objective(const SetFunction& f, const std::vector<double>& w,
                               std::uint32_t mask) {
  double v = f(mask);
  for (std::size_t r = 0; r < w.size(); ++r)
    if (mask >> r & 1u)
      v += w[r];
  return v;
}

// A maximizer of f(R) + Σ_{r∈R} w_r. Anonymous functions are handled in
// O(n log n): for each size c the best set is the top-c weights. Tables are
// scanned exhaustively. Ties go to the first maximizer found.
inline std::uint32_t opt_oracle(const SetFunction& f, const std::vector<double>& w) {
  const int n = f.n();
  if (static_cast<int>(w.size()) != n)
    throw std::invalid_argument("opt_oracle: weight vector has the wrong length");
  if (f.kind() == SetFunctionKind::Anonymous) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return w[static_cast<std::size_t>(a)] > w[static_cast<std::size_t>(b)];
    });
    std::uint32_t mask = 0, best_mask = 0;
    double prefix = 0.0;
    double best = f.values()[0];
    for (int c = 1; c <= n; ++c) {
      const int r = order[static_cast<std::size_t>(c - 1)];
      prefix += w[static_cast<std::size_t>(r)];
      mask |= 1u << r;
      const double v = f.values()[static_cast<std::size_t>(c)] + prefix;
      if (v > best) {
        best = v;
        best_mask = mask;
      }
    }
    return best_mask;
  }
  if (n > caps::max_receivers_brute_force)
    throw std::invalid_argument("opt_oracle: exhaustive scan limited to 20 receivers");
  const std::uint32_t full = 1u << n;
  std::uint32_t best_mask = 0;
  double best = oracle_objective(f, w, 0);
  for (std::uint32_t s = 1; s < full; ++s) {
    const double v = oracle_objective(f, w, s);
    if (v > best) {
      best = v;
      best_mask = s;
    }
  }
  return best_mask;
}

} // namespace obp
