#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/rng.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/image_polytope.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace obp {

// Security game with N targets and D attacker types. The defender commits a
// coverage distribution x ∈ Δ_N; an attacker of type d attacks the target
// maximizing x_i U^c + (1 − x_i) U^u (lowest index on ties).
struct SecurityGame {
  int targets = 1;
  int types = 1;
  // Indexed [d·N + i].
  std::vector<double> def_covered, def_uncovered, att_covered, att_uncovered;

  std::size_t at(int d, int i) const { return static_cast<std::size_t>(d * targets + i); }

  int attacked(int d, const Vector& x) const {
    int best = 0;
    double bv = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < targets; ++i) {
      const double v = x(i) * att_covered[at(d, i)] + (1.0 - x(i)) * att_uncovered[at(d, i)];
      if (v > bv) {
        bv = v;
        best = i;
      }
    }
    return best;
  }

  double defender_utility(int d, const Vector& x) const {
    const int i = attacked(d, x);
    return x(i) * def_covered[at(d, i)] + (1.0 - x(i)) * def_uncovered[at(d, i)];
  }

  double loss(int d, const Vector& x) const { return 1.0 - defender_utility(d, x); }

  Vector loss_vector(const Vector& x) const {
    Vector v(types);
    for (int d = 0; d < types; ++d)
      v(d) = loss(d, x);
    return v;
  }

  void validate() const {
    const std::size_t sz = static_cast<std::size_t>(targets * types);
    if (targets < 1 || types < 1 || def_covered.size() != sz || def_uncovered.size() != sz ||
        att_covered.size() != sz || att_uncovered.size() != sz)
      throw InstanceValidationError("security game: payoff tables have the wrong size");
    for (const auto* v : {&def_covered, &def_uncovered, &att_covered, &att_uncovered})
      for (double u : *v)
        if (!(u >= 0.0 && u <= 1.0))
          throw InstanceValidationError("security game: payoffs must lie in [0, 1]");
    for (std::size_t j = 0; j < sz; ++j)
      if (def_covered[j] < def_uncovered[j] || att_covered[j] > att_uncovered[j])
        throw InstanceValidationError(
            "security game: coverage must help the defender and hurt the attacker");
  }
};

// Standard payoffs: for each (type, target) two uniforms, the larger one is
// the defender's covered value and the attacker's uncovered value.
inline SecurityGame random_security_game(int targets, int types, std::uint64_t seed) {
  if (targets < 1 || types < 1)
    throw ParamError("security game: targets and attacker types must be positive");
  CounterRng rng(seed);
  SecurityGame g;
  g.targets = targets;
  g.types = types;
  const std::size_t sz = static_cast<std::size_t>(targets * types);
  g.def_covered.resize(sz);
  g.def_uncovered.resize(sz);
  g.att_covered.resize(sz);
  g.att_uncovered.resize(sz);
  for (std::size_t j = 0; j < sz; ++j) {
    const double a = rng.uniform(), b = rng.uniform();
    g.def_covered[j] = std::max(a, b);
    g.def_uncovered[j] = std::min(a, b);
    const double c = rng.uniform(), e = rng.uniform();
    g.att_uncovered[j] = std::max(c, e);
    g.att_covered[j] = std::min(c, e);
  }
  return g;
}

// Points of Δ_N with coordinates in (1/resolution)·Z, in lexicographic order.
inline std::vector<Vector> simplex_grid(int dim, int resolution) {
  if (dim < 1 || resolution < 1)
    throw ParamError("simplex_grid: dimension and resolution must be positive");
  std::vector<Vector> out;
  std::vector<int> c(static_cast<std::size_t>(dim), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == dim - 1) {
      c[static_cast<std::size_t>(pos)] = left;
      Vector x(dim);
      for (int i = 0; i < dim; ++i)
        x(i) = static_cast<double>(c[static_cast<std::size_t>(i)]) / resolution;
      out.push_back(std::move(x));
      return;
    }
    for (int v = left; v >= 0; --v) {
      c[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, resolution);
  return out;
}

// co{(L_1(x), …, L_D(x)) : x on the grid}, each vertex remembering its x.
inline ImagePolytope security_image(const SecurityGame& g, int resolution) {
  std::vector<Vector> pts, pre;
  for (auto& x : simplex_grid(g.targets, resolution)) {
    pts.push_back(g.loss_vector(x));
    pre.push_back(std::move(x));
  }
  return ImagePolytope::from_points(pts, pre);
}

// min over the grid of Σ_d counts_d L_d(x).
inline double security_best_fixed_loss(const SecurityGame& g, const Vector& counts, int resolution) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : simplex_grid(g.targets, resolution))
    best = std::min(best, counts.dot(g.loss_vector(x)));
  return best;
}

} // namespace obp
