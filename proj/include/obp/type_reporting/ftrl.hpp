#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/types.hpp"
#include "obp/geometry/ellipsoid.hpp"
#include "obp/geometry/lp.hpp"
#include "obp/geometry/projection.hpp"
#include "obp/geometry/qp.hpp"
#include "obp/persuasion/instance.hpp"
#include "obp/persuasion/utility.hpp"
#include "obp/type_reporting/g_value.hpp"
#include "obp/type_reporting/menu.hpp"
#include "obp/type_reporting/oracle.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <vector>

namespace obp {

// History of reported profiles, kept as counts per distinct profile
// (Σ_τ g^{k_τ} only depends on the counts).
class ProfileCounts {
public:
  void add(const TypeProfile& k, long times = 1) {
    counts_[k] += times;
    total_ += times;
  }
  long total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  std::vector<TypeProfile> profiles() const {
    std::vector<TypeProfile> out;
    for (const auto& [k, c] : counts_)
      out.push_back(k);
    return out;
  }
  const std::map<TypeProfile, long>& counts() const noexcept { return counts_; }
  long count(const TypeProfile& k) const {
    const auto it = counts_.find(k);
    return it == counts_.end() ? 0 : it->second;
  }

private:
  std::map<TypeProfile, long> counts_;
  long total_ = 0;
};

// Σ_P c_P g^P(menu).
inline double cumulative_g(const PersuasionInstance& inst, const ProfileCounts& h, const Vector& menu) {
  double v = 0.0;
  for (const auto& [k, c] : h.counts())
    v += static_cast<double>(c) * g_value_primal(inst, menu, k).value;
  return v;
}

inline double ftrl_objective(const PersuasionInstance& inst, const ProfileCounts& h, double alpha,
                             const Vector& menu) {
  const Index md = MenuLayout(inst).menu_dim();
  return cumulative_g(inst, h, menu) - menu.head(md).squaredNorm() / (2.0 * alpha);
}

// The menu problem lifted over joint schemes: variables [menu, l, ψ_P for
// each profile P], with (menu, l) ∈ L and ψ_{P,θ} a distribution over action
// profiles whose marginals are the entries φ^{r,P_r}_θ. Then
//   max Σ_P c_P Σ_θ μ_θ Σ_a ψ_{P,θ}(a) u_s(a,θ)
// over this polytope equals max over Λ of Σ_P c_P g^P.
struct LiftedMenuProgram {
  std::vector<TypeProfile> profiles;
  MenuLayout layout;
  long joint_size = 0; // d·|A|^n per profile
  Polytope polytope;

  Index psi_offset(std::size_t p) const {
    return layout.dim() + static_cast<Index>(p) * static_cast<Index>(joint_size);
  }
  Index dim() const { return polytope.dim(); }
};

inline LiftedMenuProgram build_lifted_program(const PersuasionInstance& inst,
                                              std::vector<TypeProfile> profiles) {
  LiftedMenuProgram prog;
  prog.profiles = std::move(profiles);
  prog.layout = MenuLayout(inst);
  const long np = inst.num_action_profiles();
  prog.joint_size = inst.d * np;
  const Index dim = prog.layout.dim() + static_cast<Index>(prog.profiles.size()) * prog.joint_size;
  const Polytope ext = build_extended_polytope(inst);
  prog.polytope = ext.embedded(dim);
  for (Index j = prog.layout.dim(); j < dim; ++j)
    prog.polytope.set_lower_bound(j, 0.0);
  const RadixCodec prof = inst.action_profiles();
  for (std::size_t p = 0; p < prog.profiles.size(); ++p) {
    const TypeProfile& k = prog.profiles[p];
    for (int th = 0; th < inst.d; ++th)
      for (int r = 0; r < inst.n; ++r)
        for (int b = 0; b < inst.actions; ++b) {
          Vector row = Vector::Zero(dim);
          for (long a = 0; a < np; ++a)
            if (prof.digit(a, r) == b)
              row(prog.psi_offset(p) + th * np + a) = 1.0;
          row(prog.layout.index(r, k[static_cast<std::size_t>(r)], th, b)) = -1.0;
          prog.polytope.add_equality(std::move(row), 0.0);
        }
  }
  return prog;
}

// Linear sender objective c with c·x = Σ_P c_P (joint utility of ψ_P).
inline Vector lifted_objective(const PersuasionInstance& inst, const LiftedMenuProgram& prog,
                               const ProfileCounts& h) {
  Vector c = Vector::Zero(prog.dim());
  const long np = inst.num_action_profiles();
  for (std::size_t p = 0; p < prog.profiles.size(); ++p) {
    const double w = static_cast<double>(h.count(prog.profiles[p]));
    for (int th = 0; th < inst.d; ++th)
      for (long a = 0; a < np; ++a)
        c(prog.psi_offset(p) + th * np + a) =
            w * inst.prior[static_cast<std::size_t>(th)] * inst.sender_util(a, th);
  }
  return c;
}

// Feasible lifted point from a menu in Λ: minimal extension, product joint schemes.
inline Vector lift_menu(const PersuasionInstance& inst, const LiftedMenuProgram& prog,
                        const Vector& menu) {
  Vector x = Vector::Zero(prog.dim());
  x.head(prog.layout.dim()) = extend_menu(inst, menu);
  const RadixCodec prof = inst.action_profiles();
  const long np = inst.num_action_profiles();
  for (std::size_t p = 0; p < prog.profiles.size(); ++p)
    for (int th = 0; th < inst.d; ++th)
      for (long a = 0; a < np; ++a) {
        double v = 1.0;
        for (int r = 0; r < inst.n; ++r)
          v *= menu(prog.layout.index(r, prog.profiles[p][static_cast<std::size_t>(r)], th,
                                      prof.digit(a, r)));
        x(prog.psi_offset(p) + th * np + a) = v;
      }
  return x;
}

enum class FtrlMethod { ExactQp, SupergradientAscent, DualEllipsoid };

struct FtrlOptions {
  FtrlMethod method = FtrlMethod::ExactQp;
  // Supergradient ascent.
  long max_iterations = 5000;
  double improvement_tol = 1e-7;
  double residual_tol = 1e-4;
  // Dual ellipsoid: stop when the certified gap is below accuracy·(1 + t).
  double ellipsoid_accuracy = 1e-9;
  long ellipsoid_max_iterations = 0;
};

struct FtrlResult {
  Vector menu;
  double objective = 0.0;
  double residual = 0.0; // stationarity residual (supergradient ascent) or certified gap (ellipsoid)
  long iterations = 0;
  bool converged = true;
  Vector lifted; // exact QP solution, reused as a warm start
};

// Reusable state across rounds: the lifted program for the current profile
// set and the last solution.
struct FtrlWarmStart {
  std::optional<LiftedMenuProgram> program;
  Vector lifted;
  Vector menu;
};

namespace detail {

inline const LiftedMenuProgram& ensure_program(const PersuasionInstance& inst, const ProfileCounts& h,
                                               FtrlWarmStart& warm) {
  const auto profiles = h.profiles();
  if (!warm.program || warm.program->profiles != profiles) {
    std::optional<LiftedMenuProgram> old = std::move(warm.program);
    warm.program = build_lifted_program(inst, profiles);
    if (warm.menu.size() > 0) {
      Vector x = lift_menu(inst, *warm.program, warm.menu);
      // Keep the extension and the joint schemes of profiles already present.
      if (old && warm.lifted.size() == old->dim()) {
        x.head(old->layout.dim()) = warm.lifted.head(old->layout.dim());
        for (std::size_t p = 0; p < old->profiles.size(); ++p)
          for (std::size_t q = 0; q < profiles.size(); ++q)
            if (profiles[q] == old->profiles[p])
              x.segment(warm.program->psi_offset(q), old->joint_size) =
                  warm.lifted.segment(old->psi_offset(p), old->joint_size);
      }
      warm.lifted = x;
    } else {
      warm.lifted.resize(0);
    }
  }
  return *warm.program;
}

inline FtrlResult ftrl_exact(const PersuasionInstance& inst, const ProfileCounts& h, double alpha,
                             FtrlWarmStart& warm) {
  const LiftedMenuProgram& prog = ensure_program(inst, h, warm);
  const Index md = prog.layout.menu_dim();
  Matrix hm = Matrix::Zero(prog.dim(), prog.dim());
  hm.topLeftCorner(md, md).diagonal().setConstant(1.0 / alpha);
  const Vector g = -lifted_objective(inst, prog, h);
  const Vector* ws = warm.lifted.size() == prog.dim() ? &warm.lifted : nullptr;
  const QpResult q = solve_qp(hm, g, prog.polytope, ws);
  if (q.status != QpStatus::Optimal)
    throw NumericalFailure("ftrl_update: lifted QP did not reach optimality");
  FtrlResult out;
  out.lifted = q.x;
  out.menu = q.x.head(md);
  out.objective = -q.value;
  out.iterations = q.iterations;
  warm.lifted = q.x;
  warm.menu = out.menu;
  return out;
}

// Euclidean projection of a menu onto Λ (through L).
inline Vector project_menu(const PersuasionInstance& inst, const Polytope& ext, const Vector& y,
                           Vector* warm_ext) {
  const Vector x = project_euclidean_head(y, ext, warm_ext && warm_ext->size() == ext.dim() ? warm_ext : nullptr);
  if (warm_ext)
    *warm_ext = x;
  return x.head(MenuLayout(inst).menu_dim());
}

inline FtrlResult ftrl_supergradient(const PersuasionInstance& inst, const ProfileCounts& h,
                                     double alpha, const FtrlOptions& opts, FtrlWarmStart& warm) {
  const MenuLayout lay(inst);
  const Polytope ext = build_extended_polytope(inst);
  Vector ext_warm;
  Vector phi = warm.menu.size() == lay.menu_dim()
                   ? warm.menu
                   : project_menu(inst, ext, Vector::Zero(lay.menu_dim()), &ext_warm);
  auto total_grad = [&](const Vector& m) {
    Vector g = Vector::Zero(lay.menu_dim());
    for (const auto& [k, c] : h.counts())
      g += static_cast<double>(c) * g_supergradient(inst, m, k);
    return g;
  };
  FtrlResult out;
  out.menu = phi;
  out.objective = ftrl_objective(inst, h, alpha, phi);
  double prev = out.objective;
  for (long it = 1; it <= opts.max_iterations; ++it) {
    const Vector g = total_grad(phi);
    const double step = alpha / static_cast<double>(it);
    phi = project_menu(inst, ext, phi + step * (g - phi / alpha), &ext_warm);
    const double obj = ftrl_objective(inst, h, alpha, phi);
    out.iterations = it;
    if (obj > out.objective) {
      out.objective = obj;
      out.menu = phi;
    }
    if (std::abs(obj - prev) < opts.improvement_tol && it > 1)
      break;
    prev = obj;
  }
  // Prox-gradient stationarity residual at the returned menu.
  const Vector g = total_grad(out.menu);
  out.residual = (out.menu - project_menu(inst, ext, alpha * g, &ext_warm)).norm() / alpha;
  out.converged = out.residual <= opts.residual_tol;
  warm.menu = out.menu;
  return out;
}

// Dual of the FTRL problem with only the marginal-consistency rows
// relaxed. With multipliers x_{r,θ,P} (binary actions, set functions):
//   h(x) = Σ_r max_{φ^r ∈ Λ_r} [⟨G_r(x), φ^r⟩ − ‖φ^r‖²/(2α)]
//        + Σ_{P,θ} c_P max_R {μ_θ f_θ(R) − Σ_{r∈R} x_{r,θ,P}},
// where G^{r,k}_θ(a₁) = Σ_{P : P_r = k} c_P x_{r,θ,P}. The first term is a
// Euclidean projection of αG_r onto Λ_r (polynomially many rows); the second
// is evaluated with the optimization oracle, whose maximizer is the most
// violated row of the relaxed constraint family. h is convex; the ellipsoid
// method minimizes it and the menu is recovered from stationarity,
// φ^r = Π_{Λ_r}(α G_r(x*)).
inline FtrlResult ftrl_dual_ellipsoid(const PersuasionInstance& inst, const ProfileCounts& h,
                                      double alpha, const FtrlOptions& opts, FtrlWarmStart& warm) {
  if (!inst.binary_set_function())
    throw std::invalid_argument("ftrl_update_dual_ellipsoid: binary set-function instance required");
  const MenuLayout lay(inst);
  const int n = inst.n, d = inst.d;
  const auto profiles = h.profiles();
  const int np = static_cast<int>(profiles.size());
  std::vector<Polytope> lr;
  std::vector<Vector> lr_warm(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r)
    lr.push_back(build_receiver_extended_polytope(inst, r));
  const Index rmd = lay.receiver_menu_dim();
  auto xi = [&](int r, int th, int p) { return static_cast<Index>((p * d + th) * n + r); };
  const Index dim = static_cast<Index>(n * d * np);

  auto gradient_menu = [&](const Vector& x, int r) {
    Vector g = Vector::Zero(rmd);
    for (int p = 0; p < np; ++p) {
      const double c = static_cast<double>(h.count(profiles[static_cast<std::size_t>(p)]));
      const int k = profiles[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)];
      for (int th = 0; th < d; ++th)
        g(lay.local_index(k, th, 1)) += c * x(xi(r, th, p));
    }
    return g;
  };
  auto receiver_menu = [&](const Vector& x, int r) {
    Vector& w = lr_warm[static_cast<std::size_t>(r)];
    const Vector z = project_euclidean_head(alpha * gradient_menu(x, r), lr[static_cast<std::size_t>(r)],
                                            w.size() > 0 ? &w : nullptr);
    w = z;
    return Vector(z.head(rmd));
  };

  double fmax = 0.0;
  for (const auto& f : inst.sender.per_state)
    for (double v : f.values())
      fmax = std::max(fmax, std::abs(v));

  auto oracle = [&](const Vector& x) {
    EllipsoidQuery q;
    q.feasible = true;
    q.normal = Vector::Zero(dim);
    double value = 0.0;
    for (int r = 0; r < n; ++r) {
      const Vector phi = receiver_menu(x, r);
      value += gradient_menu(x, r).dot(phi) - phi.squaredNorm() / (2.0 * alpha);
      for (int p = 0; p < np; ++p) {
        const double c = static_cast<double>(h.count(profiles[static_cast<std::size_t>(p)]));
        const int k = profiles[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)];
        for (int th = 0; th < d; ++th)
          q.normal(xi(r, th, p)) += c * phi(lay.local_index(k, th, 1));
      }
    }
    for (int p = 0; p < np; ++p) {
      const double c = static_cast<double>(h.count(profiles[static_cast<std::size_t>(p)]));
      for (int th = 0; th < d; ++th) {
        const double mu = inst.prior[static_cast<std::size_t>(th)];
        std::vector<double> w(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r)
          w[static_cast<std::size_t>(r)] = -x(xi(r, th, p)) / mu;
        const std::uint32_t rs = opt_oracle(inst.sender.per_state[static_cast<std::size_t>(th)], w);
        double y = mu * inst.sender.per_state[static_cast<std::size_t>(th)](rs);
        for (int r = 0; r < n; ++r)
          if (rs >> r & 1u) {
            y -= x(xi(r, th, p));
            q.normal(xi(r, th, p)) -= c;
          }
        value += c * y;
      }
    }
    q.value = value;
    return q;
  };

  FtrlResult out;
  const double scale = 1.0 + static_cast<double>(h.total());
  EllipsoidOptions eo;
  eo.radius = std::sqrt(static_cast<double>(std::max<Index>(dim, 1))) * (1.0 + fmax);
  eo.accuracy = opts.ellipsoid_accuracy * scale;
  const double ddim = static_cast<double>(std::max<Index>(dim, 1));
  eo.max_iterations = opts.ellipsoid_max_iterations > 0
                          ? opts.ellipsoid_max_iterations
                          : static_cast<long>(4.0 * ddim * (ddim + 1.0) *
                                              std::log(eo.radius / opts.ellipsoid_accuracy)) + 200;
  Vector xbest = Vector::Zero(dim);
  if (dim > 0) {
    const EllipsoidResult res = ellipsoid_minimize(Vector::Zero(dim), oracle, eo);
    if (!res.converged)
      throw EllipsoidIterationLimit("ftrl_update_dual_ellipsoid: iteration limit reached",
                                    res.best_value, res.lower_bound);
    xbest = res.best_point;
    out.iterations = res.iterations;
    out.residual = res.best_value - res.lower_bound;
  }
  out.menu = Vector::Zero(lay.menu_dim());
  for (int r = 0; r < n; ++r)
    out.menu.segment(r * rmd, rmd) = receiver_menu(xbest, r);
  out.objective = ftrl_objective(inst, h, alpha, out.menu);
  warm.menu = out.menu;
  return out;
}

} // namespace detail

// argmax_{φ∈Λ} Σ_τ g^{k_τ}(φ) − ‖φ‖²/(2α). With an empty history this is the
// minimum-norm menu.
inline FtrlResult ftrl_update(const PersuasionInstance& inst, const ProfileCounts& history,
                              double alpha, const FtrlOptions& opts = {},
                              FtrlWarmStart* warm = nullptr) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("ftrl_update: α must be positive");
  FtrlWarmStart local;
  FtrlWarmStart& w = warm ? *warm : local;
  switch (opts.method) {
  case FtrlMethod::SupergradientAscent:
    return detail::ftrl_supergradient(inst, history, alpha, opts, w);
  case FtrlMethod::DualEllipsoid:
    return detail::ftrl_dual_ellipsoid(inst, history, alpha, opts, w);
  case FtrlMethod::ExactQp:
  default:
    return detail::ftrl_exact(inst, history, alpha, w);
  }
}

inline FtrlResult ftrl_update_dual_ellipsoid(const PersuasionInstance& inst,
                                             const ProfileCounts& history, double alpha,
                                             FtrlOptions opts = {}, FtrlWarmStart* warm = nullptr) {
  opts.method = FtrlMethod::DualEllipsoid;
  return ftrl_update(inst, history, alpha, opts, warm);
}

struct MenuHindsight {
  double value = 0.0;
  Vector menu;
};

// max over Λ of Σ_P c_P g^P: the lifted LP without regularizer.
inline MenuHindsight best_menu_in_hindsight(const PersuasionInstance& inst, const ProfileCounts& h) {
  if (h.empty())
    throw std::invalid_argument("best_menu_in_hindsight: empty history");
  const LiftedMenuProgram prog = build_lifted_program(inst, h.profiles());
  const LpSolution s = solve_lp(lifted_objective(inst, prog, h), prog.polytope, Sense::Max);
  if (!s.optimal())
    throw NumericalFailure("best_menu_in_hindsight: lifted LP did not solve");
  return {s.value, s.point.head(prog.layout.menu_dim())};
}

} // namespace obp
