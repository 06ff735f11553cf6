#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/indexing.hpp"
#include "obp/core/rng.hpp"
#include "obp/geometry/image_polytope.hpp"
#include "obp/harness/config.hpp"
#include "obp/harness/generate.hpp"
#include "obp/harness/instance_io.hpp"
#include "obp/harness/security_game.hpp"
#include "obp/persuasion/instance.hpp"
#include "obp/persuasion/polytope.hpp"
#include "obp/persuasion/scheme.hpp"
#include "obp/persuasion/utility.hpp"
#include "obp/regret/algorithm1.hpp"
#include "obp/regret/finite_loss.hpp"
#include "obp/regret/learner.hpp"
#include "obp/type_reporting/algorithm2.hpp"
#include "obp/type_reporting/ftrl.hpp"
#include "obp/type_reporting/menu.hpp"
#include "obp/type_reporting/single_receiver.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace obp {

// What one round produced. `utility` is the sender's expected utility of the
// committed decision against the round's (reported) types; `realized` is the
// utility of the simulated state, signal and actions.
struct RoundOutcome {
  Vector decision;
  int key = 0;      // index of the (reported) type profile in the environment's alphabet
  int state = -1;   // sampled state, −1 when the environment has none
  double utility = 0.0;
  double realized = 0.0;
  double deviation_gain = 0.0; // largest profitable deviation from recommendations
  double misreport_gain = 0.0; // largest profitable misreport (type reporting)
  bool misreported = false;
};

// A repeated game against an oblivious adversary. The adversary draws
// indices into `adversary_support()`, a list of keys of the type alphabet;
// hindsight depends only on how often each key was played.
class Environment {
public:
  virtual ~Environment() = default;

  virtual int num_keys() const = 0;
  virtual std::string key_label(int key) const = 0;
  virtual std::vector<int> adversary_support() const {
    std::vector<int> all(static_cast<std::size_t>(num_keys()));
    for (int i = 0; i < num_keys(); ++i)
      all[static_cast<std::size_t>(i)] = i;
    return all;
  }

  // Commit, simulate against the true key, deliver feedback.
  virtual RoundOutcome play_round(int key) = 0;

  // max over fixed decisions of the cumulative expected utility.
  virtual double best_fixed_utility(const std::vector<long>& counts) const = 0;

  // Regret bound of the configured algorithm at horizon T, and its formula.
  virtual double bound(long horizon) const = 0;
  virtual std::string bound_formula() const = 0;

  // Environment-specific summary fields.
  virtual Json details(const std::vector<long>& /*counts*/) const { return Json::object(); }

  int key_of(const std::string& label) const {
    for (int k = 0; k < num_keys(); ++k)
      if (key_label(k) == label)
        return k;
    throw ConfigError("unknown type label '" + label + "'");
  }
};

inline std::string profile_label(const TypeProfile& k) {
  std::string s;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (i)
      s += '-';
    s += std::to_string(k[i]);
  }
  return s;
}

inline double full_bound(int num_losses, long horizon) {
  return std::sqrt(static_cast<double>(num_losses) * static_cast<double>(horizon));
}

inline double bandit_bound(int num_losses, long horizon) {
  const double t = static_cast<double>(horizon);
  return 16.0 * std::pow(static_cast<double>(num_losses), 1.5) * std::sqrt(t * std::log(t));
}

namespace detail {

// Action of a receiver of type k recommended `rec` by a marginal scheme
// (d × |S| matrix, signal s): obey when `rec` is a best response at the
// posterior, otherwise the sender-preferred best response.
inline int respond(const PersuasionInstance& inst, const Matrix& marginal, long signal, int r,
                   int k, int rec, const std::vector<double>& sender_pref) {
  const Vector xi = posterior(marginal, inst.prior, signal);
  const auto br = best_response(inst, xi, r, k, &sender_pref);
  return std::find(br.begin(), br.end(), rec) != br.end() ? rec : br.front();
}

inline std::vector<double> single_sender_pref(const PersuasionInstance& inst, int theta) {
  std::vector<double> pref(static_cast<std::size_t>(inst.actions));
  for (int a = 0; a < inst.actions; ++a)
    pref[static_cast<std::size_t>(a)] = inst.sender_util(a, theta);
  return pref;
}

inline int sample_state(const PersuasionInstance& inst, CounterRng& rng) {
  return static_cast<int>(rng.categorical(inst.prior));
}

} // namespace detail

// The sampled reduction over the image of a decision set: full feedback observes the
// loss index, partial feedback only the scalar loss 1 − realized utility.
class ReductionEnvironment : public Environment {
public:
  RoundOutcome play_round(int key) override {
    const Algorithm1Play p = algorithm1_sample(state_);
    RoundOutcome o = simulate(key, p.x);
    if (bandit_)
      algorithm1_observe_value(state_, 1.0 - o.realized);
    else
      algorithm1_observe_index(state_, o.key);
    return o;
  }

  double best_fixed_utility(const std::vector<long>& counts) const override {
    Vector c(static_cast<Index>(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i)
      c(static_cast<Index>(i)) = static_cast<double>(counts[i]);
    return c.sum() - best_fixed_loss(*image_, c);
  }

  double bound(long horizon) const override {
    return bandit_ ? bandit_bound(num_keys(), horizon) : full_bound(num_keys(), horizon);
  }
  std::string bound_formula() const override {
    return bandit_ ? "16 D^1.5 sqrt(T log T)" : "sqrt(D T)";
  }

  const ImagePolytope& image() const { return *image_; }

protected:
  void init(std::shared_ptr<const ImagePolytope> image, const ExperimentConfig& cfg) {
    image_ = std::move(image);
    bandit_ = cfg.feedback == FeedbackMode::Partial;
    const CounterRng root(cfg.seed);
    LearnerState learner =
        bandit_ ? make_barrier_bandit_learner(image_, cfg.horizon, root.split(4).next_u64(),
                                              BanditOptions{cfg.tolerances.bandit_eta_constant})
                : make_ogd_learner(image_, cfg.horizon);
    state_ = make_algorithm1(std::move(learner), root.split(3).next_u64());
    nature_ = root.split(2);
  }

  // Expected and realized outcome of playing x against the key.
  virtual RoundOutcome simulate(int key, const Vector& x) = 0;

  std::shared_ptr<const ImagePolytope> image_;
  Algorithm1State state_;
  CounterRng nature_;
  bool bandit_ = false;
};

class FiniteLossEnvironment : public ReductionEnvironment {
public:
  FiniteLossEnvironment(FiniteLossProblem problem, const ExperimentConfig& cfg)
      : problem_(std::move(problem)) {
    init(std::make_shared<const ImagePolytope>(problem_.image()), cfg);
  }

  int num_keys() const override { return static_cast<int>(problem_.num_losses()); }
  std::string key_label(int key) const override { return std::to_string(key); }
  const FiniteLossProblem& problem() const { return problem_; }

protected:
  RoundOutcome simulate(int key, const Vector& x) override {
    RoundOutcome o;
    o.decision = x;
    o.key = key;
    o.utility = 1.0 - problem_.loss(key, x);
    o.realized = o.utility;
    return o;
  }

private:
  FiniteLossProblem problem_;
};

// Persuasion with known type profiles (one receiver: every type; several
// receivers: the set K̄), the sampled reduction over the persuasive polytope P.
class PersuasionEnvironment : public ReductionEnvironment {
public:
  PersuasionEnvironment(PersuasionInstance inst, NuMode mode, const ExperimentConfig& cfg)
      : inst_(std::move(inst)), mode_(std::move(mode)) {
    problem_.decision = build_persuasive_polytope(inst_);
    problem_.loss_matrix = build_loss_matrix(inst_, mode_);
    init(std::make_shared<const ImagePolytope>(problem_.image()), cfg);
  }

  int num_keys() const override { return static_cast<int>(mode_.profiles.size()); }
  std::string key_label(int key) const override {
    return profile_label(mode_.profiles[static_cast<std::size_t>(key)]);
  }
  const PersuasionInstance& instance() const { return inst_; }
  const NuMode& mode() const { return mode_; }
  const FiniteLossProblem& problem() const { return problem_; }

protected:
  RoundOutcome simulate(int key, const Vector& x) override {
    const TypeProfile& types = mode_.profiles[static_cast<std::size_t>(key)];
    RoundOutcome o;
    o.decision = x;
    o.key = key;
    o.utility = sender_utility_direct(inst_, x, types);
    o.state = detail::sample_state(inst_, nature_);
    const long code = sample_joint_signal(inst_, x, o.state, nature_);
    const auto acts = simulate_actions(inst_, x, code, types);
    long profile = 0;
    for (int a : acts)
      profile = profile * inst_.actions + a;
    o.realized = inst_.sender_util(profile, o.state);
    o.deviation_gain = obedience_gain(inst_, x);
    return o;
  }

private:
  PersuasionInstance inst_;
  NuMode mode_;
  FiniteLossProblem problem_;
};

// Single receiver reporting a type to a menu in L (sampled reduction, full
// feedback = the reported type).
class TypeReportingSingleEnvironment : public ReductionEnvironment {
public:
  TypeReportingSingleEnvironment(PersuasionInstance inst, const ExperimentConfig& cfg)
      : inst_(std::move(inst)), layout_(inst_) {
    problem_ = type_reporting_loss_problem(inst_);
    init(std::make_shared<const ImagePolytope>(problem_.image()), cfg);
  }

  int num_keys() const override { return inst_.m; }
  std::string key_label(int key) const override { return std::to_string(key); }
  double bound(long horizon) const override { return full_bound(inst_.m, horizon); }
  std::string bound_formula() const override { return "sqrt(m T)"; }
  const PersuasionInstance& instance() const { return inst_; }

protected:
  RoundOutcome simulate(int key, const Vector& x) override {
    const Vector menu = x.head(layout_.menu_dim());
    RoundOutcome o;
    o.decision = menu;
    const int reported = strategic_report(inst_, menu, 0, key);
    o.key = reported;
    o.misreported = reported != key;
    o.utility = 1.0 - problem_.loss(reported, x);
    o.state = detail::sample_state(inst_, nature_);
    const Matrix entry = menu_entry(inst_, menu, 0, reported);
    std::vector<double> w(static_cast<std::size_t>(inst_.actions));
    for (int a = 0; a < inst_.actions; ++a)
      w[static_cast<std::size_t>(a)] = std::max(entry(o.state, a), 0.0);
    const int rec = static_cast<int>(nature_.categorical(w));
    const int act = detail::respond(inst_, entry, rec, 0, key, rec,
                                    detail::single_sender_pref(inst_, o.state));
    o.realized = inst_.sender_util(act, o.state);
    o.deviation_gain = ic_violation(inst_, menu);
    o.misreport_gain = misreport_gain(inst_, menu);
    return o;
  }

private:
  PersuasionInstance inst_;
  MenuLayout layout_;
  FiniteLossProblem problem_;
};

// Several receivers reporting types to a menu in Λ (FTRL over menus).
class TypeReportingMultiEnvironment : public Environment {
public:
  TypeReportingMultiEnvironment(PersuasionInstance inst, const ExperimentConfig& cfg)
      : inst_(std::move(inst)), codec_{inst_.m, inst_.n}, alg_(make_algorithm(inst_, cfg)),
        nature_(CounterRng(cfg.seed).split(2)) {
    for (const auto& k : cfg.profiles) {
      if (static_cast<int>(k.size()) != inst_.n)
        throw ConfigError("profiles: a type profile has the wrong length");
      for (int t : k)
        if (t < 0 || t >= inst_.m)
          throw ConfigError("profiles: type out of range");
      support_.push_back(static_cast<int>(codec_.encode(k)));
    }
  }

  int num_keys() const override { return static_cast<int>(codec_.size()); }
  std::string key_label(int key) const override { return profile_label(codec_.decode(key)); }
  std::vector<int> adversary_support() const override {
    return support_.empty() ? Environment::adversary_support() : support_;
  }

  RoundOutcome play_round(int key) override {
    const TypeProfile truth = codec_.decode(key);
    const Vector& menu = alg_.menu();
    TypeProfile reported(truth.size());
    RoundOutcome o;
    for (int r = 0; r < inst_.n; ++r) {
      reported[static_cast<std::size_t>(r)] =
          strategic_report(inst_, menu, r, truth[static_cast<std::size_t>(r)]);
      o.misreported = o.misreported || reported[static_cast<std::size_t>(r)] != truth[static_cast<std::size_t>(r)];
    }
    o.decision = menu;
    o.key = static_cast<int>(codec_.encode(reported));
    o.deviation_gain = ic_violation(inst_, menu);
    o.misreport_gain = misreport_gain(inst_, menu);
    const Algorithm2Round round = alg_.play(reported);
    o.utility = round.value;

    // Signal with the joint scheme; each receiver sees its own recommendation.
    const long np = inst_.num_action_profiles();
    o.state = detail::sample_state(inst_, nature_);
    std::vector<double> w(static_cast<std::size_t>(np));
    for (long a = 0; a < np; ++a)
      w[static_cast<std::size_t>(a)] = std::max(round.joint(o.state * np + a), 0.0);
    const long rec = static_cast<long>(nature_.categorical(w));
    const RadixCodec prof = inst_.action_profiles();
    long profile = 0;
    for (int r = 0; r < inst_.n; ++r) {
      const int kr = reported[static_cast<std::size_t>(r)];
      const Matrix entry = menu_entry(inst_, menu, r, kr);
      const int a_rec = prof.digit(rec, r);
      // Sender preference over r's action with the others' recommendations fixed.
      std::vector<double> pref(static_cast<std::size_t>(inst_.actions));
      for (int b = 0; b < inst_.actions; ++b) {
        auto digits = prof.decode(rec);
        digits[static_cast<std::size_t>(r)] = b;
        pref[static_cast<std::size_t>(b)] = inst_.sender_util(prof.encode(digits), o.state);
      }
      const int act = detail::respond(inst_, entry, a_rec, r, truth[static_cast<std::size_t>(r)],
                                      a_rec, pref);
      profile = profile * inst_.actions + act;
    }
    o.realized = inst_.sender_util(profile, o.state);
    alg_.update(reported);
    return o;
  }

  double best_fixed_utility(const std::vector<long>& counts) const override {
    ProfileCounts h;
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i] > 0)
        h.add(codec_.decode(static_cast<long>(i)), counts[i]);
    return best_menu_in_hindsight(inst_, h).value;
  }

  double bound(long horizon) const override {
    return inst_.n * inst_.d * inst_.actions * full_bound(inst_.m, horizon);
  }
  std::string bound_formula() const override { return "n d |A| sqrt(m T)"; }

  const PersuasionInstance& instance() const { return inst_; }
  const Algorithm2& algorithm() const { return alg_; }

private:
  static Algorithm2 make_algorithm(const PersuasionInstance& inst, const ExperimentConfig& cfg) {
    if (cfg.dual_ellipsoid && !inst.binary_set_function())
      throw ConfigError("the dual-ellipsoid feature needs a binary set-function instance");
    Algorithm2Options opts;
    opts.alpha = cfg.tolerances.alpha;
    opts.dual_ellipsoid = cfg.dual_ellipsoid;
    opts.ftrl.method = cfg.ftrl_method == "supergradient" ? FtrlMethod::SupergradientAscent
                                                          : FtrlMethod::ExactQp;
    opts.ftrl.max_iterations = cfg.tolerances.ftrl_max_iterations;
    opts.ftrl.improvement_tol = cfg.tolerances.ftrl_improvement;
    opts.ftrl.residual_tol = cfg.tolerances.ftrl_residual;
    opts.ftrl.ellipsoid_accuracy = cfg.tolerances.ellipsoid_accuracy;
    return Algorithm2(inst, cfg.horizon, opts);
  }

  PersuasionInstance inst_;
  RadixCodec codec_;
  Algorithm2 alg_;
  CounterRng nature_;
  std::vector<int> support_;
};

// Defender against D attacker types over Δ_N; the sampled reduction on the convex
// hull of loss vectors of grid strategies, so atoms are grid points.
class SecurityGameEnvironment : public ReductionEnvironment {
public:
  SecurityGameEnvironment(SecurityGame game, const ExperimentConfig& cfg)
      : game_(std::move(game)), params_(cfg.security) {
    game_.validate();
    init(std::make_shared<const ImagePolytope>(security_image(game_, params_.resolution)), cfg);
  }

  int num_keys() const override { return game_.types; }
  std::string key_label(int key) const override { return std::to_string(key); }
  const SecurityGame& game() const { return game_; }

  // Cumulative-loss gap between the grid and a finer reference grid for the
  // realized type counts.
  Json details(const std::vector<long>& counts) const override {
    Vector c(static_cast<Index>(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i)
      c(static_cast<Index>(i)) = static_cast<double>(counts[i]);
    const double coarse = security_best_fixed_loss(game_, c, params_.resolution);
    const double fine = security_best_fixed_loss(game_, c, params_.reference_resolution);
    return {{"grid_resolution", params_.resolution},
            {"reference_resolution", params_.reference_resolution},
            {"discretization_error", coarse - fine}};
  }

protected:
  RoundOutcome simulate(int key, const Vector& x) override {
    RoundOutcome o;
    o.decision = x;
    o.key = key;
    o.utility = game_.defender_utility(key, x);
    o.realized = o.utility;
    return o;
  }

private:
  SecurityGame game_;
  SecurityGameParams params_;
};

// The persuasion instance named by the config.
inline PersuasionInstance resolve_instance(const ExperimentConfig& cfg) {
  if (cfg.instance_path)
    return load_instance(*cfg.instance_path);
  if (cfg.instance_inline)
    return instance_from_json(*cfg.instance_inline);
  if (cfg.generator) {
    try {
      return generate_instance(*cfg.generator, cfg.data_seed());
    } catch (const ParamError& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("no instance source");
}

inline std::unique_ptr<Environment> make_environment(const ExperimentConfig& cfg) {
  switch (cfg.environment) {
  case EnvironmentKind::FiniteLoss:
    return std::make_unique<FiniteLossEnvironment>(synthetic_finite_loss(cfg.finite_loss, cfg.data_seed()),
                                                   cfg);
  case EnvironmentKind::SecurityGame:
    return std::make_unique<SecurityGameEnvironment>(
        random_security_game(cfg.security.targets, cfg.security.attacker_types, cfg.data_seed()), cfg);
  default:
    break;
  }
  PersuasionInstance inst = resolve_instance(cfg);
  switch (cfg.environment) {
  case EnvironmentKind::SingleReceiver:
    if (inst.n != 1)
      throw ConfigError("single_receiver needs an instance with one receiver");
    return std::make_unique<PersuasionEnvironment>(inst, NuMode::single_receiver(inst), cfg);
  case EnvironmentKind::MultiReceiver: {
    std::vector<TypeProfile> known = cfg.profiles;
    if (known.empty()) {
      const RadixCodec all{inst.m, inst.n};
      for (long i = 0; i < all.size(); ++i)
        known.push_back(all.decode(i));
    }
    NuMode mode;
    try {
      mode = NuMode::multi_receiver(inst, known);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("profiles: ") + e.what());
    }
    return std::make_unique<PersuasionEnvironment>(inst, std::move(mode), cfg);
  }
  case EnvironmentKind::TypeReportingSingle:
    if (inst.n != 1)
      throw ConfigError("type_reporting_single needs an instance with one receiver");
    return std::make_unique<TypeReportingSingleEnvironment>(inst, cfg);
  case EnvironmentKind::TypeReportingMulti:
    return std::make_unique<TypeReportingMultiEnvironment>(inst, cfg);
  default:
    throw ConfigError("unsupported environment");
  }
}

} // namespace obp
