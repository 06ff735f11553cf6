#pragma once

#include "obp/core/errors.hpp"
#include "obp/harness/adversary.hpp"
#include "obp/harness/generate.hpp"
#include "obp/harness/instance_io.hpp"
#include "obp/persuasion/utility.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace obp {

enum class EnvironmentKind {
  FiniteLoss,          // synthetic D losses over a random polytope
  SingleReceiver,      // persuasion, one receiver, m types
  MultiReceiver,       // persuasion, n receivers, known profile set K̄
  TypeReportingSingle, // menus over L, sampled reduction
  TypeReportingMulti,  // menus over Λ, FTRL over menus
  SecurityGame
};
enum class AlgorithmKind { Ogd, BarrierBandit, Ftrl };
enum class FeedbackMode { Full, Partial };
enum class RegretCheckpoints { All, Pow2, Final };

inline EnvironmentKind parse_environment(const std::string& s) {
  if (s == "finite_loss") return EnvironmentKind::FiniteLoss;
  if (s == "single_receiver") return EnvironmentKind::SingleReceiver;
  if (s == "multi_receiver") return EnvironmentKind::MultiReceiver;
  if (s == "type_reporting_single") return EnvironmentKind::TypeReportingSingle;
  if (s == "type_reporting_multi") return EnvironmentKind::TypeReportingMulti;
  if (s == "security_game") return EnvironmentKind::SecurityGame;
  throw ConfigError("unknown environment '" + s + "'");
}

inline const char* environment_name(EnvironmentKind e) {
  switch (e) {
  case EnvironmentKind::FiniteLoss: return "finite_loss";
  case EnvironmentKind::SingleReceiver: return "single_receiver";
  case EnvironmentKind::MultiReceiver: return "multi_receiver";
  case EnvironmentKind::TypeReportingSingle: return "type_reporting_single";
  case EnvironmentKind::TypeReportingMulti: return "type_reporting_multi";
  default: return "security_game";
  }
}

inline AlgorithmKind parse_algorithm(const std::string& s) {
  if (s == "ogd") return AlgorithmKind::Ogd;
  if (s == "barrier_bandit") return AlgorithmKind::BarrierBandit;
  if (s == "ftrl") return AlgorithmKind::Ftrl;
  throw ConfigError("unknown algorithm '" + s + "'");
}

inline const char* algorithm_name(AlgorithmKind a) {
  switch (a) {
  case AlgorithmKind::Ogd: return "ogd";
  case AlgorithmKind::BarrierBandit: return "barrier_bandit";
  default: return "ftrl";
  }
}

inline RegretCheckpoints parse_checkpoints(const std::string& s) {
  if (s == "all") return RegretCheckpoints::All;
  if (s == "pow2") return RegretCheckpoints::Pow2;
  if (s == "final") return RegretCheckpoints::Final;
  throw ConfigError("unknown regret checkpoint mode '" + s + "'");
}

inline const char* checkpoints_name(RegretCheckpoints c) {
  switch (c) {
  case RegretCheckpoints::Pow2: return "pow2";
  case RegretCheckpoints::Final: return "final";
  default: return "all";
  }
}

// Numeric knobs a config may override.
struct Tolerances {
  double bandit_eta_constant = 1.0;
  double ftrl_residual = 1e-4;
  double ftrl_improvement = 1e-7;
  long ftrl_max_iterations = 5000;
  double ellipsoid_accuracy = 1e-9;
  double alpha = 0.0; // menu FTRL regularization; 0 selects √(m/T)
};

struct SecurityGameParams {
  int targets = 3;
  int attacker_types = 2;
  int resolution = 64;
  int reference_resolution = 256; // finer grid for the discretization error
};

struct ExperimentConfig {
  EnvironmentKind environment = EnvironmentKind::SingleReceiver;
  // Persuasion instance source: file, inline JSON, or generator parameters.
  std::optional<std::string> instance_path;
  std::optional<Json> instance_inline;
  std::optional<GeneratorParams> generator;
  std::optional<std::uint64_t> instance_seed; // generator / synthetic seed (default: seed)
  SyntheticLossParams finite_loss;
  SecurityGameParams security;
  std::vector<TypeProfile> profiles; // K̄ (multi_receiver) or the adversary's support
  AlgorithmKind algorithm = AlgorithmKind::Ogd;
  FeedbackMode feedback = FeedbackMode::Full;
  long horizon = 1;
  std::uint64_t seed = 0;
  std::string output;
  AdversarySpec adversary;
  RegretCheckpoints checkpoints = RegretCheckpoints::All;
  bool dual_ellipsoid = false;
  std::string ftrl_method = "exact_qp";
  Tolerances tolerances;

  std::uint64_t data_seed() const { return instance_seed.value_or(seed); }
  bool persuasion() const {
    return environment != EnvironmentKind::FiniteLoss && environment != EnvironmentKind::SecurityGame;
  }
};

// Algorithm/feedback compatibility:
//  finite_loss, single/multi_receiver, security_game: full ↔ ogd, partial ↔ barrier_bandit;
//  type_reporting_single: full + ogd; type_reporting_multi: full + ftrl.
inline void validate_config(const ExperimentConfig& c) {
  if (c.horizon < 1)
    throw ConfigError("horizon must be at least 1");
  const auto env = c.environment;
  const bool tr = env == EnvironmentKind::TypeReportingSingle || env == EnvironmentKind::TypeReportingMulti;
  if (tr && c.feedback != FeedbackMode::Full)
    throw ConfigError("type-reporting environments always give the sender full feedback");
  if (env == EnvironmentKind::TypeReportingMulti) {
    if (c.algorithm != AlgorithmKind::Ftrl)
      throw ConfigError("type_reporting_multi runs the ftrl algorithm");
  } else if (c.algorithm == AlgorithmKind::Ftrl) {
    throw ConfigError("ftrl is only available in type_reporting_multi");
  } else if (c.feedback == FeedbackMode::Full && c.algorithm != AlgorithmKind::Ogd) {
    throw ConfigError("full feedback runs the ogd learner");
  } else if (c.feedback == FeedbackMode::Partial && c.algorithm != AlgorithmKind::BarrierBandit) {
    throw ConfigError("partial feedback runs the barrier_bandit learner");
  }
  if (c.dual_ellipsoid && env != EnvironmentKind::TypeReportingMulti)
    throw ConfigError("the dual-ellipsoid feature applies to type_reporting_multi only");
  if (c.ftrl_method != "exact_qp" && c.ftrl_method != "supergradient")
    throw ConfigError("ftrl_method must be exact_qp or supergradient");
  if (c.persuasion()) {
    const int sources = (c.instance_path ? 1 : 0) + (c.instance_inline ? 1 : 0) + (c.generator ? 1 : 0);
    if (sources != 1)
      throw ConfigError("give exactly one instance source: a path, an inline instance, or generate");
  }
  if (env == EnvironmentKind::SecurityGame) {
    const auto& s = c.security;
    if (s.targets < 1 || s.attacker_types < 1 || s.resolution < 1 || s.reference_resolution < 1)
      throw ConfigError("security_game: targets, attacker_types and resolutions must be positive");
  }
  if (env == EnvironmentKind::FiniteLoss &&
      (c.finite_loss.losses < 1 || c.finite_loss.dim < 1 || c.finite_loss.cuts < 0))
    throw ConfigError("finite_loss: losses and dim must be positive, cuts nonnegative");
  const auto& t = c.tolerances;
  if (!(t.bandit_eta_constant > 0.0) || !(t.ftrl_residual > 0.0) || !(t.ftrl_improvement > 0.0) ||
      t.ftrl_max_iterations < 1 || !(t.ellipsoid_accuracy > 0.0) || t.alpha < 0.0)
    throw ConfigError("tolerance overrides must be positive");
}

// Relative instance paths are resolved against base_dir (the config's directory).
inline ExperimentConfig config_from_json(const Json& j, const std::string& base_dir = "") {
  ExperimentConfig c;
  try {
    static const char* known[] = {"environment", "instance", "finite_loss", "security_game",
                                  "profiles",    "algorithm", "feedback",   "horizon",
                                  "seed",        "output",   "adversary",  "regret_checkpoints",
                                  "features",    "ftrl_method", "tolerances", "instance_seed"};
    for (const auto& [key, _] : j.items())
      if (std::find(std::begin(known), std::end(known), key) == std::end(known))
        throw ConfigError("unknown config key '" + key + "'");

    c.environment = parse_environment(j.at("environment").get<std::string>());
    if (!j.contains("seed"))
      throw ConfigError("config must give a seed");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.horizon = j.at("horizon").get<long>();
    c.feedback = j.value("feedback", std::string("full")) == "partial" ? FeedbackMode::Partial
                                                                        : FeedbackMode::Full;
    if (j.contains("feedback") && j["feedback"] != "full" && j["feedback"] != "partial")
      throw ConfigError("feedback must be full or partial");
    const AlgorithmKind default_alg =
        c.environment == EnvironmentKind::TypeReportingMulti ? AlgorithmKind::Ftrl
        : c.feedback == FeedbackMode::Partial                ? AlgorithmKind::BarrierBandit
                                                             : AlgorithmKind::Ogd;
    c.algorithm = j.contains("algorithm") ? parse_algorithm(j["algorithm"].get<std::string>())
                                          : default_alg;
    c.output = j.value("output", std::string());
    if (j.contains("instance_seed"))
      c.instance_seed = j["instance_seed"].get<std::uint64_t>();

    if (j.contains("instance")) {
      const Json& inst = j["instance"];
      if (inst.is_string()) {
        std::filesystem::path p(inst.get<std::string>());
        if (p.is_relative() && !base_dir.empty())
          p = std::filesystem::path(base_dir) / p;
        c.instance_path = p.string();
      } else if (inst.is_object() && inst.contains("generate")) {
        c.generator = generator_params_from_json(inst["generate"]);
        if (inst.contains("seed"))
          c.instance_seed = inst["seed"].get<std::uint64_t>();
      } else if (inst.is_object()) {
        c.instance_inline = inst;
      } else {
        throw ConfigError("instance must be a path, an instance object, or {generate: …}");
      }
    }
    if (j.contains("finite_loss")) {
      const Json& f = j["finite_loss"];
      c.finite_loss.losses = f.value("losses", c.finite_loss.losses);
      c.finite_loss.dim = f.value("dim", c.finite_loss.dim);
      c.finite_loss.cuts = f.value("cuts", c.finite_loss.cuts);
    }
    if (j.contains("security_game")) {
      const Json& s = j["security_game"];
      c.security.targets = s.value("targets", c.security.targets);
      c.security.attacker_types = s.value("attacker_types", c.security.attacker_types);
      c.security.resolution = s.value("resolution", c.security.resolution);
      c.security.reference_resolution =
          s.value("reference_resolution", c.security.reference_resolution);
    }
    if (j.contains("profiles"))
      c.profiles = j["profiles"].get<std::vector<TypeProfile>>();
    if (j.contains("adversary"))
      c.adversary = adversary_from_json(j["adversary"]);
    if (j.contains("regret_checkpoints"))
      c.checkpoints = parse_checkpoints(j["regret_checkpoints"].get<std::string>());
    if (j.contains("features"))
      for (const auto& f : j["features"]) {
        const std::string name = f.get<std::string>();
        if (name != "dual-ellipsoid")
          throw ConfigError("unknown feature '" + name + "'");
        c.dual_ellipsoid = true;
      }
    c.ftrl_method = j.value("ftrl_method", c.ftrl_method);
    if (j.contains("tolerances"))
      for (const auto& [key, v] : j["tolerances"].items()) {
        auto& t = c.tolerances;
        if (key == "bandit_eta_constant") t.bandit_eta_constant = v.get<double>();
        else if (key == "ftrl_residual") t.ftrl_residual = v.get<double>();
        else if (key == "ftrl_improvement") t.ftrl_improvement = v.get<double>();
        else if (key == "ftrl_max_iterations") t.ftrl_max_iterations = v.get<long>();
        else if (key == "ellipsoid_accuracy") t.ellipsoid_accuracy = v.get<double>();
        else if (key == "alpha") t.alpha = v.get<double>();
        else throw ConfigError("unknown tolerance override '" + key + "'");
      }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ParamError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_config(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  const Json j = read_json_file(path);
  return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

// The resolved configuration; the instance is embedded when given.
inline Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["environment"] = environment_name(c.environment);
  j["algorithm"] = algorithm_name(c.algorithm);
  j["feedback"] = c.feedback == FeedbackMode::Full ? "full" : "partial";
  j["horizon"] = c.horizon;
  j["seed"] = c.seed;
  if (c.instance_seed)
    j["instance_seed"] = *c.instance_seed;
  if (c.instance_inline)
    j["instance"] = *c.instance_inline;
  else if (c.instance_path)
    j["instance"] = *c.instance_path;
  else if (c.generator)
    j["instance"] = {{"generate", generator_params_to_json(*c.generator)}};
  if (c.environment == EnvironmentKind::FiniteLoss)
    j["finite_loss"] = {{"losses", c.finite_loss.losses},
                        {"dim", c.finite_loss.dim},
                        {"cuts", c.finite_loss.cuts}};
  if (c.environment == EnvironmentKind::SecurityGame)
    j["security_game"] = {{"targets", c.security.targets},
                          {"attacker_types", c.security.attacker_types},
                          {"resolution", c.security.resolution},
                          {"reference_resolution", c.security.reference_resolution}};
  if (!c.profiles.empty())
    j["profiles"] = c.profiles;
  j["adversary"] = adversary_to_json(c.adversary);
  j["regret_checkpoints"] = checkpoints_name(c.checkpoints);
  if (c.dual_ellipsoid)
    j["features"] = {"dual-ellipsoid"};
  if (c.environment == EnvironmentKind::TypeReportingMulti)
    j["ftrl_method"] = c.ftrl_method;
  const auto& t = c.tolerances;
  j["tolerances"] = {{"bandit_eta_constant", t.bandit_eta_constant},
                     {"ftrl_residual", t.ftrl_residual},
                     {"ftrl_improvement", t.ftrl_improvement},
                     {"ftrl_max_iterations", t.ftrl_max_iterations},
                     {"ellipsoid_accuracy", t.ellipsoid_accuracy},
                     {"alpha", t.alpha}};
  if (!c.output.empty())
    j["output"] = c.output;
  return j;
}

} // namespace obp
