#include "obp/harness/experiment.hpp"
#include "obp/harness/generate.hpp"
#include "obp/harness/instance_io.hpp"
#include "obp/harness/security_game.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace obp {
namespace {

ExperimentConfig persuasion_config(EnvironmentKind env, GeneratorParams gp, long horizon,
                                   std::uint64_t seed) {
  ExperimentConfig c;
  c.environment = env;
  c.generator = gp;
  c.instance_seed = 100 + seed;
  c.horizon = horizon;
  c.seed = seed;
  return c;
}

GeneratorParams params(int n, int d, int a, int m, SenderModel s = SenderModel::Tensor) {
  GeneratorParams p;
  p.n = n;
  p.states = d;
  p.actions = a;
  p.types = m;
  p.sender = s;
  return p;
}

// Every config the determinism and invariant tests sweep over.
std::vector<ExperimentConfig> battery(long horizon) {
  std::vector<ExperimentConfig> out;
  ExperimentConfig fl;
  fl.environment = EnvironmentKind::FiniteLoss;
  fl.finite_loss = {3, 6, 2};
  fl.horizon = horizon;
  fl.seed = 5;
  out.push_back(fl);
  fl.feedback = FeedbackMode::Partial;
  fl.algorithm = AlgorithmKind::BarrierBandit;
  out.push_back(fl);

  out.push_back(persuasion_config(EnvironmentKind::SingleReceiver, params(1, 3, 3, 3), horizon, 6));
  auto mr = persuasion_config(EnvironmentKind::MultiReceiver, params(2, 2, 2, 2), horizon, 7);
  mr.profiles = {{0, 0}, {0, 1}, {1, 1}};
  mr.feedback = FeedbackMode::Partial;
  mr.algorithm = AlgorithmKind::BarrierBandit;
  out.push_back(mr);
  out.push_back(persuasion_config(EnvironmentKind::TypeReportingSingle, params(1, 3, 3, 3), horizon, 8));
  auto trm = persuasion_config(EnvironmentKind::TypeReportingMulti,
                               params(2, 2, 2, 2, SenderModel::Anonymous), horizon, 9);
  trm.algorithm = AlgorithmKind::Ftrl;
  out.push_back(trm);

  ExperimentConfig sg;
  sg.environment = EnvironmentKind::SecurityGame;
  sg.security.targets = 3;
  sg.security.attacker_types = 2;
  sg.horizon = horizon;
  sg.seed = 10;
  sg.feedback = FeedbackMode::Partial;
  sg.algorithm = AlgorithmKind::BarrierBandit;
  out.push_back(sg);
  return out;
}

TEST(Harness, IdenticalSeedsGiveByteIdenticalCsv) {
  for (auto cfg : battery(60)) {
    cfg.adversary.kind = AdversaryKind::Iid;
    const std::string a = records_to_csv(run_experiment(cfg).records);
    const std::string b = records_to_csv(run_experiment(cfg).records);
    EXPECT_EQ(a, b) << environment_name(cfg.environment);
    cfg.seed += 1;
    EXPECT_NE(a, records_to_csv(run_experiment(cfg).records)) << environment_name(cfg.environment);
  }
}

TEST(Harness, CumulativeFieldsArePrefixSumsAfterCsvRoundTrip) {
  for (const auto& cfg : battery(80)) {
    std::stringstream ss(records_to_csv(run_experiment(cfg).records));
    const auto recs = parse_round_csv(ss);
    ASSERT_EQ(recs.size(), 80u);
    double cum = 0.0;
    for (const auto& r : recs) {
      cum += r.utility;
      EXPECT_NEAR(r.cum_utility, cum, 1e-9);
      ASSERT_TRUE(r.cum_regret.has_value());
    }
  }
}

TEST(Harness, SingleRoundRegretIsOptimalityGapOfInitialDecision) {
  // Single receiver: the gap is max over P of u_s(·, k) minus u_s(φ_1, k),
  // with the maximum taken by vertex enumeration of P.
  GeneratorParams gp = params(1, 2, 2, 2);
  auto cfg = persuasion_config(EnvironmentKind::SingleReceiver, gp, 1, 3);
  RunOptions opts;
  opts.keep_decisions = true;
  const RunResult r = run_experiment(cfg, opts);
  const PersuasionInstance inst = instance_from_json(*r.config.instance_inline);
  const int k = r.keys[0];
  const Vector c = sender_utility_coefficients(inst, {k});
  const auto verts = testing::enumerate_vertices(build_persuasive_polytope(inst));
  ASSERT_FALSE(verts.empty());
  const double best = testing::max_over_vertices(c, verts);
  EXPECT_NEAR(*r.records[0].cum_regret, best - c.dot(r.decisions[0]), 1e-9);
  EXPECT_GE(*r.records[0].cum_regret, -1e-9);

  // Finite loss: the best decision minimizes loss row d over X directly.
  ExperimentConfig fl;
  fl.environment = EnvironmentKind::FiniteLoss;
  fl.horizon = 1;
  fl.seed = 21;
  const RunResult f = run_experiment(fl, opts);
  const FiniteLossProblem prob = synthetic_finite_loss(fl.finite_loss, fl.seed);
  const int d = f.keys[0];
  const LpSolution lo = solve_lp(prob.loss_matrix.row(d).transpose(), prob.decision, Sense::Min);
  ASSERT_TRUE(lo.optimal());
  EXPECT_NEAR(*f.records[0].cum_regret, prob.loss(d, f.decisions[0]) - lo.value, 1e-9);
}

// Replays a committed direct scheme with an independent sampler: state from
// μ, joint signal from φ_θ, receivers obey (the scheme is persuasive).
double replay_utility(const PersuasionInstance& inst, const Vector& phi, const TypeProfile& k,
                      int samples, double* sd) {
  const long per_state = static_cast<long>(std::llround(std::pow(inst.actions, inst.m * inst.n)));
  CounterRng rng(777);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    double u = rng.uniform(), acc = 0.0;
    int th = 0;
    for (; th < inst.d - 1; ++th) {
      acc += inst.prior[static_cast<std::size_t>(th)];
      if (u < acc)
        break;
    }
    u = rng.uniform();
    acc = 0.0;
    long code = 0;
    for (; code < per_state - 1; ++code) {
      acc += phi(th * per_state + code);
      if (u < acc)
        break;
    }
    // Digit r·m + k_r (most significant first) is receiver r's recommendation.
    long profile = 0;
    for (int r = 0; r < inst.n; ++r) {
      const int pos = r * inst.m + k[static_cast<std::size_t>(r)];
      const long div = static_cast<long>(std::llround(std::pow(inst.actions, inst.m * inst.n - 1 - pos)));
      profile = profile * inst.actions + (code / div) % inst.actions;
    }
    const double v = inst.sender_util(profile, th);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / samples;
  *sd = std::sqrt(std::max(sq / samples - mean * mean, 0.0) / samples);
  return mean;
}

TEST(Harness, LoggedUtilityMatchesMonteCarloReplay) {
  RunOptions opts;
  opts.keep_decisions = true;
  for (auto cfg : {persuasion_config(EnvironmentKind::SingleReceiver, params(1, 3, 3, 3), 40, 2),
                   persuasion_config(EnvironmentKind::MultiReceiver, params(2, 2, 2, 2), 40, 4)}) {
    const RunResult r = run_experiment(cfg, opts);
    const PersuasionInstance inst = instance_from_json(*r.config.instance_inline);
    const std::size_t t = r.records.size() - 1;
    const TypeProfile k = [&] {
      TypeProfile out;
      std::stringstream ss(r.records[t].types);
      std::string tok;
      while (std::getline(ss, tok, '-'))
        out.push_back(std::stoi(tok));
      return out;
    }();
    ASSERT_LE(obedience_gain(inst, r.decisions[t]), 1e-7);
    double sd = 0.0;
    const double mc = replay_utility(inst, r.decisions[t], k, 1000000, &sd);
    EXPECT_NEAR(mc, r.records[t].utility, 3.0 * sd + 1e-12) << environment_name(cfg.environment);
  }
}

TEST(Harness, ConstantAdversaryHindsightIsTTimesSingleRoundOptimum) {
  auto cfg = persuasion_config(EnvironmentKind::SingleReceiver, params(1, 2, 3, 2), 50, 5);
  cfg.adversary.kind = AdversaryKind::Constant;
  cfg.adversary.value = 1;
  const RunResult r = run_experiment(cfg);
  const PersuasionInstance inst = instance_from_json(*r.config.instance_inline);
  const double one = best_fixed_in_hindsight(inst, {{1}}).value;
  EXPECT_NEAR(r.regret.hindsight_utility, 50.0 * one, 1e-7);
}

TEST(Harness, HindsightMatchesVertexEnumeration) {
  auto cfg = persuasion_config(EnvironmentKind::SingleReceiver, params(1, 2, 2, 2), 64, 8);
  cfg.adversary.kind = AdversaryKind::Iid;
  const RunResult r = run_experiment(cfg);
  const PersuasionInstance inst = instance_from_json(*r.config.instance_inline);
  // Σ_t u_s(φ, k_t) evaluated coordinate-wise for a single receiver: the
  // recommendation to type k is digit k of the code.
  Vector obj = Vector::Zero(inst.d * 4);
  for (int key : r.keys)
    for (int th = 0; th < inst.d; ++th)
      for (long code = 0; code < 4; ++code) {
        const int rec = key == 0 ? static_cast<int>(code / 2) : static_cast<int>(code % 2);
        obj(th * 4 + code) += inst.prior[static_cast<std::size_t>(th)] * inst.sender_util(rec, th);
      }
  const auto verts = testing::enumerate_vertices(build_persuasive_polytope(inst));
  EXPECT_NEAR(r.regret.hindsight_utility, testing::max_over_vertices(obj, verts), 1e-7);
}

TEST(Harness, RegretReportIgnoresEmptySuffixAndRecomputesFromFiles) {
  auto cfg = persuasion_config(EnvironmentKind::TypeReportingSingle, params(1, 2, 2, 2), 30, 3);
  cfg.output = (std::filesystem::temp_directory_path() / "obp_harness_report").string();
  std::filesystem::remove_all(cfg.output);
  const RunResult r = run_experiment(cfg);
  const auto env = make_environment(r.config);
  std::vector<RoundRecord> recs = r.records;
  std::vector<int> keys = r.keys;
  const RegretSummary a = regret_report(recs, *env, keys);
  recs.insert(recs.end(), recs.end(), recs.end());
  keys.insert(keys.end(), keys.end(), keys.end());
  const RegretSummary b = regret_report(recs, *env, keys);
  EXPECT_EQ(a.regret, b.regret);
  EXPECT_EQ(a.bound, b.bound);
  const RegretSummary c = report_run(cfg.output);
  EXPECT_NEAR(c.regret, a.regret, 1e-9);
  EXPECT_EQ(c.rounds, 30);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(cfg.output) / "summary.json"));
  std::filesystem::remove_all(cfg.output);
}

TEST(Harness, TypeReportingRunsCommitIncentiveCompatibleMenus) {
  for (const auto& cfg : battery(40)) {
    if (cfg.environment != EnvironmentKind::TypeReportingSingle &&
        cfg.environment != EnvironmentKind::TypeReportingMulti)
      continue;
    const RunResult r = run_experiment(cfg);
    EXPECT_LE(r.summary["max_misreport_gain"].get<double>(), 1e-6);
    EXPECT_LE(r.summary["max_deviation_gain"].get<double>(), 1e-6);
    EXPECT_EQ(r.summary["misreports"].get<long>(), 0);
  }
}

// Generated instance whose image has near-degenerate facets; the hindsight
// optimum must still be computed and match a vertex scan of the image.
TEST(Harness, DegenerateImageHindsightCompletes) {
  ExperimentConfig c;
  c.environment = EnvironmentKind::TypeReportingSingle;
  GeneratorParams g;
  g.n = 1;
  g.states = g.actions = g.types = 3;
  c.generator = g;
  c.instance_seed = 5006;
  c.horizon = 600;
  c.seed = 6;
  c.adversary.kind = AdversaryKind::TwoPhase;
  c.checkpoints = RegretCheckpoints::All;
  const RunResult r = run_experiment(c);
  EXPECT_EQ(r.summary["status"], "complete");
  EXPECT_EQ(r.records.size(), 600u);
  EXPECT_TRUE(std::isfinite(r.regret.regret));
}

TEST(Harness, ConfigValidation) {
  const Json base = {{"environment", "finite_loss"}, {"horizon", 10}, {"seed", 1}};
  EXPECT_NO_THROW(config_from_json(base));
  Json j = base;
  j.erase("seed");
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base;
  j["horizon"] = 0;
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base;
  j["feedback"] = "partial";
  j["algorithm"] = "ogd";
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base;
  j["algorithm"] = "ftrl";
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base;
  j["colour"] = "blue";
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base;
  j["environment"] = "type_reporting_single";
  j["instance"] = {{"generate", {{"n", 1}, {"types", 2}}}};
  j["feedback"] = "partial";
  EXPECT_THROW(config_from_json(j), ConfigError);
  j["feedback"] = "full";
  EXPECT_NO_THROW(config_from_json(j));
  j["tolerances"] = {{"alpha", -1.0}};
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base;
  j["features"] = {"dual-ellipsoid"};
  EXPECT_THROW(config_from_json(j), ConfigError);

  // Instance problems surface as instance validation errors.
  Json bad = {{"environment", "single_receiver"}, {"horizon", 3}, {"seed", 1}};
  bad["instance"] = {{"n", 1}, {"states", 2}, {"prior", {0.5, 0.6}}, {"actions", 2},
                     {"types", 1}, {"receiver_utils", {0, 1, 1, 0}},
                     {"sender_util", {{"kind", "tensor"}, {"data", {0, 1, 0, 1}}}}};
  EXPECT_THROW(run_experiment(config_from_json(bad)), InstanceValidationError);
}

TEST(GenerateInstance, ThousandInstancesAreValid) {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    GeneratorParams p = params(1 + static_cast<int>(s % 3), 2 + static_cast<int>(s % 3),
                               2 + static_cast<int>(s % 2), 1 + static_cast<int>(s % 3));
    const auto inst = generate_instance(p, s);
    for (double mu : inst.prior)
      ASSERT_GT(mu, 0.0);
    for (double u : inst.receiver_utils)
      ASSERT_TRUE(u >= 0.0 && u <= 1.0);
    for (double u : inst.sender.tensor)
      ASSERT_TRUE(u >= 0.0 && u <= 1.0);
    ASSERT_NO_THROW(inst.validate());
  }
}

TEST(GenerateInstance, DeterministicCappedAndMonotone) {
  const auto p = params(3, 3, 2, 2, SenderModel::Anonymous);
  EXPECT_EQ(instance_to_json(generate_instance(p, 9)).dump(), instance_to_json(generate_instance(p, 9)).dump());
  EXPECT_NE(instance_to_json(generate_instance(p, 9)).dump(), instance_to_json(generate_instance(p, 10)).dump());
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto a = generate_instance(params(8, 2, 2, 1, SenderModel::Anonymous), s);
    for (const auto& f : a.sender.per_state)
      EXPECT_TRUE(f.is_monotone());
    const auto b = generate_instance(params(5, 2, 2, 1, SenderModel::Supermodular), s);
    for (const auto& f : b.sender.per_state) {
      EXPECT_TRUE(f.is_monotone());
      EXPECT_TRUE(f.is_supermodular());
    }
  }
  EXPECT_THROW(generate_instance(params(4, 2, 2, 1), 0), ParamError);
  EXPECT_THROW(generate_instance(params(9, 2, 2, 1, SenderModel::Anonymous), 0), ParamError);
  EXPECT_THROW(generate_instance(params(2, 2, 3, 1, SenderModel::Anonymous), 0), ParamError);
}

TEST(InstanceIo, RoundTripIsExact) {
  for (auto s : {SenderModel::Tensor, SenderModel::Anonymous, SenderModel::Supermodular,
                 SenderModel::Table}) {
    const auto inst = generate_instance(params(2, 3, 2, 2, s), 4);
    const Json j = instance_to_json(inst);
    EXPECT_EQ(instance_to_json(instance_from_json(Json::parse(j.dump()))), j);
  }
  EXPECT_THROW(instance_from_json(Json::parse(R"({"n": 1})")), InstanceValidationError);
}

// Points of the simplex with coordinates in multiples of 1/res.
std::vector<Vector> testing_grid(int dim, int res) {
  std::vector<Vector> out;
  std::vector<int> c(static_cast<std::size_t>(dim), 0);
  for (;;) {
    int used = 0;
    for (int i = 0; i + 1 < dim; ++i)
      used += c[static_cast<std::size_t>(i)];
    if (used <= res) {
      Vector x(dim);
      for (int i = 0; i + 1 < dim; ++i)
        x(i) = static_cast<double>(c[static_cast<std::size_t>(i)]) / res;
      x(dim - 1) = static_cast<double>(res - used) / res;
      out.push_back(x);
    }
    int i = 0;
    while (i + 1 < dim && ++c[static_cast<std::size_t>(i)] > res)
      c[static_cast<std::size_t>(i++)] = 0;
    if (i + 1 >= dim)
      return out;
  }
}

// Grid Stackelberg value computed directly from the payoff tables.
double grid_stackelberg(const SecurityGame& g, int res, Vector* arg) {
  double best = -1.0;
  for (const auto& x : testing_grid(g.targets, res)) {
    int att = 0;
    double av = -1.0;
    for (int i = 0; i < g.targets; ++i) {
      const double v = x(i) * g.att_covered[i] + (1 - x(i)) * g.att_uncovered[i];
      if (v > av) {
        av = v;
        att = i;
      }
    }
    const double dv = x(att) * g.def_covered[att] + (1 - x(att)) * g.def_uncovered[att];
    if (dv > best) {
      best = dv;
      *arg = x;
    }
  }
  return best;
}

TEST(SecurityGame, OneTargetHasZeroRegret) {
  ExperimentConfig cfg;
  cfg.environment = EnvironmentKind::SecurityGame;
  cfg.security.targets = 1;
  cfg.security.attacker_types = 3;
  cfg.horizon = 50;
  cfg.seed = 2;
  for (auto fb : {FeedbackMode::Full, FeedbackMode::Partial}) {
    cfg.feedback = fb;
    cfg.algorithm = fb == FeedbackMode::Full ? AlgorithmKind::Ogd : AlgorithmKind::BarrierBandit;
    RunOptions opts;
    opts.keep_decisions = true;
    const RunResult r = run_experiment(cfg, opts);
    EXPECT_NEAR(r.regret.regret, 0.0, 1e-12);
    EXPECT_EQ(r.decisions.back()(0), 1.0);
  }
}

TEST(SecurityGame, OneAttackerTypeConvergesToStackelbergStrategy) {
  for (std::uint64_t s = 1; s <= 5; ++s) {
    ExperimentConfig cfg;
    cfg.environment = EnvironmentKind::SecurityGame;
    cfg.security.targets = 3;
    cfg.security.attacker_types = 1;
    cfg.horizon = 3000;
    cfg.seed = s;
    cfg.instance_seed = 40 + s;
    RunOptions opts;
    opts.keep_decisions = true;
    const RunResult r = run_experiment(cfg, opts);
    const SecurityGame g = random_security_game(3, 1, 40 + s);
    Vector arg;
    const double value = grid_stackelberg(g, 64, &arg);
    EXPECT_NEAR(g.defender_utility(0, r.decisions.back()), value, 1e-12) << "seed " << s;
    // Regret per round vanishes.
    EXPECT_LT(r.regret.regret / 3000.0, 0.01);
  }
}

TEST(SecurityGame, GridAndImageAgree) {
  const SecurityGame g = random_security_game(3, 2, 8);
  const ImagePolytope q = security_image(g, 16);
  Vector c(2);
  c << 3.0, 5.0;
  EXPECT_NEAR(best_fixed_loss(q, c), security_best_fixed_loss(g, c, 16), 1e-9);
  EXPECT_LE(security_best_fixed_loss(g, c, 64), security_best_fixed_loss(g, c, 16) + 1e-12);
  EXPECT_EQ(simplex_grid(3, 64).size(), 2145u);
}

TEST(Adversary, FamiliesHaveTheDocumentedShape) {
  AdversarySpec a;
  a.kind = AdversaryKind::Periodic;
  a.period = 3;
  const auto p = adversary_sequence(a, 2, 12, CounterRng(1));
  EXPECT_EQ(p, (std::vector<int>{0, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 1}));
  a.kind = AdversaryKind::TwoPhase;
  const auto t = adversary_sequence(a, 3, 6, CounterRng(1));
  EXPECT_EQ(t, (std::vector<int>{0, 0, 0, 1, 1, 1}));
  a.kind = AdversaryKind::Iid;
  const auto s = adversary_sequence(a, 4, 20000, CounterRng(3));
  const double zeros = static_cast<double>(std::count(s.begin(), s.end(), 0)) / 20000.0;
  EXPECT_NEAR(zeros, 0.6, 0.02);
  a.kind = AdversaryKind::Constant;
  a.value = 5;
  EXPECT_THROW(adversary_sequence(a, 3, 4, CounterRng(0)), ConfigError);
}

TEST(Sweep, SlopeOfPowerLawAndCellLayout) {
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {3, 3 * std::sqrt(2.0), 6, 6 * std::sqrt(2.0)}), 0.5, 1e-12);
  EXPECT_TRUE(std::isnan(loglog_slope({1, 2}, {1, -1})));
  ExperimentConfig cfg;
  cfg.environment = EnvironmentKind::FiniteLoss;
  cfg.seed = 1;
  const SweepResult r = sweep(cfg, {16, 32}, {1, 2, 3}, "", 2);
  ASSERT_EQ(r.cells.size(), 6u);
  for (const auto& c : r.cells)
    EXPECT_TRUE(c.ok) << c.error;
  // Cells are independent of the worker count.
  const SweepResult s = sweep(cfg, {16, 32}, {1, 2, 3}, "", 1);
  EXPECT_EQ(r.summary.dump(), s.summary.dump());
}

} // namespace
} // namespace obp
