#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/rng.hpp"
#include "obp/harness/adversary.hpp"
#include "obp/harness/config.hpp"
#include "obp/harness/environment.hpp"
#include "obp/harness/instance_io.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace obp {

struct RoundRecord {
  long t = 0;
  std::uint64_t decision_hash = 0;
  std::string types;
  int state = -1;
  double utility = 0.0;
  double cum_utility = 0.0;
  std::optional<double> cum_regret; // only at regret checkpoints
};

// FNV-1a over the IEEE-754 bit patterns of the entries, little-endian byte
// order, with −0 folded into +0.
inline std::uint64_t decision_hash(const Vector& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Index i = 0; i < x.size(); ++i) {
    const double v = x(i) == 0.0 ? 0.0 : x(i);
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= bits & 0xffu;
      h *= 0x100000001b3ULL;
      bits >>= 8;
    }
  }
  return h;
}

// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string format_hash(std::uint64_t h) {
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4)
    s[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return s;
}

inline constexpr const char* kCsvHeader = "t,decision_hash,types,state,utility,cum_utility,cum_regret";

inline std::string csv_line(const RoundRecord& r) {
  std::string s = std::to_string(r.t) + ',' + format_hash(r.decision_hash) + ',' + r.types + ',' +
                  std::to_string(r.state) + ',' + format_double(r.utility) + ',' +
                  format_double(r.cum_utility) + ',';
  if (r.cum_regret)
    s += format_double(*r.cum_regret);
  return s;
}

inline std::string records_to_csv(const std::vector<RoundRecord>& records) {
  std::string out = std::string(kCsvHeader) + '\n';
  for (const auto& r : records)
    out += csv_line(r) + '\n';
  return out;
}

inline std::vector<RoundRecord> parse_round_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ConfigError("rounds CSV: unexpected header");
  std::vector<RoundRecord> out;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      f.push_back(cell);
    if (f.size() == 6)
      f.emplace_back();
    if (f.size() != 7)
      throw ConfigError("rounds CSV: malformed line '" + line + "'");
    RoundRecord r;
    try {
      r.t = std::stol(f[0]);
      r.decision_hash = std::stoull(f[1], nullptr, 16);
      r.types = f[2];
      r.state = std::stoi(f[3]);
      r.utility = std::stod(f[4]);
      r.cum_utility = std::stod(f[5]);
      if (!f[6].empty())
        r.cum_regret = std::stod(f[6]);
    } catch (const std::exception&) {
      throw ConfigError("rounds CSV: malformed line '" + line + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct RegretSummary {
  long rounds = 0;
  double cum_utility = 0.0;
  double hindsight_utility = 0.0;
  double regret = 0.0;
  double bound = 0.0;
  std::string bound_formula;
  double ratio = 0.0; // regret / bound (0 when the bound is 0)
};

// Regret of a completed run: best fixed decision in hindsight for the
// (reported) type sequence against the logged cumulative utility.
inline RegretSummary regret_report(const std::vector<RoundRecord>& records, const Environment& env,
                                   const std::vector<int>& keys) {
  if (records.empty() || records.size() != keys.size())
    throw std::invalid_argument("regret_report: need one key per logged round");
  std::vector<long> counts(static_cast<std::size_t>(env.num_keys()), 0);
  for (int k : keys)
    ++counts.at(static_cast<std::size_t>(k));
  RegretSummary s;
  s.rounds = static_cast<long>(records.size());
  s.cum_utility = records.back().cum_utility;
  s.hindsight_utility = env.best_fixed_utility(counts);
  s.regret = s.hindsight_utility - s.cum_utility;
  s.bound = env.bound(s.rounds);
  s.bound_formula = env.bound_formula();
  s.ratio = s.bound > 0.0 ? s.regret / s.bound : 0.0;
  return s;
}

struct RunOptions {
  bool keep_decisions = false; // store every committed decision in the result
  bool write_files = true;     // write to config.output when it is set
};

struct RunResult {
  ExperimentConfig config; // resolved (instance embedded)
  std::vector<RoundRecord> records;
  std::vector<int> keys;      // (reported) type keys per round
  std::vector<int> true_keys; // adversary's keys per round
  std::vector<Vector> decisions;
  RegretSummary regret;
  Json summary;
  double seconds = 0.0; // wall time of the rounds
};

namespace detail {

inline bool is_checkpoint(RegretCheckpoints c, long t, long horizon) {
  switch (c) {
  case RegretCheckpoints::All: return true;
  case RegretCheckpoints::Pow2: return t == horizon || (t & (t - 1)) == 0;
  default: return t == horizon;
  }
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out)
    throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

} // namespace detail

// Config with the persuasion instance inlined, so the run is self-contained.
inline ExperimentConfig resolve_config(ExperimentConfig cfg) {
  validate_config(cfg);
  if (cfg.persuasion() && !cfg.instance_inline) {
    cfg.instance_inline = instance_to_json(resolve_instance(cfg));
    cfg.instance_path.reset();
    cfg.generator.reset();
  }
  return cfg;
}

inline std::vector<int> adversary_keys(const ExperimentConfig& cfg, const Environment& env) {
  const std::vector<int> support = env.adversary_support();
  const auto pos = adversary_sequence(cfg.adversary, static_cast<int>(support.size()), cfg.horizon,
                                      CounterRng(cfg.seed).split(1));
  std::vector<int> keys(pos.size());
  for (std::size_t t = 0; t < pos.size(); ++t)
    keys[t] = support[static_cast<std::size_t>(pos[t])];
  return keys;
}

// Simulates the configured protocol for T rounds. Solver failures abort the
// run; when an output directory is configured, the rounds completed so far
// are written with summary status "aborted" before the error propagates.
inline RunResult run_experiment(const ExperimentConfig& config, const RunOptions& opts = {}) {
  RunResult res;
  res.config = resolve_config(config);
  const ExperimentConfig& cfg = res.config;
  const std::unique_ptr<Environment> env = make_environment(cfg);
  res.true_keys = adversary_keys(cfg, *env);

  const long horizon = cfg.horizon;
  std::vector<long> counts(static_cast<std::size_t>(env->num_keys()), 0);
  Json checkpoints = Json::array();
  double cum = 0.0, realized = 0.0, max_dev = 0.0, max_mis = 0.0;
  long misreports = 0;
  std::string error;

  const auto start = std::chrono::steady_clock::now();
  try {
    for (long t = 1; t <= horizon; ++t) {
      const RoundOutcome o = env->play_round(res.true_keys[static_cast<std::size_t>(t - 1)]);
      ++counts[static_cast<std::size_t>(o.key)];
      cum += o.utility;
      realized += o.realized;
      max_dev = std::max(max_dev, o.deviation_gain);
      max_mis = std::max(max_mis, o.misreport_gain);
      misreports += o.misreported ? 1 : 0;
      RoundRecord r;
      r.t = t;
      r.decision_hash = decision_hash(o.decision);
      r.types = env->key_label(o.key);
      r.state = o.state;
      r.utility = o.utility;
      r.cum_utility = cum;
      if (detail::is_checkpoint(cfg.checkpoints, t, horizon)) {
        const double best = env->best_fixed_utility(counts);
        r.cum_regret = best - cum;
        checkpoints.push_back({{"t", t},
                               {"cum_utility", cum},
                               {"hindsight_utility", best},
                               {"regret", best - cum}});
      }
      if (opts.keep_decisions)
        res.decisions.push_back(o.decision);
      res.keys.push_back(o.key);
      res.records.push_back(std::move(r));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InstanceValidationError&) {
    throw;
  } catch (const std::exception& e) {
    error = e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json& s = res.summary;
  s["schema"] = "obp-summary";
  s["version"] = "v1";
  s["status"] = error.empty() ? "complete" : "aborted";
  if (!error.empty())
    s["error"] = error;
  s["environment"] = environment_name(cfg.environment);
  s["algorithm"] = algorithm_name(cfg.algorithm);
  s["feedback"] = cfg.feedback == FeedbackMode::Full ? "full" : "partial";
  s["horizon"] = horizon;
  s["seed"] = cfg.seed;
  s["rounds"] = static_cast<long>(res.records.size());
  if (!res.records.empty()) {
    res.regret = regret_report(res.records, *env, res.keys);
    s["cum_utility"] = res.regret.cum_utility;
    s["hindsight_utility"] = res.regret.hindsight_utility;
    s["regret"] = res.regret.regret;
    s["bound"] = res.regret.bound;
    s["bound_formula"] = res.regret.bound_formula;
    s["ratio"] = res.regret.ratio;
    s["realized_utility"] = realized;
    s["max_deviation_gain"] = max_dev;
    s["max_misreport_gain"] = max_mis;
    s["misreports"] = misreports;
    Json tc = Json::object();
    for (std::size_t k = 0; k < counts.size(); ++k)
      if (counts[k] > 0)
        tc[env->key_label(static_cast<int>(k))] = counts[k];
    s["type_counts"] = std::move(tc);
    s["checkpoints"] = std::move(checkpoints);
    s["details"] = env->details(counts);
  }

  if (opts.write_files && !cfg.output.empty()) {
    const std::filesystem::path dir(cfg.output);
    std::filesystem::create_directories(dir);
    detail::write_text(dir / "rounds.csv", records_to_csv(res.records));
    detail::write_text(dir / "summary.json", s.dump(2) + '\n');
    detail::write_text(dir / "config.json", config_to_json(cfg).dump(2) + '\n');
  }
  if (!error.empty())
    throw NumericalFailure("run aborted after " + std::to_string(res.records.size()) +
                           " rounds: " + error);
  return res;
}

// Recomputes the regret summary of a run directory from its config and CSV.
inline RegretSummary report_run(const std::string& dir) {
  const std::filesystem::path p(dir);
  const ExperimentConfig cfg = config_from_json(read_json_file((p / "config.json").string()));
  std::ifstream in(p / "rounds.csv");
  if (!in)
    throw ConfigError("cannot open '" + (p / "rounds.csv").string() + "'");
  const auto records = parse_round_csv(in);
  const auto env = make_environment(cfg);
  std::vector<int> keys;
  for (const auto& r : records)
    keys.push_back(env->key_of(r.types));
  return regret_report(records, *env, keys);
}

inline Json regret_summary_to_json(const RegretSummary& s) {
  return {{"rounds", s.rounds},         {"cum_utility", s.cum_utility},
          {"hindsight_utility", s.hindsight_utility}, {"regret", s.regret},
          {"bound", s.bound},           {"bound_formula", s.bound_formula},
          {"ratio", s.ratio}};
}

// Least-squares slope of log y against log x; NaN if some y ≤ 0.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

struct SweepCell {
  long horizon = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RegretSummary regret;
  double seconds = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<long> horizons;
  std::vector<double> mean_regret; // per horizon, over successful cells
  std::vector<double> mean_bound;
  double slope = 0.0; // log-log slope of mean regret against T
  Json summary;
};

// Runs the grid horizons × seeds. Cells are independent and run on
// `threads` workers; each cell writes into out_dir/T<T>_seed<s> when
// out_dir is set, and the aggregate goes to out_dir/sweep.json.
inline SweepResult sweep(const ExperimentConfig& base, const std::vector<long>& horizons,
                         const std::vector<std::uint64_t>& seeds, const std::string& out_dir = "",
                         unsigned threads = 1, bool same_data_seed = true) {
  SweepResult res;
  res.horizons = horizons;
  for (long t : horizons)
    for (std::uint64_t s : seeds) {
      SweepCell c;
      c.horizon = t;
      c.seed = s;
      res.cells.push_back(c);
    }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= res.cells.size())
        return;
      SweepCell& c = res.cells[i];
      ExperimentConfig cfg = base;
      cfg.horizon = c.horizon;
      cfg.seed = c.seed;
      if (!same_data_seed)
        cfg.instance_seed.reset();
      else if (!cfg.instance_seed)
        cfg.instance_seed = base.seed;
      cfg.output = out_dir.empty() ? std::string()
                                   : (std::filesystem::path(out_dir) /
                                      ("T" + std::to_string(c.horizon) + "_seed" + std::to_string(c.seed)))
                                         .string();
      try {
        const RunResult r = run_experiment(cfg);
        c.regret = r.regret;
        c.seconds = r.seconds;
        c.ok = true;
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    }
  };
  const unsigned nt = std::max(1u, threads);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < nt; ++w)
    pool.emplace_back(worker);
  worker();
  for (auto& th : pool)
    th.join();

  Json cells = Json::array();
  std::vector<double> xs;
  for (long t : horizons) {
    double sum = 0.0, bsum = 0.0;
    int n = 0;
    for (const auto& c : res.cells)
      if (c.horizon == t && c.ok) {
        sum += c.regret.regret;
        bsum += c.regret.bound;
        ++n;
      }
    res.mean_regret.push_back(n ? sum / n : std::numeric_limits<double>::quiet_NaN());
    res.mean_bound.push_back(n ? bsum / n : std::numeric_limits<double>::quiet_NaN());
    xs.push_back(static_cast<double>(t));
  }
  res.slope = loglog_slope(xs, res.mean_regret);
  for (const auto& c : res.cells) {
    Json j = {{"horizon", c.horizon}, {"seed", c.seed}, {"ok", c.ok}};
    if (c.ok)
      j["regret"] = regret_summary_to_json(c.regret);
    else
      j["error"] = c.error;
    cells.push_back(std::move(j));
  }
  Json per_t = Json::array();
  for (std::size_t i = 0; i < horizons.size(); ++i)
    per_t.push_back({{"horizon", horizons[i]},
                     {"mean_regret", res.mean_regret[i]},
                     {"mean_bound", res.mean_bound[i]}});
  res.summary = {{"schema", "obp-sweep"},
                 {"version", "v1"},
                 {"environment", environment_name(base.environment)},
                 {"algorithm", algorithm_name(base.algorithm)},
                 {"per_horizon", std::move(per_t)},
                 {"loglog_slope", std::isfinite(res.slope) ? Json(res.slope) : Json(nullptr)},
                 {"cells", std::move(cells)}};
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    detail::write_text(std::filesystem::path(out_dir) / "sweep.json", res.summary.dump(2) + '\n');
  }
  return res;
}

} // namespace obp
