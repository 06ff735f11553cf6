#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/rng.hpp"
#include "obp/harness/instance_io.hpp"

#include <string>
#include <vector>

namespace obp {

// Oblivious adversaries over D loss/type indices; the whole sequence is
// drawn before the first round, independently of the learner.
//  - constant:  always `value`;
//  - periodic:  blocks of `period` rounds cycling through 0, 1, …, D−1;
//  - iid:       index 0 with probability `bias`, otherwise uniform over the rest;
//  - two_phase: index 0 for the first half, index 1 for the second half
//               (the learner settles on the first and must move).
enum class AdversaryKind { Constant, Periodic, Iid, TwoPhase };

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::Iid;
  int value = 0;
  long period = 7;
  double bias = 0.6;
};

inline AdversaryKind parse_adversary_kind(const std::string& s) {
  if (s == "constant") return AdversaryKind::Constant;
  if (s == "periodic") return AdversaryKind::Periodic;
  if (s == "iid") return AdversaryKind::Iid;
  if (s == "two_phase") return AdversaryKind::TwoPhase;
  throw ConfigError("unknown adversary kind '" + s + "'");
}

inline const char* adversary_kind_name(AdversaryKind k) {
  switch (k) {
  case AdversaryKind::Constant: return "constant";
  case AdversaryKind::Periodic: return "periodic";
  case AdversaryKind::TwoPhase: return "two_phase";
  default: return "iid";
  }
}

// Accepts a bare kind string or an object {kind, value, period, bias}.
inline AdversarySpec adversary_from_json(const Json& j) {
  AdversarySpec a;
  try {
    if (j.is_string()) {
      a.kind = parse_adversary_kind(j.get<std::string>());
      return a;
    }
    a.kind = parse_adversary_kind(j.value("kind", std::string("iid")));
    a.value = j.value("value", 0);
    a.period = j.value("period", 7L);
    a.bias = j.value("bias", 0.6);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("adversary: ") + e.what());
  }
  if (a.period < 1)
    throw ConfigError("adversary: period must be positive");
  if (!(a.bias >= 0.0 && a.bias <= 1.0))
    throw ConfigError("adversary: bias must lie in [0, 1]");
  return a;
}

inline Json adversary_to_json(const AdversarySpec& a) {
  return {{"kind", adversary_kind_name(a.kind)}, {"value", a.value}, {"period", a.period},
          {"bias", a.bias}};
}

inline std::vector<int> adversary_sequence(const AdversarySpec& a, int num_types, long horizon,
                                           CounterRng rng) {
  if (num_types < 1)
    throw ConfigError("adversary: no types to choose from");
  if (a.kind == AdversaryKind::Constant && (a.value < 0 || a.value >= num_types))
    throw ConfigError("adversary: constant value out of range");
  std::vector<int> seq(static_cast<std::size_t>(horizon));
  for (long t = 0; t < horizon; ++t) {
    int d = 0;
    switch (a.kind) {
    case AdversaryKind::Constant:
      d = a.value;
      break;
    case AdversaryKind::Periodic:
      d = static_cast<int>((t / a.period) % num_types);
      break;
    case AdversaryKind::Iid:
      if (num_types > 1 && rng.uniform() >= a.bias)
        d = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(num_types - 1)));
      break;
    case AdversaryKind::TwoPhase:
      d = (num_types > 1 && t >= horizon / 2) ? 1 : 0;
      break;
    }
    seq[static_cast<std::size_t>(t)] = d;
  }
  return seq;
}

} // namespace obp
