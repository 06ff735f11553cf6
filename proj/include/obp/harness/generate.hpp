#pragma once

#include "obp/core/config.hpp"
#include "obp/core/errors.hpp"
#include "obp/core/rng.hpp"
#include "obp/geometry/polytope.hpp"
#include "obp/harness/instance_io.hpp"
#include "obp/persuasion/instance.hpp"
#include "obp/regret/finite_loss.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace obp {

enum class SenderModel { Tensor, Anonymous, Supermodular, Table };

inline SenderModel parse_sender_model(const std::string& s) {
  if (s == "tensor") return SenderModel::Tensor;
  if (s == "anonymous") return SenderModel::Anonymous;
  if (s == "supermodular") return SenderModel::Supermodular;
  if (s == "table") return SenderModel::Table;
  throw ParamError("unknown sender model '" + s + "'");
}

inline const char* sender_model_name(SenderModel m) {
  switch (m) {
  case SenderModel::Anonymous: return "anonymous";
  case SenderModel::Supermodular: return "supermodular";
  case SenderModel::Table: return "table";
  default: return "tensor";
  }
}

struct GeneratorParams {
  int n = 1;
  int states = 2;
  int actions = 2;
  int types = 1;
  SenderModel sender = SenderModel::Tensor;
  double min_prior = 0.01;
};

inline GeneratorParams generator_params_from_json(const Json& j) {
  GeneratorParams p;
  try {
    p.n = j.value("n", 1);
    p.states = j.value("states", 2);
    p.actions = j.value("actions", 2);
    p.types = j.value("types", 1);
    p.sender = parse_sender_model(j.value("sender", std::string("tensor")));
    p.min_prior = j.value("min_prior", 0.01);
  } catch (const Json::exception& e) {
    throw ParamError(std::string("generator parameters: ") + e.what());
  }
  return p;
}

inline Json generator_params_to_json(const GeneratorParams& p) {
  return {{"n", p.n},
          {"states", p.states},
          {"actions", p.actions},
          {"types", p.types},
          {"sender", sender_model_name(p.sender)},
          {"min_prior", p.min_prior}};
}

// Random instance: Dirichlet(1) prior clamped below at min_prior and
// renormalized, receiver and sender utilities uniform on [0, 1]. Set-function
// senders (binary actions) are monotone by construction: anonymous values are
// sorted, supermodular ones are nonnegative modular plus pairwise terms.
inline PersuasionInstance generate_instance(const GeneratorParams& p, std::uint64_t seed) {
  const bool set_fn = p.sender != SenderModel::Tensor;
  if (p.n < 1 || p.states < 1 || p.actions < 1 || p.types < 1)
    throw ParamError("generate_instance: n, states, actions and types must be positive");
  if (!set_fn && p.n > caps::max_receivers_general)
    throw ParamError("generate_instance: at most " + std::to_string(caps::max_receivers_general) +
                     " receivers with a general sender utility");
  if (set_fn && p.n > caps::max_receivers_set_function)
    throw ParamError("generate_instance: at most " +
                     std::to_string(caps::max_receivers_set_function) +
                     " receivers with a set-function sender utility");
  if (set_fn && p.actions != 2)
    throw ParamError("generate_instance: set-function senders need binary actions");
  if (!(p.min_prior > 0.0) || p.min_prior * p.states > 1.0)
    throw ParamError("generate_instance: min_prior must be positive and at most 1/states");

  CounterRng root(seed);
  CounterRng prior_rng = root.split(1), recv_rng = root.split(2), send_rng = root.split(3);

  PersuasionInstance inst;
  inst.n = p.n;
  inst.d = p.states;
  inst.actions = p.actions;
  inst.m = p.types;

  inst.prior = prior_rng.dirichlet_flat(static_cast<std::size_t>(p.states));
  double total = 0.0;
  for (auto& v : inst.prior) {
    v = std::max(v, p.min_prior);
    total += v;
  }
  for (auto& v : inst.prior)
    v /= total;

  inst.receiver_utils.resize(static_cast<std::size_t>(p.n * p.types * p.actions * p.states));
  for (auto& u : inst.receiver_utils)
    u = recv_rng.uniform();

  const int n = p.n;
  switch (p.sender) {
  case SenderModel::Tensor:
    inst.sender.kind = SenderUtility::Kind::Tensor;
    inst.sender.tensor.resize(static_cast<std::size_t>(p.states * inst.num_action_profiles()));
    for (auto& u : inst.sender.tensor)
      u = send_rng.uniform();
    break;
  case SenderModel::Anonymous:
    inst.sender.kind = SenderUtility::Kind::SetFunction;
    for (int th = 0; th < p.states; ++th) {
      std::vector<double> v(static_cast<std::size_t>(n + 1));
      for (auto& x : v)
        x = send_rng.uniform();
      std::sort(v.begin(), v.end());
      inst.sender.per_state.push_back(SetFunction::anonymous(n, std::move(v), true));
    }
    break;
  case SenderModel::Supermodular:
    inst.sender.kind = SenderUtility::Kind::SetFunction;
    for (int th = 0; th < p.states; ++th) {
      std::vector<double> a(static_cast<std::size_t>(n));
      std::vector<double> b(static_cast<std::size_t>(n * n), 0.0);
      for (auto& x : a)
        x = send_rng.uniform();
      for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k)
          b[static_cast<std::size_t>(i * n + k)] = send_rng.uniform();
      const std::uint32_t full = 1u << n;
      std::vector<double> v(full, 0.0);
      for (std::uint32_t s = 0; s < full; ++s)
        for (int i = 0; i < n; ++i) {
          if (!(s >> i & 1u))
            continue;
          v[s] += a[static_cast<std::size_t>(i)];
          for (int k = i + 1; k < n; ++k)
            if (s >> k & 1u)
              v[s] += b[static_cast<std::size_t>(i * n + k)];
        }
      const double top = v[full - 1];
      if (top > 0.0)
        for (auto& x : v)
          x = std::min(x / top, 1.0);
      inst.sender.per_state.push_back(SetFunction::supermodular(n, std::move(v), true));
    }
    break;
  case SenderModel::Table:
    inst.sender.kind = SenderUtility::Kind::SetFunction;
    for (int th = 0; th < p.states; ++th) {
      std::vector<double> v(std::size_t{1} << n);
      for (auto& x : v)
        x = send_rng.uniform();
      inst.sender.per_state.push_back(SetFunction::table(n, std::move(v), false));
    }
    break;
  }
  inst.validate();
  return inst;
}

struct SyntheticLossParams {
  int losses = 2; // D
  int dim = 6;    // N, decision set inside the unit simplex of R^N
  int cuts = 2;   // random halfspaces through a neighborhood of the centroid
};

// Finite-loss problem with losses uniform on [0, 1]^{D×N} over a random
// polytope: the simplex {x ≥ 0, Σx ≤ 1} cut by halfspaces that keep the
// centroid strictly inside. Losses stay in [0, 1] on X.
inline FiniteLossProblem synthetic_finite_loss(const SyntheticLossParams& p, std::uint64_t seed) {
  if (p.losses < 1 || p.dim < 1 || p.cuts < 0)
    throw ParamError("synthetic_finite_loss: losses and dim must be positive, cuts nonnegative");
  CounterRng root(seed);
  CounterRng poly_rng = root.split(1), loss_rng = root.split(2);
  const Index n = p.dim;
  Polytope x = Polytope::nonnegative(n);
  x.add_inequality(Vector::Ones(n), 1.0);
  const Vector centroid = Vector::Constant(n, 1.0 / static_cast<double>(n + 1));
  for (int c = 0; c < p.cuts; ++c) {
    Vector a(n);
    for (Index j = 0; j < n; ++j)
      a(j) = poly_rng.uniform(-1.0, 1.0);
    x.add_inequality(a, a.dot(centroid) + poly_rng.uniform(0.05, 0.3));
  }
  FiniteLossProblem prob;
  prob.decision = std::move(x);
  prob.loss_matrix.resize(p.losses, n);
  for (Index d = 0; d < p.losses; ++d)
    for (Index j = 0; j < n; ++j)
      prob.loss_matrix(d, j) = loss_rng.uniform();
  return prob;
}

} // namespace obp
