#pragma once

namespace obp::tol {

// Primal feasibility / membership tolerance.
inline constexpr double feas = 1e-8;
// Primal-dual objective gap accepted on an Optimal LP return.
inline constexpr double gap = 1e-7;
// Ties between best-response actions.
inline constexpr double tie = 1e-9;
// Signals with marginal probability below this are treated as never sent.
inline constexpr double zero_prob = 1e-12;
// Residual accepted by the elastic preimage LP.
inline constexpr double preimage = 1e-7;

} // namespace obp::tol

namespace obp::caps {

// Direct-scheme instances (A^{mn} coordinates per state).
inline constexpr int max_receivers_general = 3;
inline constexpr int max_types_general = 3;
inline constexpr int max_actions_general = 3;
inline constexpr int max_states_general = 4;
// Binary-action set-function instances.
inline constexpr int max_receivers_set_function = 8;
// Exhaustive set-function oracle.
inline constexpr int max_receivers_brute_force = 20;

} // namespace obp::caps
