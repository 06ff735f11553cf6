#pragma once

#include "obp/core/errors.hpp"
#include "obp/core/indexing.hpp"
#include "obp/type_reporting/set_function.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace obp {

struct SenderUtility {
  enum class Kind { Tensor, SetFunction };
  Kind kind = Kind::Tensor;
  // Tensor: value at (θ, a_1, …, a_n), row-major with θ slowest.
  std::vector<double> tensor;
  // SetFunction (binary actions): f_θ(R) with R = receivers playing action 1.
  std::vector<SetFunction> per_state;
};

// n receivers sharing an action set A, m types each, d states with an
// interior prior. receiver_utils is indexed ((r·m + k)·|A| + a)·d + θ.
struct PersuasionInstance {
  int n = 1;
  int d = 1;
  int actions = 2;
  int m = 1;
  std::vector<double> prior;
  std::vector<double> receiver_utils;
  SenderUtility sender;

  double receiver_util(int r, int k, int a, int theta) const {
    return receiver_utils[static_cast<std::size_t>(((r * m + k) * actions + a) * d + theta)];
  }

  RadixCodec action_profiles() const { return {actions, n}; }
  long num_action_profiles() const { return ipow(actions, n); }

  // Bit r of the mask is set when receiver r plays action 1.
  std::uint32_t profile_mask(long profile) const {
    std::uint32_t mask = 0;
    for (int r = n - 1; r >= 0; --r) {
      if (profile % actions == 1)
        mask |= 1u << r;
      profile /= actions;
    }
    return mask;
  }

  double sender_util(long profile, int theta) const {
    if (sender.kind == SenderUtility::Kind::Tensor)
      return sender.tensor[static_cast<std::size_t>(theta * num_action_profiles() + profile)];
    return sender.per_state[static_cast<std::size_t>(theta)](profile_mask(profile));
  }

  bool binary_set_function() const {
    return sender.kind == SenderUtility::Kind::SetFunction;
  }

  void validate() const {
    auto fail = [](const std::string& what) { throw InstanceValidationError(what); };
    if (n < 1 || d < 1 || actions < 1 || m < 1)
      fail("instance: n, states, actions and types must be positive");
    if (static_cast<int>(prior.size()) != d)
      fail("instance: prior has " + std::to_string(prior.size()) + " entries, expected " +
           std::to_string(d));
    double total = 0.0;
    for (double p : prior) {
      if (!(p > 0.0))
        fail("instance: prior must be strictly positive");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      fail("instance: prior must sum to 1");
    const std::size_t nu = static_cast<std::size_t>(n * m * actions * d);
    if (receiver_utils.size() != nu)
      fail("instance: receiver_utils has " + std::to_string(receiver_utils.size()) +
           " entries, expected " + std::to_string(nu));
    for (double u : receiver_utils)
      if (!(u >= 0.0 && u <= 1.0))
        fail("instance: receiver utilities must lie in [0, 1]");
    if (sender.kind == SenderUtility::Kind::Tensor) {
      const std::size_t ns = static_cast<std::size_t>(d * num_action_profiles());
      if (sender.tensor.size() != ns)
        fail("instance: sender tensor has " + std::to_string(sender.tensor.size()) +
             " entries, expected " + std::to_string(ns));
      for (double u : sender.tensor)
        if (!(u >= 0.0 && u <= 1.0))
          fail("instance: sender utilities must lie in [0, 1]");
    } else {
      if (actions != 2)
        fail("instance: set-function sender utilities require binary actions");
      if (static_cast<int>(sender.per_state.size()) != d)
        fail("instance: one set function per state is required");
      for (const auto& f : sender.per_state) {
        if (f.n() != n)
          fail("instance: set function defined over the wrong number of receivers");
        for (double v : f.values())
          if (!(v >= 0.0 && v <= 1.0))
            fail("instance: sender utilities must lie in [0, 1]");
      }
    }
  }
};

} // namespace obp
