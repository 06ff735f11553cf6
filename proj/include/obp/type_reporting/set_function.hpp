#pragma once

#include "obp/core/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace obp {

// Set function over receivers R = {0, …, n−1}, subsets encoded as bit masks
// (bit r set ⇔ receiver r plays action 1).
enum class SetFunctionKind { ExplicitTable, Anonymous, Supermodular };

class SetFunction {
public:
  SetFunction() = default;

  static SetFunction table(int n, std::vector<double> values, bool monotone = false) {
    return make(SetFunctionKind::ExplicitTable, n, std::move(values), monotone);
  }
  static SetFunction supermodular(int n, std::vector<double> values, bool monotone = false) {
    return make(SetFunctionKind::Supermodular, n, std::move(values), monotone);
  }
  // values[c] = f(R) for |R| = c.
  static SetFunction anonymous(int n, std::vector<double> values, bool monotone = false) {
    return make(SetFunctionKind::Anonymous, n, std::move(values), monotone);
  }

  SetFunctionKind kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  bool flagged_monotone() const noexcept { return monotone_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double operator()(std::uint32_t mask) const {
    if (kind_ == SetFunctionKind::Anonymous)
      return values_[static_cast<std::size_t>(std::popcount(mask))];
    return values_[mask];
  }

  bool is_monotone(double tol = 1e-12) const {
    const std::uint32_t full = 1u << n_;
    for (std::uint32_t s = 0; s < full; ++s)
      for (int r = 0; r < n_; ++r)
        if (!(s >> r & 1u) && (*this)(s | (1u << r)) < (*this)(s) - tol)
          return false;
    return true;
  }

  // f(S ∪ {i, j}) − f(S ∪ {i}) ≥ f(S ∪ {j}) − f(S): equivalent to the lattice
  // inequality and checks only O(2ⁿ n²) quadruples.
  bool is_supermodular(double tol = 1e-12) const {
    const std::uint32_t full = 1u << n_;
    for (std::uint32_t s = 0; s < full; ++s)
      for (int i = 0; i < n_; ++i) {
        if (s >> i & 1u)
          continue;
        for (int j = i + 1; j < n_; ++j) {
          if (s >> j & 1u)
            continue;
          const std::uint32_t si = s | (1u << i), sj = s | (1u << j);
          if ((*this)(si | sj) - (*this)(si) < (*this)(sj) - (*this)(s) - tol)
            return false;
        }
      }
    return true;
  }

private:
  static SetFunction make(SetFunctionKind kind, int n, std::vector<double> values, bool monotone) {
    if (n < 0 || n > 30)
      throw InstanceValidationError("SetFunction: unsupported number of receivers");
    const std::size_t expect =
        kind == SetFunctionKind::Anonymous ? static_cast<std::size_t>(n + 1) : std::size_t{1} << n;
    if (values.size() != expect)
      throw InstanceValidationError("SetFunction: expected " + std::to_string(expect) +
                                    " values, got " + std::to_string(values.size()));
    SetFunction f;
    f.kind_ = kind;
    f.n_ = n;
    f.values_ = std::move(values);
    f.monotone_ = monotone;
    if (monotone && n <= 20 && !f.is_monotone())
      throw InstanceValidationError("SetFunction: flagged monotone but is not");
    if (kind == SetFunctionKind::Supermodular && n <= 12 && !f.is_supermodular())
      throw InstanceValidationError("SetFunction: flagged supermodular but is not");
    return f;
  }

  SetFunctionKind kind_ = SetFunctionKind::ExplicitTable;
  int n_ = 0;
  std::vector<double> values_{0.0};
  bool monotone_ = false;
};

} // namespace obp
