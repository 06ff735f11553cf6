#pragma once

#include "obp/persuasion/instance.hpp"
#include "obp/persuasion/utility.hpp"
#include "obp/type_reporting/ftrl.hpp"
#include "obp/type_reporting/g_value.hpp"
#include "obp/type_reporting/menu.hpp"

#include <cmath>
#include <stdexcept>

namespace obp {

struct Algorithm2Options {
  double alpha = 0.0; // 0: √(m/T)
  FtrlOptions ftrl;
  bool dual_ellipsoid = false; // lines 4 and 5 through the dual ellipsoid paths
};

struct Algorithm2Round {
  Vector menu;  // committed menu φ_t
  Vector joint; // joint scheme consistent with the reported entries
  double value = 0.0; // g^{k_t}(φ_t)
};

// FTRL over menus: commit φ_t, receive the reported profile k_t, signal
// with the best joint scheme consistent with φ_t's reported entries, then
// update φ_{t+1} = argmax_{φ∈Λ} Σ_{τ≤t} g^{k_τ}(φ) − ‖φ‖²/(2α).
class Algorithm2 {
public:
  Algorithm2(PersuasionInstance inst, long horizon, Algorithm2Options opts = {})
      : inst_(std::move(inst)), horizon_(horizon), opts_(std::move(opts)) {
    if (horizon_ < 1)
      throw std::invalid_argument("Algorithm2: horizon must be positive");
    inst_.validate();
    alpha_ = opts_.alpha > 0.0 ? opts_.alpha
                               : std::sqrt(static_cast<double>(inst_.m) / static_cast<double>(horizon_));
    if (opts_.dual_ellipsoid)
      opts_.ftrl.method = FtrlMethod::DualEllipsoid;
    menu_ = ftrl_update(inst_, history_, alpha_, opts_.ftrl, &warm_).menu;
  }

  const PersuasionInstance& instance() const noexcept { return inst_; }
  const Vector& menu() const noexcept { return menu_; }
  double alpha() const noexcept { return alpha_; }
  const ProfileCounts& history() const noexcept { return history_; }
  long round() const noexcept { return history_.total(); }

  // Line 4 for the reported profile under the current menu.
  Algorithm2Round play(const TypeProfile& reported) const {
    Algorithm2Round out;
    out.menu = menu_;
    const GValue g = g_value_primal(inst_, menu_, reported);
    out.joint = g.joint;
    out.value = opts_.dual_ellipsoid ? g_value_dual_ellipsoid(inst_, menu_, reported) : g.value;
    return out;
  }

  // Line 5.
  void update(const TypeProfile& reported) {
    history_.add(reported);
    last_ = ftrl_update(inst_, history_, alpha_, opts_.ftrl, &warm_);
    menu_ = last_.menu;
  }

  Algorithm2Round step(const TypeProfile& reported) {
    Algorithm2Round out = play(reported);
    update(reported);
    return out;
  }

  const FtrlResult& last_update() const noexcept { return last_; }

private:
  PersuasionInstance inst_;
  long horizon_;
  Algorithm2Options opts_;
  double alpha_ = 0.0;
  ProfileCounts history_;
  FtrlWarmStart warm_;
  FtrlResult last_;
  Vector menu_;
};

} // namespace obp
