#include "aircine/selector.hpp"

#include <algorithm>
#include <cmath>

#include "aircine/errors.hpp"

namespace aircine {

void SelectorConfig::validate() const {
  if (w_vis < 0.0 || w_cine < 0.0)
    throw ConfigError("selector: score weights must be non-negative");
  if (!(decay_rate > 0.0 && decay_rate < 1.0))
    throw ConfigError("selector: decay_rate must be in (0, 1)");
  if (recovery_rate < 0.0)
    throw ConfigError("selector: recovery_rate must be non-negative");
  if (!(0.0 < min_shot && min_shot < max_shot))
    throw ConfigError("selector: need 0 < min_shot < max_shot");
}

Selector::Selector(const SelectorConfig& cfg, int num_cameras) : cfg_(cfg) {
  cfg_.validate();
  if (num_cameras < 1) throw ConfigError("selector: need at least one camera");
  multipliers_.assign(num_cameras, 1.0);
}

std::vector<double> Selector::score(
    std::span<const CameraScoreInput> costs) const {
  std::vector<double> q(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i)
    q[i] = multipliers_[i] *
           std::exp(-(cfg_.w_vis * costs[i].vis_cost +
                      cfg_.w_cine * costs[i].cine_cost));
  return q;
}

int Selector::step(std::span<const double> q, double dt) {
  if (dt <= 0.0) throw ConfigError("selector: dt must be positive");
  const int n = static_cast<int>(multipliers_.size());

  const auto best_other = [&]() {
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (i == current_) continue;
      if (best < 0 || q[i] > q[best]) best = i;  // ties keep the lowest id
    }
    return best;
  };

  if (current_ < 0) {
    // first step: highest score wins outright
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (q[i] > q[best]) best = i;
    current_ = best;
    time_in_shot_ = 0.0;
  } else if (time_in_shot_ >= cfg_.min_shot - 1e-9) {
    const int other = best_other();
    if (other >= 0) {
      const bool force = time_in_shot_ + dt > cfg_.max_shot + 1e-9;
      if (force || q[other] > q[current_]) {
        current_ = other;
        time_in_shot_ = 0.0;
      }
    }
  }

  multipliers_[current_] *= std::pow(cfg_.decay_rate, dt);
  for (int i = 0; i < n; ++i)
    if (i != current_)
      multipliers_[i] = std::min(1.0, multipliers_[i] + cfg_.recovery_rate * dt);
  time_in_shot_ += dt;
  return current_;
}

}  // namespace aircine
