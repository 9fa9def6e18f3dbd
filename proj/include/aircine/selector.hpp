#pragma once

#include <span>
#include <vector>

#include "aircine/geometry.hpp"

namespace aircine {

struct SelectorConfig {
  double w_vis = 1.0;
  double w_cine = 1.0;
  double decay_rate = 0.7;     // per-second multiplier while on air
  double recovery_rate = 0.2;  // per-second linear recovery toward 1
  double min_shot = 3.0;       // seconds
  double max_shot = 8.0;       // seconds

  void validate() const;
};

struct CameraScoreInput {
  double vis_cost = 0.0;
  double cine_cost = 0.0;
};

// Live stream selection: scores cameras from visibility and view-prior
// costs, decays the on-air camera's score multiplier so long-held shots
// lose out to rested alternatives, and enforces the shot length limits.
class Selector {
 public:
  Selector(const SelectorConfig& cfg, int num_cameras);

  int current() const { return current_; }
  double time_in_shot() const { return time_in_shot_; }
  std::span<const double> multipliers() const { return multipliers_; }

  // Q_i = multiplier_i * exp(-(w_vis * vis_cost_i + w_cine * cine_cost_i)).
  std::vector<double> score(std::span<const CameraScoreInput> costs) const;

  // Advances the selection by dt given the current scores. Switching is
  // blocked before min_shot, forced when the shot would exceed max_shot,
  // and otherwise happens when another camera strictly wins. Returns the
  // camera on air for the next interval.
  int step(std::span<const double> q, double dt);

 private:
  SelectorConfig cfg_;
  int current_ = -1;
  double time_in_shot_ = 0.0;
  std::vector<double> multipliers_;
};

}  // namespace aircine
