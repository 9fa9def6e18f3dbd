#include "aircine/lattice.hpp"

#include <algorithm>
#include <limits>

#include "aircine/errors.hpp"

namespace aircine {

void LatticeSpec::validate() const {
  if (n_theta < 2) throw ConfigError("lattice: n_theta must be >= 2");
  if (n_phi < 1) throw ConfigError("lattice: n_phi must be >= 1");
  if (rho_values.empty()) throw ConfigError("lattice: rho_values must be non-empty");
  for (size_t i = 0; i < rho_values.size(); ++i) {
    if (rho_values[i] <= 0.0)
      throw ConfigError("lattice: rho_values must be positive");
    if (i > 0 && rho_values[i] <= rho_values[i - 1])
      throw ConfigError("lattice: rho_values must be strictly increasing");
  }
  if (horizon_steps < 1) throw ConfigError("lattice: horizon_steps must be >= 1");
  if (step_dt <= 0.0) throw ConfigError("lattice: step_dt must be positive");
  if (include_pole && n_phi < 2)
    throw ConfigError("lattice: include_pole requires n_phi >= 2");
}

CameraPose spherical_to_world(double theta, double phi, double rho,
                              const ActorPose& actor) {
  const double a = actor.heading + theta;
  CameraPose cam;
  cam.x = actor.x + rho * std::cos(a) * std::sin(phi);
  cam.y = actor.y + rho * std::sin(a) * std::sin(phi);
  cam.z = actor.z + rho * std::cos(phi);
  const double dx = actor.x - cam.x;
  const double dy = actor.y - cam.y;
  cam.yaw = (dx * dx + dy * dy < 1e-24) ? 0.0 : wrap_angle(std::atan2(dy, dx));
  return cam;
}

Lattice::Lattice(LatticeSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int n = num_states();
  offsets_.resize(n);
  const ActorPose origin{};
  for (int s = 0; s < n; ++s) {
    const SphericalIndex idx = index_of(s);
    const CameraPose cam = spherical_to_world(
        spec_.theta_of(idx.i_theta), spec_.phi_of(idx.i_phi),
        spec_.rho_of(idx.i_rho), origin);
    offsets_[s] = cam.position();
  }

  neighbors_.resize(n);
  for (int s = 0; s < n; ++s) {
    const SphericalIndex idx = index_of(s);
    std::vector<int32_t>& nb = neighbors_[s];
    for (int dt = -1; dt <= 1; ++dt) {
      for (int dp = -1; dp <= 1; ++dp) {
        for (int dr = -1; dr <= 1; ++dr) {
          SphericalIndex m;
          m.i_theta = (idx.i_theta + dt + spec_.n_theta) % spec_.n_theta;
          m.i_phi = std::clamp(idx.i_phi + dp, 0, spec_.n_phi - 1);
          m.i_rho = std::clamp(idx.i_rho + dr, 0, spec_.n_rho() - 1);
          nb.push_back(static_cast<int32_t>(linear_index(m)));
        }
      }
    }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

CameraPose Lattice::to_world(const SphericalIndex& idx,
                             const ActorPose& actor) const {
  return spherical_to_world(spec_.theta_of(idx.i_theta),
                            spec_.phi_of(idx.i_phi), spec_.rho_of(idx.i_rho),
                            actor);
}

SphericalIndex Lattice::nearest_state(const CameraPose& pose,
                                      const ActorPose& actor) const {
  if ((pose.position() - actor.position()).squaredNorm() < 1e-24)
    throw NumericError("nearest_state: camera pose coincides with the actor");
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  const int n = num_states();
  for (int s = 0; s < n; ++s) {
    const CameraPose cam = to_world(s, actor);
    const double d2 = (cam.position() - pose.position()).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = s;
    }
  }
  return index_of(best);
}

}  // namespace aircine
