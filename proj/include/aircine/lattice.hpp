#pragma once

#include <cstdint>
#include <vector>

#include "aircine/geometry.hpp"

namespace aircine {

// Discretization of the actor-centered spherical viewpoint space.
//
// Yaw bins equally divide [0, 2*pi); tilt bins divide (0, pi/2] so the
// exact overhead pole is excluded by default (it would collapse n_theta
// states onto one point). Radii are explicit shell distances in meters.
struct LatticeSpec {
  int n_theta = 16;
  int n_phi = 6;
  std::vector<double> rho_values = {2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
  int horizon_steps = 5;   // planning timesteps T
  double step_dt = 2.0;    // seconds per planning step
  bool include_pole = false;  // tilt bins span [0, pi/2] instead of (0, pi/2]

  int n_rho() const { return static_cast<int>(rho_values.size()); }
  int num_states() const { return n_theta * n_phi * n_rho(); }
  double horizon_seconds() const { return horizon_steps * step_dt; }

  double theta_of(int i_theta) const { return kTwoPi * i_theta / n_theta; }
  double phi_of(int i_phi) const {
    if (include_pole) return (kPi / 2.0) * i_phi / (n_phi - 1);
    return (kPi / 2.0) * (i_phi + 1) / n_phi;
  }
  double rho_of(int i_rho) const { return rho_values[i_rho]; }

  // Throws ConfigError on violated invariants.
  void validate() const;
};

struct SphericalIndex {
  int i_theta = 0;
  int i_phi = 0;
  int i_rho = 0;
  bool operator==(const SphericalIndex&) const = default;
};

struct ActorPose {
  double x = 0.0, y = 0.0, z = 0.0;
  double heading = 0.0;  // radians, [0, 2*pi)
  Vec3 position() const { return {x, y, z}; }
};

struct CameraPose {
  double x = 0.0, y = 0.0, z = 0.0;
  double yaw = 0.0;  // radians, [0, 2*pi); points toward the actor
  Vec3 position() const { return {x, y, z}; }
};

// Camera pose for spherical coordinates relative to an actor pose.
// Position: actor + rho * (cos(psi_a+theta)sin(phi), sin(psi_a+theta)sin(phi), cos(phi)).
// Yaw faces the actor in the horizontal plane.
CameraPose spherical_to_world(double theta, double phi, double rho,
                              const ActorPose& actor);

// Immutable viewpoint state space: |S| states with precomputed
// actor-relative offsets (actor at origin, heading 0) and the
// per-state neighbor graph used for timestep transitions.
class Lattice {
 public:
  explicit Lattice(LatticeSpec spec);

  const LatticeSpec& spec() const { return spec_; }
  int num_states() const { return spec_.num_states(); }

  // Linearized state id: (i_theta * n_phi + i_phi) * n_rho + i_rho.
  int linear_index(const SphericalIndex& idx) const {
    return (idx.i_theta * spec_.n_phi + idx.i_phi) * spec_.n_rho() + idx.i_rho;
  }
  SphericalIndex index_of(int linear) const {
    const int n_rho = spec_.n_rho();
    return {linear / (spec_.n_phi * n_rho), (linear / n_rho) % spec_.n_phi,
            linear % n_rho};
  }

  // Actor-relative position of a state (actor at origin, heading 0).
  const Vec3& canonical_offset(int linear) const { return offsets_[linear]; }

  // Sorted neighbor state ids reachable in one timestep; includes self.
  // Yaw wraps modulo n_theta; tilt and radius clamp at their bounds.
  const std::vector<int32_t>& neighbors(int linear) const {
    return neighbors_[linear];
  }

  CameraPose to_world(const SphericalIndex& idx, const ActorPose& actor) const;
  CameraPose to_world(int linear, const ActorPose& actor) const {
    return to_world(index_of(linear), actor);
  }

  // State whose world position is closest to the pose; ties break to the
  // lowest linearized index. Throws NumericError when the pose coincides
  // with the actor position.
  SphericalIndex nearest_state(const CameraPose& pose,
                               const ActorPose& actor) const;

 private:
  LatticeSpec spec_;
  std::vector<Vec3> offsets_;
  std::vector<std::vector<int32_t>> neighbors_;
};

}  // namespace aircine
