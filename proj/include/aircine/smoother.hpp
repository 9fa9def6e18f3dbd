#pragma once

#include <vector>

#include "aircine/geometry.hpp"
#include "aircine/world.hpp"

namespace aircine {

struct SmootherConfig {
  double fine_dt = 0.5;          // seconds between fine samples
  double w_smooth = 1.0;         // squared second differences
  double w_track = 5.0;          // squared deviation from coarse waypoints
  double w_obs = 5000.0;         // squared obstacle-margin hinge
  double w_sep = 2000.0;         // squared separation hinge vs other cameras
  double sep_distance = 1.0;     // meters
  double obstacle_margin = 0.5;  // meters of required clearance
  // Obstacle hinge evaluation points per segment. 1 checks the fine samples
  // only; higher values add linear subdivision points so fast segments
  // cannot step over thin obstacles between samples.
  int obstacle_subsamples = 8;
  int max_iters = 100;
  double step_size = 0.1;
  double convergence_tol = 1e-6;

  void validate() const;
};

// Dense trajectory at fine_dt spacing. The first sample is the vehicle's
// current position and stays fixed through optimization.
struct FinePath {
  int uav_id = 0;
  double fine_dt = 0.5;
  std::vector<Vec3> samples;

  double horizon() const { return fine_dt * (samples.size() - 1); }

  // Cubic interpolation between samples (linear on the boundary segments).
  // Throws std::out_of_range outside [0, horizon].
  Vec3 sample_at(double t) const;
};

// Inputs the optimizer reads but never mutates.
struct SmootherContext {
  std::vector<Vec3> waypoint_targets;  // coarse plan positions, world frame
  int coarse_stride = 4;               // fine samples per coarse step
  const DistanceField* field = nullptr;           // null: obstacle-free
  std::vector<std::vector<Vec3>> other_paths;     // peers, same sample grid
};

struct SmootherStats {
  int iterations = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  bool monotone = true;
};

// Weighted objective contributions of one path; sums to the objective.
struct SmootherTerms {
  double smooth = 0.0;
  double track = 0.0;
  double obstacle = 0.0;
  double separation = 0.0;
};

SmootherTerms smoother_term_breakdown(const FinePath& path,
                                      const SmootherContext& ctx,
                                      const SmootherConfig& cfg);

double smoother_objective(const FinePath& path, const SmootherContext& ctx,
                          const SmootherConfig& cfg);

// Analytic gradient for free samples 1..N-1. The distance-field term uses
// central differences on the field (half-voxel step).
std::vector<Vec3> smoother_gradient(const FinePath& path,
                                    const SmootherContext& ctx,
                                    const SmootherConfig& cfg);

// Preconditioned descent on the objective: steps are solved against the
// second-difference normal matrix so updates bend the whole path instead of
// single samples. Accepted steps never increase the objective.
FinePath smooth_path(const Vec3& start, int uav_id, double horizon_seconds,
                     const SmootherContext& ctx, const SmootherConfig& cfg,
                     SmootherStats* stats = nullptr);

}  // namespace aircine
