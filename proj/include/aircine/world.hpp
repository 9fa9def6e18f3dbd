#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aircine/geometry.hpp"
#include "aircine/lattice.hpp"

namespace aircine {

struct BoxPrimitive {
  Vec3 min{0, 0, 0};
  Vec3 max{0, 0, 0};
};

struct CylinderPrimitive {
  double cx = 0.0, cy = 0.0;  // axis position (vertical axis)
  double radius = 0.0;
  double z_min = 0.0, z_max = 0.0;
};

struct SceneDescription {
  Vec3 bounds_min{-10.0, -10.0, 0.0};
  Vec3 bounds_max{10.0, 10.0, 8.0};
  std::vector<BoxPrimitive> boxes;
  std::vector<CylinderPrimitive> cylinders;

  void validate() const;
};

// Dense occupancy over an axis-aligned grid. Cell (i,j,k) spans
// [origin + i*res, origin + (i+1)*res) per axis.
class VoxelGrid {
 public:
  VoxelGrid(Vec3 origin, double resolution, Eigen::Vector3i dims);

  // Cells with positive-volume overlap against any primitive get occupancy 1.
  static VoxelGrid voxelize(const SceneDescription& scene, double resolution);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const Eigen::Vector3i& dims() const { return dims_; }
  std::size_t cell_count() const { return occ_.size(); }

  float at(int ix, int iy, int iz) const { return occ_[flat(ix, iy, iz)]; }
  float& at(int ix, int iy, int iz) { return occ_[flat(ix, iy, iz)]; }

  Vec3 cell_center(int ix, int iy, int iz) const {
    return origin_ + resolution_ * Vec3(ix + 0.5, iy + 0.5, iz + 0.5);
  }

  // Occupancy of the cell containing p; points outside the grid are free.
  float sample(const Vec3& p) const;

  std::size_t flat(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(iz) * dims_.y() + iy) * dims_.x() + ix;
  }

 private:
  Vec3 origin_;
  double resolution_;
  Eigen::Vector3i dims_;
  std::vector<float> occ_;
};

// Signed Euclidean distance (meters) on cell centers: positive in free
// space (distance to the nearest occupied cell center), non-positive in
// occupied cells (minus the distance to the nearest free cell center).
// When one side is empty the value saturates at +-free_sentinel().
class DistanceField {
 public:
  static DistanceField build(const VoxelGrid& grid,
                             float occupied_threshold = 0.5f);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const Eigen::Vector3i& dims() const { return dims_; }
  double free_sentinel() const { return sentinel_; }

  double at_cell(int ix, int iy, int iz) const {
    return dist_[(static_cast<std::size_t>(iz) * dims_.y() + iy) * dims_.x() +
                 ix];
  }

  // Trilinear interpolation over cell centers; queries are clamped to the
  // center bounding box.
  double sample(const Vec3& p) const;

  // Central differences of sample() with step h per axis.
  Vec3 gradient(const Vec3& p, double h) const;

 private:
  Vec3 origin_;
  double resolution_ = 0.0;
  Eigen::Vector3i dims_{0, 0, 0};
  double sentinel_ = 0.0;
  std::vector<double> dist_;
};

// Debug export: writes <prefix>.txt (dims, origin, resolution, value type)
// and <prefix>.bin with the flat cell values, x-major.
void export_grid(const VoxelGrid& grid, const std::string& prefix);
void export_grid(const DistanceField& field, const std::string& prefix);

// Scripted actor trajectory: piecewise-linear position, shortest-arc heading.
struct ActorScript {
  struct Waypoint {
    double t = 0.0;
    ActorPose pose;
  };
  std::vector<Waypoint> waypoints;

  void validate() const;
  double start_time() const { return waypoints.front().t; }
  double end_time() const { return waypoints.back().t; }

  // Throws ConfigError outside [start_time, end_time].
  ActorPose at(double t) const;
  // Clamps t into the scripted range (used for forecast windows that look
  // past the script end).
  ActorPose at_clamped(double t) const;
};

// Occupancy regridded onto the actor-centered lattice for each planning
// timestep, plus per-(state, t) occupancy samples along the sight line from
// the camera position to the actor, at one-voxel arc spacing.
class SphericalGrid {
 public:
  SphericalGrid(const VoxelGrid& grid, std::span<const ActorPose> actor_per_step,
                const Lattice& lattice);

  int timesteps() const { return timesteps_; }
  int num_states() const { return num_states_; }

  float occupancy(int state, int t) const {
    return occ_[static_cast<std::size_t>(state) * timesteps_ + t];
  }

  // Spacing (meters) between ray samples for this state/timestep.
  double ray_ds(int state, int t) const {
    return ray_ds_[static_cast<std::size_t>(state) * timesteps_ + t];
  }
  std::span<const float> ray(int state, int t) const {
    const std::size_t cell = static_cast<std::size_t>(state) * timesteps_ + t;
    return {ray_values_.data() + ray_begin_[cell],
            ray_begin_[cell + 1] - ray_begin_[cell]};
  }

 private:
  int num_states_ = 0;
  int timesteps_ = 0;
  std::vector<float> occ_;
  std::vector<double> ray_ds_;
  std::vector<std::size_t> ray_begin_;
  std::vector<float> ray_values_;
};

}  // namespace aircine
