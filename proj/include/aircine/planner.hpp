#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aircine/costmodel.hpp"
#include "aircine/lattice.hpp"

namespace aircine {

// Per-(timestep, state) scalar field, timestep-major so a backward pass
// reads contiguous layers.
struct StateTimeMap {
  int num_states = 0;
  int timesteps = 0;
  std::vector<double> values;

  StateTimeMap() = default;
  StateTimeMap(int n, int t) : num_states(n), timesteps(t) {
    values.assign(static_cast<std::size_t>(n) * t, 0.0);
  }
  double& at(int state, int t) {
    return values[static_cast<std::size_t>(t) * num_states + state];
  }
  double at(int state, int t) const {
    return values[static_cast<std::size_t>(t) * num_states + state];
  }
  std::span<double> layer(int t) {
    return {values.data() + static_cast<std::size_t>(t) * num_states,
            static_cast<std::size_t>(num_states)};
  }
  std::span<const double> layer(int t) const {
    return {values.data() + static_cast<std::size_t>(t) * num_states,
            static_cast<std::size_t>(num_states)};
  }
};

using CostMap = StateTimeMap;   // instantaneous cost per (state, t)
using ValueMap = StateTimeMap;  // cost-to-go per (state, t)

struct WaypointPath {
  int uav_id = 0;
  std::vector<int32_t> states;  // length T, consecutive entries are neighbors
};

struct PlanResult {
  std::vector<WaypointPath> paths;      // one per camera, planning order
  std::vector<double> costs;            // per camera, given earlier cameras
  double total_cost = 0.0;
  double wall_ms = 0.0;
  std::vector<ActorPose> actor_snapshot;  // poses the plan was built against
};

// Single backward pass: V(s, T-1) = C(s, T-1);
// V(s, t) = C(s, t) + min over neighbors s' of V(s', t+1).
ValueMap backward_induction(const CostMap& costmap, const Lattice& lattice);

// Greedy descent over the cost-to-go map from the start state. Ties break
// to the lowest state id.
WaypointPath extract_path(const ValueMap& valuemap, const Lattice& lattice,
                          int start_state, int uav_id = 0);

// Builds the cost map for one camera given already-fixed paths (full
// recomputation; the reference the incremental planner must match).
CostMap build_cost_map(const PlanContext& ctx,
                       std::span<const WaypointPath> fixed_paths);

// Observer invoked after each camera's pass with its cost and value maps.
using PassObserver =
    std::function<void(int uav_index, const CostMap&, const ValueMap&)>;

// Sequential greedy allocation: cameras are planned in input order, each
// against the accumulated pairwise costs of all previously fixed paths.
PlanResult plan_greedy(std::span<const int32_t> start_states,
                       const PlanContext& ctx,
                       const PassObserver& observer = {});

struct ExhaustiveLimits {
  std::uint64_t max_joint_paths = 20'000'000;
};

// Jointly optimal plan by enumeration of all neighbor-feasible path tuples.
// Ties break lexicographically on the concatenated state sequence. Throws
// SizeLimitError when the joint path count exceeds the limit.
PlanResult plan_exhaustive(std::span<const int32_t> start_states,
                           const PlanContext& ctx,
                           const ExhaustiveLimits& limits = {});

// All neighbor-feasible paths of length T from a start state, in
// lexicographic order of their state sequences.
std::vector<std::vector<int32_t>> enumerate_paths(const Lattice& lattice,
                                                  int start_state, int T);

// Joint objective of a set of paths: per-state base costs plus pairwise
// terms over unordered camera pairs (both visibility directions charged).
double joint_cost(std::span<const WaypointPath> paths, const PlanContext& ctx);

}  // namespace aircine
