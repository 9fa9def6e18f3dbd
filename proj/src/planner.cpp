#include "aircine/planner.hpp"

#include <chrono>
#include <limits>

#include "aircine/errors.hpp"

namespace aircine {

ValueMap backward_induction(const CostMap& costmap, const Lattice& lattice) {
  const int n = costmap.num_states;
  const int T = costmap.timesteps;
  ValueMap value(n, T);
  for (int s = 0; s < n; ++s) value.at(s, T - 1) = costmap.at(s, T - 1);
  for (int t = T - 2; t >= 0; --t) {
    const auto next = value.layer(t + 1);
    for (int s = 0; s < n; ++s) {
      double best = std::numeric_limits<double>::infinity();
      for (int32_t nb : lattice.neighbors(s))
        if (next[nb] < best) best = next[nb];
      value.at(s, t) = costmap.at(s, t) + best;
    }
  }
  return value;
}

WaypointPath extract_path(const ValueMap& valuemap, const Lattice& lattice,
                          int start_state, int uav_id) {
  WaypointPath path;
  path.uav_id = uav_id;
  path.states.reserve(valuemap.timesteps);
  path.states.push_back(static_cast<int32_t>(start_state));
  for (int t = 1; t < valuemap.timesteps; ++t) {
    const auto layer = valuemap.layer(t);
    int32_t best_state = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int32_t nb : lattice.neighbors(path.states.back())) {
      if (layer[nb] < best) {  // strict: ties keep the lowest id
        best = layer[nb];
        best_state = nb;
      }
    }
    path.states.push_back(best_state);
  }
  return path;
}

CostMap build_cost_map(const PlanContext& ctx,
                       std::span<const WaypointPath> fixed_paths) {
  const int n = ctx.lattice.num_states();
  const int T = ctx.sgrid.timesteps();
  CostMap cost(n, T);
  std::vector<int32_t> fixed_at_t(fixed_paths.size());
  for (int t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < fixed_paths.size(); ++j)
      fixed_at_t[j] = fixed_paths[j].states[t];
    for (int s = 0; s < n; ++s)
      cost.at(s, t) = state_cost(s, t, fixed_at_t, ctx);
  }
  return cost;
}

PlanResult plan_greedy(std::span<const int32_t> start_states,
                       const PlanContext& ctx, const PassObserver& observer) {
  if (start_states.empty())
    throw ConfigError("plan_greedy: need at least one camera");
  const auto t0 = std::chrono::steady_clock::now();

  const int n = ctx.lattice.num_states();
  const int T = ctx.sgrid.timesteps();

  // Base terms do not depend on other cameras; pairwise terms accumulate
  // path by path so each pass costs the same regardless of camera index.
  CostMap base(n, T);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < n; ++s)
      base.at(s, t) = state_cost(s, t, {}, ctx);

  CostMap current = base;
  PlanResult result;
  result.paths.reserve(start_states.size());
  result.costs.reserve(start_states.size());
  for (std::size_t i = 0; i < start_states.size(); ++i) {
    const ValueMap value = backward_induction(current, ctx.lattice);
    WaypointPath path = extract_path(value, ctx.lattice, start_states[i],
                                     static_cast<int>(i));
    const double cost_i = value.at(start_states[i], 0);
    if (observer) observer(static_cast<int>(i), current, value);
    result.costs.push_back(cost_i);
    result.total_cost += cost_i;
    if (i + 1 < start_states.size()) {
      for (int t = 0; t < T; ++t) {
        const int32_t sj = path.states[t];
        for (int s = 0; s < n; ++s)
          current.at(s, t) += pairwise_cost(s, sj, ctx.tables, ctx.weights);
      }
    }
    result.paths.push_back(std::move(path));
  }

  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return result;
}

std::vector<std::vector<int32_t>> enumerate_paths(const Lattice& lattice,
                                                  int start_state, int T) {
  std::vector<std::vector<int32_t>> out;
  std::vector<int32_t> current;
  current.reserve(T);
  const std::function<void(int, int)> dfs = [&](int state, int depth) {
    current.push_back(static_cast<int32_t>(state));
    if (depth == T - 1) {
      out.push_back(current);
    } else {
      for (int32_t nb : lattice.neighbors(state)) dfs(nb, depth + 1);
    }
    current.pop_back();
  };
  dfs(start_state, 0);
  return out;
}

double joint_cost(std::span<const WaypointPath> paths, const PlanContext& ctx) {
  double total = 0.0;
  const int T = ctx.sgrid.timesteps();
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (int t = 0; t < T; ++t)
      total += state_cost(paths[i].states[t], t, {}, ctx);
  for (std::size_t a = 0; a < paths.size(); ++a)
    for (std::size_t b = a + 1; b < paths.size(); ++b)
      for (int t = 0; t < T; ++t)
        total += pairwise_cost(paths[a].states[t], paths[b].states[t],
                               ctx.tables, ctx.weights);
  return total;
}

PlanResult plan_exhaustive(std::span<const int32_t> start_states,
                           const PlanContext& ctx,
                           const ExhaustiveLimits& limits) {
  if (start_states.empty())
    throw ConfigError("plan_exhaustive: need at least one camera");
  const auto t0 = std::chrono::steady_clock::now();
  const int T = ctx.sgrid.timesteps();

  std::vector<std::vector<std::vector<int32_t>>> candidates;
  std::uint64_t joint = 1;
  for (int32_t start : start_states) {
    candidates.push_back(enumerate_paths(ctx.lattice, start, T));
    const std::uint64_t count = candidates.back().size();
    if (count == 0 || joint > limits.max_joint_paths / count)
      throw SizeLimitError("plan_exhaustive: joint path count exceeds the limit");
    joint *= count;
  }

  const std::size_t n_uavs = start_states.size();
  std::vector<std::size_t> pick(n_uavs, 0);
  std::vector<std::size_t> best_pick;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<WaypointPath> tuple(n_uavs);
  for (std::size_t i = 0; i < n_uavs; ++i) tuple[i].uav_id = static_cast<int>(i);

  // Odometer over per-camera candidate lists; candidates are already in
  // lexicographic order, so the first strict minimum is the lexicographically
  // smallest optimal tuple.
  while (true) {
    for (std::size_t i = 0; i < n_uavs; ++i)
      tuple[i].states = candidates[i][pick[i]];
    const double cost = joint_cost(tuple, ctx);
    if (cost < best_cost) {
      best_cost = cost;
      best_pick = pick;
    }
    std::size_t axis = n_uavs;
    while (axis > 0) {
      --axis;
      if (++pick[axis] < candidates[axis].size()) break;
      pick[axis] = 0;
      if (axis == 0) goto done;
    }
  }
done:

  PlanResult result;
  for (std::size_t i = 0; i < n_uavs; ++i) {
    WaypointPath p;
    p.uav_id = static_cast<int>(i);
    p.states = candidates[i][best_pick[i]];
    result.paths.push_back(std::move(p));
  }
  result.total_cost = best_cost;
  result.costs.assign(n_uavs, 0.0);
  result.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return result;
}

}  // namespace aircine
