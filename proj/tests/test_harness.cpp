#include <doctest.h>

#include <cmath>
#include <sstream>

#include "aircine/harness.hpp"
#include "aircine/scenario.hpp"

using namespace aircine;

namespace {

// Stationary actor, empty world, one camera parked one yaw bin away from
// the lowest-index state.
Scenario settle_scenario() {
  return parse_scenario(R"({
    "name": "settle",
    "scene": {"bounds_min": [-10, -10, 0], "bounds_max": [10, 10, 9]},
    "actor": {"waypoints": [
      {"t": 0, "position": [0, 0, 0], "heading": 0},
      {"t": 10, "position": [0, 0, 0], "heading": 0}
    ]},
    "uavs": [{"position": [0.478, 0.198, 1.932]}],
    "run": {"duration": 10.0}
  })");
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("free camera settles at a constant viewpoint with zero costs") {
  const RunReport report = run_scenario(settle_scenario());
  REQUIRE(report.trajectories.size() == 1);

  for (const CycleTrace& cycle : report.cycles)
    for (const UavCycleTrace& uav : cycle.uavs)
      CHECK(uav.terms.weighted_total == 0.0);

  const auto& traj = report.trajectories[0];
  const Vec3 final_pos = traj.back().position;
  for (const auto& s : traj)
    if (s.t >= 8.0) CHECK((s.position - final_pos).norm() < 1e-3);
}

TEST_CASE("trajectory sample counts follow duration x sample rate") {
  const Scenario scenario = settle_scenario();
  const RunReport report = run_scenario(scenario);
  const std::size_t expected =
      static_cast<std::size_t>(scenario.run.duration * scenario.run.sample_hz) + 1;
  for (const auto& traj : report.trajectories) CHECK(traj.size() == expected);
}

TEST_CASE("identical scenarios produce identical reports") {
  const Scenario scenario = load_scenario(SCENARIO_DIR "/narrow_gap.json");
  const RunReport a = run_scenario(scenario);
  const RunReport b = run_scenario(scenario);

  REQUIRE(a.trajectories.size() == b.trajectories.size());
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
    REQUIRE(a.trajectories[i].size() == b.trajectories[i].size());
    for (std::size_t k = 0; k < a.trajectories[i].size(); ++k) {
      CHECK(a.trajectories[i][k].position == b.trajectories[i][k].position);
      CHECK(a.trajectories[i][k].yaw == b.trajectories[i][k].yaw);
    }
  }
  REQUIRE(a.timeline.size() == b.timeline.size());
  for (std::size_t k = 0; k < a.timeline.size(); ++k) {
    CHECK(a.timeline[k].camera == b.timeline[k].camera);
    CHECK(a.timeline[k].t_start == b.timeline[k].t_start);
    CHECK(a.timeline[k].t_end == b.timeline[k].t_end);
  }
  REQUIRE(a.cycles.size() == b.cycles.size());
  for (std::size_t k = 0; k < a.cycles.size(); ++k)
    for (std::size_t i = 0; i < a.cycles[k].uavs.size(); ++i)
      CHECK(a.cycles[k].uavs[i].terms.weighted_total ==
            b.cycles[k].uavs[i].terms.weighted_total);
}

TEST_CASE("smoother fan-out across threads changes nothing") {
  const Scenario scenario = load_scenario(SCENARIO_DIR "/narrow_gap.json");
  RunOptions serial;
  RunOptions threaded;
  threaded.threads = 2;
  const RunReport a = run_scenario(scenario, serial);
  const RunReport b = run_scenario(scenario, threaded);
  for (std::size_t i = 0; i < a.trajectories.size(); ++i)
    for (std::size_t k = 0; k < a.trajectories[i].size(); ++k)
      CHECK(a.trajectories[i][k].position == b.trajectories[i][k].position);
}

TEST_CASE("consecutive samples never teleport") {
  const Scenario scenario = load_scenario(SCENARIO_DIR "/narrow_gap.json");
  const RunReport report = run_scenario(scenario);
  for (const auto& traj : report.trajectories)
    for (std::size_t k = 1; k < traj.size(); ++k) {
      // 20 ms of motion; generous bound well below any lattice step
      CHECK((traj[k].position - traj[k - 1].position).norm() < 0.25);
    }
}

TEST_CASE("narrow gap run keeps clearance and separation") {
  const Scenario scenario = load_scenario(SCENARIO_DIR "/narrow_gap.json");
  const RunReport report = run_scenario(scenario);
  const SafetyAudit audit = audit_safety(report, scenario);
  CHECK(audit.min_signed_distance >=
        scenario.smoother.obstacle_margin - scenario.voxel_resolution);
  CHECK(audit.min_pairwise_distance >= scenario.smoother.sep_distance - 0.1);
}

TEST_CASE("bellman audit passes on a corpus run") {
  const Scenario scenario = settle_scenario();
  RunOptions options;
  options.audit_bellman_samples = 50;
  const RunReport report = run_scenario(scenario, options);
  CHECK(report.bellman_violations == 0);
}

TEST_CASE("benchmark rows carry the quadratic table law") {
  BenchSweep sweep;
  sweep.state_spaces = {{3, 3, 8}, {16, 6, 6}};
  sweep.repetitions = 2;
  const std::vector<BenchRow> rows = run_benchmark(sweep);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].computed_states == 360);
  CHECK(rows[1].computed_states == 2880);
  // entries scale exactly as |S|^2
  const double ratio = static_cast<double>(rows[1].table_bytes) /
                       static_cast<double>(rows[0].table_bytes);
  const double s0 = 3.0 * 3 * 8, s1 = 16.0 * 6 * 6;
  CHECK(ratio == doctest::Approx((s1 * s1) / (s0 * s0)));
  CHECK(rows[0].mean_ms > 0.0);
  CHECK(rows[0].mean_ms < rows[1].mean_ms);
}

TEST_CASE("plan dump shows pairwise charges once cameras share space") {
  const Scenario scenario = parse_scenario(R"({
    "name": "pairwise",
    "scene": {"bounds_min": [-10, -10, 0], "bounds_max": [10, 10, 9]},
    "actor": {"waypoints": [
      {"t": 0, "position": [0, 0, 0], "heading": 0},
      {"t": 10, "position": [0, 0, 0], "heading": 0}
    ]},
    "uavs": [{"position": [-2.1, 0.2, 1.0]}, {"position": [-2.1, 0.3, 1.0]}],
    "run": {"duration": 10.0}
  })");
  const Lattice lattice(scenario.lattice);
  const VoxelGrid grid =
      VoxelGrid::voxelize(scenario.scene, scenario.voxel_resolution);
  const PairTables tables =
      PairTables::build(lattice, scenario.diversity, scenario.fov_half_angle);
  const ObstacleKernel kernel(lattice, scenario.r_max);
  const CinePrior prior;
  const std::vector<ActorPose> window(scenario.lattice.horizon_steps,
                                      scenario.actor.at(0.0));
  const SphericalGrid sgrid(grid, window, lattice);
  const PlanContext ctx{lattice, tables, sgrid, kernel, prior, scenario.weights};

  std::vector<int32_t> starts;
  for (const Vec3& p : scenario.uav_starts)
    starts.push_back(static_cast<int32_t>(lattice.linear_index(
        lattice.nearest_state({p.x(), p.y(), p.z(), 0.0}, window[0]))));
  PlanResult plan = plan_greedy(starts, ctx);
  plan.actor_snapshot = window;

  // neighboring starts: the second camera pays diversity/collision at t=0
  const std::vector<int32_t> fixed{plan.paths[0].states[0]};
  const StateCostTerms terms =
      state_cost_terms(plan.paths[1].states[0], 0, fixed, ctx);
  CHECK(terms.diversity > 0.0);

  std::ostringstream dump;
  write_plan_text(plan, ctx, dump);
  CHECK(dump.str().find("uav 1") != std::string::npos);
  CHECK(dump.str().find("div=") != std::string::npos);
}

TEST_CASE("benchmark reruns keep deterministic columns") {
  BenchSweep sweep;
  sweep.state_spaces = {{3, 3, 8}};
  sweep.repetitions = 2;
  const std::vector<BenchRow> a = run_benchmark(sweep);
  const std::vector<BenchRow> b = run_benchmark(sweep);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].computed_states == b[i].computed_states);
    CHECK(a[i].table_bytes == b[i].table_bytes);
    CHECK(a[i].allocated_bytes == b[i].allocated_bytes);
  }
}

TEST_SUITE_END();
