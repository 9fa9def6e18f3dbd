#include "aircine/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <random>
#include <thread>

#include "aircine/errors.hpp"

namespace aircine {

namespace {

double face_actor_yaw(const Vec3& pos, const Vec3& actor) {
  const double dx = actor.x() - pos.x();
  const double dy = actor.y() - pos.y();
  if (dx * dx + dy * dy < 1e-24) return 0.0;
  return wrap_angle(std::atan2(dy, dx));
}

// Checks sampled Bellman consistency of one planning pass.
int audit_pass(const CostMap& cost, const ValueMap& value,
               const Lattice& lattice, int samples, std::mt19937_64& rng) {
  int violations = 0;
  std::uniform_int_distribution<int> state_dist(0, cost.num_states - 1);
  std::uniform_int_distribution<int> t_dist(0, cost.timesteps - 1);
  for (int k = 0; k < samples; ++k) {
    const int s = state_dist(rng);
    const int t = t_dist(rng);
    double expected = cost.at(s, t);
    if (t + 1 < cost.timesteps) {
      double best = std::numeric_limits<double>::infinity();
      for (int32_t nb : lattice.neighbors(s))
        best = std::min(best, value.at(nb, t + 1));
      expected += best;
    }
    const double got = value.at(s, t);
    const double scale = std::max({std::abs(expected), std::abs(got), 1.0});
    if (std::abs(got - expected) > 1e-9 * scale) ++violations;
  }
  return violations;
}

}  // namespace

RunReport run_scenario(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  const int n_uavs = static_cast<int>(scenario.uav_starts.size());
  const int T = scenario.lattice.horizon_steps;

  const Lattice lattice(scenario.lattice);
  const VoxelGrid grid = VoxelGrid::voxelize(scenario.scene, scenario.voxel_resolution);
  const DistanceField field = DistanceField::build(grid);
  const PairTables tables =
      PairTables::build(lattice, scenario.diversity, scenario.fov_half_angle);
  const ObstacleKernel kernel(lattice, scenario.r_max);
  const CinePrior prior(lattice, scenario.cine_rules);

  const double cycle_dt = 1.0 / scenario.run.replan_hz;
  const int num_cycles =
      static_cast<int>(std::lround(scenario.run.duration * scenario.run.replan_hz));
  const int samples_per_cycle = static_cast<int>(
      std::lround(scenario.run.sample_hz / scenario.run.replan_hz));
  const double horizon_seconds = scenario.lattice.horizon_seconds();
  const int fine_n =
      static_cast<int>(std::lround(horizon_seconds / scenario.smoother.fine_dt)) + 1;
  const int coarse_stride = static_cast<int>(
      std::lround(scenario.lattice.step_dt / scenario.smoother.fine_dt));

  RunReport report;
  report.table_logical_bytes = PairTables::logical_bytes(scenario.lattice);
  report.table_allocated_bytes = tables.allocated_bytes();
  report.trajectories.assign(n_uavs, {});

  std::vector<Vec3> positions = scenario.uav_starts;
  for (int i = 0; i < n_uavs; ++i)
    report.trajectories[i].push_back(
        {0.0, positions[i],
         face_actor_yaw(positions[i], scenario.actor.at_clamped(0.0).position())});

  // Peer paths visible to each smoother; before the first plan every camera
  // is treated as parked at its start.
  std::vector<FinePath> last_fine(n_uavs);
  for (int i = 0; i < n_uavs; ++i) {
    last_fine[i].uav_id = i;
    last_fine[i].fine_dt = scenario.smoother.fine_dt;
    last_fine[i].samples.assign(fine_n, positions[i]);
  }

  Selector selector(scenario.selector, n_uavs);
  std::mt19937_64 audit_rng(scenario.run.seed);
  std::vector<double> plan_times;
  plan_times.reserve(num_cycles);

  int timeline_camera = -1;
  double timeline_start = 0.0;

  for (int cycle = 0; cycle < num_cycles; ++cycle) {
    const double t_now = cycle * cycle_dt;
    try {
      std::vector<ActorPose> window(T);
      for (int j = 0; j < T; ++j)
        window[j] =
            scenario.actor.at_clamped(t_now + j * scenario.lattice.step_dt);

      const SphericalGrid sgrid(grid, window, lattice);
      const PlanContext ctx{lattice, tables, sgrid, kernel, prior,
                            scenario.weights};

      std::vector<int32_t> starts(n_uavs);
      for (int i = 0; i < n_uavs; ++i)
        starts[i] = static_cast<int32_t>(lattice.linear_index(
            lattice.nearest_state({positions[i].x(), positions[i].y(),
                                   positions[i].z(), 0.0},
                                  window[0])));

      PassObserver observer;
      if (options.audit_bellman_samples > 0)
        observer = [&](int, const CostMap& c, const ValueMap& v) {
          report.bellman_violations +=
              audit_pass(c, v, lattice, options.audit_bellman_samples, audit_rng);
        };
      PlanResult plan = plan_greedy(starts, ctx, observer);
      plan.actor_snapshot = window;
      plan_times.push_back(plan.wall_ms);

      CycleTrace trace;
      trace.t = t_now;
      trace.plan_ms = plan.wall_ms;
      trace.uavs.resize(n_uavs);
      for (int i = 0; i < n_uavs; ++i) {
        std::vector<int32_t> fixed;
        for (int j = 0; j < i; ++j) fixed.push_back(plan.paths[j].states[0]);
        trace.uavs[i].terms =
            state_cost_terms(plan.paths[i].states[0], 0, fixed, ctx);
      }

      // Smooth every camera against peer paths snapshotted from the
      // previous cycle, time-shifted into this cycle's frame.
      std::vector<FinePath> fine(n_uavs);
      std::vector<SmootherStats> stats(n_uavs);
      std::vector<SmootherTerms> terms(n_uavs);
      const auto smooth_one = [&](int i) {
        SmootherContext sctx;
        sctx.coarse_stride = coarse_stride;
        sctx.field = &field;
        sctx.waypoint_targets.resize(T);
        for (int k = 0; k < T; ++k)
          sctx.waypoint_targets[k] =
              lattice.to_world(plan.paths[i].states[k], window[k]).position();
        for (int j = 0; j < n_uavs; ++j) {
          if (j == i) continue;
          std::vector<Vec3> peer(fine_n);
          for (int k = 0; k < fine_n; ++k) {
            const double tp = std::min(cycle_dt + k * scenario.smoother.fine_dt,
                                       last_fine[j].horizon());
            peer[k] = last_fine[j].sample_at(tp);
          }
          sctx.other_paths.push_back(std::move(peer));
        }
        fine[i] = smooth_path(positions[i], i, horizon_seconds, sctx,
                              scenario.smoother, &stats[i]);
        terms[i] = smoother_term_breakdown(fine[i], sctx, scenario.smoother);
      };
      if (options.threads > 1 && n_uavs > 1) {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int workers = std::min(options.threads, n_uavs);
        for (int w = 0; w < workers; ++w)
          pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n_uavs; i = next.fetch_add(1))
              smooth_one(i);
          });
        for (auto& th : pool) th.join();
      } else {
        for (int i = 0; i < n_uavs; ++i) smooth_one(i);
      }

      for (int i = 0; i < n_uavs; ++i) {
        trace.uavs[i].smoother_initial = stats[i].initial_objective;
        trace.uavs[i].smoother_final = stats[i].final_objective;
        trace.uavs[i].smoother_iterations = stats[i].iterations;
        trace.uavs[i].smoother_monotone = stats[i].monotone;
        trace.uavs[i].smoother_terms = terms[i];
      }
      report.fine_paths.push_back(fine);

      // Advance along the smoothed paths until the next replan.
      for (int m = 1; m <= samples_per_cycle; ++m) {
        const double local_t = static_cast<double>(m) / scenario.run.sample_hz;
        const double world_t = t_now + local_t;
        const Vec3 actor_pos = scenario.actor.at_clamped(world_t).position();
        for (int i = 0; i < n_uavs; ++i) {
          const Vec3 p = fine[i].sample_at(local_t);
          report.trajectories[i].push_back(
              {world_t, p, face_actor_yaw(p, actor_pos)});
        }
      }
      for (int i = 0; i < n_uavs; ++i)
        positions[i] = fine[i].sample_at(static_cast<double>(samples_per_cycle) /
                                         scenario.run.sample_hz);
      last_fine = std::move(fine);

      // Live stream selection for the upcoming interval.
      std::vector<CameraScoreInput> costs(n_uavs);
      for (int i = 0; i < n_uavs; ++i) {
        double vis = 0.0;
        for (int j = 0; j < n_uavs; ++j) {
          if (j == i) continue;
          vis += tables.visibility(plan.paths[i].states[0], plan.paths[j].states[0]) +
                 tables.visibility(plan.paths[j].states[0], plan.paths[i].states[0]);
        }
        costs[i].vis_cost = vis;
        costs[i].cine_cost = prior.at(plan.paths[i].states[0]);
      }
      const std::vector<double> q = selector.score(costs);
      const int selected = selector.step(q, cycle_dt);
      trace.selected_camera = selected;
      if (selected != timeline_camera) {
        if (timeline_camera >= 0)
          report.timeline.push_back({timeline_start, t_now, timeline_camera});
        timeline_camera = selected;
        timeline_start = t_now;
      }

      report.cycles.push_back(std::move(trace));
    } catch (const NumericError& e) {
      throw NumericError("cycle " + std::to_string(cycle) + ": " + e.what());
    }
  }
  if (timeline_camera >= 0)
    report.timeline.push_back(
        {timeline_start, num_cycles * cycle_dt, timeline_camera});

  if (!plan_times.empty()) {
    double mean = 0.0;
    for (double v : plan_times) mean += v;
    mean /= plan_times.size();
    double var = 0.0;
    for (double v : plan_times) var += (v - mean) * (v - mean);
    report.plan_ms_mean = mean;
    report.plan_ms_std =
        plan_times.size() > 1 ? std::sqrt(var / (plan_times.size() - 1)) : 0.0;
  }
  return report;
}

SafetyAudit audit_safety(const RunReport& report, const Scenario& scenario) {
  const VoxelGrid grid =
      VoxelGrid::voxelize(scenario.scene, scenario.voxel_resolution);
  const DistanceField field = DistanceField::build(grid);
  SafetyAudit audit;
  audit.min_signed_distance = field.free_sentinel();
  audit.min_pairwise_distance = std::numeric_limits<double>::infinity();
  for (const auto& traj : report.trajectories)
    for (const auto& s : traj)
      audit.min_signed_distance =
          std::min(audit.min_signed_distance, field.sample(s.position));
  for (std::size_t a = 0; a < report.trajectories.size(); ++a)
    for (std::size_t b = a + 1; b < report.trajectories.size(); ++b) {
      const auto& ta = report.trajectories[a];
      const auto& tb = report.trajectories[b];
      const std::size_t m = std::min(ta.size(), tb.size());
      for (std::size_t k = 0; k < m; ++k)
        audit.min_pairwise_distance =
            std::min(audit.min_pairwise_distance,
                     (ta[k].position - tb[k].position).norm());
    }
  return audit;
}

std::vector<BenchRow> run_benchmark(const BenchSweep& sweep, bool quiet) {
  sweep.validate();
  std::vector<BenchRow> rows;
  for (const auto& shape : sweep.state_spaces) {
    // Shape-level assets are shared across horizon and camera counts.
    const LatticeSpec base_spec =
        bench_lattice_spec(shape[0], shape[1], shape[2], sweep.horizon_steps.front());
    const Lattice lattice(base_spec);
    const PairTables tables =
        PairTables::build(lattice, DiversityParams{}, deg_to_rad(50.0));
    const ObstacleKernel kernel(lattice, 1.5);
    const CinePrior prior;

    // Fixed seeded obstacle course around a stationary actor.
    std::mt19937_64 rng(sweep.seed);
    SceneDescription scene;
    scene.bounds_min = {-9.0, -9.0, 0.0};
    scene.bounds_max = {9.0, 9.0, 8.0};
    std::uniform_real_distribution<double> pos_dist(-7.0, 7.0);
    std::uniform_real_distribution<double> size_dist(0.5, 1.5);
    for (int b = 0; b < 4; ++b) {
      const double x = pos_dist(rng), y = pos_dist(rng);
      const double sx = size_dist(rng), sy = size_dist(rng);
      const double h = 2.0 + 3.0 * size_dist(rng);
      scene.boxes.push_back({{x - sx, y - sy, 0.0}, {x + sx, y + sy, h}});
    }
    const VoxelGrid grid = VoxelGrid::voxelize(scene, 0.25);

    struct Config {
      int T = 0;
      int n = 0;
      std::unique_ptr<SphericalGrid> sgrid;
      std::vector<int32_t> starts;
      int batch = 1;
      std::vector<double> times;
    };
    std::vector<Config> configs;
    for (int T : sweep.horizon_steps) {
      std::vector<ActorPose> window(T, ActorPose{0.0, 0.0, 1.0, 0.0});
      const SphericalGrid sgrid(grid, window, lattice);
      for (int n : sweep.n_uavs) {
        Config cfg;
        cfg.T = T;
        cfg.n = n;
        cfg.sgrid = std::make_unique<SphericalGrid>(sgrid);
        std::mt19937_64 start_rng(sweep.seed + 17);
        std::uniform_int_distribution<int> state_dist(0, lattice.num_states() - 1);
        cfg.starts.resize(n);
        for (int i = 0; i < n; ++i)
          cfg.starts[i] = static_cast<int32_t>(state_dist(start_rng));
        configs.push_back(std::move(cfg));
      }
    }

    // Warm up and size the per-repetition batches so each measurement spans
    // a few milliseconds of work.
    for (Config& cfg : configs) {
      const PlanContext ctx{lattice, tables, *cfg.sgrid, kernel, prior, Weights{}};
      plan_greedy(cfg.starts, ctx);
      const double probe = plan_greedy(cfg.starts, ctx).wall_ms;
      cfg.batch = std::clamp(
          static_cast<int>(std::ceil(2.0 / std::max(probe, 1e-3))), 1, 200);
      cfg.times.reserve(sweep.repetitions);
    }

    // Interleave repetitions round-robin: transient machine slowdowns then
    // spread across every configuration instead of poisoning one row.
    for (int r = 0; r < sweep.repetitions; ++r) {
      for (Config& cfg : configs) {
        const PlanContext ctx{lattice, tables, *cfg.sgrid, kernel, prior, Weights{}};
        const auto t0 = std::chrono::steady_clock::now();
        for (int b = 0; b < cfg.batch; ++b) plan_greedy(cfg.starts, ctx);
        cfg.times.push_back(std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count() /
                            cfg.batch);
      }
    }

    for (Config& cfg : configs) {
      BenchRow row;
      row.state_space = shape;
      row.n_uavs = cfg.n;
      row.horizon_steps = cfg.T;
      row.computed_states =
          static_cast<long>(shape[0]) * shape[1] * shape[2] * cfg.T;
      double mean = 0.0;
      for (double v : cfg.times) mean += v;
      mean /= cfg.times.size();
      double var = 0.0;
      for (double v : cfg.times) var += (v - mean) * (v - mean);
      row.mean_ms = mean;
      row.std_ms =
          cfg.times.size() > 1 ? std::sqrt(var / (cfg.times.size() - 1)) : 0.0;
      std::vector<double> sorted = cfg.times;
      std::sort(sorted.begin(), sorted.end());
      row.median_ms = sorted[sorted.size() / 2];
      row.min_ms = sorted.front();
      row.table_bytes = PairTables::logical_bytes(base_spec);
      row.allocated_bytes = tables.allocated_bytes();
      rows.push_back(row);
      if (!quiet)
        std::cerr << "bench (" << shape[0] << "," << shape[1] << ","
                  << shape[2] << ") n=" << cfg.n << " T=" << cfg.T << " -> "
                  << row.mean_ms << " ms\n";
    }
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "state_space,computed_states,mean_ms,std_ms,table_bytes\n";
  for (const auto& r : rows)
    out << "(" << r.state_space[0] << " " << r.state_space[1] << " "
        << r.state_space[2] << ")," << r.computed_states << "," << r.mean_ms
        << "," << r.std_ms << "," << r.table_bytes << "\n";
}

void write_report(const RunReport& report, const Scenario& scenario,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    std::ofstream out(fs::path(out_dir) / "costs.csv");
    out << "cycle,t,uav,plan_ms,occlusion,obstacle,cine,diversity,collision,"
           "visibility,weighted_total,smoother_initial,smoother_final,"
           "smoother_smooth,smoother_track,smoother_obs,smoother_sep,"
           "smoother_iters,selected\n";
    for (std::size_t c = 0; c < report.cycles.size(); ++c) {
      const CycleTrace& tr = report.cycles[c];
      for (std::size_t i = 0; i < tr.uavs.size(); ++i) {
        const auto& u = tr.uavs[i];
        out << c << "," << tr.t << "," << i << "," << tr.plan_ms << ","
            << u.terms.occlusion << "," << u.terms.obstacle << ","
            << u.terms.cine << "," << u.terms.diversity << ","
            << u.terms.collision << "," << u.terms.visibility << ","
            << u.terms.weighted_total << "," << u.smoother_initial << ","
            << u.smoother_final << "," << u.smoother_terms.smooth << ","
            << u.smoother_terms.track << "," << u.smoother_terms.obstacle
            << "," << u.smoother_terms.separation << ","
            << u.smoother_iterations << "," << tr.selected_camera << "\n";
      }
    }
  }

  for (std::size_t i = 0; i < report.trajectories.size(); ++i) {
    std::ofstream out(fs::path(out_dir) /
                      ("trajectory_uav" + std::to_string(i) + ".csv"));
    out << "t,x,y,z,yaw\n";
    for (const auto& s : report.trajectories[i])
      out << s.t << "," << s.position.x() << "," << s.position.y() << ","
          << s.position.z() << "," << s.yaw << "\n";
  }

  {
    std::ofstream out(fs::path(out_dir) / "fine_paths.csv");
    out << "cycle,uav,sample,t,x,y,z\n";
    for (std::size_t c = 0; c < report.fine_paths.size(); ++c)
      for (std::size_t i = 0; i < report.fine_paths[c].size(); ++i) {
        const FinePath& path = report.fine_paths[c][i];
        for (std::size_t k = 0; k < path.samples.size(); ++k)
          out << c << "," << i << "," << k << "," << k * path.fine_dt << ","
              << path.samples[k].x() << "," << path.samples[k].y() << ","
              << path.samples[k].z() << "\n";
      }
  }

  {
    std::ofstream out(fs::path(out_dir) / "selector.csv");
    out << "t_start,t_end,camera\n";
    for (const auto& seg : report.timeline)
      out << seg.t_start << "," << seg.t_end << "," << seg.camera << "\n";
  }

  {
    const SafetyAudit audit = audit_safety(report, scenario);
    std::ofstream out(fs::path(out_dir) / "summary.txt");
    out << "scenario: " << scenario.name << "\n"
        << "cameras: " << report.trajectories.size() << "\n"
        << "cycles: " << report.cycles.size() << "\n"
        << "planning ms: " << report.plan_ms_mean << " +- "
        << report.plan_ms_std << "\n"
        << "pair table bytes (logical): " << report.table_logical_bytes << "\n"
        << "pair table bytes (allocated): " << report.table_allocated_bytes
        << "\n"
        << "min signed distance [m]: " << audit.min_signed_distance << "\n"
        << "min inter-camera distance [m]: " << audit.min_pairwise_distance
        << "\n"
        << "shot segments: " << report.timeline.size() << "\n";
  }
}

void write_plan_text(const PlanResult& plan, const PlanContext& ctx,
                     std::ostream& out) {
  out << "cameras: " << plan.paths.size() << "\n";
  out << "total cost: " << plan.total_cost << "\n";
  out << "wall ms: " << plan.wall_ms << "\n";
  for (std::size_t i = 0; i < plan.paths.size(); ++i) {
    out << "uav " << i;
    if (i < plan.costs.size()) out << " cost " << plan.costs[i];
    out << "\n";
    for (int t = 0; t < static_cast<int>(plan.paths[i].states.size()); ++t) {
      const int32_t s = plan.paths[i].states[t];
      std::vector<int32_t> fixed;
      for (std::size_t j = 0; j < i; ++j)
        fixed.push_back(plan.paths[j].states[t]);
      const StateCostTerms terms = state_cost_terms(s, t, fixed, ctx);
      const SphericalIndex idx = ctx.lattice.index_of(s);
      const ActorPose actor = t < static_cast<int>(plan.actor_snapshot.size())
                                  ? plan.actor_snapshot[t]
                                  : ActorPose{};
      const CameraPose cam = ctx.lattice.to_world(idx, actor);
      out << "  t=" << t << " state=" << s << " (theta " << idx.i_theta
          << ", phi " << idx.i_phi << ", rho " << idx.i_rho << ")"
          << " world=(" << cam.x << ", " << cam.y << ", " << cam.z << ")"
          << " occ=" << terms.occlusion << " obs=" << terms.obstacle
          << " cine=" << terms.cine << " div=" << terms.diversity
          << " col=" << terms.collision << " vis=" << terms.visibility
          << " total=" << terms.weighted_total << "\n";
    }
  }
}

}  // namespace aircine
