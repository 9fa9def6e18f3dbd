#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aircine/errors.hpp"
#include "aircine/harness.hpp"
#include "aircine/scenario.hpp"

namespace {

using namespace aircine;

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::uint64_t seed_override, bool has_seed, int threads,
            bool dump_grids, bool quiet) {
  Scenario scenario = load_scenario(scenario_path);
  if (has_seed) scenario.run.seed = seed_override;
  RunOptions options;
  options.threads = threads;
  options.quiet = quiet;
  const RunReport report = run_scenario(scenario, options);
  write_report(report, scenario, out_dir);
  if (dump_grids) {
    std::filesystem::create_directories(out_dir);
    const VoxelGrid grid =
        VoxelGrid::voxelize(scenario.scene, scenario.voxel_resolution);
    export_grid(grid, out_dir + "/occupancy");
    export_grid(DistanceField::build(grid), out_dir + "/signed_distance");
  }
  if (!quiet) {
    const SafetyAudit audit = audit_safety(report, scenario);
    std::cout << "scenario '" << scenario.name << "': "
              << report.cycles.size() << " cycles, plan "
              << report.plan_ms_mean << " +- " << report.plan_ms_std
              << " ms, min clearance " << audit.min_signed_distance
              << " m\n";
  }
  return 0;
}

int cmd_plan(const std::string& scenario_path, const std::string& out_path,
             bool exhaustive, bool quiet) {
  const Scenario scenario = load_scenario(scenario_path);
  const Lattice lattice(scenario.lattice);
  const VoxelGrid grid =
      VoxelGrid::voxelize(scenario.scene, scenario.voxel_resolution);
  const PairTables tables =
      PairTables::build(lattice, scenario.diversity, scenario.fov_half_angle);
  const ObstacleKernel kernel(lattice, scenario.r_max);
  const CinePrior prior(lattice, scenario.cine_rules);

  const int T = scenario.lattice.horizon_steps;
  std::vector<ActorPose> window(T);
  for (int j = 0; j < T; ++j)
    window[j] = scenario.actor.at_clamped(j * scenario.lattice.step_dt);
  const SphericalGrid sgrid(grid, window, lattice);
  const PlanContext ctx{lattice, tables, sgrid, kernel, prior, scenario.weights};

  std::vector<int32_t> starts;
  for (const Vec3& p : scenario.uav_starts)
    starts.push_back(static_cast<int32_t>(lattice.linear_index(
        lattice.nearest_state({p.x(), p.y(), p.z(), 0.0}, window[0]))));
  PlanResult plan =
      exhaustive ? plan_exhaustive(starts, ctx) : plan_greedy(starts, ctx);
  plan.actor_snapshot = window;

  if (out_path.empty()) {
    write_plan_text(plan, ctx, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write plan file '" + out_path + "'");
    write_plan_text(plan, ctx, out);
  }
  if (!quiet) std::cerr << "planned " << plan.paths.size() << " cameras\n";
  return 0;
}

int cmd_bench(const std::string& sweep_path, const std::string& out_csv,
              bool quiet) {
  const BenchSweep sweep =
      sweep_path.empty() ? default_sweep() : load_sweep(sweep_path);
  const std::vector<BenchRow> rows = run_benchmark(sweep, quiet);
  if (out_csv.empty()) {
    write_bench_csv(rows, std::cout);
  } else {
    std::ofstream out(out_csv);
    if (!out) throw ConfigError("cannot write CSV file '" + out_csv + "'");
    write_bench_csv(rows, out);
  }
  return 0;
}

int cmd_init(const std::string& out_path) {
  const Scenario s = default_scenario();
  if (out_path.empty()) {
    std::cout << scenario_to_json(s);
  } else {
    save_scenario(s, out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Multi-camera aerial filming planner: plans diverse, mutually "
      "invisible viewpoints around a moving actor, smooths each camera's "
      "trajectory and picks the live stream. Run 'aircine init' for a "
      "reference scenario listing every default."};
  app.require_subcommand(1);

  std::string scenario_path, sweep_path;
  std::string run_out = "out", plan_out, bench_out, init_out;
  std::uint64_t seed = 0;
  int threads = 1;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write reports");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", run_out, "Output directory (default: out)");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--threads", threads, "Smoother fan-out cap");
  bool dump_grids = false;
  run->add_flag("--dump-grids", dump_grids,
                "Also export the occupancy and signed-distance grids");
  run->add_flag("--quiet", quiet, "Suppress progress output");

  CLI::App* plan = app.add_subcommand("plan", "Dump a single plan with cost breakdowns");
  plan->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  plan->add_option("--out", plan_out, "Output file (stdout when omitted)");
  bool exhaustive = false;
  plan->add_flag("--exhaustive", exhaustive,
                 "Joint-optimal enumeration instead of the greedy planner "
                 "(small lattices only; guarded by a size limit)");
  plan->add_flag("--quiet", quiet, "Suppress progress output");

  CLI::App* bench = app.add_subcommand("bench", "Time the planner over a sweep");
  bench->add_option("sweep", sweep_path, "Sweep JSON file (built-in sweep when omitted)");
  bench->add_option("--out", bench_out, "Output CSV (stdout when omitted)");
  bench->add_flag("--quiet", quiet, "Suppress progress output");

  CLI::App* init = app.add_subcommand("init", "Write a reference scenario with all defaults");
  init->add_option("--out", init_out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors are configuration errors
  }

  try {
    if (app.got_subcommand(run))
      return cmd_run(scenario_path, run_out, seed, seed_opt->count() > 0,
                     threads, dump_grids, quiet);
    if (app.got_subcommand(plan))
      return cmd_plan(scenario_path, plan_out, exhaustive, quiet);
    if (app.got_subcommand(bench)) return cmd_bench(sweep_path, bench_out, quiet);
    if (app.got_subcommand(init)) return cmd_init(init_out);
  } catch (const aircine::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const aircine::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const aircine::SizeLimitError& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
