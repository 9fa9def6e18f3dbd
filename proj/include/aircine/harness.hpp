#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "aircine/planner.hpp"
#include "aircine/scenario.hpp"
#include "aircine/selector.hpp"
#include "aircine/smoother.hpp"

namespace aircine {

struct TrajectorySample {
  double t = 0.0;
  Vec3 position{0, 0, 0};
  double yaw = 0.0;
};

struct UavCycleTrace {
  StateCostTerms terms;          // at the first horizon step, vs earlier cameras
  double smoother_initial = 0.0;
  double smoother_final = 0.0;
  int smoother_iterations = 0;
  bool smoother_monotone = true;
  SmootherTerms smoother_terms;  // breakdown of the final objective
};

struct CycleTrace {
  double t = 0.0;
  double plan_ms = 0.0;
  std::vector<UavCycleTrace> uavs;
  int selected_camera = 0;
};

struct ShotSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  int camera = 0;
};

struct RunReport {
  std::vector<std::vector<TrajectorySample>> trajectories;  // per camera
  std::vector<CycleTrace> cycles;
  std::vector<std::vector<FinePath>> fine_paths;  // per cycle, per camera
  std::vector<ShotSegment> timeline;  // last segment ends at run end
  double plan_ms_mean = 0.0;
  double plan_ms_std = 0.0;
  std::size_t table_logical_bytes = 0;
  std::size_t table_allocated_bytes = 0;
  int bellman_violations = 0;  // only counted when auditing is enabled
};

struct RunOptions {
  int threads = 1;                 // smoother fan-out cap
  int audit_bellman_samples = 0;   // per planning pass; 0 disables
  bool quiet = true;
};

// Receding-horizon simulation: replan, smooth, advance, select, repeat.
// Deterministic for a fixed scenario (timing fields aside).
RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

// Post-hoc trajectory audit against the scenario's obstacle field.
struct SafetyAudit {
  double min_signed_distance = 0.0;  // over all emitted samples
  double min_pairwise_distance = 0.0;  // over all time-aligned sample pairs
};
SafetyAudit audit_safety(const RunReport& report, const Scenario& scenario);

struct BenchRow {
  std::array<int, 3> state_space{0, 0, 0};
  int n_uavs = 0;
  int horizon_steps = 0;
  long computed_states = 0;  // n_theta * n_phi * n_rho * T
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double median_ms = 0.0;
  double min_ms = 0.0;
  std::size_t table_bytes = 0;  // logical dense bytes, entries x entry size
  std::size_t allocated_bytes = 0;
};

// Times plan_greedy on a fixed seeded obstacle world per configuration.
std::vector<BenchRow> run_benchmark(const BenchSweep& sweep, bool quiet = true);

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

// Writes summary.txt, costs.csv, per-camera trajectory CSVs and the
// selector timeline into out_dir (created if missing).
void write_report(const RunReport& report, const Scenario& scenario,
                  const std::string& out_dir);

// Single-shot plan dump with per-term cost breakdowns.
void write_plan_text(const PlanResult& plan, const PlanContext& ctx,
                     std::ostream& out);

}  // namespace aircine
