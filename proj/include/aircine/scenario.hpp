#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "aircine/costmodel.hpp"
#include "aircine/lattice.hpp"
#include "aircine/selector.hpp"
#include "aircine/smoother.hpp"
#include "aircine/world.hpp"

namespace aircine {

struct RunConfig {
  double duration = 20.0;  // seconds
  double replan_hz = 5.0;
  double sample_hz = 50.0;
  std::uint64_t seed = 1;
};

// Complete simulation description as read from a scenario file. All
// quantities are SI (meters, seconds, radians); degree inputs are accepted
// only through explicitly suffixed *_deg keys.
struct Scenario {
  std::string name = "scenario";
  SceneDescription scene;
  double voxel_resolution = 0.25;
  ActorScript actor;
  std::vector<Vec3> uav_starts;
  LatticeSpec lattice;
  Weights weights;
  DiversityParams diversity;
  double fov_half_angle = deg_to_rad(50.0);
  double r_max = 1.5;  // obstacle-cost radius
  std::vector<CinePriorRule> cine_rules;
  SmootherConfig smoother;
  SelectorConfig selector;
  RunConfig run;

  void validate() const;
};

Scenario default_scenario();

// Strict parsing: unknown keys are rejected, values are type-checked, and
// violated invariants name the offending section.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

// Benchmark sweep: cartesian product of lattice shapes, camera counts and
// horizon lengths, each timed over `repetitions` plans.
struct BenchSweep {
  std::vector<std::array<int, 3>> state_spaces;  // (n_theta, n_phi, n_rho)
  std::vector<int> n_uavs = {3};
  std::vector<int> horizon_steps = {5};
  int repetitions = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

BenchSweep default_sweep();
BenchSweep parse_sweep(const std::string& json_text);
BenchSweep load_sweep(const std::string& path);

// Lattice shape used by benchmarks: radii evenly spaced over [2, 7].
LatticeSpec bench_lattice_spec(int n_theta, int n_phi, int n_rho,
                               int horizon_steps);

}  // namespace aircine
