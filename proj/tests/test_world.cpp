#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "aircine/errors.hpp"
#include "aircine/world.hpp"

using namespace aircine;

TEST_SUITE_BEGIN("world");

TEST_CASE("voxelize: empty scene is all free") {
  SceneDescription scene;
  scene.bounds_min = {0, 0, 0};
  scene.bounds_max = {4, 4, 4};
  const VoxelGrid grid = VoxelGrid::voxelize(scene, 0.5);
  for (int z = 0; z < grid.dims().z(); ++z)
    for (int y = 0; y < grid.dims().y(); ++y)
      for (int x = 0; x < grid.dims().x(); ++x)
        CHECK(grid.at(x, y, z) == 0.0f);
}

TEST_CASE("voxelize: grid-aligned unit cube fills exactly 8 cells") {
  SceneDescription scene;
  scene.bounds_min = {-2, -2, -2};
  scene.bounds_max = {2, 2, 2};
  scene.boxes.push_back({{0, 0, 0}, {1, 1, 1}});
  const VoxelGrid grid = VoxelGrid::voxelize(scene, 0.5);
  int occupied = 0;
  for (int z = 0; z < grid.dims().z(); ++z)
    for (int y = 0; y < grid.dims().y(); ++y)
      for (int x = 0; x < grid.dims().x(); ++x)
        if (grid.at(x, y, z) > 0.0f) ++occupied;
  CHECK(occupied == 8);
}

TEST_CASE("voxelize: invalid inputs are configuration errors") {
  SceneDescription scene;
  scene.bounds_min = {1, 0, 0};
  scene.bounds_max = {0, 1, 1};
  CHECK_THROWS_AS(VoxelGrid::voxelize(scene, 0.5), ConfigError);
  scene = SceneDescription{};
  CHECK_THROWS_AS(VoxelGrid::voxelize(scene, 0.0), ConfigError);
}

TEST_CASE("voxelize: union of overlapping boxes against a sampling oracle") {
  SceneDescription scene;
  scene.bounds_min = {0, 0, 0};
  scene.bounds_max = {4, 4, 2};
  scene.boxes.push_back({{0.3, 0.3, 0.2}, {2.1, 1.7, 1.3}});
  scene.boxes.push_back({{1.4, 0.9, 0.5}, {3.3, 2.8, 1.1}});
  const double res = 0.25;
  const VoxelGrid grid = VoxelGrid::voxelize(scene, res);

  const auto inside_union = [&](const Vec3& p) {
    for (const auto& b : scene.boxes) {
      bool in = true;
      for (int a = 0; a < 3; ++a)
        if (p[a] <= b.min[a] || p[a] >= b.max[a]) in = false;
      if (in) return true;
    }
    return false;
  };

  for (int z = 0; z < grid.dims().z(); ++z)
    for (int y = 0; y < grid.dims().y(); ++y)
      for (int x = 0; x < grid.dims().x(); ++x) {
        // any strictly interior sample point implies positive overlap
        bool sampled_hit = false;
        for (int i = 1; i <= 3 && !sampled_hit; ++i)
          for (int j = 1; j <= 3 && !sampled_hit; ++j)
            for (int k = 1; k <= 3 && !sampled_hit; ++k) {
              const Vec3 p = grid.origin() +
                             res * Vec3(x + i / 4.0, y + j / 4.0, z + k / 4.0);
              sampled_hit = inside_union(p);
            }
        if (sampled_hit) CHECK(grid.at(x, y, z) == 1.0f);
        // occupied cells must at least touch the union's closure
        if (grid.at(x, y, z) > 0.0f) {
          const Vec3 center = grid.cell_center(x, y, z);
          bool near = false;
          for (const auto& b : scene.boxes) {
            bool in = true;
            for (int a = 0; a < 3; ++a)
              if (center[a] < b.min[a] - res || center[a] > b.max[a] + res)
                in = false;
            near = near || in;
          }
          CHECK(near);
        }
      }
}

TEST_CASE("voxelize: cylinder footprint") {
  SceneDescription scene;
  scene.bounds_min = {-2, -2, 0};
  scene.bounds_max = {2, 2, 2};
  scene.cylinders.push_back({0.0, 0.0, 0.6, 0.0, 2.0});
  const VoxelGrid grid = VoxelGrid::voxelize(scene, 0.25);
  // the axis cell is occupied, a corner cell far outside the radius is not
  CHECK(grid.sample({0.0, 0.0, 1.0}) == 1.0f);
  CHECK(grid.sample({1.8, 1.8, 1.0}) == 0.0f);
}

TEST_CASE("distance field: all-free grid saturates at the sentinel") {
  SceneDescription scene;
  scene.bounds_min = {0, 0, 0};
  scene.bounds_max = {2, 2, 2};
  const VoxelGrid grid = VoxelGrid::voxelize(scene, 0.5);
  const DistanceField field = DistanceField::build(grid);
  for (int z = 0; z < grid.dims().z(); ++z)
    for (int y = 0; y < grid.dims().y(); ++y)
      for (int x = 0; x < grid.dims().x(); ++x)
        CHECK(field.at_cell(x, y, z) == field.free_sentinel());
}

TEST_CASE("distance field: single occupied cell gives axis-exact distances") {
  VoxelGrid grid({0, 0, 0}, 0.5, {9, 9, 9});
  grid.at(4, 4, 4) = 1.0f;
  const DistanceField field = DistanceField::build(grid);
  for (int k = 1; k <= 4; ++k) {
    CHECK(field.at_cell(4 + k, 4, 4) == doctest::Approx(k * 0.5));
    CHECK(field.at_cell(4, 4 + k, 4) == doctest::Approx(k * 0.5));
    CHECK(field.at_cell(4, 4, 4 - k) == doctest::Approx(k * 0.5));
  }
  CHECK(field.at_cell(4, 4, 4) <= 0.0);
}

TEST_CASE("distance field matches a brute-force scan on a random 16^3 grid") {
  VoxelGrid grid({0, 0, 0}, 0.25, {16, 16, 16});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int z = 0; z < 16; ++z)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x)
        if (u(rng) < 0.04) grid.at(x, y, z) = 1.0f;
  const DistanceField field = DistanceField::build(grid);

  const auto brute = [&](int x, int y, int z) {
    const bool occ = grid.at(x, y, z) >= 0.5f;
    double best = std::numeric_limits<double>::infinity();
    for (int z2 = 0; z2 < 16; ++z2)
      for (int y2 = 0; y2 < 16; ++y2)
        for (int x2 = 0; x2 < 16; ++x2) {
          const bool occ2 = grid.at(x2, y2, z2) >= 0.5f;
          if (occ2 == occ) continue;
          const double d2 = (x - x2) * (x - x2) + (y - y2) * (y - y2) +
                            (z - z2) * (z - z2);
          best = std::min(best, d2);
        }
    const double d = std::min(std::sqrt(best) * 0.25, field.free_sentinel());
    return occ ? -d : d;
  };

  for (int z = 0; z < 16; ++z)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x)
        CHECK(field.at_cell(x, y, z) == doctest::Approx(brute(x, y, z)).epsilon(1e-9));
}

TEST_CASE("distance field is Lipschitz up to one resolution unit") {
  VoxelGrid grid({0, 0, 0}, 0.5, {12, 12, 12});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> cell(0, 11);
  for (int z = 0; z < 12; ++z)
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 12; ++x)
        if (u(rng) < 0.08) grid.at(x, y, z) = 1.0f;
  const DistanceField field = DistanceField::build(grid);
  for (int trial = 0; trial < 500; ++trial) {
    const int x1 = cell(rng), y1 = cell(rng), z1 = cell(rng);
    const int x2 = cell(rng), y2 = cell(rng), z2 = cell(rng);
    const double dist = 0.5 * std::sqrt(double((x1 - x2) * (x1 - x2) +
                                               (y1 - y2) * (y1 - y2) +
                                               (z1 - z2) * (z1 - z2)));
    const double dd =
        std::abs(field.at_cell(x1, y1, z1) - field.at_cell(x2, y2, z2));
    CHECK(dd <= dist + 0.5 + 1e-9);
  }
}

TEST_CASE("actor script interpolation") {
  ActorScript script;
  script.waypoints = {{0.0, {0, 0, 0, deg_to_rad(350.0)}},
                      {2.0, {2, 0, 0, deg_to_rad(10.0)}}};
  script.validate();

  SUBCASE("waypoint timestamps are exact") {
    const ActorPose p = script.at(2.0);
    CHECK(p.x == doctest::Approx(2.0));
    CHECK(p.heading == doctest::Approx(deg_to_rad(10.0)));
  }
  SUBCASE("linear midpoint") {
    const ActorPose p = script.at(1.0);
    CHECK(p.x == doctest::Approx(1.0));
    CHECK(p.y == doctest::Approx(0.0));
  }
  SUBCASE("heading interpolates along the shortest arc") {
    const ActorPose p = script.at(1.0);
    CHECK(p.heading == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("queries outside the script fail") {
    CHECK_THROWS_AS(script.at(-0.5), ConfigError);
    CHECK_THROWS_AS(script.at(2.5), ConfigError);
    CHECK(script.at_clamped(2.5).x == doctest::Approx(2.0));
  }
  SUBCASE("continuity near a waypoint") {
    const ActorPose a = script.at(0.999999);
    const ActorPose b = script.at(1.000001);
    CHECK(std::abs(a.x - b.x) < 1e-4);
    CHECK(std::abs(angle_diff(a.heading, b.heading)) < 1e-4);
  }
}

TEST_CASE("actor script rejects unsorted timestamps") {
  ActorScript script;
  script.waypoints = {{1.0, {}}, {0.5, {}}};
  CHECK_THROWS_AS(script.validate(), ConfigError);
}

TEST_CASE("spherical regrid: empty world stays empty") {
  SceneDescription scene;
  scene.bounds_min = {-10, -10, 0};
  scene.bounds_max = {10, 10, 8};
  const VoxelGrid grid = VoxelGrid::voxelize(scene, 0.5);
  const Lattice lattice(LatticeSpec{});
  const std::vector<ActorPose> window(3, ActorPose{0, 0, 1, 0});
  const SphericalGrid sgrid(grid, window, lattice);
  for (int s = 0; s < lattice.num_states(); ++s)
    for (int t = 0; t < 3; ++t) {
      CHECK(sgrid.occupancy(s, t) == 0.0f);
      for (float v : sgrid.ray(s, t)) CHECK(v == 0.0f);
    }
}

TEST_CASE("spherical regrid: wall blocks one hemisphere's rays") {
  SceneDescription scene;
  scene.bounds_min = {-10, -10, 0};
  scene.bounds_max = {10, 10, 8};
  // wall between the actor and the theta=0 side (x > 0), tall and wide
  scene.boxes.push_back({{1.0, -8.0, 0.0}, {1.5, 8.0, 8.0}});
  const VoxelGrid grid = VoxelGrid::voxelize(scene, 0.25);
  LatticeSpec spec;
  spec.n_theta = 8;
  spec.n_phi = 2;
  spec.rho_values = {4.0};
  const Lattice lattice(spec);
  const std::vector<ActorPose> window(1, ActorPose{0, 0, 1, 0});
  const SphericalGrid sgrid(grid, window, lattice);

  // theta=0, equator bin: camera at (4, 0, 1) behind the wall
  const int blocked = lattice.linear_index({0, 1, 0});
  // theta=pi: camera at (-4, 0, 1), clear line of sight
  const int clear = lattice.linear_index({4, 1, 0});
  bool any_hit = false;
  for (float v : sgrid.ray(blocked, 0)) any_hit = any_hit || v > 0.0f;
  CHECK(any_hit);
  for (float v : sgrid.ray(clear, 0)) CHECK(v == 0.0f);
}

TEST_CASE("spherical regrid: static world and actor are time invariant") {
  SceneDescription scene;
  scene.bounds_min = {-10, -10, 0};
  scene.bounds_max = {10, 10, 8};
  scene.boxes.push_back({{2.0, -1.0, 0.0}, {3.0, 1.0, 3.0}});
  const VoxelGrid grid = VoxelGrid::voxelize(scene, 0.25);
  const Lattice lattice(LatticeSpec{});
  const std::vector<ActorPose> window(4, ActorPose{0.1, -0.2, 1.0, 0.3});
  const SphericalGrid sgrid(grid, window, lattice);
  for (int s = 0; s < lattice.num_states(); ++s)
    for (int t = 1; t < 4; ++t) {
      CHECK(sgrid.occupancy(s, t) == sgrid.occupancy(s, 0));
      const auto r0 = sgrid.ray(s, 0);
      const auto rt = sgrid.ray(s, t);
      REQUIRE(r0.size() == rt.size());
      for (std::size_t k = 0; k < r0.size(); ++k) CHECK(r0[k] == rt[k]);
    }
}

TEST_CASE("spherical regrid commutes with world translation") {
  const Vec3 shift(6.0, -4.0, 2.0);
  SceneDescription scene;
  scene.bounds_min = {-10, -10, 0};
  scene.bounds_max = {10, 10, 8};
  scene.boxes.push_back({{1.3, -0.6, 0.1}, {2.6, 1.2, 3.1}});
  SceneDescription moved = scene;
  moved.bounds_min += shift;
  moved.bounds_max += shift;
  moved.boxes[0].min += shift;
  moved.boxes[0].max += shift;

  LatticeSpec spec;
  spec.n_theta = 8;
  spec.n_phi = 3;
  spec.rho_values = {2.0, 4.0};
  const Lattice lattice(spec);
  const std::vector<ActorPose> wa{{0.1, 0.2, 1.0, 0.4}};
  const std::vector<ActorPose> wb{
      {0.1 + shift.x(), 0.2 + shift.y(), 1.0 + shift.z(), 0.4}};
  const SphericalGrid a(VoxelGrid::voxelize(scene, 0.25), wa, lattice);
  const SphericalGrid b(VoxelGrid::voxelize(moved, 0.25), wb, lattice);
  for (int s = 0; s < lattice.num_states(); ++s) {
    CHECK(a.occupancy(s, 0) == b.occupancy(s, 0));
    const auto ra = a.ray(s, 0);
    const auto rb = b.ray(s, 0);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t k = 0; k < ra.size(); ++k) CHECK(ra[k] == rb[k]);
  }
}

TEST_CASE("grid export writes a header and a matching flat binary") {
  SceneDescription scene;
  scene.bounds_min = {0, 0, 0};
  scene.bounds_max = {2, 1, 1};
  scene.boxes.push_back({{0.0, 0.0, 0.0}, {0.5, 0.5, 0.5}});
  const VoxelGrid grid = VoxelGrid::voxelize(scene, 0.5);
  const std::string prefix = "/tmp/aircine_grid_test";
  export_grid(grid, prefix);

  std::ifstream header(prefix + ".txt");
  REQUIRE(header.good());
  std::string key;
  int dx, dy, dz;
  header >> key >> dx >> dy >> dz;
  CHECK(key == "dims");
  CHECK(dx == 4);
  CHECK(dy == 2);
  CHECK(dz == 2);
  double ox, oy, oz;
  header >> key >> ox >> oy >> oz;
  CHECK(key == "origin");
  double res;
  header >> key >> res;
  CHECK(res == doctest::Approx(0.5));

  std::ifstream bin(prefix + ".bin", std::ios::binary | std::ios::ate);
  REQUIRE(bin.good());
  CHECK(static_cast<std::size_t>(bin.tellg()) ==
        grid.cell_count() * sizeof(float));

  export_grid(DistanceField::build(grid), prefix + "_sd");
  std::ifstream sd_bin(prefix + "_sd.bin", std::ios::binary | std::ios::ate);
  CHECK(static_cast<std::size_t>(sd_bin.tellg()) ==
        grid.cell_count() * sizeof(double));
}

TEST_SUITE_END();
