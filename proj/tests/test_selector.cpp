#include <doctest.h>

#include <cmath>
#include <vector>

#include "aircine/errors.hpp"
#include "aircine/selector.hpp"

using namespace aircine;

TEST_SUITE_BEGIN("selector");

TEST_CASE("score: zero costs and fresh multipliers give Q = 1") {
  Selector sel(SelectorConfig{}, 3);
  const std::vector<CameraScoreInput> costs(3);
  for (double q : sel.score(costs)) CHECK(q == doctest::Approx(1.0));
}

TEST_CASE("score: any visibility cost ranks below a clean camera") {
  Selector sel(SelectorConfig{}, 2);
  std::vector<CameraScoreInput> costs(2);
  costs[0].vis_cost = 0.25;
  const auto q = sel.score(costs);
  CHECK(q[0] < q[1]);
}

TEST_CASE("score: three-camera ranking matches the closed form") {
  SelectorConfig cfg;
  cfg.w_vis = 0.5;
  cfg.w_cine = 2.0;
  Selector sel(cfg, 3);
  std::vector<CameraScoreInput> costs(3);
  costs[0] = {1.0, 0.3};
  costs[1] = {0.0, 0.0};
  costs[2] = {2.0, 1.0};
  const auto q = sel.score(costs);
  CHECK(q[0] == doctest::Approx(std::exp(-1.1)));
  CHECK(q[1] == doctest::Approx(1.0));
  CHECK(q[2] == doctest::Approx(std::exp(-3.0)));
  CHECK(q[1] > q[0]);
  CHECK(q[0] > q[2]);
}

TEST_CASE("step: scripted three-camera timeline matches a hand simulation") {
  SelectorConfig cfg;
  cfg.w_vis = 1.0;
  cfg.w_cine = 0.0;
  cfg.decay_rate = 0.5;
  cfg.recovery_rate = 0.25;
  cfg.min_shot = 2.0;
  cfg.max_shot = 4.0;
  Selector sel(cfg, 3);

  const std::vector<std::vector<double>> vis = {
      {0, 1, 2}, {0, 1, 2}, {2, 0, 2}, {2, 0, 0}, {2, 0, 0},
      {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  const std::vector<int> expected = {0, 0, 1, 1, 2, 2, 0, 0, 1};
  for (std::size_t k = 0; k < vis.size(); ++k) {
    std::vector<CameraScoreInput> costs(3);
    for (int i = 0; i < 3; ++i) costs[i].vis_cost = vis[k][i];
    CHECK(sel.step(sel.score(costs), 1.0) == expected[k]);
  }
}

TEST_CASE("step: a dominant camera is still evicted at max_shot") {
  SelectorConfig cfg;
  cfg.decay_rate = 0.5;
  cfg.recovery_rate = 1.0;
  cfg.min_shot = 2.0;
  cfg.max_shot = 4.0;
  Selector sel(cfg, 2);
  std::vector<CameraScoreInput> costs(2);
  costs[1].vis_cost = 10.0;
  const std::vector<int> expected = {0, 0, 0, 0, 1, 1, 0};
  for (int k = 0; k < 7; ++k)
    CHECK(sel.step(sel.score(costs), 1.0) == expected[k]);
}

TEST_CASE("step: equal cameras alternate with legal shot lengths") {
  SelectorConfig cfg;  // defaults: 3 s / 8 s
  Selector sel(cfg, 2);
  const double dt = 0.2;
  const std::vector<CameraScoreInput> costs(2);
  int current = -1;
  double shot_start = 0.0;
  std::vector<double> lengths;
  std::vector<bool> seen(2, false);
  for (int k = 0; k < 300; ++k) {
    const double t = k * dt;
    const int sel_cam = sel.step(sel.score(costs), dt);
    seen[sel_cam] = true;
    if (current >= 0 && sel_cam != current) {
      lengths.push_back(t - shot_start);
      shot_start = t;
    }
    if (current < 0) shot_start = t;
    current = sel_cam;
  }
  REQUIRE(lengths.size() > 2);
  for (double len : lengths) {
    CHECK(len >= cfg.min_shot - 1e-9);
    CHECK(len <= cfg.max_shot + 1e-9);
  }
  CHECK(seen[0]);
  CHECK(seen[1]);
}

TEST_CASE("step: a permanently occluded camera is never shown") {
  Selector sel(SelectorConfig{}, 3);
  std::vector<CameraScoreInput> costs(3);
  costs[2].vis_cost = 100.0;
  for (int k = 0; k < 250; ++k)
    CHECK(sel.step(sel.score(costs), 0.2) != 2);
}

TEST_CASE("multipliers stay within (0, 1] under arbitrary cost sequences") {
  Selector sel(SelectorConfig{}, 4);
  std::vector<CameraScoreInput> costs(4);
  for (int k = 0; k < 500; ++k) {
    for (int i = 0; i < 4; ++i) {
      costs[i].vis_cost = (k * 7 + i * 13) % 5;
      costs[i].cine_cost = (k * 3 + i) % 4;
    }
    sel.step(sel.score(costs), 0.2);
    for (double m : sel.multipliers()) {
      CHECK(m > 0.0);
      CHECK(m <= 1.0);
    }
  }
}

TEST_CASE("identical cost timelines produce identical selections") {
  const auto run = [] {
    Selector sel(SelectorConfig{}, 3);
    std::vector<int> out;
    std::vector<CameraScoreInput> costs(3);
    for (int k = 0; k < 200; ++k) {
      for (int i = 0; i < 3; ++i) costs[i].vis_cost = ((k + i) % 7) * 0.3;
      out.push_back(sel.step(sel.score(costs), 0.2));
    }
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("configuration validation") {
  SelectorConfig cfg;
  cfg.decay_rate = 1.5;
  CHECK_THROWS_AS(Selector(cfg, 2), ConfigError);
  cfg = SelectorConfig{};
  cfg.min_shot = 9.0;  // above max_shot
  CHECK_THROWS_AS(Selector(cfg, 2), ConfigError);
  CHECK_THROWS_AS(Selector(SelectorConfig{}, 0), ConfigError);
}

TEST_SUITE_END();
