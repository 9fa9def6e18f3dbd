#include "aircine/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aircine/errors.hpp"

namespace aircine {

using json = nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& context,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key '" + context + "." + key + "'");
  }
}

double get_number(const json& obj, const std::string& context,
                  const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError("'" + context + "." + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& context, const char* key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError("'" + context + "." + key + "' must be an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& context, const char* key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean())
    throw ConfigError("'" + context + "." + key + "' must be a boolean");
  return v.get<bool>();
}

Vec3 get_vec3(const json& obj, const std::string& context, const char* key) {
  if (!obj.contains(key))
    throw ConfigError("missing key '" + context + "." + key + "'");
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number())
    throw ConfigError("'" + context + "." + key +
                      "' must be an array of 3 numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

// Angle given either in radians under `key` or degrees under `key_deg`.
double get_angle(const json& obj, const std::string& context, const char* key,
                 double fallback) {
  const std::string deg_key = std::string(key) + "_deg";
  const bool has_rad = obj.contains(key);
  const bool has_deg = obj.contains(deg_key);
  if (has_rad && has_deg)
    throw ConfigError("'" + context + "': give '" + key + "' or '" + deg_key +
                      "', not both");
  if (has_deg) return deg_to_rad(get_number(obj, context, deg_key.c_str(), 0.0));
  return get_number(obj, context, key, fallback);
}

std::pair<double, double> get_range(const json& v, const std::string& context,
                                    double scale) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError("'" + context + "' must be an array [min, max]");
  return {v[0].get<double>() * scale, v[1].get<double>() * scale};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

SceneDescription parse_scene(const json& j, double* resolution) {
  SceneDescription scene;
  reject_unknown_keys(j, "scene",
                      {"bounds_min", "bounds_max", "resolution", "boxes",
                       "cylinders"});
  if (j.contains("bounds_min")) scene.bounds_min = get_vec3(j, "scene", "bounds_min");
  if (j.contains("bounds_max")) scene.bounds_max = get_vec3(j, "scene", "bounds_max");
  *resolution = get_number(j, "scene", "resolution", *resolution);
  if (j.contains("boxes")) {
    for (const auto& b : j.at("boxes")) {
      reject_unknown_keys(b, "scene.boxes[]", {"min", "max"});
      scene.boxes.push_back(
          {get_vec3(b, "scene.boxes[]", "min"), get_vec3(b, "scene.boxes[]", "max")});
    }
  }
  if (j.contains("cylinders")) {
    for (const auto& c : j.at("cylinders")) {
      reject_unknown_keys(c, "scene.cylinders[]",
                          {"center", "radius", "z_min", "z_max"});
      const json& ctr = c.at("center");
      if (!ctr.is_array() || ctr.size() != 2)
        throw ConfigError("'scene.cylinders[].center' must be [x, y]");
      CylinderPrimitive cyl;
      cyl.cx = ctr[0].get<double>();
      cyl.cy = ctr[1].get<double>();
      cyl.radius = get_number(c, "scene.cylinders[]", "radius", 0.0);
      cyl.z_min = get_number(c, "scene.cylinders[]", "z_min", 0.0);
      cyl.z_max = get_number(c, "scene.cylinders[]", "z_max", 0.0);
      scene.cylinders.push_back(cyl);
    }
  }
  return scene;
}

ActorScript parse_actor(const json& j) {
  reject_unknown_keys(j, "actor", {"waypoints"});
  if (!j.contains("waypoints"))
    throw ConfigError("missing key 'actor.waypoints'");
  ActorScript script;
  for (const auto& w : j.at("waypoints")) {
    reject_unknown_keys(w, "actor.waypoints[]",
                        {"t", "position", "heading", "heading_deg"});
    ActorScript::Waypoint wp;
    if (!w.contains("t"))
      throw ConfigError("missing key 'actor.waypoints[].t'");
    wp.t = get_number(w, "actor.waypoints[]", "t", 0.0);
    const Vec3 p = get_vec3(w, "actor.waypoints[]", "position");
    wp.pose.x = p.x();
    wp.pose.y = p.y();
    wp.pose.z = p.z();
    wp.pose.heading =
        wrap_angle(get_angle(w, "actor.waypoints[]", "heading", 0.0));
    script.waypoints.push_back(wp);
  }
  return script;
}

LatticeSpec parse_lattice(const json& j) {
  LatticeSpec spec;
  reject_unknown_keys(j, "lattice",
                      {"n_theta", "n_phi", "n_rho", "rho_values",
                       "horizon_steps", "step_dt", "include_pole"});
  spec.n_theta = get_int(j, "lattice", "n_theta", spec.n_theta);
  spec.n_phi = get_int(j, "lattice", "n_phi", spec.n_phi);
  if (j.contains("rho_values")) {
    spec.rho_values.clear();
    for (const auto& r : j.at("rho_values")) {
      if (!r.is_number())
        throw ConfigError("'lattice.rho_values' must contain numbers");
      spec.rho_values.push_back(r.get<double>());
    }
  }
  if (j.contains("n_rho") &&
      get_int(j, "lattice", "n_rho", 0) != spec.n_rho())
    throw ConfigError("'lattice.n_rho' disagrees with |rho_values|");
  spec.horizon_steps = get_int(j, "lattice", "horizon_steps", spec.horizon_steps);
  spec.step_dt = get_number(j, "lattice", "step_dt", spec.step_dt);
  spec.include_pole = get_bool(j, "lattice", "include_pole", spec.include_pole);
  return spec;
}

void parse_weights(const json& j, Scenario& s) {
  reject_unknown_keys(
      j, "weights",
      {"lambda_occ", "lambda_obs", "lambda_div", "lambda_vis", "lambda_cine",
       "lambda_col", "d_min_div", "d_max_div", "d_min_col", "d_max_col",
       "fov_half_angle", "fov_half_angle_deg", "r_max", "cine_prior"});
  Weights& w = s.weights;
  w.lambda_occ = get_number(j, "weights", "lambda_occ", w.lambda_occ);
  w.lambda_obs = get_number(j, "weights", "lambda_obs", w.lambda_obs);
  w.lambda_div = get_number(j, "weights", "lambda_div", w.lambda_div);
  w.lambda_vis = get_number(j, "weights", "lambda_vis", w.lambda_vis);
  w.lambda_cine = get_number(j, "weights", "lambda_cine", w.lambda_cine);
  w.lambda_col = get_number(j, "weights", "lambda_col", w.lambda_col);
  DiversityParams& d = s.diversity;
  d.d_min_div = get_number(j, "weights", "d_min_div", d.d_min_div);
  d.d_max_div = get_number(j, "weights", "d_max_div", d.d_max_div);
  d.d_min_col = get_number(j, "weights", "d_min_col", d.d_min_col);
  d.d_max_col = get_number(j, "weights", "d_max_col", d.d_max_col);
  s.fov_half_angle = get_angle(j, "weights", "fov_half_angle", s.fov_half_angle);
  s.r_max = get_number(j, "weights", "r_max", s.r_max);
  if (j.contains("cine_prior")) {
    for (const auto& r : j.at("cine_prior")) {
      reject_unknown_keys(r, "weights.cine_prior[]",
                          {"theta", "theta_deg", "phi", "phi_deg", "rho", "cost"});
      CinePriorRule rule;
      if (r.contains("theta") && r.contains("theta_deg"))
        throw ConfigError("'weights.cine_prior[]': give 'theta' or 'theta_deg', not both");
      if (r.contains("theta"))
        std::tie(rule.theta_min, rule.theta_max) =
            get_range(r.at("theta"), "weights.cine_prior[].theta", 1.0);
      else if (r.contains("theta_deg"))
        std::tie(rule.theta_min, rule.theta_max) = get_range(
            r.at("theta_deg"), "weights.cine_prior[].theta_deg", kPi / 180.0);
      if (r.contains("phi") && r.contains("phi_deg"))
        throw ConfigError("'weights.cine_prior[]': give 'phi' or 'phi_deg', not both");
      if (r.contains("phi"))
        std::tie(rule.phi_min, rule.phi_max) =
            get_range(r.at("phi"), "weights.cine_prior[].phi", 1.0);
      else if (r.contains("phi_deg"))
        std::tie(rule.phi_min, rule.phi_max) = get_range(
            r.at("phi_deg"), "weights.cine_prior[].phi_deg", kPi / 180.0);
      if (r.contains("rho"))
        std::tie(rule.rho_min, rule.rho_max) =
            get_range(r.at("rho"), "weights.cine_prior[].rho", 1.0);
      rule.cost = get_number(r, "weights.cine_prior[]", "cost", 0.0);
      s.cine_rules.push_back(rule);
    }
  }
}

void parse_smoother(const json& j, SmootherConfig& c) {
  reject_unknown_keys(j, "smoother",
                      {"fine_dt", "w_smooth", "w_track", "w_obs", "w_sep",
                       "sep_distance", "obstacle_margin", "obstacle_subsamples",
                       "max_iters", "step_size", "convergence_tol"});
  c.fine_dt = get_number(j, "smoother", "fine_dt", c.fine_dt);
  c.w_smooth = get_number(j, "smoother", "w_smooth", c.w_smooth);
  c.w_track = get_number(j, "smoother", "w_track", c.w_track);
  c.w_obs = get_number(j, "smoother", "w_obs", c.w_obs);
  c.w_sep = get_number(j, "smoother", "w_sep", c.w_sep);
  c.sep_distance = get_number(j, "smoother", "sep_distance", c.sep_distance);
  c.obstacle_margin =
      get_number(j, "smoother", "obstacle_margin", c.obstacle_margin);
  c.obstacle_subsamples =
      get_int(j, "smoother", "obstacle_subsamples", c.obstacle_subsamples);
  c.max_iters = get_int(j, "smoother", "max_iters", c.max_iters);
  c.step_size = get_number(j, "smoother", "step_size", c.step_size);
  c.convergence_tol =
      get_number(j, "smoother", "convergence_tol", c.convergence_tol);
}

void parse_selector(const json& j, SelectorConfig& c) {
  reject_unknown_keys(j, "selector",
                      {"w_vis", "w_cine", "decay_rate", "recovery_rate",
                       "min_shot", "max_shot"});
  c.w_vis = get_number(j, "selector", "w_vis", c.w_vis);
  c.w_cine = get_number(j, "selector", "w_cine", c.w_cine);
  c.decay_rate = get_number(j, "selector", "decay_rate", c.decay_rate);
  c.recovery_rate = get_number(j, "selector", "recovery_rate", c.recovery_rate);
  c.min_shot = get_number(j, "selector", "min_shot", c.min_shot);
  c.max_shot = get_number(j, "selector", "max_shot", c.max_shot);
}

void parse_run(const json& j, RunConfig& c) {
  reject_unknown_keys(j, "run", {"duration", "replan_hz", "sample_hz", "seed"});
  c.duration = get_number(j, "run", "duration", c.duration);
  c.replan_hz = get_number(j, "run", "replan_hz", c.replan_hz);
  c.sample_hz = get_number(j, "run", "sample_hz", c.sample_hz);
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
}

}  // namespace

void Scenario::validate() const {
  scene.validate();
  if (voxel_resolution <= 0.0)
    throw ConfigError("scene.resolution must be positive");
  actor.validate();
  if (uav_starts.empty()) throw ConfigError("uavs: at least one camera required");
  lattice.validate();
  weights.validate();
  diversity.validate();
  if (!(fov_half_angle > 0.0 && fov_half_angle < kPi))
    throw ConfigError("weights.fov_half_angle must be in (0, pi)");
  if (r_max <= 0.0) throw ConfigError("weights.r_max must be positive");
  smoother.validate();
  selector.validate();
  if (run.duration <= 0.0) throw ConfigError("run.duration must be positive");
  if (run.replan_hz <= 0.0 || run.sample_hz <= 0.0)
    throw ConfigError("run rates must be positive");
  const double samples_per_cycle = run.sample_hz / run.replan_hz;
  if (std::abs(samples_per_cycle - std::round(samples_per_cycle)) > 1e-9)
    throw ConfigError("run.sample_hz must be an integer multiple of run.replan_hz");
  const double stride = lattice.step_dt / smoother.fine_dt;
  if (std::abs(stride - std::round(stride)) > 1e-9)
    throw ConfigError("lattice.step_dt must be an integer multiple of smoother.fine_dt");
  if (actor.end_time() < run.duration - 1e-9)
    throw ConfigError("actor script must cover the run duration");
  if (actor.start_time() > 1e-9)
    throw ConfigError("actor script must start at t = 0");
}

Scenario default_scenario() {
  Scenario s;
  s.name = "reference";
  s.actor.waypoints = {{0.0, {0.0, 0.0, 0.0, 0.0}},
                       {s.run.duration, {0.0, 0.0, 0.0, 0.0}}};
  s.uav_starts = {{-3.0, 0.0, 1.5}};
  return s;
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  reject_unknown_keys(j, "$",
                      {"name", "scene", "actor", "uavs", "lattice", "weights",
                       "smoother", "selector", "run"});
  Scenario s = default_scenario();
  s.cine_rules.clear();
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ConfigError("'name' must be a string");
    s.name = j.at("name").get<std::string>();
  }
  if (j.contains("scene")) s.scene = parse_scene(j.at("scene"), &s.voxel_resolution);
  if (j.contains("actor")) s.actor = parse_actor(j.at("actor"));
  if (j.contains("uavs")) {
    s.uav_starts.clear();
    for (const auto& u : j.at("uavs")) {
      reject_unknown_keys(u, "uavs[]", {"position"});
      s.uav_starts.push_back(get_vec3(u, "uavs[]", "position"));
    }
  }
  if (j.contains("lattice")) s.lattice = parse_lattice(j.at("lattice"));
  if (j.contains("weights")) parse_weights(j.at("weights"), s);
  if (j.contains("smoother")) parse_smoother(j.at("smoother"), s.smoother);
  if (j.contains("selector")) parse_selector(j.at("selector"), s.selector);
  if (j.contains("run")) parse_run(j.at("run"), s.run);
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  json scene;
  scene["bounds_min"] = vec3_to_json(s.scene.bounds_min);
  scene["bounds_max"] = vec3_to_json(s.scene.bounds_max);
  scene["resolution"] = s.voxel_resolution;
  scene["boxes"] = json::array();
  for (const auto& b : s.scene.boxes)
    scene["boxes"].push_back({{"min", vec3_to_json(b.min)}, {"max", vec3_to_json(b.max)}});
  scene["cylinders"] = json::array();
  for (const auto& c : s.scene.cylinders)
    scene["cylinders"].push_back({{"center", json::array({c.cx, c.cy})},
                                  {"radius", c.radius},
                                  {"z_min", c.z_min},
                                  {"z_max", c.z_max}});
  j["scene"] = scene;

  json actor;
  actor["waypoints"] = json::array();
  for (const auto& w : s.actor.waypoints)
    actor["waypoints"].push_back(
        {{"t", w.t},
         {"position", json::array({w.pose.x, w.pose.y, w.pose.z})},
         {"heading", w.pose.heading}});
  j["actor"] = actor;

  j["uavs"] = json::array();
  for (const auto& u : s.uav_starts)
    j["uavs"].push_back({{"position", vec3_to_json(u)}});

  j["lattice"] = {{"n_theta", s.lattice.n_theta},
                  {"n_phi", s.lattice.n_phi},
                  {"rho_values", s.lattice.rho_values},
                  {"horizon_steps", s.lattice.horizon_steps},
                  {"step_dt", s.lattice.step_dt},
                  {"include_pole", s.lattice.include_pole}};

  json weights = {{"lambda_occ", s.weights.lambda_occ},
                  {"lambda_obs", s.weights.lambda_obs},
                  {"lambda_div", s.weights.lambda_div},
                  {"lambda_vis", s.weights.lambda_vis},
                  {"lambda_cine", s.weights.lambda_cine},
                  {"lambda_col", s.weights.lambda_col},
                  {"d_min_div", s.diversity.d_min_div},
                  {"d_max_div", s.diversity.d_max_div},
                  {"d_min_col", s.diversity.d_min_col},
                  {"d_max_col", s.diversity.d_max_col},
                  {"fov_half_angle", s.fov_half_angle},
                  {"r_max", s.r_max}};
  weights["cine_prior"] = json::array();
  for (const auto& r : s.cine_rules)
    weights["cine_prior"].push_back({{"theta", json::array({r.theta_min, r.theta_max})},
                                     {"phi", json::array({r.phi_min, r.phi_max})},
                                     {"rho", json::array({r.rho_min, r.rho_max})},
                                     {"cost", r.cost}});
  j["weights"] = weights;

  j["smoother"] = {{"fine_dt", s.smoother.fine_dt},
                   {"w_smooth", s.smoother.w_smooth},
                   {"w_track", s.smoother.w_track},
                   {"w_obs", s.smoother.w_obs},
                   {"w_sep", s.smoother.w_sep},
                   {"sep_distance", s.smoother.sep_distance},
                   {"obstacle_margin", s.smoother.obstacle_margin},
                   {"obstacle_subsamples", s.smoother.obstacle_subsamples},
                   {"max_iters", s.smoother.max_iters},
                   {"step_size", s.smoother.step_size},
                   {"convergence_tol", s.smoother.convergence_tol}};

  j["selector"] = {{"w_vis", s.selector.w_vis},
                   {"w_cine", s.selector.w_cine},
                   {"decay_rate", s.selector.decay_rate},
                   {"recovery_rate", s.selector.recovery_rate},
                   {"min_shot", s.selector.min_shot},
                   {"max_shot", s.selector.max_shot}};

  j["run"] = {{"duration", s.run.duration},
              {"replan_hz", s.run.replan_hz},
              {"sample_hz", s.run.sample_hz},
              {"seed", s.run.seed}};
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scenario file '" + path + "'");
  out << scenario_to_json(s);
}

void BenchSweep::validate() const {
  if (state_spaces.empty()) throw ConfigError("sweep: state_spaces must be non-empty");
  for (const auto& ss : state_spaces)
    if (ss[0] < 2 || ss[1] < 1 || ss[2] < 1)
      throw ConfigError("sweep: invalid state space shape");
  if (n_uavs.empty() || horizon_steps.empty())
    throw ConfigError("sweep: n_uavs and horizon_steps must be non-empty");
  for (int n : n_uavs)
    if (n < 1) throw ConfigError("sweep: n_uavs entries must be >= 1");
  for (int t : horizon_steps)
    if (t < 1) throw ConfigError("sweep: horizon_steps entries must be >= 1");
  if (repetitions < 1) throw ConfigError("sweep: repetitions must be >= 1");
}

BenchSweep default_sweep() {
  BenchSweep sweep;
  sweep.state_spaces = {{3, 3, 8},    {16, 6, 6},   {24, 9, 9},
                        {32, 12, 12}, {40, 15, 15}, {48, 18, 18},
                        {52, 21, 21}, {64, 24, 24}};
  return sweep;
}

BenchSweep parse_sweep(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("sweep parse error: ") + e.what());
  }
  reject_unknown_keys(j, "$",
                      {"state_spaces", "n_uavs", "horizon_steps",
                       "repetitions", "seed"});
  BenchSweep sweep = default_sweep();
  if (j.contains("state_spaces")) {
    sweep.state_spaces.clear();
    for (const auto& ss : j.at("state_spaces")) {
      if (!ss.is_array() || ss.size() != 3)
        throw ConfigError("'state_spaces' entries must be [n_theta, n_phi, n_rho]");
      sweep.state_spaces.push_back(
          {ss[0].get<int>(), ss[1].get<int>(), ss[2].get<int>()});
    }
  }
  if (j.contains("n_uavs")) {
    sweep.n_uavs.clear();
    for (const auto& n : j.at("n_uavs")) sweep.n_uavs.push_back(n.get<int>());
  }
  if (j.contains("horizon_steps")) {
    sweep.horizon_steps.clear();
    for (const auto& t : j.at("horizon_steps"))
      sweep.horizon_steps.push_back(t.get<int>());
  }
  sweep.repetitions = get_int(j, "$", "repetitions", sweep.repetitions);
  if (j.contains("seed")) sweep.seed = j.at("seed").get<std::uint64_t>();
  sweep.validate();
  return sweep;
}

BenchSweep load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sweep(buf.str());
}

LatticeSpec bench_lattice_spec(int n_theta, int n_phi, int n_rho,
                               int horizon_steps) {
  LatticeSpec spec;
  spec.n_theta = n_theta;
  spec.n_phi = n_phi;
  spec.rho_values.clear();
  if (n_rho == 1) {
    spec.rho_values.push_back(2.0);
  } else {
    for (int i = 0; i < n_rho; ++i)
      spec.rho_values.push_back(2.0 + 5.0 * i / (n_rho - 1));
  }
  spec.horizon_steps = horizon_steps;
  return spec;
}

}  // namespace aircine
