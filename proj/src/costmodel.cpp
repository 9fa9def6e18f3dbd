#include "aircine/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "aircine/errors.hpp"

namespace aircine {

void Weights::validate() const {
  const double all[] = {lambda_occ, lambda_obs, lambda_div,
                        lambda_vis, lambda_cine, lambda_col};
  for (double v : all)
    if (v < 0.0 || !std::isfinite(v))
      throw ConfigError("weights: all lambda values must be finite and non-negative");
}

void DiversityParams::validate() const {
  if (!(0.0 <= d_min_div && d_min_div < d_max_div))
    throw ConfigError("DiversityParams: need 0 <= d_min_div < d_max_div");
  if (!(0.0 <= d_min_col && d_min_col < d_max_col))
    throw ConfigError("DiversityParams: need 0 <= d_min_col < d_max_col");
}

double ramp_pair_cost(double d, double d_min, double d_max) {
  if (d < d_min) return 1.0;
  if (d > d_max) return 0.0;
  return (d_max - d) / (d_max - d_min);
}

double diversity_pair(const Vec3& p1, const Vec3& p2, double d_min,
                      double d_max) {
  return ramp_pair_cost((p1 - p2).norm(), d_min, d_max);
}

int visibility_pair(const Vec3& p_i, const Vec3& p_j, const Vec3& actor,
                    double fov_half_angle) {
  const Vec3 axis = actor - p_i;
  const double axis_norm = axis.norm();
  if (axis_norm < 1e-12)
    throw NumericError("visibility_pair: camera coincides with the actor");
  const Vec3 u = p_j - p_i;
  const double u_norm = u.norm();
  if (u_norm == 0.0) return 1;  // coincident cameras see each other
  // angle(u, axis) <= fov  <=>  dot >= cos(fov) * |u| * |axis|
  return u.dot(axis) >= std::cos(fov_half_angle) * u_norm * axis_norm ? 1 : 0;
}

CinePrior::CinePrior(const Lattice& lattice,
                     const std::vector<CinePriorRule>& rules) {
  if (rules.empty()) return;
  for (const auto& r : rules)
    if (r.cost < 0.0 || !std::isfinite(r.cost))
      throw ConfigError("cine prior: rule costs must be finite and non-negative");
  const auto& spec = lattice.spec();
  values_.assign(lattice.num_states(), 0.0);
  for (int s = 0; s < lattice.num_states(); ++s) {
    const SphericalIndex idx = lattice.index_of(s);
    const double theta = wrap_angle(spec.theta_of(idx.i_theta));
    const double phi = spec.phi_of(idx.i_phi);
    const double rho = spec.rho_of(idx.i_rho);
    for (const auto& r : rules) {
      const bool theta_in =
          (r.theta_min <= r.theta_max)
              ? (theta >= r.theta_min && theta <= r.theta_max)
              : (theta >= r.theta_min || theta <= r.theta_max);  // wraps 0
      if (theta_in && phi >= r.phi_min && phi <= r.phi_max &&
          rho >= r.rho_min && rho <= r.rho_max)
        values_[s] += r.cost;
    }
  }
}

CinePrior::CinePrior(const Lattice& lattice, std::vector<double> values)
    : values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != lattice.num_states())
    throw ConfigError("cine prior: need one value per lattice state");
  for (double v : values_)
    if (v < 0.0 || !std::isfinite(v))
      throw ConfigError("cine prior: values must be finite and non-negative");
}

PairTables PairTables::build(const Lattice& lattice,
                             const DiversityParams& params,
                             double fov_half_angle,
                             std::size_t dense_budget_bytes) {
  params.validate();
  PairTables t;
  const int n = lattice.num_states();
  t.n_ = n;
  t.n_theta_ = lattice.spec().n_theta;
  t.sub_count_ = lattice.spec().n_phi * lattice.spec().n_rho();
  const Vec3 actor(0, 0, 0);

  if (logical_bytes(lattice.spec()) <= dense_budget_bytes) {
    t.storage_ = Storage::kDense;
    const std::size_t total = static_cast<std::size_t>(n) * n;
    t.vis_.resize(total);
    t.div_.resize(total);
    t.col_.resize(total);
    for (int i = 0; i < n; ++i) {
      const Vec3& pi = lattice.canonical_offset(i);
      for (int j = 0; j < n; ++j) {
        const Vec3& pj = lattice.canonical_offset(j);
        const std::size_t slot = static_cast<std::size_t>(i) * n + j;
        t.vis_[slot] =
            static_cast<uint8_t>(visibility_pair(pi, pj, actor, fov_half_angle));
        t.div_[slot] = diversity_pair(pi, pj, params.d_min_div, params.d_max_div);
        t.col_[slot] = diversity_pair(pi, pj, params.d_min_col, params.d_max_col);
      }
    }
  } else {
    // Entries depend on the yaw-bin difference only, so one row of yaw
    // offsets covers the whole table.
    t.storage_ = Storage::kRotationCompressed;
    const int sub = t.sub_count_;
    const std::size_t total =
        static_cast<std::size_t>(t.n_theta_) * sub * sub;
    t.vis_.resize(total);
    t.div_.resize(total);
    t.col_.resize(total);
    for (int dt = 0; dt < t.n_theta_; ++dt) {
      for (int pi = 0; pi < sub; ++pi) {
        const Vec3& a = lattice.canonical_offset(pi);  // yaw bin 0
        for (int pj = 0; pj < sub; ++pj) {
          const Vec3& b = lattice.canonical_offset(dt * sub + pj);
          const std::size_t slot =
              (static_cast<std::size_t>(dt) * sub + pi) * sub + pj;
          t.vis_[slot] =
              static_cast<uint8_t>(visibility_pair(a, b, actor, fov_half_angle));
          t.div_[slot] = diversity_pair(a, b, params.d_min_div, params.d_max_div);
          t.col_[slot] = diversity_pair(a, b, params.d_min_col, params.d_max_col);
        }
      }
    }
  }
  return t;
}

ObstacleKernel::ObstacleKernel(const Lattice& lattice, double r_max) {
  if (r_max <= 0.0) throw ConfigError("obstacle kernel: r_max must be positive");
  const auto& spec = lattice.spec();
  const int n = lattice.num_states();

  const double d_theta = kTwoPi / spec.n_theta;
  const double d_phi = (kPi / 2.0) / spec.n_phi;
  std::vector<double> d_rho(spec.n_rho());
  for (int i = 0; i < spec.n_rho(); ++i) {
    const double lo = (i == 0) ? spec.rho_of(0) : spec.rho_of(i - 1);
    const double hi =
        (i == spec.n_rho() - 1) ? spec.rho_of(i) : spec.rho_of(i + 1);
    d_rho[i] = (i == 0 || i == spec.n_rho() - 1) ? (hi - lo) : (hi - lo) / 2.0;
    if (spec.n_rho() == 1) d_rho[i] = 1.0;
  }

  volume_.resize(n);
  for (int s = 0; s < n; ++s) {
    const SphericalIndex idx = lattice.index_of(s);
    const double rho = spec.rho_of(idx.i_rho);
    const double phi = spec.phi_of(idx.i_phi);
    volume_[s] = rho * rho * std::sin(phi) * d_rho[idx.i_rho] * d_theta * d_phi;
  }

  // Cell-list binning over canonical offsets keeps the ball queries linear.
  const double cell = r_max;
  std::unordered_map<int64_t, std::vector<int32_t>> bins;
  const auto key = [&](const Vec3& p) {
    const auto c = [&](double x) {
      return static_cast<int64_t>(std::floor(x / cell)) + 4096;
    };
    return (c(p.x()) << 28) ^ (c(p.y()) << 14) ^ c(p.z());
  };
  for (int s = 0; s < n; ++s) bins[key(lattice.canonical_offset(s))].push_back(s);

  begin_.assign(n + 1, 0);
  std::vector<std::vector<int32_t>> balls(n);
  for (int s = 0; s < n; ++s) {
    const Vec3& p = lattice.canonical_offset(s);
    const double r2 = r_max * r_max;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const Vec3 probe = p + cell * Vec3(dx, dy, dz);
          const auto it = bins.find(key(probe));
          if (it == bins.end()) continue;
          for (int32_t o : it->second)
            if ((lattice.canonical_offset(o) - p).squaredNorm() <= r2)
              balls[s].push_back(o);
        }
    std::sort(balls[s].begin(), balls[s].end());
    begin_[s + 1] = begin_[s] + balls[s].size();
  }
  ids_.reserve(begin_[n]);
  weights_.reserve(begin_[n]);
  for (int s = 0; s < n; ++s)
    for (int32_t o : balls[s]) {
      ids_.push_back(o);
      weights_.push_back(volume_[o]);
    }
}

double obstacle_cost(int state, int t, const SphericalGrid& sgrid,
                     const ObstacleKernel& kernel) {
  const auto states = kernel.ball_states(state);
  const auto weights = kernel.ball_weights(state);
  double sum = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k)
    sum += weights[k] * sgrid.occupancy(states[k], t);
  return sum;
}

double occlusion_cost(int state, int t, const SphericalGrid& sgrid) {
  const auto values = sgrid.ray(state, t);
  double sum = 0.0;
  for (float v : values) sum += v;
  return sum * sgrid.ray_ds(state, t);
}

double state_cost(int state, int t, std::span<const int32_t> fixed_states_at_t,
                  const PlanContext& ctx) {
  const Weights& w = ctx.weights;
  double c = w.lambda_occ * occlusion_cost(state, t, ctx.sgrid) +
             w.lambda_obs * obstacle_cost(state, t, ctx.sgrid, ctx.kernel) +
             w.lambda_cine * ctx.prior.at(state);
  for (int32_t sj : fixed_states_at_t)
    c += pairwise_cost(state, sj, ctx.tables, w);
  return c;
}

StateCostTerms state_cost_terms(int state, int t,
                                std::span<const int32_t> fixed_states_at_t,
                                const PlanContext& ctx) {
  StateCostTerms terms;
  terms.occlusion = occlusion_cost(state, t, ctx.sgrid);
  terms.obstacle = obstacle_cost(state, t, ctx.sgrid, ctx.kernel);
  terms.cine = ctx.prior.at(state);
  for (int32_t sj : fixed_states_at_t) {
    terms.diversity += ctx.tables.diversity(state, sj);
    terms.collision += ctx.tables.collision(state, sj);
    terms.visibility +=
        ctx.tables.visibility(state, sj) + ctx.tables.visibility(sj, state);
  }
  const Weights& w = ctx.weights;
  terms.weighted_total = w.lambda_occ * terms.occlusion +
                         w.lambda_obs * terms.obstacle +
                         w.lambda_cine * terms.cine +
                         w.lambda_div * terms.diversity +
                         w.lambda_col * terms.collision +
                         w.lambda_vis * terms.visibility;
  return terms;
}

}  // namespace aircine
