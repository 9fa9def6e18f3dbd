#include "aircine/smoother.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "aircine/errors.hpp"

namespace aircine {

void SmootherConfig::validate() const {
  if (fine_dt <= 0.0) throw ConfigError("smoother: fine_dt must be positive");
  if (w_smooth < 0 || w_track < 0 || w_obs < 0 || w_sep < 0)
    throw ConfigError("smoother: weights must be non-negative");
  if (sep_distance <= 0.0)
    throw ConfigError("smoother: sep_distance must be positive");
  if (obstacle_subsamples < 1)
    throw ConfigError("smoother: obstacle_subsamples must be >= 1");
  if (max_iters < 0) throw ConfigError("smoother: max_iters must be >= 0");
  if (step_size <= 0.0) throw ConfigError("smoother: step_size must be positive");
  if (convergence_tol < 0.0)
    throw ConfigError("smoother: convergence_tol must be >= 0");
}

Vec3 FinePath::sample_at(double t) const {
  const double h = horizon();
  if (t < -1e-9 || t > h + 1e-9)
    throw std::out_of_range("FinePath::sample_at: time outside [0, horizon]");
  t = std::clamp(t, 0.0, h);
  const int n = static_cast<int>(samples.size());
  if (n == 1) return samples[0];
  const double g = t / fine_dt;
  int i = std::min(static_cast<int>(g), n - 2);
  const double u = g - i;
  if (u == 0.0) return samples[i];
  if (u == 1.0) return samples[i + 1];
  const Vec3& p1 = samples[i];
  const Vec3& p2 = samples[i + 1];
  if (i == 0 || i + 2 >= n) return p1 + u * (p2 - p1);  // boundary: linear
  const Vec3& p0 = samples[i - 1];
  const Vec3& p3 = samples[i + 2];
  // Catmull-Rom
  return 0.5 * ((2.0 * p1) + (p2 - p0) * u +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * (u * u) +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * (u * u * u));
}

namespace {

double hinge(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

double smoother_objective(const FinePath& path, const SmootherContext& ctx,
                          const SmootherConfig& cfg) {
  const int n = static_cast<int>(path.samples.size());
  double smooth = 0.0;
  for (int k = 1; k + 1 < n; ++k) {
    const Vec3 d2 =
        path.samples[k + 1] - 2.0 * path.samples[k] + path.samples[k - 1];
    smooth += d2.squaredNorm();
  }

  double track = 0.0;
  for (std::size_t k = 0; k < ctx.waypoint_targets.size(); ++k) {
    const int idx = static_cast<int>(k) * ctx.coarse_stride;
    if (idx >= n) break;
    track += (path.samples[idx] - ctx.waypoint_targets[k]).squaredNorm();
  }

  double obs = 0.0;
  if (ctx.field && cfg.w_obs > 0.0) {
    for (const Vec3& x : path.samples) {
      const double gap = hinge(cfg.obstacle_margin - ctx.field->sample(x));
      obs += gap * gap;
    }
    // Arc-length-weighted quadrature along each segment. Weighting by
    // length keeps fast segments from stepping over thin obstacles: the
    // charge depends on how much of the path runs close to geometry, not
    // on how quickly it gets through.
    for (int k = 0; k + 1 < n; ++k) {
      const Vec3 chord = path.samples[k + 1] - path.samples[k];
      const double len = chord.norm();
      if (len < 1e-12) continue;
      double acc = 0.0;
      for (int m = 0; m < cfg.obstacle_subsamples; ++m) {
        const double u = (m + 0.5) / cfg.obstacle_subsamples;
        const Vec3 x = path.samples[k] + u * chord;
        const double gap = hinge(cfg.obstacle_margin - ctx.field->sample(x));
        acc += gap * gap;
      }
      obs += acc * len / cfg.obstacle_subsamples;
    }
  }

  double sep = 0.0;
  for (const auto& other : ctx.other_paths) {
    const int m = std::min<int>(n, static_cast<int>(other.size()));
    for (int k = 0; k < m; ++k) {
      const double gap =
          hinge(cfg.sep_distance - (path.samples[k] - other[k]).norm());
      sep += gap * gap;
    }
  }

  return cfg.w_smooth * smooth + cfg.w_track * track + cfg.w_obs * obs +
         cfg.w_sep * sep;
}

std::vector<Vec3> smoother_gradient(const FinePath& path,
                                    const SmootherContext& ctx,
                                    const SmootherConfig& cfg) {
  const int n = static_cast<int>(path.samples.size());
  std::vector<Vec3> grad(n, Vec3::Zero());

  for (int k = 1; k + 1 < n; ++k) {
    const Vec3 d2 =
        path.samples[k + 1] - 2.0 * path.samples[k] + path.samples[k - 1];
    grad[k - 1] += 2.0 * cfg.w_smooth * d2;
    grad[k] -= 4.0 * cfg.w_smooth * d2;
    grad[k + 1] += 2.0 * cfg.w_smooth * d2;
  }

  for (std::size_t k = 0; k < ctx.waypoint_targets.size(); ++k) {
    const int idx = static_cast<int>(k) * ctx.coarse_stride;
    if (idx >= n) break;
    grad[idx] += 2.0 * cfg.w_track * (path.samples[idx] - ctx.waypoint_targets[k]);
  }

  if (ctx.field && cfg.w_obs > 0.0) {
    const double h = 0.5 * ctx.field->resolution();
    for (int k = 0; k < n; ++k) {
      const double gap = cfg.obstacle_margin - ctx.field->sample(path.samples[k]);
      if (gap > 0.0)
        grad[k] -= 2.0 * cfg.w_obs * gap * ctx.field->gradient(path.samples[k], h);
    }
    for (int k = 0; k + 1 < n; ++k) {
      const Vec3 chord = path.samples[k + 1] - path.samples[k];
      const double len = chord.norm();
      if (len < 1e-12) continue;
      const Vec3 unit = chord / len;
      double acc = 0.0;
      Vec3 point_a = Vec3::Zero(), point_b = Vec3::Zero();
      for (int m = 0; m < cfg.obstacle_subsamples; ++m) {
        const double u = (m + 0.5) / cfg.obstacle_subsamples;
        const Vec3 x = path.samples[k] + u * chord;
        const double gap = cfg.obstacle_margin - ctx.field->sample(x);
        if (gap <= 0.0) continue;
        acc += gap * gap;
        const Vec3 push = 2.0 * gap * ctx.field->gradient(x, h);
        point_a -= (1.0 - u) * push;
        point_b -= u * push;
      }
      const double scale = cfg.w_obs * len / cfg.obstacle_subsamples;
      const Vec3 len_term =
          cfg.w_obs * (acc / cfg.obstacle_subsamples) * unit;
      grad[k] += scale * point_a - len_term;
      grad[k + 1] += scale * point_b + len_term;
    }
  }

  for (const auto& other : ctx.other_paths) {
    const int m = std::min<int>(n, static_cast<int>(other.size()));
    for (int k = 0; k < m; ++k) {
      const Vec3 delta = path.samples[k] - other[k];
      const double d = delta.norm();
      const double gap = cfg.sep_distance - d;
      if (gap > 0.0 && d > 1e-12)
        grad[k] -= 2.0 * cfg.w_sep * gap * (delta / d);
    }
  }

  // First sample is fixed; report gradients for the free block only.
  grad.erase(grad.begin());
  return grad;
}

namespace {

// Residual hinge penalties (obstacle + separation) of a candidate path.
double hinge_penalty(const FinePath& path, const SmootherContext& ctx,
                     const SmootherConfig& cfg) {
  SmootherConfig probe = cfg;
  probe.w_smooth = 0.0;
  probe.w_track = 0.0;
  return smoother_objective(path, ctx, probe);
}

// Preconditioned descent from the given initialization, in place.
double run_descent(FinePath& path, const SmootherContext& ctx,
                   const SmootherConfig& cfg,
                   const Eigen::LLT<Eigen::MatrixXd>& llt,
                   SmootherStats& stats) {
  const int free_n = static_cast<int>(path.samples.size()) - 1;
  double objective = smoother_objective(path, ctx, cfg);
  if (!std::isfinite(objective))
    throw NumericError("smoother: non-finite objective at initialization");
  stats.initial_objective = objective;
  stats.iterations = 0;
  stats.monotone = true;

  FinePath trial = path;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const std::vector<Vec3> grad = smoother_gradient(path, ctx, cfg);
    Eigen::MatrixXd g(free_n, 3);
    for (int k = 0; k < free_n; ++k) g.row(k) = grad[k].transpose();
    const Eigen::MatrixXd dir = llt.solve(g);

    double step = cfg.step_size;
    double trial_objective = 0.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      for (int k = 0; k < free_n; ++k)
        trial.samples[k + 1] = path.samples[k + 1] - step * dir.row(k).transpose();
      trial_objective = smoother_objective(trial, ctx, cfg);
      if (!std::isfinite(trial_objective))
        throw NumericError("smoother: non-finite objective during descent");
      if (trial_objective <= objective) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const double decrease = objective - trial_objective;
    std::swap(path.samples, trial.samples);
    ++stats.iterations;
    if (trial_objective > objective) stats.monotone = false;
    const double rel = decrease / std::max(objective, 1e-12);
    objective = trial_objective;
    if (rel < cfg.convergence_tol) break;
  }
  stats.final_objective = objective;
  return objective;
}

}  // namespace

FinePath smooth_path(const Vec3& start, int uav_id, double horizon_seconds,
                     const SmootherContext& ctx, const SmootherConfig& cfg,
                     SmootherStats* stats) {
  cfg.validate();
  const int n = static_cast<int>(std::lround(horizon_seconds / cfg.fine_dt)) + 1;
  if (n < 2) throw ConfigError("smoother: horizon shorter than one fine step");

  FinePath path;
  path.uav_id = uav_id;
  path.fine_dt = cfg.fine_dt;
  path.samples.resize(n);

  // Initialize along the coarse waypoint polyline; hold the last waypoint
  // through the tail of the horizon.
  const auto& wps = ctx.waypoint_targets;
  for (int k = 0; k < n; ++k) {
    if (wps.empty()) {
      path.samples[k] = start;
      continue;
    }
    const double pos = static_cast<double>(k) / ctx.coarse_stride;
    const std::size_t seg = std::min<std::size_t>(
        static_cast<std::size_t>(pos), wps.size() - 1);
    if (seg + 1 >= wps.size()) {
      path.samples[k] = wps.back();
    } else {
      const double u = pos - static_cast<double>(seg);
      path.samples[k] = wps[seg] + u * (wps[seg + 1] - wps[seg]);
    }
  }
  path.samples[0] = start;

  // Preconditioner: normal matrix of the second-difference operator over
  // the free samples, ridge-stabilized (the free-endpoint matrix alone is
  // rank deficient).
  const int free_n = n - 1;
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(std::max(n - 2, 0), n);
  for (int r = 0; r + 2 < n; ++r) {
    d2(r, r) = 1.0;
    d2(r, r + 1) = -2.0;
    d2(r, r + 2) = 1.0;
  }
  Eigen::MatrixXd normal = d2.transpose() * d2;
  Eigen::MatrixXd metric =
      normal.bottomRightCorner(free_n, free_n) +
      1e-3 * Eigen::MatrixXd::Identity(free_n, free_n);
  const Eigen::LLT<Eigen::MatrixXd> llt(metric);

  SmootherStats polyline_stats;
  const double polyline_objective = run_descent(path, ctx, cfg, llt, polyline_stats);

  // A waypoint polyline that crosses geometry can trap the descent in an
  // infeasible basin (the pinned start cannot be moved out of the way).
  // When hinge penalties remain, restart from a hold-position seed and keep
  // the better local optimum.
  if (hinge_penalty(path, ctx, cfg) > 1e-12 &&
      (ctx.field || !ctx.other_paths.empty())) {
    FinePath hold;
    hold.uav_id = uav_id;
    hold.fine_dt = cfg.fine_dt;
    hold.samples.assign(n, start);
    SmootherStats hold_stats;
    const double hold_objective = run_descent(hold, ctx, cfg, llt, hold_stats);
    if (hold_objective < polyline_objective) {
      if (stats) *stats = hold_stats;
      return hold;
    }
  }
  if (stats) *stats = polyline_stats;
  return path;
}

SmootherTerms smoother_term_breakdown(const FinePath& path,
                                      const SmootherContext& ctx,
                                      const SmootherConfig& cfg) {
  SmootherTerms terms;
  SmootherConfig mask = cfg;
  mask.w_track = 0.0;
  mask.w_obs = 0.0;
  mask.w_sep = 0.0;
  terms.smooth = smoother_objective(path, ctx, mask);
  mask = cfg;
  mask.w_smooth = 0.0;
  mask.w_obs = 0.0;
  mask.w_sep = 0.0;
  terms.track = smoother_objective(path, ctx, mask);
  mask = cfg;
  mask.w_smooth = 0.0;
  mask.w_track = 0.0;
  mask.w_sep = 0.0;
  terms.obstacle = smoother_objective(path, ctx, mask);
  mask = cfg;
  mask.w_smooth = 0.0;
  mask.w_track = 0.0;
  mask.w_obs = 0.0;
  terms.separation = smoother_objective(path, ctx, mask);
  return terms;
}

}  // namespace aircine
