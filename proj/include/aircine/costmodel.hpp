#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aircine/geometry.hpp"
#include "aircine/lattice.hpp"
#include "aircine/world.hpp"

namespace aircine {

// Relative weights of the planner cost terms. Trajectory smoothness is
// handled by the local optimizer and carries no weight here.
struct Weights {
  double lambda_occ = 1.0;   // actor occlusion along the sight line
  double lambda_obs = 1.0;   // obstacle proximity
  double lambda_div = 1.0;   // shot diversity between cameras
  double lambda_vis = 1.0;   // inter-camera visibility
  double lambda_cine = 1.0;  // operator view-preference prior
  double lambda_col = 1.0;   // inter-camera collision

  void validate() const;
};

struct DiversityParams {
  double d_min_div = 1.0;
  double d_max_div = 6.0;
  double d_min_col = 0.5;
  double d_max_col = 1.0;

  void validate() const;
};

// Distance ramp shared by diversity and collision costs:
// 1 below d_min, 0 above d_max, linear in between.
double ramp_pair_cost(double d, double d_min, double d_max);

double diversity_pair(const Vec3& p1, const Vec3& p2, double d_min,
                      double d_max);

// 1 iff p_j lies inside the viewing cone of the camera at p_i, whose axis
// points toward the actor. Coincident positions count as visible.
// Throws NumericError when p_i coincides with the actor.
int visibility_pair(const Vec3& p_i, const Vec3& p_j, const Vec3& actor,
                    double fov_half_angle);

// Per-state cost rule over angle/radius ranges. Angles in radians; a theta
// range with min > max wraps through 0. Matching rule costs accumulate.
struct CinePriorRule {
  double theta_min = 0.0, theta_max = kTwoPi;
  double phi_min = 0.0, phi_max = kPi / 2.0;
  double rho_min = 0.0, rho_max = 1e9;
  double cost = 0.0;
};

class CinePrior {
 public:
  CinePrior() = default;  // zero prior
  CinePrior(const Lattice& lattice, const std::vector<CinePriorRule>& rules);
  // Direct per-state values (must be finite, non-negative, one per state).
  CinePrior(const Lattice& lattice, std::vector<double> values);

  double at(int state) const { return values_.empty() ? 0.0 : values_[state]; }
  bool empty() const { return values_.empty(); }

 private:
  std::vector<double> values_;
};

// Precomputed |S| x |S| pairwise tables over canonical actor-relative
// positions (valid for any actor pose: all cameras share the actor frame).
// Dense storage is the ground truth; above a byte budget the tables switch
// to a rotation-compressed layout that exploits the yaw symmetry of the
// lattice (entries depend on the yaw-bin difference only), shrinking
// storage by a factor of n_theta.
class PairTables {
 public:
  enum class Storage { kDense, kRotationCompressed };

  static constexpr std::size_t kDefaultDenseBudget = 2'000'000'000;

  static PairTables build(const Lattice& lattice, const DiversityParams& params,
                          double fov_half_angle,
                          std::size_t dense_budget_bytes = kDefaultDenseBudget);

  int visibility(int i, int j) const {
    if (storage_ == Storage::kDense)
      return vis_[static_cast<std::size_t>(i) * n_ + j];
    return vis_[compressed_slot(i, j)];
  }
  double diversity(int i, int j) const {
    if (storage_ == Storage::kDense)
      return div_[static_cast<std::size_t>(i) * n_ + j];
    return div_[compressed_slot(i, j)];
  }
  double collision(int i, int j) const {
    if (storage_ == Storage::kDense)
      return col_[static_cast<std::size_t>(i) * n_ + j];
    return col_[compressed_slot(i, j)];
  }

  Storage storage() const { return storage_; }
  std::size_t allocated_bytes() const {
    return vis_.size() * sizeof(uint8_t) + div_.size() * sizeof(double) +
           col_.size() * sizeof(double);
  }

  // Logical table size: every pair of states has an entry in each of the
  // three tables regardless of the physical layout.
  static std::size_t logical_entries(const LatticeSpec& spec) {
    const std::size_t n = spec.num_states();
    return n * n;
  }
  static std::size_t logical_bytes(const LatticeSpec& spec) {
    return logical_entries(spec) * (sizeof(uint8_t) + 2 * sizeof(double));
  }

 private:
  std::size_t compressed_slot(int i, int j) const {
    const int ti = i / sub_count_, tj = j / sub_count_;
    const int pi = i - ti * sub_count_, pj = j - tj * sub_count_;
    const int dt = tj - ti + (tj < ti ? n_theta_ : 0);
    return (static_cast<std::size_t>(dt) * sub_count_ + pi) * sub_count_ + pj;
  }

  Storage storage_ = Storage::kDense;
  int n_ = 0;
  int n_theta_ = 0;
  int sub_count_ = 0;  // n_phi * n_rho
  std::vector<uint8_t> vis_;
  std::vector<double> div_;
  std::vector<double> col_;
};

// Per-state neighborhoods for the obstacle cost: all lattice states within
// r_max of each state, with their spherical-element volume weights
// rho^2 sin(phi) d_rho d_theta d_phi.
class ObstacleKernel {
 public:
  ObstacleKernel(const Lattice& lattice, double r_max);

  std::span<const int32_t> ball_states(int s) const {
    return {ids_.data() + begin_[s], begin_[s + 1] - begin_[s]};
  }
  std::span<const double> ball_weights(int s) const {
    return {weights_.data() + begin_[s], begin_[s + 1] - begin_[s]};
  }
  double volume_weight(int s) const { return volume_[s]; }
  std::size_t allocated_bytes() const {
    return ids_.size() * sizeof(int32_t) + weights_.size() * sizeof(double);
  }

 private:
  std::vector<std::size_t> begin_;
  std::vector<int32_t> ids_;
  std::vector<double> weights_;
  std::vector<double> volume_;
};

// Occupancy mass within r_max of the state, volume-weighted.
double obstacle_cost(int state, int t, const SphericalGrid& sgrid,
                     const ObstacleKernel& kernel);

// Arc-length-weighted occupancy along the camera-to-actor sight line.
double occlusion_cost(int state, int t, const SphericalGrid& sgrid);

// Everything a planning pass needs, bundled. All referenced objects must
// outlive the context; all are immutable during planning.
struct PlanContext {
  const Lattice& lattice;
  const PairTables& tables;
  const SphericalGrid& sgrid;
  const ObstacleKernel& kernel;
  const CinePrior& prior;
  Weights weights;
};

// Pairwise charge of placing a camera at state s while another camera sits
// at state sj: diversity + collision + visibility in both directions.
inline double pairwise_cost(int s, int sj, const PairTables& tables,
                            const Weights& w) {
  return w.lambda_div * tables.diversity(s, sj) +
         w.lambda_col * tables.collision(s, sj) +
         w.lambda_vis *
             (tables.visibility(s, sj) + tables.visibility(sj, s));
}

// Full instantaneous cost of a state at timestep t given the states of
// already-planned cameras at the same timestep.
double state_cost(int state, int t, std::span<const int32_t> fixed_states_at_t,
                  const PlanContext& ctx);

// Per-term breakdown used by the plan dump and by tests.
struct StateCostTerms {
  double occlusion = 0.0;
  double obstacle = 0.0;
  double cine = 0.0;
  double diversity = 0.0;
  double collision = 0.0;
  double visibility = 0.0;
  double weighted_total = 0.0;
};

StateCostTerms state_cost_terms(int state, int t,
                                std::span<const int32_t> fixed_states_at_t,
                                const PlanContext& ctx);

}  // namespace aircine
