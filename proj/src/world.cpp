#include "aircine/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "aircine/errors.hpp"

namespace aircine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Stand-in for "no source": larger than any reachable squared cell distance.
constexpr double kUnreachedSq = 1e12;

// Felzenszwalb-Huttenlocher 1D squared distance transform (cell units).
void squared_dt_1d(std::span<const double> f, std::span<double> out,
                   std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const int p = v[j];
    out[q] = (q - p) * static_cast<double>(q - p) + f[p];
  }
}

// In-place 3D squared EDT over a flat x-major field of 0 / inf seeds.
void squared_dt_3d(std::vector<double>& field, const Eigen::Vector3i& dims) {
  const int nx = dims.x(), ny = dims.y(), nz = dims.z();
  const auto idx = [&](int x, int y, int z) {
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  };
  std::vector<double> line(std::max({nx, ny, nz}));
  std::vector<double> out(line.size());
  std::vector<int> v;
  std::vector<double> z;

  for (int zz = 0; zz < nz; ++zz)
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) line[x] = field[idx(x, y, zz)];
      squared_dt_1d({line.data(), (size_t)nx}, {out.data(), (size_t)nx}, v, z);
      for (int x = 0; x < nx; ++x) field[idx(x, y, zz)] = out[x];
    }
  for (int zz = 0; zz < nz; ++zz)
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) line[y] = field[idx(x, y, zz)];
      squared_dt_1d({line.data(), (size_t)ny}, {out.data(), (size_t)ny}, v, z);
      for (int y = 0; y < ny; ++y) field[idx(x, y, zz)] = out[y];
    }
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      for (int zz = 0; zz < nz; ++zz) line[zz] = field[idx(x, y, zz)];
      squared_dt_1d({line.data(), (size_t)nz}, {out.data(), (size_t)nz}, v, z);
      for (int zz = 0; zz < nz; ++zz) field[idx(x, y, zz)] = out[zz];
    }
}

bool box_overlaps_cell(const BoxPrimitive& b, const Vec3& cmin,
                       const Vec3& cmax) {
  for (int a = 0; a < 3; ++a) {
    if (!(cmin[a] < b.max[a] && cmax[a] > b.min[a])) return false;
  }
  return true;
}

bool cylinder_overlaps_cell(const CylinderPrimitive& c, const Vec3& cmin,
                            const Vec3& cmax) {
  if (!(cmin.z() < c.z_max && cmax.z() > c.z_min)) return false;
  const double px = std::clamp(c.cx, cmin.x(), cmax.x());
  const double py = std::clamp(c.cy, cmin.y(), cmax.y());
  const double dx = px - c.cx, dy = py - c.cy;
  return dx * dx + dy * dy < c.radius * c.radius;
}

}  // namespace

void SceneDescription::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!(bounds_min[a] < bounds_max[a]))
      throw ConfigError("scene: bounds_min must be strictly below bounds_max");
  }
  for (const auto& b : boxes)
    for (int a = 0; a < 3; ++a)
      if (!(b.min[a] < b.max[a]))
        throw ConfigError("scene: box min must be strictly below box max");
  for (const auto& c : cylinders) {
    if (c.radius <= 0.0) throw ConfigError("scene: cylinder radius must be positive");
    if (!(c.z_min < c.z_max))
      throw ConfigError("scene: cylinder z_min must be below z_max");
  }
}

VoxelGrid::VoxelGrid(Vec3 origin, double resolution, Eigen::Vector3i dims)
    : origin_(std::move(origin)), resolution_(resolution), dims_(std::move(dims)) {
  if (resolution_ <= 0.0) throw ConfigError("voxel grid: resolution must be positive");
  if (dims_.minCoeff() < 1) throw ConfigError("voxel grid: dims must be positive");
  occ_.assign(static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z(), 0.0f);
}

VoxelGrid VoxelGrid::voxelize(const SceneDescription& scene, double resolution) {
  scene.validate();
  if (resolution <= 0.0) throw ConfigError("voxelize: resolution must be positive");
  Eigen::Vector3i dims;
  for (int a = 0; a < 3; ++a) {
    const double span = scene.bounds_max[a] - scene.bounds_min[a];
    dims[a] = std::max(1, static_cast<int>(std::ceil(span / resolution - 1e-9)));
  }
  VoxelGrid grid(scene.bounds_min, resolution, dims);
  for (int iz = 0; iz < dims.z(); ++iz)
    for (int iy = 0; iy < dims.y(); ++iy)
      for (int ix = 0; ix < dims.x(); ++ix) {
        const Vec3 cmin = grid.origin_ + resolution * Vec3(ix, iy, iz);
        const Vec3 cmax = cmin + Vec3(resolution, resolution, resolution);
        bool hit = false;
        for (const auto& b : scene.boxes)
          if (box_overlaps_cell(b, cmin, cmax)) { hit = true; break; }
        if (!hit)
          for (const auto& c : scene.cylinders)
            if (cylinder_overlaps_cell(c, cmin, cmax)) { hit = true; break; }
        if (hit) grid.at(ix, iy, iz) = 1.0f;
      }
  return grid;
}

float VoxelGrid::sample(const Vec3& p) const {
  const Vec3 g = (p - origin_) / resolution_;
  const int ix = static_cast<int>(std::floor(g.x()));
  const int iy = static_cast<int>(std::floor(g.y()));
  const int iz = static_cast<int>(std::floor(g.z()));
  if (ix < 0 || iy < 0 || iz < 0 || ix >= dims_.x() || iy >= dims_.y() ||
      iz >= dims_.z())
    return 0.0f;
  return at(ix, iy, iz);
}

DistanceField DistanceField::build(const VoxelGrid& grid,
                                   float occupied_threshold) {
  DistanceField df;
  df.origin_ = grid.origin();
  df.resolution_ = grid.resolution();
  df.dims_ = grid.dims();
  df.sentinel_ =
      (df.dims_.cast<double>() * df.resolution_).norm() + df.resolution_;

  const std::size_t n = grid.cell_count();
  std::vector<double> sq_occ(n), sq_free(n);
  for (int iz = 0; iz < df.dims_.z(); ++iz)
    for (int iy = 0; iy < df.dims_.y(); ++iy)
      for (int ix = 0; ix < df.dims_.x(); ++ix) {
        const bool occ = grid.at(ix, iy, iz) >= occupied_threshold;
        const std::size_t i = grid.flat(ix, iy, iz);
        sq_occ[i] = occ ? 0.0 : kUnreachedSq;
        sq_free[i] = occ ? kUnreachedSq : 0.0;
      }
  squared_dt_3d(sq_occ, df.dims_);
  squared_dt_3d(sq_free, df.dims_);

  df.dist_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sq_free[i] == 0.0) {
      df.dist_[i] =
          std::min(std::sqrt(sq_occ[i]) * df.resolution_, df.sentinel_);
    } else {
      df.dist_[i] =
          -std::min(std::sqrt(sq_free[i]) * df.resolution_, df.sentinel_);
    }
  }
  return df;
}

double DistanceField::sample(const Vec3& p) const {
  Vec3 g = (p - origin_) / resolution_ - Vec3(0.5, 0.5, 0.5);
  for (int a = 0; a < 3; ++a)
    g[a] = std::clamp(g[a], 0.0, static_cast<double>(dims_[a] - 1));
  const int x0 = std::min(static_cast<int>(g.x()), dims_.x() - 1);
  const int y0 = std::min(static_cast<int>(g.y()), dims_.y() - 1);
  const int z0 = std::min(static_cast<int>(g.z()), dims_.z() - 1);
  const int x1 = std::min(x0 + 1, dims_.x() - 1);
  const int y1 = std::min(y0 + 1, dims_.y() - 1);
  const int z1 = std::min(z0 + 1, dims_.z() - 1);
  const double fx = g.x() - x0, fy = g.y() - y0, fz = g.z() - z0;

  const auto v = [&](int x, int y, int z) { return at_cell(x, y, z); };
  const double c00 = v(x0, y0, z0) * (1 - fx) + v(x1, y0, z0) * fx;
  const double c10 = v(x0, y1, z0) * (1 - fx) + v(x1, y1, z0) * fx;
  const double c01 = v(x0, y0, z1) * (1 - fx) + v(x1, y0, z1) * fx;
  const double c11 = v(x0, y1, z1) * (1 - fx) + v(x1, y1, z1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return c0 * (1 - fz) + c1 * fz;
}

Vec3 DistanceField::gradient(const Vec3& p, double h) const {
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 lo = p, hi = p;
    lo[a] -= h;
    hi[a] += h;
    g[a] = (sample(hi) - sample(lo)) / (2.0 * h);
  }
  return g;
}

namespace {

void write_grid_files(const std::string& prefix, const Vec3& origin,
                      double resolution, const Eigen::Vector3i& dims,
                      const char* value_kind, const void* data,
                      std::size_t bytes) {
  std::ofstream header(prefix + ".txt");
  if (!header) throw ConfigError("cannot write grid header '" + prefix + ".txt'");
  header << "dims " << dims.x() << " " << dims.y() << " " << dims.z() << "\n"
         << "origin " << origin.x() << " " << origin.y() << " " << origin.z()
         << "\n"
         << "resolution " << resolution << "\n"
         << "values " << value_kind << " x-major\n";
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw ConfigError("cannot write grid data '" + prefix + ".bin'");
  bin.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

}  // namespace

void export_grid(const VoxelGrid& grid, const std::string& prefix) {
  std::vector<float> values;
  values.reserve(grid.cell_count());
  for (int z = 0; z < grid.dims().z(); ++z)
    for (int y = 0; y < grid.dims().y(); ++y)
      for (int x = 0; x < grid.dims().x(); ++x)
        values.push_back(grid.at(x, y, z));
  write_grid_files(prefix, grid.origin(), grid.resolution(), grid.dims(),
                   "float32 occupancy", values.data(),
                   values.size() * sizeof(float));
}

void export_grid(const DistanceField& field, const std::string& prefix) {
  std::vector<double> values;
  for (int z = 0; z < field.dims().z(); ++z)
    for (int y = 0; y < field.dims().y(); ++y)
      for (int x = 0; x < field.dims().x(); ++x)
        values.push_back(field.at_cell(x, y, z));
  write_grid_files(prefix, field.origin(), field.resolution(), field.dims(),
                   "float64 signed_distance", values.data(),
                   values.size() * sizeof(double));
}

void ActorScript::validate() const {
  if (waypoints.empty()) throw ConfigError("actor: script needs at least one waypoint");
  for (size_t i = 1; i < waypoints.size(); ++i)
    if (waypoints[i].t <= waypoints[i - 1].t)
      throw ConfigError("actor: waypoint timestamps must be strictly increasing");
}

ActorPose ActorScript::at(double t) const {
  if (t < start_time() - 1e-9 || t > end_time() + 1e-9)
    throw ConfigError("actor: query time outside the scripted range");
  return at_clamped(t);
}

ActorPose ActorScript::at_clamped(double t) const {
  t = std::clamp(t, start_time(), end_time());
  if (waypoints.size() == 1) return waypoints.front().pose;
  size_t hi = 1;
  while (hi + 1 < waypoints.size() && waypoints[hi].t < t) ++hi;
  const Waypoint& a = waypoints[hi - 1];
  const Waypoint& b = waypoints[hi];
  const double u = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
  ActorPose out;
  out.x = a.pose.x + u * (b.pose.x - a.pose.x);
  out.y = a.pose.y + u * (b.pose.y - a.pose.y);
  out.z = a.pose.z + u * (b.pose.z - a.pose.z);
  out.heading =
      wrap_angle(a.pose.heading + u * angle_diff(b.pose.heading, a.pose.heading));
  return out;
}

SphericalGrid::SphericalGrid(const VoxelGrid& grid,
                             std::span<const ActorPose> actor_per_step,
                             const Lattice& lattice)
    : num_states_(lattice.num_states()),
      timesteps_(static_cast<int>(actor_per_step.size())) {
  const std::size_t cells = static_cast<std::size_t>(num_states_) * timesteps_;
  occ_.resize(cells);
  ray_ds_.resize(cells);
  ray_begin_.assign(cells + 1, 0);

  const double res = grid.resolution();
  // sample counts are fixed per rho shell
  std::size_t total = 0;
  for (int s = 0; s < num_states_; ++s) {
    const double rho = lattice.spec().rho_of(lattice.index_of(s).i_rho);
    const int m = std::max(1, static_cast<int>(std::ceil(rho / res)));
    for (int t = 0; t < timesteps_; ++t) {
      ray_begin_[static_cast<std::size_t>(s) * timesteps_ + t] = m;
      total += m;
    }
  }
  // prefix sums
  std::size_t acc = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    const std::size_t m = ray_begin_[i];
    ray_begin_[i] = acc;
    acc += m;
  }
  ray_begin_[cells] = acc;
  ray_values_.resize(total);

  for (int t = 0; t < timesteps_; ++t) {
    const ActorPose& actor = actor_per_step[t];
    for (int s = 0; s < num_states_; ++s) {
      const std::size_t cell = static_cast<std::size_t>(s) * timesteps_ + t;
      const CameraPose cam = lattice.to_world(s, actor);
      const Vec3 cpos = cam.position();
      occ_[cell] = grid.sample(cpos);

      const Vec3 to_actor = actor.position() - cpos;
      const double len = to_actor.norm();
      const std::size_t m = ray_begin_[cell + 1] - ray_begin_[cell];
      const double ds = len / static_cast<double>(m);
      ray_ds_[cell] = ds;
      const Vec3 dir = (len > 0.0) ? Vec3(to_actor / len) : Vec3(0, 0, 0);
      for (std::size_t k = 0; k < m; ++k) {
        const Vec3 p = cpos + dir * ((static_cast<double>(k) + 0.5) * ds);
        ray_values_[ray_begin_[cell] + k] = grid.sample(p);
      }
    }
  }
}

}  // namespace aircine
