#include "affint/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "affint/parallel.hpp"

namespace affint {

Box default_bounds(const IfsInstance& ifs) {
  const int d = ifs.dim();
  Box b{Vec(d), Vec(d)};
  const double r = ifs.bounding_radius() > 0.0 ? ifs.bounding_radius() : 1e-9;
  for (int j = 0; j < d; ++j) {
    b.lo[j] = -r;
    b.hi[j] = r;
  }
  return b;
}

OccupancyGrid::OccupancyGrid(Box bounds, int resolution, Provenance provenance)
    : bounds_(std::move(bounds)), res_(resolution), provenance_(provenance) {
  if (resolution < 1) throw std::invalid_argument("grid: resolution must be >= 1");
  if (bounds_.lo.dim() != bounds_.hi.dim() || bounds_.lo.dim() < 1) throw std::invalid_argument("grid: bad bounds");
  double cells = 1.0;
  for (int j = 0; j < dim(); ++j) {
    if (!(bounds_.hi[j] > bounds_.lo[j])) throw std::invalid_argument("grid: empty bounds on axis " + std::to_string(j));
    cells *= resolution;
  }
  if (cells > static_cast<double>(1u << 28)) throw std::invalid_argument("grid: too many cells");
  cells_.assign(static_cast<std::size_t>(cells), 0);
}

double OccupancyGrid::cell_size(int axis) const { return (bounds_.hi[axis] - bounds_.lo[axis]) / res_; }

double OccupancyGrid::cell_volume() const {
  double v = 1.0;
  for (int j = 0; j < dim(); ++j) v *= cell_size(j);
  return v;
}

std::int64_t OccupancyGrid::locate(std::span<const double> p) const {
  std::int64_t flat = 0, stride = 1;
  for (int j = 0; j < dim(); ++j) {
    const double u = (p[j] - bounds_.lo[j]) / cell_size(j);
    if (!(u >= 0.0) || u > res_) return -1;
    const std::int64_t i = std::min<std::int64_t>(static_cast<std::int64_t>(u), res_ - 1);
    flat += i * stride;
    stride *= res_;
  }
  return flat;
}

std::size_t OccupancyGrid::occupied() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](std::uint32_t c) { return c > 0; }));
}

bool OccupancyGrid::add(std::span<const double> p) {
  const std::int64_t flat = locate(p);
  if (flat < 0) return false;
  ++cells_[static_cast<std::size_t>(flat)];
  ++samples;
  return true;
}

void OccupancyGrid::merge(const OccupancyGrid& other) {
  if (other.cells_.size() != cells_.size()) throw std::invalid_argument("grid: merging grids of different shape");
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
  samples += other.samples;
  partial = partial || other.partial;
}

namespace {

// Marks the cells meeting the closed ball B(c, r).
void mark_ball(OccupancyGrid& g, const double* c, double r) {
  const int d = g.dim();
  const int res = g.resolution();
  const double slack = 1e-12 * (r + 1.0);
  std::array<int, kMaxDim> lo{}, hi{}, idx{};
  for (int j = 0; j < d; ++j) {
    const double h = g.cell_size(j);
    const double a = (c[j] - r - g.bounds().lo[j]) / h;
    const double b = (c[j] + r - g.bounds().lo[j]) / h;
    lo[j] = static_cast<int>(std::clamp(std::floor(a), 0.0, res - 1.0));
    hi[j] = static_cast<int>(std::clamp(std::floor(b), 0.0, res - 1.0));
    if (b < 0.0 || a > res) return;
    idx[j] = lo[j];
  }
  while (true) {
    double dist2 = 0.0;
    std::size_t flat = 0, stride = 1;
    for (int j = 0; j < d; ++j) {
      const double h = g.cell_size(j);
      const double x0 = g.bounds().lo[j] + idx[j] * h;
      const double gap = std::max({0.0, x0 - c[j], c[j] - (x0 + h)});
      dist2 += gap * gap;
      flat += static_cast<std::size_t>(idx[j]) * stride;
      stride *= static_cast<std::size_t>(res);
    }
    if (std::sqrt(dist2) <= r + slack) g.count(flat) = std::max<std::uint32_t>(g.count(flat), 1);
    int j = 0;
    while (j < d && idx[j] == hi[j]) {
      idx[j] = lo[j];
      ++j;
    }
    if (j == d) break;
    ++idx[j];
  }
}

}  // namespace

OccupancyGrid render_cylinder_cover(const IfsInstance& ifs, int depth, int resolution, std::uint64_t budget) {
  if (depth < 0) throw std::domain_error("render_cylinder_cover: negative depth");
  const Box bounds = default_bounds(ifs);
  const int d = ifs.dim();
  const int m = ifs.size();
  const double R = ifs.bounding_radius();
  OccupancyGrid grid(bounds, resolution, OccupancyGrid::Provenance::CylinderCovered);
  grid.depth = depth;
  if (depth == 0) {
    std::array<double, kMaxDim> zero{};
    mark_ball(grid, zero.data(), R);
    grid.samples = 1;
    return grid;
  }

  std::atomic<std::uint64_t> visited{0};
  std::atomic<bool> stopped{false};
  std::vector<OccupancyGrid> parts(static_cast<std::size_t>(m), OccupancyGrid(bounds, 1, grid.provenance()));
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t first) {
    OccupancyGrid local(bounds, resolution, OccupancyGrid::Provenance::CylinderCovered);
    // Stack frames: product T_I and offset f_I(0) per level.
    std::vector<Matrix> prod(static_cast<std::size_t>(depth) + 1);
    std::vector<Vec> off(static_cast<std::size_t>(depth) + 1);
    std::vector<int> next(static_cast<std::size_t>(depth) + 1, 0);
    prod[1] = ifs.tuple()[static_cast<int>(first)];
    off[1] = ifs.translation(static_cast<int>(first));
    std::uint64_t leaves = 0;
    auto leaf = [&](int k) {
      std::array<double, kMaxDim> c{};
      for (int j = 0; j < d; ++j) c[j] = off[k][j];
      mark_ball(local, c.data(), operator_norm(prod[k]) * R);
      ++leaves;
    };
    if (depth == 1) {
      leaf(1);
    } else {
      int k = 1;  // current level whose children are being expanded
      while (k >= 1) {
        if (stopped.load(std::memory_order_relaxed)) break;
        if (next[k] == m) {
          next[k] = 0;
          --k;
          continue;
        }
        const int i = next[k]++;
        multiply_into(prod[k], ifs.tuple()[i], prod[k + 1]);
        off[k + 1] = prod[k] * ifs.translation(i);
        off[k + 1] += off[k];
        if (k + 1 == depth) {
          leaf(k + 1);
          if ((leaves & 1023) == 0 && visited.fetch_add(1024) + 1024 > budget) stopped = true;
        } else {
          ++k;
        }
      }
    }
    visited += leaves & 1023;
    local.samples = leaves;
    parts[first] = std::move(local);
  });
  for (const auto& p : parts) {
    if (p.cell_count() != grid.cell_count()) continue;  // task skipped
    for (std::size_t i = 0; i < grid.cell_count(); ++i) grid.count(i) = std::max(grid.count(i), p.count(i));
    grid.samples += p.samples;
  }
  grid.partial = stopped.load();
  return grid;
}

OccupancyGrid point_grid(const PointCloud& cloud, const Box& bounds, int resolution) {
  OccupancyGrid g(bounds, resolution, OccupancyGrid::Provenance::PointSampled);
  for (std::size_t i = 0; i < cloud.size(); ++i) g.add(cloud.point(i));
  return g;
}

namespace {

// 1-D squared distance transform (lower envelope of parabolas).
void edt_1d(const double* f, double* out, int n, std::vector<int>& v, std::vector<double>& z) {
  const double inf = std::numeric_limits<double>::infinity();
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == inf) continue;
    if (f[v[k]] == inf) {
      v[k] = q;
      continue;
    }
    double s;
    while (true) {
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * (q - v[k]));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    out[q] = f[v[k]] == inf ? inf : dq * dq + f[v[k]];
  }
}

}  // namespace

InteriorDisk largest_hit_disk(const OccupancyGrid& grid) {
  const int d = grid.dim();
  const int res = grid.resolution();
  const int n = res + 2;  // one unhit cell of padding on each side
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(n);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> f(total, 0.0);
  std::array<int, kMaxDim> idx{};
  for (std::size_t flat = 0; flat < grid.cell_count(); ++flat) {
    std::size_t rem = flat, pflat = 0, stride = 1;
    for (int j = 0; j < d; ++j) {
      idx[j] = static_cast<int>(rem % res);
      rem /= res;
      pflat += static_cast<std::size_t>(idx[j] + 1) * stride;
      stride *= static_cast<std::size_t>(n);
    }
    if (grid.count(flat) > 0) f[pflat] = inf;
  }
  std::vector<double> line(static_cast<std::size_t>(n)), outl(static_cast<std::size_t>(n));
  std::vector<int> v;
  std::vector<double> z;
  std::size_t stride = 1;
  for (int axis = 0; axis < d; ++axis) {
    const std::size_t span = stride * static_cast<std::size_t>(n);
    for (std::size_t base = 0; base < total; ++base) {
      if ((base / stride) % static_cast<std::size_t>(n) != 0) continue;  // not a line start
      for (int q = 0; q < n; ++q) line[q] = f[base + q * stride];
      edt_1d(line.data(), outl.data(), n, v, z);
      for (int q = 0; q < n; ++q) f[base + q * stride] = outl[q];
    }
    stride = span;
  }

  InteriorDisk disk;
  double best = 0.0;
  std::size_t best_flat = 0;
  bool any = false;
  for (std::size_t flat = 0; flat < grid.cell_count(); ++flat) {
    if (grid.count(flat) == 0) continue;
    std::size_t rem = flat, pflat = 0, s = 1;
    for (int j = 0; j < d; ++j) {
      pflat += (rem % res + 1) * s;
      rem /= res;
      s *= static_cast<std::size_t>(n);
    }
    if (f[pflat] > best) {
      best = f[pflat];
      best_flat = flat;
      any = true;
    }
  }
  disk.center = Vec(d);
  if (!any) return disk;
  disk.radius_cells = std::sqrt(best) - 0.5;
  std::size_t rem = best_flat;
  double h = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j) {
    const int i = static_cast<int>(rem % res);
    rem /= res;
    disk.center_cell.push_back(i);
    disk.center[j] = grid.bounds().lo[j] + (i + 0.5) * grid.cell_size(j);
    h = std::min(h, grid.cell_size(j));
  }
  disk.radius = disk.radius_cells * h;
  return disk;
}

double default_accuracy(const IfsInstance& ifs, int finest_resolution) {
  const Box b = default_bounds(ifs);
  double diag2 = 0.0;
  for (int j = 0; j < ifs.dim(); ++j) {
    const double h = (b.hi[j] - b.lo[j]) / finest_resolution;
    diag2 += h * h;
  }
  return 0.5 * std::sqrt(diag2);
}

namespace {

void check_resolutions(const std::vector<int>& resolutions) {
  if (resolutions.size() < 2) throw std::invalid_argument("need at least two resolutions");
  for (std::size_t i = 1; i < resolutions.size(); ++i) {
    if (resolutions[i] <= resolutions[i - 1]) throw std::invalid_argument("resolutions must increase (coarser first)");
  }
}

}  // namespace

InteriorReport detect_interior(const IfsInstance& ifs, const BlockBernoulli& mu, const std::vector<int>& resolutions,
                               std::uint64_t samples, std::uint64_t seed) {
  check_resolutions(resolutions);
  InteriorReport report;
  report.samples = samples;
  report.accuracy = default_accuracy(ifs, resolutions.back());
  const PointCloud cloud = chaos_sample(ifs, mu, samples, report.accuracy, seed);
  const Box bounds = default_bounds(ifs);
  for (int res : resolutions) {
    const OccupancyGrid g = point_grid(cloud, bounds, res);
    report.levels.push_back({res, largest_hit_disk(g), g.occupied()});
  }
  report.stable = true;
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    if (!(report.levels[i].disk.radius > 0.0)) report.stable = false;
    if (i > 0) {
      const double prev = report.levels[i - 1].disk.radius;
      const double ratio = prev > 0.0 ? report.levels[i].disk.radius / prev : 0.0;
      report.radius_ratios.push_back(ratio);
      if (!(ratio >= 0.8)) report.stable = false;
    }
  }
  report.verdict = report.stable ? "stable interior disk" : "no interior evidence";
  return report;
}

MeasureEvidenceReport measure_lower_evidence(const IfsInstance& ifs, const BlockBernoulli& mu,
                                             const std::vector<int>& resolutions, std::uint64_t samples,
                                             std::uint64_t seed) {
  check_resolutions(resolutions);
  MeasureEvidenceReport report;
  report.samples = samples;
  report.accuracy = default_accuracy(ifs, resolutions.back());
  const PointCloud cloud = chaos_sample(ifs, mu, samples, report.accuracy, seed);
  const Box bounds = default_bounds(ifs);
  for (int res : resolutions) {
    const OccupancyGrid g = point_grid(cloud, bounds, res);
    const std::size_t occ = g.occupied();
    report.levels.push_back({res, occ, static_cast<double>(occ) * g.cell_volume()});
  }
  bool stable = true, decaying = true;
  for (std::size_t i = 1; i < report.levels.size(); ++i) {
    const double ratio = report.levels[i].volume / report.levels[i - 1].volume;
    report.volume_ratios.push_back(ratio);
    stable = stable && ratio >= 0.8;
    decaying = decaying && ratio <= 0.5;
  }
  report.verdict = stable     ? "consistent with positive measure"
                   : decaying ? "consistent with measure zero"
                              : "inconclusive";
  return report;
}

void write_pgm(std::ostream& out, const OccupancyGrid& grid) {
  if (grid.dim() > 2) throw std::invalid_argument("write_pgm: only d <= 2 grids can be rasterised");
  const int w = grid.resolution();
  const int h = grid.dim() == 2 ? w : 1;
  std::uint32_t cmax = 0;
  for (std::size_t i = 0; i < grid.cell_count(); ++i) cmax = std::max(cmax, grid.count(i));
  out << "P5\n" << w << ' ' << h << "\n255\n";
  const double denom = std::log1p(static_cast<double>(cmax));
  std::vector<unsigned char> row(static_cast<std::size_t>(w));
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x) {
      const std::uint32_t c = grid.count(static_cast<std::size_t>(y) * w + x);
      if (c == 0) {
        row[x] = 0;
      } else {
        const double v = denom > 0.0 ? std::log1p(static_cast<double>(c)) / denom : 1.0;
        row[x] = static_cast<unsigned char>(1 + std::lround(254.0 * v));
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), w);
  }
}

void write_grid_csv(std::ostream& out, const OccupancyGrid& grid) {
  const int d = grid.dim();
  const int res = grid.resolution();
  for (int j = 0; j < d; ++j) out << 'i' << j + 1 << ',';
  for (int j = 0; j < d; ++j) out << 'x' << j + 1 << ',';
  out << "count\n";
  char buf[40];
  for (std::size_t flat = 0; flat < grid.cell_count(); ++flat) {
    if (grid.count(flat) == 0) continue;
    std::array<int, kMaxDim> idx{};
    std::size_t rem = flat;
    for (int j = 0; j < d; ++j) {
      idx[j] = static_cast<int>(rem % res);
      rem /= res;
      out << idx[j] << ',';
    }
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", grid.bounds().lo[j] + (idx[j] + 0.5) * grid.cell_size(j));
      out << buf << ',';
    }
    out << grid.count(flat) << '\n';
  }
}

}  // namespace affint
