#pragma once

// Occupancy rasters of attractors: outer covers by cylinder images and
// point-sampled grids, plus the (non-certifying) interior and positive
// measure detectors built on them.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "affint/geometry.hpp"
#include "affint/measure.hpp"

namespace affint {

struct Box {
  Vec lo, hi;
};

// The bounding box of B(0, R_0).
Box default_bounds(const IfsInstance& ifs);

class OccupancyGrid {
 public:
  enum class Provenance { PointSampled, CylinderCovered };

  // res^d cells over `bounds`; throws std::invalid_argument when res < 1 or
  // the grid would exceed 2^28 cells.
  OccupancyGrid(Box bounds, int resolution, Provenance provenance);

  int dim() const { return bounds_.lo.dim(); }
  int resolution() const { return res_; }
  const Box& bounds() const { return bounds_; }
  Provenance provenance() const { return provenance_; }
  double cell_size(int axis) const;
  double cell_volume() const;

  std::size_t cell_count() const { return cells_.size(); }
  std::uint32_t count(std::size_t flat) const { return cells_[flat]; }
  std::uint32_t& count(std::size_t flat) { return cells_[flat]; }
  // Flat index of the cell containing p, or -1 when p is outside the box.
  std::int64_t locate(std::span<const double> p) const;
  std::size_t occupied() const;

  // Adds one hit for p; returns false (and records nothing) outside bounds.
  bool add(std::span<const double> p);
  // Cellwise sum.
  void merge(const OccupancyGrid& other);

  // Metadata: cover depth, or number of samples added.
  int depth = 0;
  std::uint64_t samples = 0;
  bool partial = false;  // cover stopped at the node budget

 private:
  Box bounds_;
  int res_;
  Provenance provenance_;
  std::vector<std::uint32_t> cells_;
};

// Marks every cell meeting some ball B(f_I(0), alpha_1(T_I) R_0), |I| = depth.
// The marked set covers K^a. At most `budget` words are visited; a partial
// grid is flagged.
OccupancyGrid render_cylinder_cover(const IfsInstance& ifs, int depth, int resolution,
                                    std::uint64_t budget = 100'000'000);

OccupancyGrid point_grid(const PointCloud& cloud, const Box& bounds, int resolution);

// Largest ball (centered at a cell center) whose cells are all hit.
struct InteriorDisk {
  std::vector<int> center_cell;
  Vec center;
  double radius_cells = 0.0;
  double radius = 0.0;  // physical units
};
InteriorDisk largest_hit_disk(const OccupancyGrid& grid);

struct InteriorLevel {
  int resolution = 0;
  InteriorDisk disk;
  std::size_t occupied = 0;
};

struct InteriorReport {
  std::vector<InteriorLevel> levels;
  std::vector<double> radius_ratios;  // finer / coarser
  bool stable = false;
  std::string verdict;
  std::uint64_t samples = 0;
  double accuracy = 0.0;
  static constexpr const char* kNote = "heuristic evidence from sampled rasters; not a certificate";
};

// Default accuracy: half a cell diagonal at the finest resolution.
double default_accuracy(const IfsInstance& ifs, int finest_resolution);

// One chaos-game cloud of `samples` points, binned at each resolution
// (coarser first). Stable when every level has a positive radius and each
// finer/coarser physical radius ratio is >= 0.8.
InteriorReport detect_interior(const IfsInstance& ifs, const BlockBernoulli& mu, const std::vector<int>& resolutions,
                               std::uint64_t samples, std::uint64_t seed);

struct MeasureLevel {
  int resolution = 0;
  std::size_t occupied = 0;
  double volume = 0.0;
};

struct MeasureEvidenceReport {
  std::vector<MeasureLevel> levels;
  std::vector<double> volume_ratios;
  std::string verdict;  // "consistent with positive measure" / "consistent with measure zero" / "inconclusive"
  std::uint64_t samples = 0;
  double accuracy = 0.0;
};

MeasureEvidenceReport measure_lower_evidence(const IfsInstance& ifs, const BlockBernoulli& mu,
                                             const std::vector<int>& resolutions, std::uint64_t samples,
                                             std::uint64_t seed);

// Binary PGM (P5). d = 2: rows from top (largest y) to bottom; d = 1: a
// single row. Zero stays 0, other counts map log-scaled onto 1..255.
void write_pgm(std::ostream& out, const OccupancyGrid& grid);
// CSV of the non-empty cells: index per axis, cell center, count.
void write_grid_csv(std::ostream& out, const OccupancyGrid& grid);

}  // namespace affint
