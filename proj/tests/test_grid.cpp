#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "affint/grid.hpp"
#include "affint/measure.hpp"

using namespace affint;

namespace {

IfsInstance unit_square() {
  const Matrix h = Matrix::diagonal({0.5, 0.5});
  return IfsInstance(MapTuple({h, h, h, h}), {Vec{0, 0}, Vec{0.5, 0}, Vec{0, 0.5}, Vec{0.5, 0.5}});
}

IfsInstance control() {
  const Matrix h = Matrix::diagonal({0.3, 0.3});
  return IfsInstance(MapTuple({h, h}), {Vec{0, 0}, Vec{0.7, 0.7}});
}

// Oracle: does the cell [lo, hi] meet the closed ball B(c, r)?
bool cell_meets_ball(const Vec& lo, const Vec& hi, const Vec& c, double r) {
  double d2 = 0;
  for (int j = 0; j < c.dim(); ++j) {
    const double q = std::clamp(c[j], lo[j], hi[j]);
    d2 += (q - c[j]) * (q - c[j]);
  }
  return d2 <= r * r;
}

}  // namespace

TEST(OccupancyGrid, LocateAndAdd) {
  OccupancyGrid g({Vec{0, 0}, Vec{1, 1}}, 4, OccupancyGrid::Provenance::PointSampled);
  const double p[2] = {0.3, 0.8};
  EXPECT_EQ(g.locate(p), 1 + 3 * 4);
  EXPECT_TRUE(g.add(p));
  const double q[2] = {1.5, 0.2};
  EXPECT_FALSE(g.add(q));
  EXPECT_EQ(g.occupied(), 1u);
  EXPECT_NEAR(g.cell_volume(), 1.0 / 16, 1e-15);
  EXPECT_THROW(OccupancyGrid({Vec{0, 0}, Vec{1, 1}}, 0, OccupancyGrid::Provenance::PointSampled), std::invalid_argument);
  EXPECT_THROW(OccupancyGrid({Vec{0, 0, 0}, Vec{1, 1, 1}}, 1 << 10, OccupancyGrid::Provenance::PointSampled),
               std::invalid_argument);
}

TEST(CylinderCover, DepthZeroMarksBall) {
  const auto ifs = unit_square();
  const int res = 64;
  const auto g = render_cylinder_cover(ifs, 0, res);
  const Box b = g.bounds();
  std::size_t expected = 0;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      const Vec lo{b.lo[0] + i * g.cell_size(0), b.lo[1] + j * g.cell_size(1)};
      const Vec hi{lo[0] + g.cell_size(0), lo[1] + g.cell_size(1)};
      const bool hit = cell_meets_ball(lo, hi, Vec{0, 0}, ifs.bounding_radius());
      expected += hit;
      if (!hit) EXPECT_EQ(g.count(static_cast<std::size_t>(i + j * res)), 0u);
    }
  // boundary cells may differ by rounding; interior agreement is exact
  EXPECT_NEAR(static_cast<double>(g.occupied()), static_cast<double>(expected), 4.0 * res * 0.05);
}

TEST(CylinderCover, MonotoneInDepth) {
  const auto ifs = control();
  std::size_t prev = SIZE_MAX;
  for (int n : {2, 4, 6}) {
    const auto g = render_cylinder_cover(ifs, n, 256);
    EXPECT_LE(g.occupied(), prev);
    prev = g.occupied();
    EXPECT_FALSE(g.partial);
  }
}

TEST(CylinderCover, SingleMapShrinks) {
  IfsInstance ifs(MapTuple({Matrix::diagonal({0.5, 0.5})}), {Vec{0.5, 0.5}});
  const auto g = render_cylinder_cover(ifs, 12, 128);
  EXPECT_LE(g.occupied(), 4u);
  const double fp[2] = {1.0, 1.0};
  EXPECT_GT(g.count(static_cast<std::size_t>(g.locate(fp))), 0u);
}

TEST(CylinderCover, BudgetFlagsPartial) {
  const auto g = render_cylinder_cover(unit_square(), 8, 64, 1000);
  EXPECT_TRUE(g.partial);
}

TEST(Interior, UnitSquare) {
  const auto rep = detect_interior(unit_square(), BlockBernoulli::uniform_letters(4), {64, 128, 256}, 1'000'000, 3);
  EXPECT_TRUE(rep.stable);
  EXPECT_EQ(rep.verdict, "stable interior disk");
  for (const auto& lvl : rep.levels) {
    EXPECT_NEAR(lvl.disk.radius, 0.5, 0.05) << lvl.resolution;
    EXPECT_NEAR(lvl.disk.center[0], 0.5, 0.05);
  }
}

TEST(Interior, ControlHasNoEvidence) {
  const auto rep = detect_interior(control(), BlockBernoulli::uniform_letters(2), {256, 512, 1024}, 1'000'000, 3);
  EXPECT_FALSE(rep.stable);
  EXPECT_EQ(rep.verdict, "no interior evidence");
}

TEST(MeasureEvidence, UnitSquareVolume) {
  const auto rep = measure_lower_evidence(unit_square(), BlockBernoulli::uniform_letters(4), {64, 128}, 1'000'000, 4);
  for (const auto& lvl : rep.levels) EXPECT_NEAR(lvl.volume, 1.0, 0.05);
  EXPECT_EQ(rep.verdict, "consistent with positive measure");
}

TEST(MeasureEvidence, ControlDecays) {
  const auto rep = measure_lower_evidence(control(), BlockBernoulli::uniform_letters(2), {256, 512, 1024}, 1'000'000, 4);
  for (double r : rep.volume_ratios) EXPECT_LE(r, 0.5);
  EXPECT_EQ(rep.verdict, "consistent with measure zero");
}

TEST(MeasureEvidence, SingleMapVanishes) {
  IfsInstance ifs(MapTuple({Matrix::diagonal({0.5, 0.5})}), {Vec{0.5, 0.5}});
  const auto rep = measure_lower_evidence(ifs, BlockBernoulli::uniform_letters(1), {64, 256, 1024}, 10000, 1);
  EXPECT_LT(rep.levels.back().volume, rep.levels.front().volume);
  EXPECT_LE(rep.levels.back().occupied, 4u);
}

TEST(LargestDisk, Oracle) {
  // a filled 21x21 block in a 64 grid; the best disk centre is the middle cell
  OccupancyGrid g({Vec{0, 0}, Vec{64, 64}}, 64, OccupancyGrid::Provenance::PointSampled);
  for (int i = 10; i <= 30; ++i)
    for (int j = 10; j <= 30; ++j) g.count(static_cast<std::size_t>(i + 64 * j)) = 1;
  const auto disk = largest_hit_disk(g);
  EXPECT_EQ(disk.center_cell[0], 20);
  EXPECT_EQ(disk.center_cell[1], 20);
  EXPECT_NEAR(disk.radius_cells, 10.5, 1e-12);
  EXPECT_NEAR(disk.radius, 10.5, 1e-12);
}

TEST(Pgm, HeaderAndScaling) {
  OccupancyGrid g({Vec{0, 0}, Vec{1, 1}}, 2, OccupancyGrid::Provenance::PointSampled);
  g.count(0) = 1;   // bottom-left
  g.count(3) = 10;  // top-right
  std::ostringstream os;
  write_pgm(os, g);
  const std::string s = os.str();
  const std::string header = "P5\n2 2\n255\n";
  ASSERT_EQ(s.substr(0, header.size()), header);
  const std::string px = s.substr(header.size());
  ASSERT_EQ(px.size(), 4u);
  // top row first
  EXPECT_EQ(static_cast<unsigned char>(px[0]), 0);
  EXPECT_EQ(static_cast<unsigned char>(px[1]), 255);
  EXPECT_EQ(static_cast<unsigned char>(px[2]), 1 + static_cast<int>(std::lround(254 * std::log1p(1.0) / std::log1p(10.0))));
  EXPECT_EQ(static_cast<unsigned char>(px[3]), 0);
}
