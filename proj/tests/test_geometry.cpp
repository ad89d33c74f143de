#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "affint/geometry.hpp"
#include "affint/measure.hpp"
#include "affint/random.hpp"

using namespace affint;

namespace {

IfsInstance unit_square() {
  const Matrix h = Matrix::diagonal({0.5, 0.5});
  return IfsInstance(MapTuple({h, h, h, h}), {Vec{0, 0}, Vec{0.5, 0}, Vec{0, 0.5}, Vec{0.5, 0.5}});
}

IfsInstance five_maps() {
  std::vector<Vec> a;
  for (int i = 0; i < 5; ++i) a.push_back(Vec{static_cast<double>(i)});
  return IfsInstance(MapTuple(std::vector<Matrix>(5, Matrix::diagonal({0.45}))), a);
}

Word random_word(int m, std::size_t n, Rng& rng) {
  std::vector<int> l;
  for (std::size_t k = 0; k < n; ++k) l.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(m))));
  return Word::from_letters(l);
}

}  // namespace

TEST(CodingMap, ZeroTranslations) {
  IfsInstance ifs(MapTuple({Matrix::rotation(0.3, 0.4), Matrix::diagonal({0.2, 0.5})}), {Vec{0, 0}, Vec{0, 0}});
  Rng rng(1);
  for (int k = 0; k < 20; ++k) EXPECT_EQ(code_point(ifs, random_word(2, 30, rng)).norm(), 0.0);
}

TEST(CodingMap, FixedPoint) {
  IfsInstance ifs(MapTuple({Matrix::diagonal({0.45})}), {Vec{1.0}});
  const Word w = Word::from_letters(std::vector<int>(80, 0));
  EXPECT_NEAR(code_point(ifs, w, 1e-12)[0], 1.0 / 0.55, 1e-12);
}

TEST(CodingMap, ShortWordRejected) {
  EXPECT_THROW(code_point(five_maps(), Word::parse("12"), 1e-6), std::domain_error);
}

TEST(CodingMap, ContractionBound) {
  const auto ifs = unit_square();
  Rng rng(7);
  const double R0 = ifs.bounding_radius();
  for (int k = 0; k < 2000; ++k) {
    Word x = random_word(4, 60, rng);
    Word y = x.prefix(rng.below(10)) + random_word(4, 60, rng);
    y = y.prefix(60);
    const std::size_t p = longest_common_prefix(x, y).size();
    const double dist = (code_point(ifs, x) - code_point(ifs, y)).norm();
    EXPECT_LE(dist, std::pow(ifs.delta(), static_cast<double>(p)) * 2 * R0 + 1e-12);
  }
}

TEST(CodingMap, TruncationDepth) {
  const auto ifs = five_maps();
  const int n = truncation_depth(ifs, 1e-3);
  EXPECT_LE(coding_error_bound(ifs, n), 1e-3);
  EXPECT_GT(coding_error_bound(ifs, n - 1), 1e-3);
}

TEST(IfsInstance, RejectsExpandingOrMismatched) {
  EXPECT_THROW(IfsInstance(MapTuple({Matrix::diagonal({1.2})}), {Vec{0.0}}), std::invalid_argument);
  EXPECT_THROW(IfsInstance(MapTuple({Matrix::diagonal({0.5})}), {Vec{0.0}, Vec{1.0}}), std::invalid_argument);
  EXPECT_THROW(IfsInstance(MapTuple({Matrix::diagonal({0.5})}), {Vec{1.0}}, 0.5), std::invalid_argument);
}

TEST(ChaosSample, SingleMapNearFixedPoint) {
  IfsInstance ifs(MapTuple({Matrix::diagonal({0.45})}), {Vec{1.0}});
  const auto cloud = chaos_sample(ifs, BlockBernoulli::uniform_letters(1), 1000, 1e-6, 3);
  ASSERT_EQ(cloud.size(), 1000u);
  for (std::size_t i = 0; i < cloud.size(); ++i) EXPECT_NEAR(cloud.point(i)[0], 1.0 / 0.55, 1e-6);
}

TEST(ChaosSample, UnitSquareMean) {
  const std::size_t n = 100000;
  const auto cloud = chaos_sample(unit_square(), BlockBernoulli::uniform_letters(4), n, 1e-6, 5);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += cloud.point(i)[0];
    my += cloud.point(i)[1];
    EXPECT_GE(cloud.point(i)[0], -1e-6);
    EXPECT_LE(cloud.point(i)[0], 1 + 1e-6);
  }
  mx /= n;
  my /= n;
  const double sigma = std::sqrt(1.0 / 12 / n);
  EXPECT_LT(std::abs(mx - 0.5), 4 * sigma);
  EXPECT_LT(std::abs(my - 0.5), 4 * sigma);
}

TEST(ChaosSample, Deterministic) {
  const auto mu = BlockBernoulli::uniform_letters(4);
  const auto a = chaos_sample(unit_square(), mu, 10000, 1e-6, 9);
  const auto b = chaos_sample(unit_square(), mu, 10000, 1e-6, 9);
  EXPECT_EQ(a.coords, b.coords);
  const auto c = chaos_sample(unit_square(), mu, 10000, 1e-6, 10);
  EXPECT_NE(a.coords, c.coords);
}

TEST(PointCloudCsv, Format) {
  PointCloud c;
  c.dim = 2;
  c.push_back(Vec{0.1, 1.0});
  std::ostringstream os;
  write_point_cloud_csv(os, c);
  EXPECT_EQ(os.str(), "x1,x2\n0.10000000000000001,1\n");
}

TEST(AttractorNet, FiveMapsIsInterval) {
  // K = [0, 4/0.55]; the net must be eps-dense in it and inside it
  const auto ifs = five_maps();
  const double eps = 1e-3;
  const auto net = attractor_net(ifs, eps);
  const double top = 4 / 0.55;
  for (std::size_t i = 0; i < net.size(); ++i) {
    EXPECT_GE(net.point(i)[0], -eps);
    EXPECT_LE(net.point(i)[0], top + eps);
  }
  NearestNeighbor nn(net, eps);
  for (double x = 0; x <= top; x += top / 997) {
    double p[1] = {x};
    EXPECT_LE(nn.distance(p), eps);
  }
}

TEST(NearestNeighbor, MatchesBruteForce) {
  Rng rng(4);
  PointCloud c;
  c.dim = 2;
  for (int i = 0; i < 500; ++i) c.push_back(Vec{rng.uniform(-1, 1), rng.uniform(-1, 1)});
  NearestNeighbor nn(c, 0.05);
  for (int q = 0; q < 200; ++q) {
    double p[2] = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    double best = 1e300;
    for (std::size_t i = 0; i < c.size(); ++i) best = std::min(best, std::hypot(c.point(i)[0] - p[0], c.point(i)[1] - p[1]));
    EXPECT_NEAR(nn.distance(p), best, 1e-14);
  }
}
