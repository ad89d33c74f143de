#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "affint/random.hpp"
#include "affint/splitting.hpp"

using namespace affint;

namespace {

IfsInstance five_maps(std::vector<double> a = {0, 1, 2, 3, 4}) {
  std::vector<Vec> tr;
  for (double x : a) tr.push_back(Vec{x});
  return IfsInstance(MapTuple(std::vector<Matrix>(a.size(), Matrix::diagonal({0.45}))), tr);
}

}  // namespace

TEST(Multinomial, Values) {
  EXPECT_EQ(multinomial({1, 0, 0}), 1.0);
  EXPECT_EQ(multinomial({2, 1}), 3.0);
  EXPECT_EQ(multinomial({2, 2, 2}), 90.0);
  EXPECT_EQ(multinomial({}), 1.0);
}

TEST(BlockClasses, FiveScalarMapsMerged) {
  const auto ifs = five_maps();
  const auto classes = block_classes(ifs.tuple(), 1, 2.01);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].count, 5.0);
  EXPECT_NEAR(classes[0].A(0, 0), 0.45, 0);
  EXPECT_NEAR(classes[0].score, 5 * std::pow(0.45, 2.01), 1e-14);
  EXPECT_NEAR(classes[0].score, 1.00445, 1e-5);
}

TEST(BlockClasses, CountsMatchBruteForce) {
  Rng rng(8);
  std::vector<MapTuple> tuples = {
      MapTuple({Matrix::diagonal({0.3, 0.2}), Matrix::diagonal({0.25, 0.4}), Matrix::diagonal({0.3, 0.2})}),
      MapTuple({Matrix::rotation(0.4, 0.3), Matrix::rotation(1.1, 0.35)}),
      MapTuple({Matrix::diagonal({0.5}), Matrix::diagonal({0.25}), Matrix::diagonal({0.125})}),
  };
  for (const auto& t : tuples)
    for (int N = 1; N <= 6; ++N) {
      const auto classes = block_classes(t, N, 2.1);
      // oracle: enumerate every word, group by matrix
      std::vector<std::pair<Matrix, int>> groups;
      walk_words(t, N, [&](std::span<const int> l, const Matrix& m) {
        if (static_cast<int>(l.size()) < N) return true;
        for (auto& [a, c] : groups)
          if ((a - m).max_abs_entry() <= 1e-12 * a.max_abs_entry()) {
            ++c;
            return true;
          }
        groups.push_back({m, 1});
        return true;
      });
      ASSERT_EQ(classes.size(), groups.size()) << "N=" << N;
      for (const auto& c : classes) {
        bool found = false;
        for (const auto& [a, n] : groups)
          if ((a - c.A).max_abs_entry() <= 1e-12 * a.max_abs_entry()) {
            EXPECT_EQ(c.count, n);
            found = true;
          }
        EXPECT_TRUE(found);
      }
    }
}

TEST(FindBlock, FiveScalarMaps) {
  const auto res = find_certified_block(five_maps().tuple(), {.t_lo = 0.0, .t_hi = 1.5});
  ASSERT_TRUE(res.found);
  EXPECT_EQ(res.block.N, 1);
  EXPECT_GT(res.best_score, 1.0);
  EXPECT_EQ(res.block.count, 5.0);
}

TEST(FindBlock, CommutingPairBelowOne) {
  // sum det^2 < 1: every score is below (sum |det|^t)^N < 1
  MapTuple t({Matrix::rotation(0.5, 0.4), Matrix::rotation(1.2, 0.3)});
  const auto res = find_certified_block(t, {.max_N = 6});
  EXPECT_FALSE(res.found);
  EXPECT_LT(res.best_score, 1.0);
}

TEST(BuildSplit, FiveMapsJEqualsOne) {
  const auto ifs = five_maps();
  const auto block = block_classes(ifs.tuple(), 1, 2.01)[0];
  const Word J = default_J(block);
  EXPECT_EQ(J, Word::parse("1"));
  const auto cert = build_split(ifs, block, J);
  EXPECT_EQ(cert.v[0], 0.0);
  ASSERT_EQ(cert.E.size(), 5);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(cert.E.tuple()[i](0, 0), 0.2025, 1e-16);
    EXPECT_NEAR(cert.E.translation(i)[0], i, 1e-15);
    EXPECT_NEAR(cert.F.translation(i)[0], 0.45 * i, 1e-15);
  }
  EXPECT_EQ(cert.Lambda.front(), Word::parse("11"));
}

TEST(BuildSplit, ShiftSolvesLinearSystem) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const double th = rng.uniform(0, 6);
    MapTuple t({Matrix::rotation(th, 0.4), Matrix::rotation(2 * th, 0.4), Matrix::rotation(3 * th, 0.4)});
    IfsInstance ifs(t, {Vec{rng.normal(), rng.normal()}, Vec{rng.normal(), rng.normal()}, Vec{rng.normal(), rng.normal()}});
    const auto classes = block_classes(t, 2, 2.0);
    const auto cert = build_split(ifs, classes[0], default_J(classes[0]));
    const Vec aJ = code_point(ifs, cert.J);
    const Vec lhs = (Matrix::identity(2) - cert.block.A) * (-1.0 * cert.v);
    EXPECT_LT((lhs - aJ).norm(), 1e-12);
  }
}

TEST(BuildSplit, ZeroTranslationShift) {
  IfsInstance ifs(MapTuple({Matrix::diagonal({0.45}), Matrix::diagonal({0.45})}), {Vec{0.0}, Vec{1.0}});
  const auto block = block_classes(ifs.tuple(), 1, 1.0)[0];
  EXPECT_EQ(build_split(ifs, block, Word::parse("1")).v[0], 0.0);
}

TEST(BuildSplit, RejectsForeignJ) {
  MapTuple t({Matrix::diagonal({0.45}), Matrix::diagonal({0.3})});
  IfsInstance ifs(t, {Vec{0.0}, Vec{1.0}});
  const auto classes = block_classes(t, 2, 1.0);
  EXPECT_THROW(build_split(ifs, classes[0], Word::parse("1")), std::domain_error);
  const Word other = classes[0].multidegree()[0] == 2 ? Word::parse("22") : Word::parse("11");
  EXPECT_THROW(build_split(ifs, classes[0], other), std::domain_error);
}

TEST(VerifySplit, FiveMapsPass) {
  const auto ifs = five_maps();
  const auto block = block_classes(ifs.tuple(), 1, 2.01)[0];
  const auto cert = build_split(ifs, block, default_J(block));
  const auto rep = verify_split(ifs, cert, 10000, 1e-3, 1);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.max_membership_distance, 1e-3);
  EXPECT_LE(rep.hausdorff_F_to_AE, 1e-3);
  EXPECT_LE(rep.hausdorff_AE_to_F, 1e-3);
  EXPECT_LT(rep.max_identity_deviation, 1e-12);
}

TEST(VerifySplit, ZeroTranslationsTrivial) {
  const auto ifs = five_maps({0, 0, 0, 0, 0});
  const auto block = block_classes(ifs.tuple(), 1, 2.01)[0];
  const auto cert = build_split(ifs, block, default_J(block));
  const auto rep = verify_split(ifs, cert, 1000, 1e-3, 1);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.max_membership_distance, 0.0);
}

TEST(VerifySplit, FaultInjectedShiftFails) {
  const auto ifs = five_maps();
  const auto block = block_classes(ifs.tuple(), 1, 2.01)[0];
  auto cert = build_split(ifs, block, default_J(block));
  cert.v[0] += 0.1;
  const auto rep = verify_split(ifs, cert, 10000, 1e-3, 1);
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.identity_ok);
  EXPECT_NEAR(rep.max_identity_deviation, 0.1, 1e-9);
}
