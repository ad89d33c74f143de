#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "affint/dimension.hpp"
#include "affint/random.hpp"

using namespace affint;

namespace {

MapTuple scaled_identities(int d, int m, double r) {
  Matrix a = Matrix::identity(d);
  a *= r;
  return MapTuple(std::vector<Matrix>(static_cast<std::size_t>(m), a));
}

}  // namespace

TEST(PhiS, Examples) {
  EXPECT_NEAR(phi_s(Matrix::identity(2), 1.3), 1.0, 1e-15);
  EXPECT_NEAR(phi_s(Matrix::diagonal({0.5, 1.0 / 3.0}), 1.5), 0.5 * std::sqrt(1.0 / 3.0), 1e-15);
  EXPECT_NEAR(phi_s(Matrix::diagonal({0.5, 0.25}), 3.0), std::pow(0.125, 1.5), 1e-15);
  EXPECT_NEAR(phi_s(Matrix::diagonal({0.5, 0.25}), 0.0), 1.0, 0.0);
  EXPECT_THROW(phi_s(Matrix::diagonal({0.5, 0.25}), -0.1), std::domain_error);
}

TEST(PhiS, ContinuousAtIntegers) {
  const Matrix m = Matrix::diagonal({0.7, 0.2});
  for (double k : {1.0, 2.0}) EXPECT_NEAR(phi_s(m, k - 1e-9), phi_s(m, k + 1e-9), 1e-8);
}

TEST(GT, Examples) {
  MapTuple t({Matrix::diagonal({0.5, 0.3}), Matrix::rotation(0.7, 0.45)});
  const Word w = Word::parse("1221");
  EXPECT_NEAR(g_t(0.0, t, w), std::abs(word_product(t, w).determinant()), 1e-15);
  EXPECT_EQ(g_t(1.7, t, Word{}), 1.0);
}

TEST(GT, ConformalClosedForm) {
  MapTuple t({Matrix::rotation(0.3, 0.45), Matrix::rotation(2.0, 0.45)});
  Rng rng(1);
  for (int n = 1; n <= 10; ++n) {
    std::vector<int> letters;
    for (int k = 0; k < n; ++k) letters.push_back(static_cast<int>(rng.below(2)));
    const double t_val = 0.5 + rng.uniform(0, 2);
    const double expected = std::pow(0.45, n * (t_val + 2));
    EXPECT_NEAR(g_t(t_val, t, Word::from_letters(letters)) / expected, 1.0, 1e-12);
  }
}

TEST(TValue, TwentyFiveConformalMaps) {
  const auto cert = certify_t_above_d(scaled_identities(2, 25, 0.45), {.max_depth = 6});
  ASSERT_EQ(cert.status, TValueStatus::CertifiedAboveD);
  EXPECT_EQ(cert.witness_depth, 1);
  EXPECT_NEAR(cert.witness_sum, 25 * std::pow(0.45, 4), 1e-13);
  const double closed = std::log(25.0) / std::log(1 / 0.45) - 2;
  EXPECT_NEAR(cert.lower_bound, closed, 0.05);
  EXPECT_LE(cert.lower_bound, closed + 1e-9);
}

TEST(TValue, TwoScalarMapsInconclusive) {
  const auto t = scaled_identities(1, 2, 0.3);
  const auto cert = certify_t_above_d(t, {.max_depth = 8});
  EXPECT_EQ(cert.status, TValueStatus::Inconclusive);
  for (std::size_t n = 0; n < cert.depth_sums.size(); ++n)
    EXPECT_NEAR(cert.depth_sums[n], std::pow(0.18, n + 1), 1e-15);
}

TEST(TValue, SingleMapInconclusive) {
  const auto cert = certify_t_above_d(MapTuple({Matrix::diagonal({0.45, 0.3})}));
  EXPECT_EQ(cert.status, TValueStatus::Inconclusive);
}

TEST(SumGT, MatchesBruteForce) {
  MapTuple t({Matrix::diagonal({0.5, 0.3}), Matrix::rotation(0.7, 0.45), Matrix::from_row_major(2, std::vector{0.2, 0.1, -0.1, 0.4})});
  for (int n = 1; n <= 4; ++n) {
    double brute = 0.0;
    walk_words(t, n, [&](std::span<const int> letters, const Matrix& m) {
      if (static_cast<int>(letters.size()) == n) brute += g_t(m, 1.3);
      return true;
    });
    EXPECT_NEAR(sum_g_t(t, n, 1.3), brute, 1e-13 * brute);
  }
}

TEST(AffinityBracket, ConformalIsExact) {
  const auto b = affinity_bracket(scaled_identities(2, 5, 0.3), 1);
  const double closed = std::log(5.0) / std::log(1 / 0.3);
  EXPECT_NEAR(b.lower, closed, 1e-3);
  EXPECT_NEAR(b.upper, closed, 1e-3);
}

TEST(AffinityBracket, SingleMapIsZero) {
  const auto b = affinity_bracket(MapTuple({Matrix::diagonal({0.5, 0.2})}), 4);
  EXPECT_NEAR(b.lower, 0.0, 1e-3);
  EXPECT_NEAR(b.upper, 0.0, 1e-3);
}

TEST(AffinityBracket, DiagonalPairContainsPressureZero) {
  // For s <= 1 the pressure is log(1 + 2^s) + s log 0.2 (maximise the
  // binomial entropy against alpha_1 of the diagonal products).
  auto pressure = [](double s) { return std::log(1 + std::pow(2.0, s)) + s * std::log(0.2); };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pressure(mid) > 0 ? lo : hi) = mid;
  }
  MapTuple t({Matrix::diagonal({0.4, 0.2}), Matrix::diagonal({0.2, 0.4})});
  const auto b8 = affinity_bracket(t, 8);
  EXPECT_LE(b8.lower, lo + 1e-4);
  EXPECT_GE(b8.upper, lo - 1e-4);
  const auto b12 = affinity_bracket(t, 12);
  EXPECT_LE(b12.lower, lo + 1e-4);
  EXPECT_GE(b12.upper, lo - 1e-4);
  EXPECT_LE(b12.upper - b12.lower, b8.upper - b8.lower);
  // brute-force depth-12 estimate of the pressure zero lies in the bracket
  auto pressure12 = [&](double s) {
    double sum = 0.0;
    walk_words(t, 12, [&](std::span<const int> letters, const Matrix& m) {
      if (letters.size() == 12) sum += phi_s(m, s);
      return true;
    });
    return std::log(sum) / 12;
  };
  double blo = 0.0, bhi = 2.0;
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (blo + bhi);
    (pressure12(mid) > 0 ? blo : bhi) = mid;
  }
  EXPECT_GE(b8.upper, blo - 1e-4);
}

TEST(InteriorGates, TwentyFiveMaps) {
  const auto r = check_corollary12(scaled_identities(2, 25, 0.45));
  EXPECT_TRUE(r.condition_i);
  EXPECT_NEAR(r.condition_i_sum, 25 * std::pow(0.45, 4), 1e-13);
  EXPECT_TRUE(r.norm_gate);
  EXPECT_TRUE(r.certified);
}

TEST(InteriorGates, NonConformalFails) {
  const auto r = check_corollary12(MapTuple(std::vector<Matrix>(4, Matrix::diagonal({0.45, 0.1}))));
  EXPECT_FALSE(r.conformal);
  EXPECT_NEAR(r.condition_i_sum, 4 * 0.01 * 0.045, 1e-15);
  EXPECT_FALSE(r.condition_i);
  EXPECT_FALSE(r.certified);
}

TEST(InteriorGates, SingleMapNotCertified) {
  const auto r = check_corollary12(MapTuple({Matrix::diagonal({0.45, 0.45})}));
  EXPECT_FALSE(r.certified);
}

TEST(CommutingGate, FiveScalarMaps) {
  const auto r = check_theorem13(scaled_identities(1, 5, 0.45));
  EXPECT_EQ(r.max_commutator, 0.0);
  EXPECT_NEAR(r.det_squared_sum, 5 * 0.45 * 0.45, 1e-15);
  EXPECT_TRUE(r.certified);
}

TEST(CommutingGate, RotationsFailDetCondition) {
  const auto r = check_theorem13(MapTuple({Matrix::rotation(std::numbers::pi / 6, 0.4), Matrix::rotation(5 * std::numbers::pi / 12, 0.4)}));
  EXPECT_TRUE(r.commuting);
  EXPECT_NEAR(r.det_squared_sum, 0.0512, 1e-15);
  EXPECT_FALSE(r.certified);
}

TEST(CommutingGate, NonCommutingPairNamed) {
  const auto r = check_theorem13(MapTuple({Matrix::diagonal({0.4, 0.2}), Matrix::rotation(std::numbers::pi / 2, 0.3)}));
  EXPECT_FALSE(r.commuting);
  EXPECT_EQ(r.worst_pair_i, 1);
  EXPECT_EQ(r.worst_pair_j, 2);
  EXPECT_FALSE(r.certified);
}
