#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "affint/dimension.hpp"
#include "affint/measure.hpp"
#include "affint/random.hpp"

using namespace affint;

namespace {

MapTuple scaled_identities(int d, int m, double r) {
  Matrix a = Matrix::identity(d);
  a *= r;
  return MapTuple(std::vector<Matrix>(static_cast<std::size_t>(m), a));
}

std::vector<Word> lambda_blocks(int m, int j) {
  std::vector<Word> out;
  for (int i = 0; i < m; ++i) out.push_back(Word::from_letters({i, j}));
  return out;
}

}  // namespace

TEST(WeightedBlockMeasure, TwentyFiveMaps) {
  const auto res = build_lemma42_measure(scaled_identities(2, 25, 0.45), 2.01, 4);
  EXPECT_EQ(res.certificate.N, 1);
  EXPECT_NEAR(res.certificate.lambda, 25 * std::pow(0.45, 4.01), 1e-12);
  EXPECT_NEAR(res.certificate.lambda, 1.0170, 5e-5);
  for (double w : res.measure.weights()) EXPECT_NEAR(w, 1.0 / 25, 1e-15);
  EXPECT_NEAR(res.certificate.r, std::pow(res.certificate.lambda, -1.0), 1e-15);
  EXPECT_NEAR(res.certificate.C, res.certificate.gamma * res.certificate.lambda, 1e-12);
}

TEST(WeightedBlockMeasure, FiveScalarMaps) {
  const auto res = build_lemma42_measure(scaled_identities(1, 5, 0.45), 1.01, 4);
  EXPECT_EQ(res.certificate.N, 1);
  EXPECT_NEAR(res.certificate.lambda, 5 * std::pow(0.45, 2.01), 1e-13);
  EXPECT_GT(res.certificate.lambda, 1.0);
}

TEST(WeightedBlockMeasure, NotCertifiable) {
  EXPECT_THROW(build_lemma42_measure(MapTuple({Matrix::diagonal({0.45})}), 1.01, 6), std::runtime_error);
  EXPECT_THROW(build_lemma42_measure(scaled_identities(2, 25, 0.45), 2.0, 4), std::domain_error);
}

TEST(CylinderMass, Basics) {
  const auto mu = BlockBernoulli::uniform(5, lambda_blocks(5, 0));
  EXPECT_EQ(mu.cylinder_mass(Word{}), 1.0);
  EXPECT_NEAR(mu.cylinder_mass(Word::parse("21")), 1.0 / 5, 1e-15);
  EXPECT_NEAR(mu.cylinder_mass(Word::parse("2131")), 1.0 / 25, 1e-15);
  EXPECT_NEAR(mu.cylinder_mass(Word::parse("3")), 1.0 / 5, 1e-15);
  EXPECT_EQ(mu.cylinder_mass(Word::parse("22")), 0.0);
  EXPECT_EQ(mu.cylinder_mass(Word::parse("2122")), 0.0);
}

TEST(CylinderMass, RejectsBadBlocks) {
  EXPECT_THROW(BlockBernoulli(2, {Word::parse("1"), Word::parse("12")}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(BlockBernoulli(2, {Word::parse("1"), Word::parse("1")}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(BlockBernoulli(2, {Word::parse("1"), Word::parse("2")}, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(BlockBernoulli(2, {Word::parse("1"), Word::parse("3")}, {0.5, 0.5}), std::invalid_argument);
}

TEST(CylinderBound, WeightedDepthFour) {
  const auto tuple = scaled_identities(2, 25, 0.45);
  const auto res = build_lemma42_measure(tuple, 2.01, 4);
  const auto rep = verify_cylinder_bound(res.measure, CylinderBound::weighted(res.certificate), tuple, 4);
  EXPECT_TRUE(rep.holds);
  EXPECT_LE(rep.max_ratio, 1.0);
  EXPECT_EQ(rep.words_checked, 1u + 25 + 625 + 15625 + 390625);
}

TEST(CylinderBound, DepthZeroIsOneOverC) {
  const auto tuple = scaled_identities(2, 25, 0.45);
  const auto res = build_lemma42_measure(tuple, 2.01, 4);
  const auto rep = verify_cylinder_bound(res.measure, CylinderBound::weighted(res.certificate), tuple, 0);
  EXPECT_NEAR(rep.max_ratio, 1.0 / res.certificate.C, 1e-15);
  EXPECT_TRUE(rep.holds);
  EXPECT_GE(res.certificate.C, 1.0);
}

TEST(CylinderBound, UniformBlockDeterminant) {
  // Lambda = {i1}, t = 1.01, s = d t / 2, C = (min |det T_i|)^{-t N}
  const auto tuple = scaled_identities(1, 5, 0.45);
  const double t = 1.01;
  const auto mu = BlockBernoulli::uniform(5, lambda_blocks(5, 0));
  const auto rep = verify_cylinder_bound(mu, CylinderBound::determinant(std::pow(0.45, -t), t / 2), tuple, 4);
  EXPECT_TRUE(rep.holds);
  EXPECT_LE(rep.max_ratio, 1.0);
}

TEST(CylinderBound, DetectsViolation) {
  const auto tuple = scaled_identities(1, 5, 0.45);
  const auto mu = BlockBernoulli::uniform_letters(5);
  const auto rep = verify_cylinder_bound(mu, CylinderBound::determinant(1.0, 3.0), tuple, 3);
  EXPECT_FALSE(rep.holds);
  // mu = 5^-n, phi^3 = 0.45^{3n}: worst at n = 3
  EXPECT_NEAR(rep.max_ratio, std::pow(0.2 / std::pow(0.45, 3), 3), 1e-9);
  EXPECT_EQ(rep.argmax.size(), 3u);
}

TEST(SampleWord, UniformFrequencies) {
  const auto mu = BlockBernoulli::uniform(3, {Word::parse("12"), Word::parse("21"), Word::parse("33")});
  Rng rng(99);
  const std::size_t draws = 100000;
  const Word w = sample_word(mu, 2 * draws, rng);
  std::map<std::string, int> freq;
  for (std::size_t k = 0; k < draws; ++k) freq[Word::from_letters({w[2 * k], w[2 * k + 1]}).to_string()]++;
  ASSERT_EQ(freq.size(), 3u);
  const double p = 1.0 / 3, sigma = std::sqrt(draws * p * (1 - p));
  for (const auto& [k, c] : freq) EXPECT_LT(std::abs(c - draws * p), 5 * sigma) << k;
}

TEST(SampleWord, PointMassRepeats) {
  const BlockBernoulli mu(2, {Word::parse("12"), Word::parse("21")}, {1.0, 0.0});
  Rng rng(1);
  EXPECT_EQ(sample_word(mu, 7, rng), Word::parse("1212121"));
}

TEST(SampleWord, Deterministic) {
  const auto mu = BlockBernoulli::uniform_letters(4);
  Rng a(42), b(42);
  EXPECT_EQ(sample_word(mu, 1000, a), sample_word(mu, 1000, b));
}

TEST(SampleWord, MaxCylinderMassDecreases) {
  const auto res = build_lemma42_measure(scaled_identities(2, 25, 0.45), 2.01, 4);
  double prev = 1.0;
  for (int n = 1; n <= 5; ++n) {
    const double mass = std::pow(res.measure.max_weight(), n);
    EXPECT_LT(mass, prev);
    prev = mass;
  }
}
