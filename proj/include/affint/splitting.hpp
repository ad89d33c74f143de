#pragma once

// The commuting-matrix construction: multidegree classes of products of
// length N, a block (A, class) with count * |det A|^t > 1, the sub-systems
// E and F, the shift v, and numerical checks of K contains E + F + v.

#include <cstdint>
#include <string>
#include <vector>

#include "affint/geometry.hpp"

namespace affint {

struct BlockClass {
  int N = 0;
  // Every multidegree (p_1..p_m), sum N, whose product equals A. Usually one;
  // several when distinct multidegrees give the same matrix.
  std::vector<std::vector<int>> multidegrees;
  Matrix A;
  double count = 0.0;  // number of words I of length N with T_I = A
  double t_val = 0.0;
  double score = 0.0;  // count * |det A|^t_val

  const std::vector<int>& multidegree() const { return multidegrees.front(); }
};

// N! / prod p_i!
double multinomial(const std::vector<int>& p);

// T_1^{p_1} ... T_m^{p_m}
Matrix multidegree_product(const MapTuple& tuple, const std::vector<int>& p);

// All classes of length-N products for exponent t, equal matrices merged
// (within 1e-12 relative), in order of first appearance over the
// multidegrees enumerated with p_1 decreasing first.
std::vector<BlockClass> block_classes(const MapTuple& tuple, int N, double t);

struct BlockSearch {
  double t_lo = 2.0;   // exclusive
  double t_hi = 2.5;   // inclusive
  double t_step = 0.01;
  int max_N = 8;
  std::size_t max_classes = 200'000;  // per N, before merging
};

struct BlockSearchResult {
  bool found = false;
  BlockClass block;       // the certified class, or the best one seen
  double best_score = 0.0;
  int levels_searched = 0;
};

// Scans the t grid upwards; for each t, N = 1..max_N; at the first (t, N)
// with some score > 1 returns the best-scoring class there. Counts come from
// multinomial coefficients; words are never enumerated.
BlockSearchResult find_certified_block(const MapTuple& tuple, const BlockSearch& search = {});

// The words of the class in lexicographic order. Throws std::length_error
// when there are more than `limit`.
std::vector<Word> class_words(const BlockClass& block, std::size_t limit = 1'000'000);

// Lexicographically smallest word of the class.
Word default_J(const BlockClass& block);

struct SplitCertificate {
  BlockClass block;
  Word J;
  std::vector<Word> class_members;  // the words I with T_I = A
  std::vector<Vec> a_I;             // f_I(0), parallel to class_members
  std::vector<Word> Lambda;         // IJ
  IfsInstance E;                    // x -> A^2 x + a_I + A a_J
  IfsInstance F;                    // x -> A^2 x + a_J + A a_I
  Vec v;                            // -(Id - A)^{-1} a_J
};

// Throws std::domain_error when J is not in the class (wrong length or
// T_J != A within 1e-10 relative).
SplitCertificate build_split(const IfsInstance& ifs, const BlockClass& block, const Word& J);

struct SplitReport {
  std::uint64_t samples = 0;
  int levels = 0;  // pairs of blocks per sampled point
  double eps = 0.0;
  // e + f + v against the coded point of the interleaved word.
  double max_identity_deviation = 0.0;
  // Distance from e + f + v to a certified net of K.
  double max_membership_distance = 0.0;
  Vec witness_e, witness_f, witness_sum;
  // One-sided Hausdorff distances between nets of F and A E + a_J.
  double hausdorff_F_to_AE = 0.0;
  double hausdorff_AE_to_F = 0.0;
  bool identity_ok = false;
  bool membership_ok = false;
  bool hausdorff_ok = false;
  bool pass = false;
};

SplitReport verify_split(const IfsInstance& ifs, const SplitCertificate& cert, std::uint64_t samples, double eps,
                         std::uint64_t seed);

}  // namespace affint
