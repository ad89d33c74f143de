#pragma once

// Bernoulli measures on block words: the weighted measure p_I = g_t(I)/lambda
// over all blocks of length N, and the uniform measure on the block set
// Lambda used by the commuting-case construction. Cylinder masses, the
// cylinder-bound certificates and block sampling.

#include <cstdint>
#include <string>
#include <vector>

#include "affint/linalg.hpp"
#include "affint/random.hpp"

namespace affint {

class BlockBernoulli {
 public:
  // Throws std::invalid_argument unless all blocks share one length >= 1,
  // letters are < alphabet, blocks are distinct, and the weights are a
  // probability vector (sum 1 within 1e-12).
  BlockBernoulli(int alphabet, std::vector<Word> blocks, std::vector<double> weights);

  static BlockBernoulli uniform(int alphabet, std::vector<Word> blocks);
  // The i.i.d. uniform measure on single letters.
  static BlockBernoulli uniform_letters(int alphabet);

  int alphabet() const { return alphabet_; }
  int block_length() const { return block_length_; }
  const std::vector<Word>& blocks() const { return blocks_; }
  const std::vector<double>& weights() const { return weights_; }
  double max_weight() const;

  // mu([I]). Full blocks multiply their weights; a trailing partial block is
  // marginalised over its completions. mu([empty]) = 1.
  double cylinder_mass(const Word& word) const;

  // Prefix trie over the blocks. Node 0 is the root; child(node, letter) is
  // -1 when no block continues that way. prefix_weight(node) is the total
  // weight of blocks through the node.
  int child(int node, int letter) const { return children_[static_cast<std::size_t>(node) * alphabet_ + letter]; }
  double prefix_weight(int node) const { return node_weight_[static_cast<std::size_t>(node)]; }

  // Index of a block drawn by weight.
  std::size_t draw_block(Rng& rng) const;

 private:
  int alphabet_ = 0;
  int block_length_ = 0;
  std::vector<Word> blocks_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  std::vector<int> children_;
  std::vector<double> node_weight_;
};

struct CylinderBoundCertificate {
  double t_val = 0.0;
  double C = 0.0;
  double r = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  int N = 0;
};

struct Lemma42Result {
  BlockBernoulli measure;
  CylinderBoundCertificate certificate;
};

// Smallest N <= max_block with lambda = sum_{Sigma_N} g_t > 1; weights
// g_t(I)/lambda, r = lambda^{-1/N}, gamma = max_{|J| <= N} 1/g_t(J),
// C = gamma lambda. Throws std::domain_error for t_val <= d and
// std::runtime_error (naming the largest lambda) when no N works.
Lemma42Result build_lemma42_measure(const MapTuple& tuple, double t_val, int max_block);

// d + 0.9 (lower_bound - d): strictly inside (d, t(T)).
double default_t_value(int d, double certified_lower_bound);

// Which inequality verify_cylinder_bound checks.
struct CylinderBound {
  enum class Kind {
    Weighted,      // mu([I]) <= C g_t(I) r^|I|
    Determinant,   // mu([I]) <= C phi^s(T_I), s = exponent
  };
  Kind kind = Kind::Weighted;
  double C = 1.0;
  double t = 0.0;         // Weighted: g_t exponent
  double r = 1.0;         // Weighted
  double exponent = 0.0;  // Determinant: s

  static CylinderBound weighted(const CylinderBoundCertificate& cert);
  static CylinderBound determinant(double C, double s);
};

struct CylinderBoundReport {
  double max_ratio = 0.0;
  Word argmax;
  std::uint64_t words_checked = 0;
  int depth = 0;
  bool holds = false;
};

// Checks the bound on every positive-mass word of length <= depth (zero-mass
// subtrees pruned). holds is max_ratio <= 1 up to 1e-12 relative rounding.
CylinderBoundReport verify_cylinder_bound(const BlockBernoulli& mu, const CylinderBound& bound, const MapTuple& tuple,
                                          int depth);

// Blocks drawn i.i.d. by weight, concatenated and truncated to `length`.
Word sample_word(const BlockBernoulli& mu, std::size_t length, Rng& rng);

}  // namespace affint
