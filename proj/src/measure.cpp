#include "affint/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "affint/dimension.hpp"
#include "affint/parallel.hpp"

namespace affint {

BlockBernoulli::BlockBernoulli(int alphabet, std::vector<Word> blocks, std::vector<double> weights)
    : alphabet_(alphabet), blocks_(std::move(blocks)), weights_(std::move(weights)) {
  if (alphabet_ < 1) throw std::invalid_argument("block measure: alphabet must be >= 1");
  if (blocks_.empty()) throw std::invalid_argument("block measure: no blocks");
  if (blocks_.size() != weights_.size()) throw std::invalid_argument("block measure: blocks/weights size mismatch");
  block_length_ = static_cast<int>(blocks_.front().size());
  if (block_length_ < 1) throw std::invalid_argument("block measure: blocks must be non-empty");

  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("block measure: negative or non-finite weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("block measure: weights sum to " + std::to_string(total) + ", not 1");
  }

  children_.assign(static_cast<std::size_t>(alphabet_), -1);
  node_weight_.assign(1, 0.0);
  std::set<Word> seen;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Word& w = blocks_[b];
    if (static_cast<int>(w.size()) != block_length_) throw std::invalid_argument("block measure: blocks differ in length");
    if (!seen.insert(w).second) throw std::invalid_argument("block measure: duplicate block " + w.to_string());
    int node = 0;
    node_weight_[0] += weights_[b];
    for (int letter : w.letters()) {
      if (letter < 0 || letter >= alphabet_) throw std::invalid_argument("block measure: letter outside alphabet");
      const std::size_t slot = static_cast<std::size_t>(node) * alphabet_ + letter;
      if (children_[slot] < 0) {
        children_[slot] = static_cast<int>(node_weight_.size());
        node_weight_.push_back(0.0);
        children_.resize(children_.size() + static_cast<std::size_t>(alphabet_), -1);
      }
      node = children_[slot];
      node_weight_[static_cast<std::size_t>(node)] += weights_[b];
    }
  }
  // The root carries total mass exactly 1 for the empty-cylinder convention.
  node_weight_[0] = 1.0;

  cumulative_.resize(weights_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    cumulative_[i] = acc;
  }
}

BlockBernoulli BlockBernoulli::uniform(int alphabet, std::vector<Word> blocks) {
  const std::size_t n = blocks.size();
  if (n == 0) throw std::invalid_argument("block measure: no blocks");
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // Put the rounding residue on the first weight so the sum is 1.
  double rest = 0.0;
  for (std::size_t i = 1; i < n; ++i) rest += w[i];
  w[0] = 1.0 - rest;
  return BlockBernoulli(alphabet, std::move(blocks), std::move(w));
}

BlockBernoulli BlockBernoulli::uniform_letters(int alphabet) {
  std::vector<Word> blocks;
  for (int i = 0; i < alphabet; ++i) blocks.push_back(Word::from_letters({i}));
  return uniform(alphabet, std::move(blocks));
}

double BlockBernoulli::max_weight() const { return *std::max_element(weights_.begin(), weights_.end()); }

double BlockBernoulli::cylinder_mass(const Word& word) const {
  double mass = 1.0;
  int node = 0;
  int pos = 0;
  for (int letter : word.letters()) {
    if (letter < 0 || letter >= alphabet_) return 0.0;
    node = child(node, letter);
    if (node < 0) return 0.0;
    if (++pos == block_length_) {
      mass *= prefix_weight(node);
      node = 0;
      pos = 0;
    }
  }
  return pos == 0 ? mass : mass * prefix_weight(node);
}

std::size_t BlockBernoulli::draw_block(Rng& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
  if (idx >= cumulative_.size()) idx = cumulative_.size() - 1;
  // Skip zero-weight blocks that share a cumulative value.
  while (weights_[idx] == 0.0 && idx + 1 < weights_.size()) ++idx;
  return idx;
}

Word sample_word(const BlockBernoulli& mu, std::size_t length, Rng& rng) {
  std::vector<int> letters;
  letters.reserve(length + static_cast<std::size_t>(mu.block_length()));
  while (letters.size() < length) {
    const Word& b = mu.blocks()[mu.draw_block(rng)];
    letters.insert(letters.end(), b.letters().begin(), b.letters().end());
  }
  letters.resize(length);
  return Word::from_letters(std::move(letters));
}

double default_t_value(int d, double certified_lower_bound) {
  return d + 0.9 * (certified_lower_bound - d);
}

Lemma42Result build_lemma42_measure(const MapTuple& tuple, double t_val, int max_block) {
  const int d = tuple.dim();
  if (!(t_val > d)) throw std::domain_error("build_lemma42_measure: t must exceed d");
  if (max_block < 1) throw std::domain_error("build_lemma42_measure: max_block must be >= 1");

  double best_lambda = 0.0;
  int best_n = 0;
  for (int n = 1; n <= max_block; ++n) {
    const double lambda = sum_g_t(tuple, n, t_val);
    if (lambda > best_lambda) {
      best_lambda = lambda;
      best_n = n;
    }
    if (!(lambda > 1.0)) continue;

    std::vector<Word> blocks;
    std::vector<double> weights;
    double gamma = 1.0;  // |J| = 0 contributes 1/g_t(empty) = 1
    walk_words(tuple, n, [&](std::span<const int> letters, const Matrix& product) {
      if (letters.empty()) return true;
      const double g = g_t(product, t_val);
      gamma = std::max(gamma, 1.0 / g);
      if (static_cast<int>(letters.size()) == n) {
        blocks.push_back(Word::from_letters(std::vector<int>(letters.begin(), letters.end())));
        weights.push_back(g / lambda);
      }
      return true;
    });
    // Renormalise away the summation-order rounding.
    double total = 0.0;
    for (double w : weights) total += w;
    for (double& w : weights) w /= total;

    CylinderBoundCertificate cert;
    cert.t_val = t_val;
    cert.lambda = lambda;
    cert.N = n;
    cert.r = std::pow(lambda, -1.0 / n);
    cert.gamma = gamma;
    cert.C = gamma * lambda;
    return {BlockBernoulli(tuple.size(), std::move(blocks), std::move(weights)), cert};
  }
  throw std::runtime_error("build_lemma42_measure: no block length <= " + std::to_string(max_block) +
                           " has lambda > 1 (largest lambda " + std::to_string(best_lambda) + " at N = " +
                           std::to_string(best_n) + ")");
}

CylinderBound CylinderBound::weighted(const CylinderBoundCertificate& cert) {
  CylinderBound b;
  b.kind = Kind::Weighted;
  b.C = cert.C;
  b.t = cert.t_val;
  b.r = cert.r;
  return b;
}

CylinderBound CylinderBound::determinant(double C, double s) {
  CylinderBound b;
  b.kind = Kind::Determinant;
  b.C = C;
  b.exponent = s;
  return b;
}

namespace {

struct PathState {
  double block_mass;  // product of completed block weights
  int node;           // trie node inside the current block
};

struct BoundScan {
  double max_ratio = -1.0;
  std::vector<int> argmax;
  std::uint64_t words = 0;
};

}  // namespace

CylinderBoundReport verify_cylinder_bound(const BlockBernoulli& mu, const CylinderBound& bound, const MapTuple& tuple,
                                          int depth) {
  if (depth < 0) throw std::domain_error("verify_cylinder_bound: negative depth");
  if (mu.alphabet() != tuple.size()) throw std::invalid_argument("verify_cylinder_bound: alphabet mismatch");
  const int d = tuple.dim();
  const int L = mu.block_length();
  const double log_r = std::log(bound.r);

  auto rhs = [&](const Matrix& product, int length) {
    if (bound.kind == CylinderBound::Kind::Weighted) {
      return bound.C * g_t(product, bound.t) * std::exp(length * log_r);
    }
    std::array<double, kMaxDim> sv{};
    singular_values_into(product, sv);
    return bound.C * phi_s(std::span<const double>(sv.data(), static_cast<std::size_t>(d)), bound.exponent);
  };

  CylinderBoundReport report;
  report.depth = depth;
  // Root: mu = 1, right side C.
  BoundScan root;
  root.max_ratio = 1.0 / bound.C;
  root.words = 1;

  std::vector<BoundScan> parts(depth >= 1 ? static_cast<std::size_t>(tuple.size()) : 0);
  parallel_for(parts.size(), [&](std::size_t first) {
    BoundScan& scan = parts[first];
    std::vector<PathState> state(static_cast<std::size_t>(depth) + 1);
    state[0] = {1.0, 0};
    walk_words(
        tuple, depth - 1,
        [&](std::span<const int> letters, const Matrix& product) {
          const std::size_t k = letters.size();
          const PathState& parent = state[k - 1];
          const int node = mu.child(parent.node, letters[k - 1]);
          if (node < 0) return false;  // zero mass: prune the subtree
          double mass;
          if (k % static_cast<std::size_t>(L) == 0) {
            const double completed = parent.block_mass * mu.prefix_weight(node);
            state[k] = {completed, 0};
            mass = completed;
          } else {
            state[k] = {parent.block_mass, node};
            mass = parent.block_mass * mu.prefix_weight(node);
          }
          if (mass <= 0.0) return false;
          ++scan.words;
          const double ratio = mass / rhs(product, static_cast<int>(k));
          if (ratio > scan.max_ratio) {
            scan.max_ratio = ratio;
            scan.argmax.assign(letters.begin(), letters.end());
          }
          return true;
        },
        Word::from_letters({static_cast<int>(first)}));
  });

  report.max_ratio = root.max_ratio;
  report.words_checked = root.words;
  for (const auto& p : parts) {
    report.words_checked += p.words;
    if (p.max_ratio > report.max_ratio) {
      report.max_ratio = p.max_ratio;
      report.argmax = Word::from_letters(p.argmax);
    }
  }
  report.holds = report.max_ratio <= 1.0 + 1e-12;
  return report;
}

}  // namespace affint
