#pragma once

// Singular value function, the word weight g_t, the t-value certificate,
// affinity-dimension brackets and the hypothesis checkers for the
// non-empty-interior theorems.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affint/linalg.hpp"

namespace affint {

// phi^s from descending singular values (size d). Convention 0^0 = 1.
double phi_s(std::span<const double> singular_values, double s);
// Throws std::domain_error for s < 0.
double phi_s(const Matrix& m, double s);

// g_t(M) = alpha_d(M)^t |det M|.
double g_t(const Matrix& m, double t);
// g_t(I) for the word product; g_t(empty) = 1. Evaluated through the
// letter inverses, so it stays accurate for badly conditioned products.
double g_t(double t, const MapTuple& tuple, const Word& word);

enum class TValueStatus { CertifiedAboveD, Inconclusive };

struct TValueCertificate {
  TValueStatus status = TValueStatus::Inconclusive;
  int witness_depth = 0;          // 0 when no witness
  double witness_sum = 0.0;       // sum_{Sigma_n} alpha_d(T_I)^d |det T_I| at witness_depth
  double lower_bound = 0.0;       // certified: t(T_1..T_m) >= lower_bound
  int lower_bound_depth = 0;      // depth whose sum produced lower_bound
  std::vector<double> depth_sums; // full sums at depths 1..k that were swept completely
  double largest_sum = 0.0;
  int largest_sum_depth = 0;
  std::uint64_t nodes_visited = 0;
  bool budget_exhausted = false;
};

struct CertifyOptions {
  int max_depth = 8;
  std::uint64_t budget = 100'000'000;  // word-tree nodes
  // Lower-bound refinement only uses depths with at most this many words.
  std::uint64_t refine_words = 1'000'000;
  double tol = 1e-4;
};

// Searches n = 1..max_depth for sum_{Sigma_n} g_d(I) > 1.
TValueCertificate certify_t_above_d(const MapTuple& tuple, const CertifyOptions& options = {});

// Full sum_{I in Sigma_n} g_t(I), compensated and in canonical word order.
double sum_g_t(const MapTuple& tuple, int depth, double t);

struct AffinityBracket {
  double lower = 0.0;
  double upper = 0.0;
  int depth = 0;
  // upper_by_depth[k-1] is the running minimum of the depth-k zeros.
  std::vector<double> upper_by_depth;
  std::vector<double> lower_by_depth;
};

// Bisection bracket for dim_AFF. Upper bounds come from submultiplicativity
// of phi^s; lower bounds from phi^s(AB) >= phi^s(A) phi^s(B) (alpha_d/alpha_1)(B)^s.
// Throws std::runtime_error when the pressure does not change sign.
AffinityBracket affinity_bracket(const MapTuple& tuple, int depth = 8, double tol = 1e-4);

struct Corollary12Report {
  double condition_i_sum = 0.0;     // sum alpha_d(T_i)^d |det T_i|
  bool condition_i = false;
  bool conformal = false;           // every T_i^T T_i = c_i Id
  double det_squared_sum = 0.0;     // sum |det T_i|^2
  bool condition_ii = false;
  double max_norm = 0.0;
  bool norm_gate = false;           // ||T_i|| < 1/2 for all i
  bool certified = false;           // norm gate and (i or ii)
  double det_sum = 0.0;             // sum |det T_i|; informational only
  bool conjecture_condition = false;
};

Corollary12Report check_corollary12(const MapTuple& tuple);

// ||T^T T - c Id|| <= tol * c with c = ||T||^2.
bool is_conformal(const Matrix& m, double tol = 1e-9);

struct Theorem13Report {
  double max_commutator = 0.0;
  int worst_pair_i = -1;            // one-based; -1 when m = 1
  int worst_pair_j = -1;
  double tolerance = 0.0;
  bool commuting = false;
  double det_squared_sum = 0.0;
  bool det_condition = false;
  double max_norm = 0.0;
  bool norm_gate = false;
  bool certified = false;
};

// Default tolerance is 1e-10 * max ||T_i||^2.
Theorem13Report check_theorem13(const MapTuple& tuple, std::optional<double> tol = std::nullopt);

double default_commutator_tolerance(const MapTuple& tuple);

}  // namespace affint
