#include "affint/dimension.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "affint/parallel.hpp"

namespace affint {

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

double pow0(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(base, exponent);
}

std::uint64_t word_count(int m, int depth) {
  double c = std::pow(static_cast<double>(m), depth);
  if (c > 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(c);
}

// Calls leaf(product) for every word of length `depth`, grouped by first
// letter; returns the per-group results reduced in letter order.
double sum_over_words(const MapTuple& tuple, int depth, const std::function<double(const Matrix&)>& leaf) {
  if (depth == 0) return leaf(Matrix::identity(tuple.dim()));
  const int m = tuple.size();
  std::vector<double> parts(static_cast<std::size_t>(m), 0.0);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t first) {
    CompensatedSum acc;
    walk_words(
        tuple, depth - 1,
        [&](std::span<const int> letters, const Matrix& product) {
          if (static_cast<int>(letters.size()) == depth) acc.add(leaf(product));
          return true;
        },
        Word::from_letters({static_cast<int>(first)}));
    parts[first] = acc.value();
  });
  CompensatedSum total;
  for (double p : parts) total.add(p);
  return total.value();
}

struct WordSpectrum {
  double log_alpha_d;
  double log_abs_det;
};

std::vector<WordSpectrum> collect_g_data(const MapTuple& tuple, int depth) {
  std::vector<WordSpectrum> out;
  out.reserve(word_count(tuple.size(), depth));
  std::array<double, kMaxDim> sv{};
  const int d = tuple.dim();
  walk_words(tuple, depth, [&](std::span<const int> letters, const Matrix& product) {
    if (static_cast<int>(letters.size()) == depth) {
      singular_values_into(product, sv);
      out.push_back({std::log(sv[static_cast<std::size_t>(d - 1)]), std::log(std::abs(product.determinant()))});
    }
    return true;
  });
  return out;
}

double sum_from_data(const std::vector<WordSpectrum>& data, double t) {
  CompensatedSum acc;
  for (const auto& w : data) acc.add(std::exp(t * w.log_alpha_d + w.log_abs_det));
  return acc.value();
}

// Largest t (to tol) with sum(t) >= 1, for a sum decreasing in t; 0 when
// sum(0) < 1. The returned value always satisfies sum(t) >= 1.
double last_t_at_least_one(const std::function<double(double)>& sum, double start, double tol) {
  if (sum(0.0) < 1.0) return 0.0;
  double lo = 0.0;
  double step = std::max(start, 1.0);
  double hi = step;
  while (sum(hi) >= 1.0) {
    lo = hi;
    step *= 2.0;
    hi = lo + step;
    if (hi > 1e6) throw std::runtime_error("t-value bisection: sum does not fall below 1 on [0, 1e6]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (sum(mid) >= 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

double phi_s(std::span<const double> sv, double s) {
  if (s < 0.0) throw std::domain_error("phi_s: negative exponent");
  const int d = static_cast<int>(sv.size());
  if (s > d) {
    double det = 1.0;
    for (double a : sv) det *= a;
    return pow0(det, s / d);
  }
  const int k = static_cast<int>(std::floor(s));
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= sv[static_cast<std::size_t>(i)];
  if (k < d) out *= pow0(sv[static_cast<std::size_t>(k)], s - k);
  return out;
}

double phi_s(const Matrix& m, double s) {
  std::array<double, kMaxDim> sv{};
  singular_values_into(m, sv);
  return phi_s(std::span<const double>(sv.data(), static_cast<std::size_t>(m.dim())), s);
}

double g_t(const Matrix& m, double t) {
  if (t < 0.0) throw std::domain_error("g_t: negative exponent");
  return pow0(smallest_singular_value(m), t) * std::abs(m.determinant());
}

double g_t(double t, const MapTuple& tuple, const Word& word) {
  if (t < 0.0) throw std::domain_error("g_t: negative exponent");
  if (word.empty()) return 1.0;
  // alpha_d(T_I) = 1 / ||T_I^{-1}|| with the inverse formed letter by letter,
  // and |det T_I| as a product: both stay accurate when T_I is very badly
  // conditioned, where the singular values of the product matrix do not.
  const int d = tuple.dim();
  Matrix inv = Matrix::identity(d), tmp;
  double det = 1.0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    const int i = word[k];
    if (i < 0 || i >= tuple.size()) throw std::domain_error("g_t: letter outside alphabet");
    multiply_into(tuple[i].inverse(), inv, tmp);
    inv = tmp;
    det *= tuple.abs_det(i);
  }
  return pow0(1.0 / operator_norm(inv), t) * det;
}

double sum_g_t(const MapTuple& tuple, int depth, double t) {
  return sum_over_words(tuple, depth, [t](const Matrix& p) { return g_t(p, t); });
}

TValueCertificate certify_t_above_d(const MapTuple& tuple, const CertifyOptions& options) {
  if (options.max_depth < 1) throw std::domain_error("certify_t_above_d: max_depth must be >= 1");
  const int m = tuple.size();
  const double d = tuple.dim();
  TValueCertificate cert;

  // full_sums[k] = sum over Sigma_k of g_d; full_sums[0] = 1.
  std::vector<double> full_sums{1.0};

  for (int n = 1; n <= options.max_depth; ++n) {
    CompensatedSum partial;
    bool found = false;
    bool stop = false;
    walk_words(tuple, n, [&](std::span<const int> letters, const Matrix& product) {
      if (stop) return false;
      if (++cert.nodes_visited > options.budget) {
        cert.budget_exhausted = true;
        stop = true;
        return false;
      }
      const int k = static_cast<int>(letters.size());
      if (k == 0) return true;
      const double g = g_t(product, d);
      if (k == n) {
        partial.add(g);
        if (partial.value() > 1.0) found = stop = true;
        return false;
      }
      // Super-multiplicativity: the subtree under I sums to at least g(I) S_{n-k}.
      if (partial.value() + g * full_sums[static_cast<std::size_t>(n - k)] > 1.0) {
        found = stop = true;
        return false;
      }
      return true;
    });

    if (cert.budget_exhausted) break;
    if (!found) {
      const double s = partial.value();
      full_sums.push_back(s);
      cert.depth_sums.push_back(s);
      if (s > cert.largest_sum) {
        cert.largest_sum = s;
        cert.largest_sum_depth = n;
      }
      continue;
    }

    // Witness depth found; the reported sum is the full canonical-order sum.
    const std::uint64_t words = word_count(m, n);
    if (cert.nodes_visited + words > options.budget) {
      cert.budget_exhausted = true;
      break;
    }
    cert.nodes_visited += words;
    const double s = sum_g_t(tuple, n, d);
    cert.depth_sums.push_back(s);
    if (s > cert.largest_sum) {
      cert.largest_sum = s;
      cert.largest_sum_depth = n;
    }
    if (s > 1.0) {
      cert.status = TValueStatus::CertifiedAboveD;
      cert.witness_depth = n;
      cert.witness_sum = s;
    }
    break;
  }

  // Lower bound: largest t with a depth-n sum >= 1, maximised over the
  // depths that are cheap enough to store.
  const int first_depth = cert.status == TValueStatus::CertifiedAboveD ? cert.witness_depth : 1;
  const int last_depth = options.max_depth;
  cert.lower_bound = cert.status == TValueStatus::CertifiedAboveD ? d : 0.0;
  cert.lower_bound_depth = cert.status == TValueStatus::CertifiedAboveD ? cert.witness_depth : 0;
  for (int n = first_depth; n <= last_depth; ++n) {
    if (word_count(m, n) > options.refine_words) break;
    const auto data = collect_g_data(tuple, n);
    const double t = last_t_at_least_one([&](double tt) { return sum_from_data(data, tt); }, d, options.tol);
    if (t > cert.lower_bound) {
      cert.lower_bound = t;
      cert.lower_bound_depth = n;
    }
  }
  return cert;
}

AffinityBracket affinity_bracket(const MapTuple& tuple, int depth, double tol) {
  if (depth < 1) throw std::domain_error("affinity_bracket: depth must be >= 1");
  if (!(tol > 0.0)) throw std::domain_error("affinity_bracket: tol must be > 0");
  constexpr std::uint64_t kMaxWords = 20'000'000;
  const int m = tuple.size();
  const int d = tuple.dim();

  AffinityBracket out;
  out.upper = std::numeric_limits<double>::infinity();
  out.lower = 0.0;

  for (int k = 1; k <= depth; ++k) {
    if (word_count(m, k) > kMaxWords) break;
    std::vector<double> sv;  // d values per word
    sv.reserve(word_count(m, k) * static_cast<std::size_t>(d));
    std::array<double, kMaxDim> buf{};
    walk_words(tuple, k, [&](std::span<const int> letters, const Matrix& product) {
      if (static_cast<int>(letters.size()) == k) {
        singular_values_into(product, buf);
        sv.insert(sv.end(), buf.begin(), buf.begin() + d);
      }
      return true;
    });
    const std::size_t words = sv.size() / static_cast<std::size_t>(d);

    auto z_upper = [&](double s) {
      CompensatedSum acc;
      for (std::size_t w = 0; w < words; ++w)
        acc.add(phi_s(std::span<const double>(sv.data() + w * d, static_cast<std::size_t>(d)), s));
      return acc.value();
    };
    auto z_lower = [&](double s) {
      CompensatedSum acc;
      for (std::size_t w = 0; w < words; ++w) {
        const double* a = sv.data() + w * d;
        const double ratio = a[0] > 0.0 ? a[d - 1] / a[0] : 0.0;
        acc.add(phi_s(std::span<const double>(a, static_cast<std::size_t>(d)), s) * pow0(ratio, s));
      }
      return acc.value();
    };

    // Upper: first s (to tol) where Z_k(s) < 1, or 0 when Z_k(0) <= 1.
    double up;
    if (z_upper(0.0) <= 1.0) {
      up = 0.0;
    } else {
      double lo = 0.0, hi = d;
      while (z_upper(hi) >= 1.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e4) {
          throw std::runtime_error("affinity_bracket: pressure is flat on s in [0, " + std::to_string(hi) + "]");
        }
      }
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (z_upper(mid) >= 1.0 ? lo : hi) = mid;
      }
      up = hi;
    }
    // Lower: last s with Zhat_k(s) > 1.
    double low = 0.0;
    if (z_lower(0.0) > 1.0) {
      double lo = 0.0, hi = std::max(up, tol);
      while (z_lower(hi) > 1.0) {
        lo = hi;
        hi *= 2.0;
      }
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (z_lower(mid) > 1.0 ? lo : hi) = mid;
      }
      low = lo;
    }
    out.upper = std::min(out.upper, up);
    out.lower = std::max(out.lower, low);
    out.upper_by_depth.push_back(out.upper);
    out.lower_by_depth.push_back(out.lower);
    out.depth = k;
  }
  if (out.depth == 0) throw std::runtime_error("affinity_bracket: alphabet too large for depth 1");
  // Both bounds are valid, so only bisection slack can cross them.
  if (out.lower > out.upper) out.lower = out.upper;
  return out;
}

bool is_conformal(const Matrix& m, double tol) {
  const Matrix g = m.transpose() * m;
  const int d = m.dim();
  double c = 0.0;
  for (int i = 0; i < d; ++i) c += g(i, i);
  c /= d;
  if (!(c > 0.0)) return false;
  double dev = 0.0;
  for (int r = 0; r < d; ++r)
    for (int col = 0; col < d; ++col) dev = std::max(dev, std::abs(g(r, col) - (r == col ? c : 0.0)));
  return dev <= tol * c;
}

Corollary12Report check_corollary12(const MapTuple& tuple) {
  Corollary12Report r;
  const int d = tuple.dim();
  r.conformal = true;
  for (int i = 0; i < tuple.size(); ++i) {
    const double det = tuple.abs_det(i);
    r.condition_i_sum += std::pow(smallest_singular_value(tuple[i]), d) * det;
    r.det_squared_sum += det * det;
    r.det_sum += det;
    r.conformal = r.conformal && is_conformal(tuple[i]);
  }
  r.max_norm = tuple.delta();
  r.norm_gate = r.max_norm < 0.5;
  r.condition_i = r.condition_i_sum > 1.0;
  r.condition_ii = r.conformal && r.det_squared_sum > 1.0;
  r.certified = r.norm_gate && (r.condition_i || r.condition_ii);
  r.conjecture_condition = r.norm_gate && r.det_sum > 1.0;
  return r;
}

double default_commutator_tolerance(const MapTuple& tuple) { return 1e-10 * tuple.delta() * tuple.delta(); }

Theorem13Report check_theorem13(const MapTuple& tuple, std::optional<double> tol) {
  Theorem13Report r;
  r.tolerance = tol.value_or(default_commutator_tolerance(tuple));
  if (!(r.tolerance > 0.0)) throw std::domain_error("check_theorem13: tolerance must be > 0");
  for (int i = 0; i < tuple.size(); ++i) {
    for (int j = i + 1; j < tuple.size(); ++j) {
      const double c = commutator_norm(tuple[i], tuple[j]);
      if (r.worst_pair_i < 0 || c > r.max_commutator) {
        r.max_commutator = c;
        r.worst_pair_i = i + 1;
        r.worst_pair_j = j + 1;
      }
    }
    r.det_squared_sum += tuple.abs_det(i) * tuple.abs_det(i);
  }
  r.commuting = r.max_commutator <= r.tolerance;
  r.det_condition = r.det_squared_sum > 1.0;
  r.max_norm = tuple.delta();
  r.norm_gate = r.max_norm < 0.5;
  r.certified = r.commuting && r.det_condition && r.norm_gate;
  return r;
}

}  // namespace affint
