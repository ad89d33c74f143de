#include "affint/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "affint/parallel.hpp"
#include "affint/random.hpp"

namespace affint {

double multinomial(const std::vector<int>& p) {
  // Product of binomials C(p_1 + .. + p_k, p_k); exact while below 2^53.
  double result = 1.0;
  int total = 0;
  for (int pk : p) {
    for (int j = 1; j <= pk; ++j) {
      ++total;
      result = result * total / j;
    }
  }
  return std::round(result);
}

Matrix multidegree_product(const MapTuple& tuple, const std::vector<int>& p) {
  if (static_cast<int>(p.size()) != tuple.size()) throw std::invalid_argument("multidegree: wrong number of exponents");
  Matrix a = Matrix::identity(tuple.dim());
  Matrix tmp;
  for (int i = 0; i < tuple.size(); ++i) {
    for (int k = 0; k < p[static_cast<std::size_t>(i)]; ++k) {
      multiply_into(a, tuple[i], tmp);
      a = tmp;
    }
  }
  return a;
}

namespace {

void compositions(int N, int m, std::vector<int>& cur, int pos, int left, std::vector<std::vector<int>>& out,
                  std::size_t cap) {
  if (out.size() > cap) return;
  if (pos == m - 1) {
    cur[static_cast<std::size_t>(pos)] = left;
    out.push_back(cur);
    return;
  }
  for (int p = left; p >= 0; --p) {
    cur[static_cast<std::size_t>(pos)] = p;
    compositions(N, m, cur, pos + 1, left - p, out, cap);
  }
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.max_abs_entry(), b.max_abs_entry());
  return (a - b).max_abs_entry() <= 1e-12 * scale;
}

std::vector<BlockClass> merged_classes(const MapTuple& tuple, int N, std::size_t cap, bool& overflow) {
  std::vector<std::vector<int>> degrees;
  std::vector<int> cur(static_cast<std::size_t>(tuple.size()), 0);
  compositions(N, tuple.size(), cur, 0, N, degrees, cap);
  overflow = degrees.size() > cap;
  if (overflow) return {};

  std::vector<Matrix> prods(degrees.size());
  parallel_for(degrees.size(), [&](std::size_t i) { prods[i] = multidegree_product(tuple, degrees[i]); });

  // Group equal products: sort by the (0,0) entry and compare within the
  // tolerance window only.
  std::vector<std::size_t> order(degrees.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return prods[x](0, 0) < prods[y](0, 0); });
  std::vector<std::size_t> group(degrees.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t a = 0; a < order.size(); ++a) {
    const std::size_t i = order[a];
    if (group[i] != std::numeric_limits<std::size_t>::max()) continue;
    group[i] = i;
    const double window = 1e-12 * std::max(prods[i].max_abs_entry(), 1e-300) * 2.0;
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const std::size_t j = order[b];
      if (prods[j](0, 0) - prods[i](0, 0) > window) break;
      if (group[j] == std::numeric_limits<std::size_t>::max() && same_matrix(prods[i], prods[j])) group[j] = i;
    }
  }
  // Representative = smallest original index in the group.
  std::vector<std::size_t> first_of(degrees.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < degrees.size(); ++i) first_of[group[i]] = std::min(first_of[group[i]], i);
  std::vector<BlockClass> classes;
  std::vector<std::ptrdiff_t> slot(degrees.size(), -1);
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const std::size_t r = first_of[group[i]];
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(classes.size());
      BlockClass c;
      c.N = N;
      c.A = prods[r];
      classes.push_back(c);
    }
    BlockClass& c = classes[static_cast<std::size_t>(slot[r])];
    c.multidegrees.push_back(degrees[i]);
    c.count += multinomial(degrees[i]);
  }
  return classes;
}

void score(BlockClass& c, double t) {
  c.t_val = t;
  c.score = std::exp(std::log(c.count) + t * std::log(std::abs(c.A.determinant())));
}

}  // namespace

std::vector<BlockClass> block_classes(const MapTuple& tuple, int N, double t) {
  if (N < 1) throw std::domain_error("block_classes: N must be >= 1");
  bool overflow = false;
  auto classes = merged_classes(tuple, N, std::numeric_limits<std::size_t>::max() - 1, overflow);
  for (auto& c : classes) score(c, t);
  return classes;
}

BlockSearchResult find_certified_block(const MapTuple& tuple, const BlockSearch& search) {
  if (!(search.t_step > 0.0) || !(search.t_hi > search.t_lo)) throw std::invalid_argument("block search: bad t range");
  std::vector<std::vector<BlockClass>> levels;
  for (int N = 1; N <= search.max_N; ++N) {
    bool overflow = false;
    auto classes = merged_classes(tuple, N, search.max_classes, overflow);
    if (overflow) break;
    levels.push_back(std::move(classes));
  }
  BlockSearchResult result;
  result.levels_searched = static_cast<int>(levels.size());
  result.best_score = -1.0;
  for (int k = 1;; ++k) {
    const double t = search.t_lo + k * search.t_step;
    if (t > search.t_hi + 1e-12) break;
    for (auto& level : levels) {
      const BlockClass* best = nullptr;
      for (auto& c : level) {
        score(c, t);
        if (!best || c.score > best->score) best = &c;
      }
      if (!best) continue;
      if (best->score > result.best_score) {
        result.best_score = best->score;
        result.block = *best;
      }
      if (best->score > 1.0) {
        result.found = true;
        result.block = *best;
        result.best_score = best->score;
        return result;
      }
    }
  }
  return result;
}

std::vector<Word> class_words(const BlockClass& block, std::size_t limit) {
  if (block.count > static_cast<double>(limit)) {
    throw std::length_error("class has " + std::to_string(block.count) + " words (limit " + std::to_string(limit) + ")");
  }
  std::vector<Word> words;
  for (const auto& p : block.multidegrees) {
    std::vector<int> letters;
    for (std::size_t i = 0; i < p.size(); ++i) letters.insert(letters.end(), static_cast<std::size_t>(p[i]), static_cast<int>(i));
    do {
      words.push_back(Word::from_letters(letters));
    } while (std::next_permutation(letters.begin(), letters.end()));
  }
  std::sort(words.begin(), words.end());
  return words;
}

Word default_J(const BlockClass& block) {
  Word best;
  bool first = true;
  for (const auto& p : block.multidegrees) {
    std::vector<int> letters;
    for (std::size_t i = 0; i < p.size(); ++i) letters.insert(letters.end(), static_cast<std::size_t>(p[i]), static_cast<int>(i));
    Word w = Word::from_letters(std::move(letters));
    if (first || w < best) best = std::move(w);
    first = false;
  }
  return best;
}

namespace {

IfsInstance sub_ifs(const Matrix& A2, std::vector<Vec> translations) {
  std::vector<Matrix> maps(translations.size(), A2);
  return IfsInstance(MapTuple(std::move(maps)), std::move(translations));
}

}  // namespace

SplitCertificate build_split(const IfsInstance& ifs, const BlockClass& block, const Word& J) {
  if (static_cast<int>(J.size()) != block.N) {
    throw std::domain_error("build_split: J = " + J.to_string() + " does not have length " + std::to_string(block.N));
  }
  const Matrix TJ = word_product(ifs.tuple(), J);
  const double scale = std::max(block.A.max_abs_entry(), 1e-300);
  if ((TJ - block.A).max_abs_entry() > 1e-10 * scale) {
    throw std::domain_error("build_split: T_J != A for J = " + J.to_string());
  }
  const int d = ifs.dim();
  std::vector<Word> members = class_words(block);
  std::vector<Vec> aI;
  std::vector<Word> lambda;
  for (const Word& I : members) {
    aI.push_back(code_point(ifs, I));
    lambda.push_back(I + J);
  }
  const Vec aJ = code_point(ifs, J);
  const Matrix& A = block.A;
  const Matrix A2 = A * A;
  const Vec AaJ = A * aJ;
  std::vector<Vec> e_trans, f_trans;
  for (const Vec& a : aI) {
    e_trans.push_back(a + AaJ);
    f_trans.push_back(aJ + A * a);
  }
  const Vec v = -1.0 * solve(Matrix::identity(d) - A, aJ);
  return SplitCertificate{block,       J, std::move(members), std::move(aI), std::move(lambda),
                          sub_ifs(A2, std::move(e_trans)), sub_ifs(A2, std::move(f_trans)), v};
}

namespace {

struct SplitBlockResult {
  double identity = 0.0, membership = 0.0;
  Vec e_id, f_id, s_id;
  Vec e_mem, f_mem, s_mem;
};

double max_one_sided(const PointCloud& from, const NearestNeighbor& to) {
  std::vector<double> part((from.size() + 4095) / 4096, 0.0);
  parallel_for(part.size(), [&](std::size_t b) {
    const std::size_t end = std::min(from.size(), (b + 1) * 4096);
    for (std::size_t i = b * 4096; i < end; ++i) part[b] = std::max(part[b], to.distance(from.point(i)));
  });
  return part.empty() ? 0.0 : *std::max_element(part.begin(), part.end());
}

}  // namespace

SplitReport verify_split(const IfsInstance& ifs, const SplitCertificate& cert, std::uint64_t samples, double eps,
                         std::uint64_t seed) {
  if (!(eps > 0.0)) throw std::domain_error("verify_split: eps must be > 0");
  const int d = ifs.dim();
  const std::size_t n_members = cert.class_members.size();
  SplitReport report;
  report.samples = samples;
  report.eps = eps;
  report.levels = std::max({1, truncation_depth(cert.E, eps / 8), truncation_depth(cert.F, eps / 8)});
  const int K = report.levels;

  // Certified net of K at eps/4: e + f + v should be within eps/4 + eps/4.
  const PointCloud net = attractor_net(ifs, eps / 4);
  const NearestNeighbor nn(net, eps);

  constexpr std::uint64_t kBlock = 1024;
  std::vector<SplitBlockResult> parts((samples + kBlock - 1) / kBlock);
  parallel_for(parts.size(), [&](std::size_t b) {
    Rng rng = Rng::stream(seed, b);
    SplitBlockResult& r = parts[b];
    r.identity = r.membership = -1.0;
    const std::uint64_t end = std::min<std::uint64_t>(samples, (b + 1) * kBlock);
    std::vector<int> u(static_cast<std::size_t>(K)), w(static_cast<std::size_t>(K));
    for (std::uint64_t s = b * kBlock; s < end; ++s) {
      std::vector<int> inter;
      for (int k = 0; k < K; ++k) {
        u[k] = static_cast<int>(rng.below(n_members));
        w[k] = static_cast<int>(rng.below(n_members));
        const auto& I = cert.class_members[static_cast<std::size_t>(u[k])].letters();
        const auto& I2 = cert.class_members[static_cast<std::size_t>(w[k])].letters();
        inter.insert(inter.end(), I.begin(), I.end());
        inter.insert(inter.end(), I2.begin(), I2.end());
      }
      const Vec e = code_point(cert.E, Word::from_letters(u));
      const Vec f = code_point(cert.F, Word::from_letters(w));
      const Vec sum = e + f + cert.v;
      const Vec p = code_point(ifs, Word::from_letters(std::move(inter)));
      const double dev = (sum - p).norm();
      if (dev > r.identity) {
        r.identity = dev;
        r.e_id = e;
        r.f_id = f;
        r.s_id = sum;
      }
      const double dist = nn.distance(sum.values());
      if (dist > r.membership) {
        r.membership = dist;
        r.e_mem = e;
        r.f_mem = f;
        r.s_mem = sum;
      }
    }
  });
  const SplitBlockResult* worst_id = nullptr;
  const SplitBlockResult* worst_mem = nullptr;
  for (const auto& r : parts) {
    if (!worst_id || r.identity > worst_id->identity) worst_id = &r;
    if (!worst_mem || r.membership > worst_mem->membership) worst_mem = &r;
  }
  if (worst_id) {
    report.max_identity_deviation = worst_id->identity;
    report.max_membership_distance = worst_mem->membership;
  }
  report.identity_ok = report.max_identity_deviation <= eps;
  report.membership_ok = report.max_membership_distance <= eps;
  if (worst_id) {
    const SplitBlockResult& w = report.identity_ok ? *worst_mem : *worst_id;
    report.witness_e = report.identity_ok ? w.e_mem : w.e_id;
    report.witness_f = report.identity_ok ? w.f_mem : w.f_id;
    report.witness_sum = report.identity_ok ? w.s_mem : w.s_id;
  }

  // F = A E + a_J, compared through eps/4 nets of both sides.
  const PointCloud e_net = attractor_net(cert.E, eps / 4);
  const PointCloud f_net = attractor_net(cert.F, eps / 4);
  const Vec aJ = code_point(ifs, cert.J);
  PointCloud ae;
  ae.dim = d;
  for (std::size_t i = 0; i < e_net.size(); ++i) ae.push_back(cert.block.A * e_net.vec(i) + aJ);
  const NearestNeighbor nn_ae(ae, eps), nn_f(f_net, eps);
  report.hausdorff_F_to_AE = max_one_sided(f_net, nn_ae);
  report.hausdorff_AE_to_F = max_one_sided(ae, nn_f);
  report.hausdorff_ok = std::max(report.hausdorff_F_to_AE, report.hausdorff_AE_to_F) <= eps;
  report.pass = report.identity_ok && report.membership_ok && report.hausdorff_ok;
  return report;
}

}  // namespace affint
