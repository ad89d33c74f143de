#include "affint/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "affint/parallel.hpp"

namespace affint {

IfsInstance::IfsInstance(MapTuple tuple, std::vector<Vec> translations, double bounding_radius)
    : tuple_(std::move(tuple)), translations_(std::move(translations)) {
  if (static_cast<int>(translations_.size()) != tuple_.size()) {
    throw std::invalid_argument("IFS: " + std::to_string(translations_.size()) + " translations for " +
                                std::to_string(tuple_.size()) + " maps");
  }
  for (std::size_t i = 0; i < translations_.size(); ++i) {
    if (translations_[i].dim() != tuple_.dim()) {
      throw std::invalid_argument("IFS: translation " + std::to_string(i + 1) + " has the wrong dimension");
    }
    for (double x : translations_[i].values())
      if (!std::isfinite(x)) throw std::invalid_argument("IFS: non-finite translation");
    max_translation_ = std::max(max_translation_, translations_[i].norm());
  }
  if (!(tuple_.delta() < 1.0)) throw std::invalid_argument("IFS: maps must be contractions (delta < 1)");
  const double required = max_translation_ / (1.0 - tuple_.delta());
  if (bounding_radius < 0.0) {
    radius_ = required;
  } else {
    if (bounding_radius < required * (1.0 - 1e-12)) {
      throw std::invalid_argument("IFS: bounding radius is not forward-invariant");
    }
    radius_ = bounding_radius;
  }
}

Vec IfsInstance::apply(int i, const Vec& x) const {
  Vec y = tuple_[i] * x;
  y += translation(i);
  return y;
}

int truncation_depth(const IfsInstance& ifs, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("truncation_depth: eps must be > 0");
  const double amax = ifs.max_translation_norm();
  const double delta = ifs.delta();
  if (amax == 0.0) return 0;
  if (delta == 0.0) return 1;
  const double n = std::log(eps * (1.0 - delta) / amax) / std::log(delta);
  return std::max(0, static_cast<int>(std::ceil(n)));
}

double coding_error_bound(const IfsInstance& ifs, int n) {
  return std::pow(ifs.delta(), n) * ifs.max_translation_norm() / (1.0 - ifs.delta());
}

namespace {

// Evaluates f_{w_0} o ... o f_{w_{n-1}}(0) from the inside out.
void code_point_into(const IfsInstance& ifs, std::span<const int> letters, std::span<double> out) {
  const int d = ifs.dim();
  std::array<double, kMaxDim> p{}, q{};
  for (std::size_t k = letters.size(); k-- > 0;) {
    const int i = letters[k];
    const Matrix& t = ifs.tuple()[i];
    const Vec& a = ifs.translation(i);
    for (int r = 0; r < d; ++r) {
      double s = a[r];
      for (int c = 0; c < d; ++c) s += t(r, c) * p[static_cast<std::size_t>(c)];
      q[static_cast<std::size_t>(r)] = s;
    }
    p = q;
  }
  std::copy(p.begin(), p.begin() + d, out.begin());
}

}  // namespace

Vec code_point(const IfsInstance& ifs, const Word& x) {
  for (int l : x.letters()) {
    if (l < 0 || l >= ifs.size()) throw std::domain_error("code_point: letter outside alphabet");
  }
  Vec out(ifs.dim());
  std::array<double, kMaxDim> buf{};
  code_point_into(ifs, x.letters(), buf);
  for (int i = 0; i < ifs.dim(); ++i) out[i] = buf[static_cast<std::size_t>(i)];
  return out;
}

Vec code_point(const IfsInstance& ifs, const Word& x, double eps) {
  const int need = truncation_depth(ifs, eps);
  if (static_cast<int>(x.size()) < need) {
    throw std::domain_error("code_point: word of length " + std::to_string(x.size()) + " is shorter than the " +
                            std::to_string(need) + " letters needed for accuracy " + std::to_string(eps));
  }
  return code_point(ifs, x);
}

void write_point_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  for (int j = 0; j < cloud.dim; ++j) out << (j ? ",x" : "x") << (j + 1);
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (int j = 0; j < cloud.dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", p[static_cast<std::size_t>(j)]);
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

PointCloud chaos_sample(const IfsInstance& ifs, const BlockBernoulli& mu, std::size_t n_points, double eps,
                        std::uint64_t seed) {
  if (n_points < 1) throw std::domain_error("chaos_sample: need at least one point");
  if (mu.alphabet() != ifs.size()) throw std::invalid_argument("chaos_sample: measure alphabet differs from IFS");
  constexpr std::size_t kBlock = 4096;
  const int d = ifs.dim();
  const std::size_t L = static_cast<std::size_t>(mu.block_length());
  const std::size_t depth = static_cast<std::size_t>(std::max(1, truncation_depth(ifs, eps)));
  const std::size_t length = (depth + L - 1) / L * L;

  PointCloud cloud;
  cloud.dim = d;
  cloud.coords.resize(n_points * static_cast<std::size_t>(d));
  const std::size_t n_blocks = (n_points + kBlock - 1) / kBlock;
  parallel_for(n_blocks, [&](std::size_t b) {
    Rng rng = Rng::stream(seed, b);
    std::vector<int> letters(length);
    const std::size_t end = std::min(n_points, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      for (std::size_t pos = 0; pos < length; pos += L) {
        const Word& blk = mu.blocks()[mu.draw_block(rng)];
        std::copy(blk.letters().begin(), blk.letters().end(), letters.begin() + static_cast<std::ptrdiff_t>(pos));
      }
      code_point_into(ifs, letters, std::span<double>(cloud.coords.data() + i * d, static_cast<std::size_t>(d)));
    }
  });
  return cloud;
}

PointCloud attractor_net(const IfsInstance& ifs, double eps, std::size_t max_points) {
  if (!(eps > 0.0)) throw std::domain_error("attractor_net: eps must be > 0");
  const int d = ifs.dim();
  const double delta = ifs.delta();
  // Snapping error sqrt(d) eta / 2 per step, contracted by delta each step.
  const double eta = eps * (1.0 - delta) / std::sqrt(static_cast<double>(d));
  const double reach = ifs.max_translation_norm() / (1.0 - delta);
  int steps = 0;
  if (reach > 0.0) {
    steps = delta > 0.0 ? static_cast<int>(std::ceil(std::log(0.5 * eps / reach) / std::log(delta))) : 1;
    steps = std::max(steps, 0);
  }

  std::vector<double> current(static_cast<std::size_t>(d), 0.0);
  std::vector<std::int64_t> idx;
  std::vector<double> next;
  for (int step = 0; step < steps; ++step) {
    const std::size_t n = current.size() / d;
    next.clear();
    idx.clear();
    next.reserve(n * ifs.size() * d);
    for (std::size_t p = 0; p < n; ++p) {
      for (int i = 0; i < ifs.size(); ++i) {
        const Matrix& t = ifs.tuple()[i];
        const Vec& a = ifs.translation(i);
        for (int r = 0; r < d; ++r) {
          double s = a[r];
          for (int c = 0; c < d; ++c) s += t(r, c) * current[p * d + c];
          idx.push_back(static_cast<std::int64_t>(std::floor(s / eta)));
        }
      }
    }
    const std::size_t count = idx.size() / d;
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), 0u);
    auto less = [&](std::uint32_t x, std::uint32_t y) {
      return std::lexicographical_compare(idx.begin() + x * d, idx.begin() + (x + 1) * d, idx.begin() + y * d,
                                          idx.begin() + (y + 1) * d);
    };
    auto same = [&](std::uint32_t x, std::uint32_t y) {
      return std::equal(idx.begin() + x * d, idx.begin() + (x + 1) * d, idx.begin() + y * d);
    };
    std::sort(order.begin(), order.end(), less);
    order.erase(std::unique(order.begin(), order.end(), same), order.end());
    if (order.size() > max_points) {
      throw std::runtime_error("attractor_net: more than " + std::to_string(max_points) + " points at accuracy " +
                               std::to_string(eps));
    }
    for (std::uint32_t o : order)
      for (int r = 0; r < d; ++r) next.push_back((static_cast<double>(idx[o * d + r]) + 0.5) * eta);
    current.swap(next);
  }
  PointCloud cloud;
  cloud.dim = d;
  cloud.coords = std::move(current);
  return cloud;
}

NearestNeighbor::NearestNeighbor(const PointCloud& cloud, double cell_size) : cloud_(&cloud), cell_(cell_size) {
  if (cloud.size() == 0) throw std::invalid_argument("NearestNeighbor: empty cloud");
  if (!(cell_size > 0.0)) throw std::invalid_argument("NearestNeighbor: cell size must be > 0");
  const int d = cloud.dim;
  lo_.assign(static_cast<std::size_t>(d), std::numeric_limits<std::int64_t>::max());
  hi_.assign(static_cast<std::size_t>(d), std::numeric_limits<std::int64_t>::min());
  std::vector<std::int64_t> c(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (int j = 0; j < d; ++j) {
      c[j] = static_cast<std::int64_t>(std::floor(p[j] / cell_));
      lo_[j] = std::min(lo_[j], c[j]);
      hi_[j] = std::max(hi_[j], c[j]);
    }
    cells_[key(c)].push_back(static_cast<std::uint32_t>(i));
  }
}

std::uint64_t NearestNeighbor::key(std::span<const std::int64_t> idx) const {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (std::int64_t v : idx) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
  return h;
}

double NearestNeighbor::distance(std::span<const double> p) const {
  const int d = cloud_->dim;
  std::vector<std::int64_t> center(static_cast<std::size_t>(d)), c(static_cast<std::size_t>(d));
  std::int64_t max_reach = 0;
  for (int j = 0; j < d; ++j) {
    center[j] = static_cast<std::int64_t>(std::floor(p[j] / cell_));
    max_reach = std::max({max_reach, std::abs(center[j] - lo_[j]), std::abs(center[j] - hi_[j])});
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> off(static_cast<std::size_t>(d));
  for (std::int64_t ring = 0; ring <= max_reach; ++ring) {
    // A point in ring r+1 or beyond is at least r cells away.
    if (best <= static_cast<double>(ring - 1) * cell_) break;
    // Enumerate offsets in [-ring, ring]^d with max |offset| == ring.
    std::fill(off.begin(), off.end(), -ring);
    while (true) {
      std::int64_t cheb = 0;
      for (int j = 0; j < d; ++j) cheb = std::max(cheb, std::abs(off[j]));
      if (cheb == ring) {
        for (int j = 0; j < d; ++j) c[j] = center[j] + off[j];
        if (auto it = cells_.find(key(c)); it != cells_.end()) {
          for (std::uint32_t i : it->second) {
            const auto q = cloud_->point(i);
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += (q[j] - p[j]) * (q[j] - p[j]);
            best = std::min(best, std::sqrt(s));
          }
        }
      }
      int j = 0;
      while (j < d && off[j] == ring) {
        off[j] = -ring;
        ++j;
      }
      if (j == d) break;
      ++off[j];
    }
  }
  return best;
}

}  // namespace affint
