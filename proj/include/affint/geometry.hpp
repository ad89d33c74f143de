#pragma once

// The coding map of an affine IFS {T_i x + a_i}, pushforward sampling and
// a certified finite net of the attractor.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "affint/linalg.hpp"
#include "affint/measure.hpp"

namespace affint {

class IfsInstance {
 public:
  // bounding_radius defaults to max_i ||a_i|| / (1 - delta); a larger value
  // may be supplied. Throws std::invalid_argument when delta >= 1, the
  // translation count/dimension disagrees with the tuple, or the supplied
  // radius is too small to be forward-invariant.
  IfsInstance(MapTuple tuple, std::vector<Vec> translations, double bounding_radius = -1.0);

  const MapTuple& tuple() const { return tuple_; }
  const std::vector<Vec>& translations() const { return translations_; }
  const Vec& translation(int i) const { return translations_[static_cast<std::size_t>(i)]; }
  int dim() const { return tuple_.dim(); }
  int size() const { return tuple_.size(); }
  double delta() const { return tuple_.delta(); }
  double bounding_radius() const { return radius_; }
  double max_translation_norm() const { return max_translation_; }

  // f_i(x) = T_i x + a_i
  Vec apply(int i, const Vec& x) const;

 private:
  MapTuple tuple_;
  std::vector<Vec> translations_;
  double radius_ = 0.0;
  double max_translation_ = 0.0;
};

// Smallest n with delta^n max||a_i|| / (1 - delta) <= eps (0 when all a_i = 0).
int truncation_depth(const IfsInstance& ifs, double eps);
// delta^n max||a_i|| / (1 - delta): distance from f_{x|n}(0) to pi(x).
double coding_error_bound(const IfsInstance& ifs, int n);

// f_{x_1} o ... o f_{x_n}(0) for the finite word x. Throws std::domain_error
// on letters outside the alphabet.
Vec code_point(const IfsInstance& ifs, const Word& x);
// pi^a(x) to accuracy eps; the word must be at least truncation_depth long.
Vec code_point(const IfsInstance& ifs, const Word& x, double eps);

// Points of R^d stored row by row.
struct PointCloud {
  int dim = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  Vec vec(std::size_t i) const { return Vec::from(point(i)); }
  void push_back(const Vec& p) { coords.insert(coords.end(), p.values().begin(), p.values().end()); }
};

// CSV: one row per point, d columns, 17 significant digits, header x1..xd.
void write_point_cloud_csv(std::ostream& out, const PointCloud& cloud);

// n_points i.i.d. samples of mu o (pi^a)^-1, each within eps of its coded
// point. Points are generated in fixed blocks with per-block streams
// derived from `seed`, so the cloud does not depend on the thread count.
PointCloud chaos_sample(const IfsInstance& ifs, const BlockBernoulli& mu, std::size_t n_points, double eps,
                        std::uint64_t seed);

// A finite set whose Hausdorff distance to the attractor is <= eps: the
// Hutchinson iteration S_{k+1} = U_i f_i(S_k) from {0}, with points
// snapped to a grid fine enough that the snapping error stays below eps/2.
// Throws std::runtime_error when the net would exceed max_points.
PointCloud attractor_net(const IfsInstance& ifs, double eps, std::size_t max_points = 20'000'000);

// Nearest-point queries against a fixed cloud (uniform hash grid).
class NearestNeighbor {
 public:
  NearestNeighbor(const PointCloud& cloud, double cell_size);
  // Distance to the closest cloud point; searches outward ring by ring.
  double distance(std::span<const double> p) const;

 private:
  const PointCloud* cloud_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
  std::vector<std::int64_t> lo_, hi_;  // occupied cell index range per axis
  std::uint64_t key(std::span<const std::int64_t> idx) const;
};

}  // namespace affint
