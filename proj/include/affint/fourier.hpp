#pragma once

// Monte-Carlo Fourier transforms and truncated Sobolev energies of sampled
// measures, and numerical checks of the integral inequalities behind the
// main theorem (gradient bound, decay of the oscillatory integral, the two
// anisotropic integral estimates and the one-dimensional reduction).

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affint/geometry.hpp"

namespace affint {

struct FourierEstimate {
  std::complex<double> value;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

// Empirical mean of exp(-i <xi, x>) over the cloud; stderr is
// sqrt((1 - |mean|^2) / n). Throws std::domain_error on an empty cloud.
FourierEstimate fourier_mc(const PointCloud& cloud, const Vec& xi);

// Surface area of the unit sphere in R^d.
double sphere_surface(int d);

struct AnnulusEstimate {
  double inner = 0.0, outer = 0.0;
  double value = 0.0;  // clamped at 0
  double stderr_ = 0.0;
};

struct EnergyEstimate {
  double s = 0.0;
  double R = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n_freq = 0;    // frequencies drawn in total
  std::size_t n_points = 0;
  std::vector<AnnulusEstimate> annuli;
};

// Estimates the integral of |mu^(xi)|^2 ||xi||^{s-d} over ||xi|| <= R.
// Frequencies are drawn in the annuli [0,1], [1,2], [2,4], ... (the last one
// cut at R), n_freq per annulus, with radial density proportional to
// r^{s-1}; the stream for annulus k depends only on (seed, k), so estimates
// for nested R share their samples. |mu^|^2 is estimated by the product of
// the transforms of the two half-clouds. Each annulus contribution is
// clamped at 0, which keeps the estimate non-decreasing in R.
EnergyEstimate truncated_energy(const PointCloud& cloud, double s, double R, std::size_t n_freq, std::uint64_t seed);

struct SobolevCurve {
  double s = 0.0;
  std::vector<EnergyEstimate> points;  // R = 1, 2, 4, ..., R_max
  bool stable = false;                 // last doubling adds <= 10% (within 2 stderr)
};

struct SobolevScan {
  std::vector<SobolevCurve> curves;
  std::optional<double> estimate;  // largest stable s; empty: "no stable s found"
};

SobolevScan sobolev_scan(const PointCloud& cloud, const std::vector<double>& s_values, double R_max,
                         std::size_t n_freq, std::uint64_t seed);

// Smooth compactly supported bump on R^n.
struct BumpFunction {
  enum class Profile {
    Standard,  // exp(1 - 1/(1 - |x-c|^2/rho^2)) on the ball, 1 at the center
    Plateau,   // 1 on B(c, rho), smooth descent to 0 at radius 2 rho
  };
  Vec center;
  double radius = 1.0;
  Profile profile = Profile::Standard;

  double operator()(std::span<const double> x) const;
  // Value as a function of the distance to the center.
  double radial(double r) const;
  double support_radius() const { return profile == Profile::Standard ? radius : 2.0 * radius; }
};

// Coefficient matrices U_j with pi^a(x) - pi^a(y) = sum_j U_j a_j, for the
// finite words x, y (f_x(0) - f_y(0)).
std::vector<Matrix> difference_coefficients(const MapTuple& tuple, const Word& x, const Word& y);

// m random d x d matrices (Gaussian entries, rescaled) with max norm exactly
// delta: the first has norm delta, the others norms uniform in [delta/2, delta].
MapTuple random_contractions(int d, int m, double delta, std::uint64_t seed);

struct GradientReport {
  double delta = 0.0;
  int depth = 0;
  std::uint64_t trials = 0;
  double bound = 0.0;             // (1 - 2 delta) / (1 - delta)
  double truncation = 0.0;        // 2 delta^{depth+1} / (1 - delta)
  double min_gradient = 0.0;
  std::uint64_t failures = 0;
  Word witness_x, witness_y;      // worst trial
  double fd_gradient = 0.0;       // finite-difference norm on the first trial
  double exact_gradient = 0.0;
  double fd_max_abs_diff = 0.0;
  bool fd_ok = false;
  bool pass = false;
};

// Random a (standard normal), unit v, words x, y of length depth + 1 with
// x_1 != y_1. Throws std::domain_error unless delta < 1/2.
GradientReport verify_gradient_bound(const MapTuple& tuple, std::uint64_t trials, int depth, std::uint64_t seed);

struct PropReport {
  double angular = 0.0;     // integral over the sphere of ||T w||^{-p}
  double radial = 0.0;      // integral over (0, inf) of (1 + u)^{-N} u^{p-1}
  double lhs = 0.0;         // angular * radial
  double normalizer = 0.0;  // alpha_d^t |det T|, or phi^t(T)
  double ratio = 0.0;       // lhs * normalizer
  double rel_error = 0.0;   // quadrature error estimate
};

// Integral of (1 + ||Tx||)^{-N} ||x||^t over R^d. Throws std::domain_error
// unless N > t + d and t >= 0; d <= 2 deterministic, d >= 3 Monte Carlo on
// the sphere with `seed`.
PropReport verify_prop_t(const Matrix& T, double t, double N, std::uint64_t seed = 1);

// Integral of (1 + ||Tx||)^{-N} ||x||^{t-d}; t in (0, d) non-integer, N > t.
PropReport verify_prop_tds(const Matrix& T, double t, double N, std::uint64_t seed = 1);

struct ReduceReport {
  double integral = 0.0;
  double rhs = 0.0;  // 1 / sum |x_i|^{s-1}
  double ratio = 0.0;
};

// Integral over R of dy / (sum |x_i|^s + |y|^s). Throws std::domain_error
// for x = 0 or s <= 1.
ReduceReport verify_reduce_integral(const Vec& x, double s);

struct PhasePoint {
  double xi = 0.0;
  double modulus = 0.0;     // |integral|
  double scaled_xi = 0.0;   // ||T*_{x^y} xi||
  double normalized = 0.0;  // modulus * (1 + scaled_xi)^N
};

struct PhaseReport {
  double bump_mass = 0.0;   // integral of psi
  double gradient_norm = 0.0;
  int common_prefix = 0;
  std::vector<PhasePoint> points;
  double max_normalized = 0.0;
  // First xi in the sweep with |integral| <= bump_mass / 2 (0 if none).
  double onset_xi = 0.0;
  // The normalized values over the last decade of the sweep stay below the
  // maximum over its first decade.
  bool bounded = false;
};

// d = 1, m <= 3. Words are extended periodically until the tail of the
// coding series is below 1e-14.
PhaseReport verify_stationary_phase_small(const MapTuple& tuple, const BumpFunction& psi, const Word& x,
                                          const Word& y, const std::vector<double>& xis, int N);

// CSV with columns parameter,value,stderr; parameter is the cutoff R.
void write_energy_csv(std::ostream& out, const SobolevCurve& curve);

}  // namespace affint
