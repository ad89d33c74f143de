#include "affint/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "affint/dimension.hpp"
#include "affint/parallel.hpp"
#include "affint/quadrature.hpp"
#include "affint/random.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace affint {

namespace {

constexpr std::size_t kPointBlock = 65536;

// Sum of exp(-i <xi, x>) over points [begin, end), in fixed block order.
std::complex<double> phase_sum(const PointCloud& cloud, const Vec& xi, std::size_t begin, std::size_t end) {
  const int d = cloud.dim;
  double re = 0.0, im = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double* p = cloud.coords.data() + i * d;
    double phase = 0.0;
    for (int j = 0; j < d; ++j) phase += xi[j] * p[j];
    re += std::cos(phase);
    im -= std::sin(phase);
  }
  return {re, im};
}

std::complex<double> blocked_mean(const PointCloud& cloud, const Vec& xi, std::size_t begin, std::size_t end) {
  std::complex<double> total = 0.0;
  for (std::size_t b = begin; b < end; b += kPointBlock) total += phase_sum(cloud, xi, b, std::min(end, b + kPointBlock));
  return total / static_cast<double>(end - begin);
}

}  // namespace

FourierEstimate fourier_mc(const PointCloud& cloud, const Vec& xi) {
  const std::size_t n = cloud.size();
  if (n == 0) throw std::domain_error("fourier_mc: empty cloud");
  if (xi.dim() != cloud.dim) throw std::invalid_argument("fourier_mc: frequency dimension differs from cloud");
  const std::size_t blocks = (n + kPointBlock - 1) / kPointBlock;
  std::vector<std::complex<double>> parts(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    parts[b] = phase_sum(cloud, xi, b * kPointBlock, std::min(n, (b + 1) * kPointBlock));
  });
  std::complex<double> total = 0.0;
  for (const auto& p : parts) total += p;
  FourierEstimate est;
  est.n = n;
  est.value = total / static_cast<double>(n);
  est.stderr_ = std::sqrt(std::max(0.0, 1.0 - std::norm(est.value)) / static_cast<double>(n));
  return est;
}

double sphere_surface(int d) {
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

namespace {

Vec random_direction(int d, Rng& rng) {
  Vec u(d);
  if (d == 1) {
    u[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return u;
  }
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (int j = 0; j < d; ++j) {
      u[j] = rng.normal();
      n2 += u[j] * u[j];
    }
  } while (n2 == 0.0);
  return (1.0 / std::sqrt(n2)) * u;
}

AnnulusEstimate annulus_estimate(const PointCloud& cloud, double s, double a, double b, std::size_t n_freq,
                                 std::uint64_t seed, std::uint64_t index) {
  const int d = cloud.dim;
  Rng rng = Rng::stream(seed, index);
  std::vector<Vec> freqs;
  freqs.reserve(n_freq);
  const double as = std::pow(a, s), bs = std::pow(b, s);
  for (std::size_t k = 0; k < n_freq; ++k) {
    const double r = std::pow(as + rng.uniform() * (bs - as), 1.0 / s);
    freqs.push_back(r * random_direction(d, rng));
  }
  const std::size_t half = cloud.size() / 2;
  std::vector<double> est(n_freq);
  parallel_for(n_freq, [&](std::size_t k) {
    const auto mA = blocked_mean(cloud, freqs[k], 0, half);
    const auto mB = blocked_mean(cloud, freqs[k], half, 2 * half);
    est[k] = (mA * std::conj(mB)).real();
  });
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= static_cast<double>(n_freq);
  double var = 0.0;
  for (double e : est) var += (e - mean) * (e - mean);
  var /= static_cast<double>(std::max<std::size_t>(1, n_freq - 1));
  const double W = sphere_surface(d) * (bs - as) / s;
  AnnulusEstimate out;
  out.inner = a;
  out.outer = b;
  out.value = std::max(0.0, W * mean);
  out.stderr_ = W * std::sqrt(var / static_cast<double>(n_freq));
  return out;
}

}  // namespace

EnergyEstimate truncated_energy(const PointCloud& cloud, double s, double R, std::size_t n_freq, std::uint64_t seed) {
  if (!(s > 0.0)) throw std::domain_error("truncated_energy: s must be > 0");
  if (!(R > 0.0)) throw std::domain_error("truncated_energy: R must be > 0");
  if (n_freq < 2) throw std::domain_error("truncated_energy: need at least 2 frequencies per annulus");
  if (cloud.size() < 2) throw std::domain_error("truncated_energy: need at least 2 points");
  EnergyEstimate e;
  e.s = s;
  e.R = R;
  e.n_points = cloud.size();
  double lo = 0.0, hi = 1.0;
  double var = 0.0;
  for (std::uint64_t k = 0; lo < R; ++k) {
    const AnnulusEstimate an = annulus_estimate(cloud, s, lo, std::min(hi, R), n_freq, seed, k);
    e.annuli.push_back(an);
    e.value += an.value;
    var += an.stderr_ * an.stderr_;
    e.n_freq += n_freq;
    lo = hi;
    hi *= 2.0;
  }
  e.stderr_ = std::sqrt(var);
  return e;
}

SobolevScan sobolev_scan(const PointCloud& cloud, const std::vector<double>& s_values, double R_max,
                         std::size_t n_freq, std::uint64_t seed) {
  SobolevScan scan;
  for (double s : s_values) {
    const EnergyEstimate full = truncated_energy(cloud, s, R_max, n_freq, seed);
    SobolevCurve curve;
    curve.s = s;
    // Prefixes of the annulus list are the estimates for the smaller cutoffs.
    EnergyEstimate acc = full;
    acc.annuli.clear();
    acc.value = 0.0;
    acc.n_freq = 0;
    double var = 0.0;
    for (const auto& an : full.annuli) {
      acc.annuli.push_back(an);
      acc.value += an.value;
      var += an.stderr_ * an.stderr_;
      acc.stderr_ = std::sqrt(var);
      acc.n_freq += n_freq;
      acc.R = an.outer;
      curve.points.push_back(acc);
    }
    if (curve.points.size() >= 2) {
      const auto& last = curve.points.back();
      const auto& prev = curve.points[curve.points.size() - 2];
      curve.stable = last.value - prev.value <= 0.1 * last.value + 2.0 * last.annuli.back().stderr_;
    }
    if (curve.stable && (!scan.estimate || s > *scan.estimate)) scan.estimate = s;
    scan.curves.push_back(std::move(curve));
  }
  return scan;
}

double BumpFunction::radial(double r) const {
  if (profile == Profile::Standard) {
    const double u = r / radius;
    const double gap = 1.0 - u * u;
    if (gap <= 1e-300) return 0.0;
    const double expo = 1.0 - 1.0 / gap;
    return expo < -700.0 ? 0.0 : std::exp(expo);
  }
  // Smooth step between radius and 2 radius.
  auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double u = r / radius;
  if (u <= 1.0) return 1.0;
  if (u >= 2.0) return 0.0;
  const double up = f(2.0 - u), down = f(u - 1.0);
  return up / (up + down);
}

double BumpFunction::operator()(std::span<const double> x) const {
  double r2 = 0.0;
  for (int j = 0; j < center.dim(); ++j) r2 += (x[j] - center[j]) * (x[j] - center[j]);
  return radial(std::sqrt(r2));
}

std::vector<Matrix> difference_coefficients(const MapTuple& tuple, const Word& x, const Word& y) {
  const int d = tuple.dim();
  std::vector<Matrix> U(static_cast<std::size_t>(tuple.size()), Matrix(d));
  auto accumulate = [&](const Word& w, double sign) {
    Matrix prefix = Matrix::identity(d), tmp;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const int j = w[k];
      if (j < 0 || j >= tuple.size()) throw std::domain_error("difference_coefficients: letter outside alphabet");
      Matrix term = prefix;
      term *= sign;
      U[static_cast<std::size_t>(j)] += term;
      multiply_into(prefix, tuple[j], tmp);
      prefix = tmp;
    }
  };
  accumulate(x, 1.0);
  accumulate(y, -1.0);
  return U;
}

namespace {

double gradient_norm(const std::vector<Matrix>& U, const Vec& v) {
  const int d = v.dim();
  double s = 0.0;
  for (const Matrix& u : U) {
    for (int c = 0; c < d; ++c) {
      double e = 0.0;
      for (int r = 0; r < d; ++r) e += v[r] * u(r, c);
      s += e * e;
    }
  }
  return std::sqrt(s);
}

}  // namespace

MapTuple random_contractions(int d, int m, double delta, std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("random_contractions: delta must lie in (0, 1)");
  Rng rng(seed);
  std::vector<Matrix> maps;
  for (int i = 0; i < m; ++i) {
    Matrix a(d);
    double sv_min = 0.0;
    do {
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = rng.normal();
      sv_min = smallest_singular_value(a) / operator_norm(a);
    } while (sv_min < 1e-3);
    const double target = i == 0 ? delta : rng.uniform(0.5 * delta, delta);
    a *= target / operator_norm(a);
    maps.push_back(a);
  }
  return MapTuple(std::move(maps));
}

GradientReport verify_gradient_bound(const MapTuple& tuple, std::uint64_t trials, int depth, std::uint64_t seed) {
  const double delta = tuple.delta();
  if (!(delta < 0.5)) throw std::domain_error("verify_gradient_bound: needs max ||T_i|| < 1/2");
  if (tuple.size() < 2) throw std::domain_error("verify_gradient_bound: needs at least two maps");
  if (depth < 0) throw std::domain_error("verify_gradient_bound: negative depth");
  const int d = tuple.dim();
  const int m = tuple.size();
  GradientReport report;
  report.delta = delta;
  report.depth = depth;
  report.trials = trials;
  report.bound = (1.0 - 2.0 * delta) / (1.0 - delta);
  report.truncation = 2.0 * std::pow(delta, depth + 1) / (1.0 - delta);
  const double threshold = report.bound - report.truncation;

  struct Trial {
    Word x, y;
    std::vector<Vec> a;
    Vec v;
  };
  auto draw = [&](Rng& rng) {
    Trial t;
    std::vector<int> xs(static_cast<std::size_t>(depth) + 1), ys(static_cast<std::size_t>(depth) + 1);
    xs[0] = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    ys[0] = static_cast<int>(rng.below(static_cast<std::uint64_t>(m - 1)));
    if (ys[0] >= xs[0]) ++ys[0];
    for (int k = 1; k <= depth; ++k) {
      xs[k] = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
      ys[k] = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    }
    t.x = Word::from_letters(std::move(xs));
    t.y = Word::from_letters(std::move(ys));
    for (int i = 0; i < m; ++i) {
      Vec a(d);
      for (int j = 0; j < d; ++j) a[j] = rng.normal();
      t.a.push_back(a);
    }
    t.v = random_direction(d, rng);
    return t;
  };

  constexpr std::uint64_t kBlock = 256;
  struct Part {
    double min_grad = std::numeric_limits<double>::infinity();
    std::uint64_t failures = 0;
    Word x, y;
  };
  std::vector<Part> parts((trials + kBlock - 1) / kBlock);
  parallel_for(parts.size(), [&](std::size_t b) {
    Rng rng = Rng::stream(seed, b);
    const std::uint64_t end = std::min(trials, (b + 1) * kBlock);
    for (std::uint64_t i = b * kBlock; i < end; ++i) {
      const Trial t = draw(rng);
      const double g = gradient_norm(difference_coefficients(tuple, t.x, t.y), t.v);
      if (!(g >= threshold)) ++parts[b].failures;
      if (g < parts[b].min_grad) {
        parts[b].min_grad = g;
        parts[b].x = t.x;
        parts[b].y = t.y;
      }
    }
  });
  report.min_gradient = std::numeric_limits<double>::infinity();
  for (const auto& p : parts) {
    report.failures += p.failures;
    if (p.min_grad < report.min_gradient) {
      report.min_gradient = p.min_grad;
      report.witness_x = p.x;
      report.witness_y = p.y;
    }
  }

  // Central differences in a for one fresh trial.
  Rng rng = Rng::stream(seed, 0xfdfdfdULL);
  Trial t = draw(rng);
  const std::vector<Matrix> U = difference_coefficients(tuple, t.x, t.y);
  auto F = [&](const std::vector<Vec>& a) {
    IfsInstance ifs(tuple, a);
    const Vec diff = code_point(ifs, t.x) - code_point(ifs, t.y);
    return t.v.dot(diff);
  };
  const double h = 1e-5;
  double fd2 = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < d; ++c) {
      std::vector<Vec> ap = t.a, am = t.a;
      ap[static_cast<std::size_t>(i)][c] += h;
      am[static_cast<std::size_t>(i)][c] -= h;
      const double fd = (F(ap) - F(am)) / (2.0 * h);
      double exact = 0.0;
      for (int r = 0; r < d; ++r) exact += t.v[r] * U[static_cast<std::size_t>(i)](r, c);
      report.fd_max_abs_diff = std::max(report.fd_max_abs_diff, std::abs(fd - exact));
      fd2 += fd * fd;
    }
  }
  report.fd_gradient = std::sqrt(fd2);
  report.exact_gradient = gradient_norm(U, t.v);
  report.fd_ok = report.fd_max_abs_diff <= 1e-6;
  report.pass = report.failures == 0 && report.fd_ok;
  return report;
}

namespace {

// Integral over (0, inf) of (1 + u)^{-N} u^{p-1}: with u = v / (1 - v) it is
// the integral of v^{p-1} (1 - v)^{N-p-1} over (0, 1).
QuadResult radial_integral(double p, double N) {
  return integrate_singular([&](double v) { return std::pow(v, p - 1.0) * std::pow(1.0 - v, N - p - 1.0); }, 0.0, 1.0);
}

// Integral over the unit sphere of ||T w||^{-p}, in the singular basis.
QuadResult angular_integral(const Matrix& T, double p, std::uint64_t seed) {
  const int d = T.dim();
  const std::vector<double> sv = singular_values(T);
  if (d == 1) return {2.0 * std::pow(sv[0], -p), 0.0};
  if (d == 2) {
    // 4 times the quarter circle; the integrand peaks at phi = 0 with width
    // alpha_2 / alpha_1, so breakpoints are placed geometrically from there.
    const double a1 = sv[0], a2 = sv[1];
    auto f = [&](double phi) {
      const double s = std::sin(phi), c = std::cos(phi);
      return std::pow(a1 * a1 * s * s + a2 * a2 * c * c, -p / 2.0);
    };
    std::vector<double> cuts{0.0};
    for (double w = a2 / a1; w < std::numbers::pi / 2; w *= 8.0) cuts.push_back(w);
    cuts.push_back(std::numbers::pi / 2);
    QuadResult total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const QuadResult q = integrate(f, cuts[i], cuts[i + 1], 1e-12);
      total.value += 4.0 * q.value;
      total.error += 4.0 * q.error;
    }
    return total;
  }
  const std::size_t n = 1'000'000;
  Rng rng(seed);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec w = random_direction(d, rng);
    double q2 = 0.0;
    for (int j = 0; j < d; ++j) q2 += sv[static_cast<std::size_t>(j)] * sv[static_cast<std::size_t>(j)] * w[j] * w[j];
    const double val = std::pow(q2, -p / 2.0);
    sum += val;
    sum2 += val * val;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  const double S = sphere_surface(d);
  return {S * mean, S * std::sqrt(var / n)};
}

PropReport homogeneous_integral(const Matrix& T, double p, double N, double normalizer, std::uint64_t seed) {
  PropReport r;
  const QuadResult ang = angular_integral(T, p, seed);
  const QuadResult rad = radial_integral(p, N);
  r.angular = ang.value;
  r.radial = rad.value;
  r.lhs = ang.value * rad.value;
  r.normalizer = normalizer;
  r.ratio = r.lhs * normalizer;
  r.rel_error = ang.error / std::abs(ang.value) + rad.error / std::abs(rad.value);
  return r;
}

}  // namespace

PropReport verify_prop_t(const Matrix& T, double t, double N, std::uint64_t seed) {
  const int d = T.dim();
  if (!(t >= 0.0)) throw std::domain_error("verify_prop_t: t must be >= 0");
  if (!(N > t + d)) throw std::domain_error("verify_prop_t: needs N > t + d");
  const double det = std::abs(T.determinant());
  if (!(det > 0.0)) throw std::domain_error("verify_prop_t: T must be invertible");
  // x = rho w: the integrand is (1 + rho ||T w||)^{-N} rho^{t + d - 1}.
  return homogeneous_integral(T, t + d, N, std::pow(smallest_singular_value(T), t) * det, seed);
}

PropReport verify_prop_tds(const Matrix& T, double t, double N, std::uint64_t seed) {
  const int d = T.dim();
  if (!(t > 0.0 && t < d)) throw std::domain_error("verify_prop_tds: t must lie in (0, d)");
  if (std::abs(t - std::round(t)) < 1e-12) throw std::domain_error("verify_prop_tds: t must not be an integer");
  if (!(N > t)) throw std::domain_error("verify_prop_tds: needs N > t");
  if (!(std::abs(T.determinant()) > 0.0)) throw std::domain_error("verify_prop_tds: T must be invertible");
  return homogeneous_integral(T, t, N, phi_s(T, t), seed);
}

ReduceReport verify_reduce_integral(const Vec& x, double s) {
  if (!(s > 1.0)) throw std::domain_error("verify_reduce_integral: s must be > 1");
  double A = 0.0, B = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    A += std::pow(std::abs(x[i]), s);
    B += std::pow(std::abs(x[i]), s - 1.0);
  }
  if (!(A > 0.0)) throw std::domain_error("verify_reduce_integral: x must be non-zero");
  // y = A^{1/s} u, then u = v / (1 - v).
  const QuadResult core = integrate_singular(
      [&](double v) {
        const double w = 1.0 - v;
        return std::pow(w, s - 2.0) / (std::pow(w, s) + std::pow(v, s));
      },
      0.0, 1.0);
  ReduceReport r;
  r.integral = 2.0 * std::pow(A, 1.0 / s - 1.0) * core.value;
  r.rhs = 1.0 / B;
  r.ratio = r.integral / r.rhs;
  return r;
}

namespace {

Word periodic(const Word& w, std::size_t length) {
  std::vector<int> letters(length);
  for (std::size_t i = 0; i < length; ++i) letters[i] = w[i % w.size()];
  return Word::from_letters(std::move(letters));
}

}  // namespace

PhaseReport verify_stationary_phase_small(const MapTuple& tuple, const BumpFunction& psi, const Word& x,
                                          const Word& y, const std::vector<double>& xis, int N) {
  if (tuple.dim() != 1) throw std::domain_error("stationary phase check: d must be 1");
  if (tuple.size() > 3) throw std::domain_error("stationary phase check: m must be <= 3");
  if (psi.center.dim() != tuple.size()) throw std::invalid_argument("stationary phase check: bump must live in R^m");
  if (x.empty() || y.empty()) throw std::domain_error("stationary phase check: empty word");
  const int m = tuple.size();
  const double delta = tuple.delta();
  std::size_t length = std::max(x.size(), y.size()) * 4;
  while (std::pow(delta, static_cast<double>(length)) / (1.0 - delta) > 1e-14) length += std::max(x.size(), y.size());
  const Word X = periodic(x, length), Y = periodic(y, length);
  if (X == Y) throw std::domain_error("stationary phase check: x and y code the same sequence");
  const Word common = longest_common_prefix(X, Y);
  const double T_common = std::abs(word_product(tuple, common)(0, 0));

  // The phase xi <c, a> is linear in a; with u = c / |c| the integral is the
  // 1-D transform of the slice integral g(s) of psi over {<u, a - center> = s}.
  const std::vector<Matrix> U = difference_coefficients(tuple, X, Y);
  double cnorm = 0.0;
  for (const Matrix& u : U) cnorm += u(0, 0) * u(0, 0);
  cnorm = std::sqrt(cnorm);
  const double S = psi.support_radius();
  auto slice = [&](double s) {
    const double h = std::sqrt(std::max(0.0, S * S - s * s));
    if (m == 1) return psi.radial(std::abs(s));
    if (h == 0.0) return 0.0;
    auto inner = [&](double r) {
      const double w = psi.radial(std::sqrt(s * s + r * r));
      return m == 2 ? 2.0 * w : 2.0 * std::numbers::pi * r * w;
    };
    return integrate(inner, 0.0, h, 1e-12, 10).value;
  };

  PhaseReport report;
  report.gradient_norm = cnorm;
  report.common_prefix = static_cast<int>(common.size());
  report.bump_mass = 2.0 * integrate_panels(slice, 0.0, S, 8, 1e-12).value;
  // The slice does not depend on xi: tabulate it once at Gauss-Legendre
  // nodes on panels fine enough for the largest frequency of the sweep.
  using Rule = boost::math::quadrature::gauss<double, 30>;
  double lambda_max = 0.0;
  for (double xi : xis) lambda_max = std::max(lambda_max, std::abs(xi) * cnorm);
  const int panels = std::max(8, static_cast<int>(std::ceil(lambda_max * S / std::numbers::pi)));
  const double width = S / panels;
  std::vector<double> nodes, weights;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * width;
    auto add = [&](double z, double w) {
      nodes.push_back(mid + 0.5 * width * z);
      weights.push_back(0.5 * width * w);
    };
    const auto& z = Rule::abscissa();
    const auto& w = Rule::weights();
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (z[i] == 0.0) {
        add(0.0, w[i]);
        continue;
      }
      add(z[i], w[i]);
      add(-z[i], w[i]);
    }
  }
  std::vector<double> g(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { g[i] = slice(nodes[i]) * weights[i]; });

  for (double xi : xis) {
    const double lambda = std::abs(xi) * cnorm;
    double I = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) I += g[i] * std::cos(lambda * nodes[i]);
    I *= 2.0;
    PhasePoint p;
    p.xi = xi;
    p.modulus = std::abs(I);
    p.scaled_xi = T_common * std::abs(xi);
    p.normalized = p.modulus * std::pow(1.0 + p.scaled_xi, N);
    report.points.push_back(p);
    report.max_normalized = std::max(report.max_normalized, p.normalized);
    if (report.onset_xi == 0.0 && p.modulus <= 0.5 * report.bump_mass) report.onset_xi = xi;
  }
  if (!xis.empty()) {
    const double lo = std::abs(xis.front()) * 10.0, hi = std::abs(xis.back()) / 10.0;
    double first = 0.0, last = 0.0;
    for (const auto& p : report.points) {
      if (std::abs(p.xi) <= lo) first = std::max(first, p.normalized);
      if (std::abs(p.xi) >= hi) last = std::max(last, p.normalized);
    }
    report.bounded = last <= first * (1.0 + 1e-9);
  }
  return report;
}

void write_energy_csv(std::ostream& out, const SobolevCurve& curve) {
  out << "parameter,value,stderr\n";
  char buf[96];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.R, p.value, p.stderr_);
    out << buf;
  }
}

}  // namespace affint
