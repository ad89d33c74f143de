#include "affint/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <stdexcept>

namespace affint {

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, unsigned max_depth) {
  QuadResult r;
  double l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, rel_tol, &r.error, &l1);
  if (!std::isfinite(r.value)) throw std::runtime_error("quadrature: non-finite result");
  return r;
}

QuadResult integrate_singular(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  QuadResult r;
  auto g = [&f](double x) { return f(x); };
  r.value = rule.integrate(g, a, b, rel_tol, &r.error);
  if (!std::isfinite(r.value)) throw std::runtime_error("quadrature: non-finite result");
  return r;
}

QuadResult integrate_panels(const std::function<double(double)>& f, double a, double b, int panels, double rel_tol) {
  if (panels < 1) throw std::invalid_argument("quadrature: panels must be >= 1");
  QuadResult total;
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = i + 1 == panels ? b : a + (i + 1) * h;
    const QuadResult p = integrate(f, lo, hi, rel_tol, 8);
    total.value += p.value;
    total.error += p.error;
  }
  return total;
}

}  // namespace affint
