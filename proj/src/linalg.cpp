#include "affint/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace affint {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                                std::to_string(dim));
  }
}

// Singular values of a 2x2 matrix without forming M^T M. The larger one comes
// from the Frobenius norm and |det|; the smaller one as |det| / alpha_1, which
// keeps full relative accuracy even when the matrix is extremely anisotropic.
void singular_values_2x2(const Matrix& m, std::span<double> out) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double det = std::abs(a * d - b * c);
  // ||M||_F^2 +- 2|det| = (a +- d)^2 + (b -+ c)^2 up to sign choices.
  const double p = std::hypot(a + d, b - c);
  const double q = std::hypot(a - d, b + c);
  const double s1 = 0.5 * (p + q);
  out[0] = s1;
  out[1] = s1 > 0.0 ? det / s1 : 0.0;
}

// One-sided Jacobi: orthogonalise the columns of M by plane rotations; the
// column norms are then the singular values.
void singular_values_jacobi(const Matrix& m, std::span<double> out) {
  const int n = m.dim();
  Matrix u = m;
  constexpr int kMaxSweeps = 80;
  constexpr double kEps = 1e-15;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int i = 0; i < n; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < n; ++i) {
          const double up = u(i, p), uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
      }
    }
    if (!rotated) break;
  }
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += u(i, j) * u(i, j);
    out[j] = std::sqrt(s);
  }
  std::sort(out.begin(), out.begin() + n, std::greater<>());
}

}  // namespace

// ---------------------------------------------------------------- Vec

Vec::Vec(int dim) : dim_(dim) { check_dim(dim); }

Vec::Vec(std::initializer_list<double> values) : dim_(static_cast<int>(values.size())) {
  check_dim(dim_);
  std::copy(values.begin(), values.end(), v_.begin());
}

Vec Vec::from(std::span<const double> values) {
  Vec v(static_cast<int>(values.size()));
  std::copy(values.begin(), values.end(), v.v_.begin());
  return v;
}

double Vec::norm() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += v_[i] * v_[i];
  return std::sqrt(s);
}

double Vec::dot(const Vec& other) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += v_[i] * other.v_[i];
  return s;
}

Vec& Vec::operator+=(const Vec& other) {
  for (int i = 0; i < dim_; ++i) v_[i] += other.v_[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& other) {
  for (int i = 0; i < dim_; ++i) v_[i] -= other.v_[i];
  return *this;
}

Vec& Vec::operator*=(double s) {
  for (int i = 0; i < dim_; ++i) v_[i] *= s;
  return *this;
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(int dim) : dim_(dim) { check_dim(dim); }

Matrix Matrix::identity(int dim) {
  Matrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> diag) {
  Matrix m(static_cast<int>(diag.size()));
  int i = 0;
  for (double x : diag) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

Matrix Matrix::from_row_major(int dim, std::span<const double> entries) {
  Matrix m(dim);
  if (entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw std::invalid_argument("expected " + std::to_string(dim * dim) + " entries, got " +
                                std::to_string(entries.size()));
  }
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = entries[r * dim + c];
  return m;
}

Matrix Matrix::rotation(double radians, double scale) {
  Matrix m(2);
  const double c = std::cos(radians), s = std::sin(radians);
  m(0, 0) = scale * c;
  m(0, 1) = -scale * s;
  m(1, 0) = scale * s;
  m(1, 1) = scale * c;
  return m;
}

std::vector<double> Matrix::row_major() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(dim_ * dim_));
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out.push_back((*this)(r, c));
  return out;
}

bool Matrix::all_finite() const {
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      if (!std::isfinite((*this)(r, c))) return false;
  return true;
}

double Matrix::max_abs_entry() const {
  double s = 0.0;
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) s = std::max(s, std::abs((*this)(r, c)));
  return s;
}

Matrix Matrix::transpose() const {
  Matrix t(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::determinant() const {
  if (dim_ == 1) return a_[0];
  if (dim_ == 2) return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
  Matrix lu = *this;
  double det = 1.0;
  for (int k = 0; k < dim_; ++k) {
    int piv = k;
    for (int r = k + 1; r < dim_; ++r)
      if (std::abs(lu(r, k)) > std::abs(lu(piv, k))) piv = r;
    if (lu(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (int c = 0; c < dim_; ++c) std::swap(lu(k, c), lu(piv, c));
      det = -det;
    }
    det *= lu(k, k);
    for (int r = k + 1; r < dim_; ++r) {
      const double f = lu(r, k) / lu(k, k);
      for (int c = k; c < dim_; ++c) lu(r, c) -= f * lu(k, c);
    }
  }
  return det;
}

Matrix Matrix::inverse() const {
  Matrix inv(dim_);
  for (int c = 0; c < dim_; ++c) {
    Vec e(dim_);
    e[c] = 1.0;
    const Vec col = solve(*this, e);
    for (int r = 0; r < dim_; ++r) inv(r, c) = col[r];
  }
  return inv;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) s += (*this)(r, c) * (*this)(r, c);
  return std::sqrt(s);
}

Matrix& Matrix::operator*=(double s) {
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) (*this)(r, c) *= s;
  return *this;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) (*this)(r, c) += other(r, c);
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) (*this)(r, c) -= other(r, c);
  return *this;
}

void multiply_into(const Matrix& a, const Matrix& b, Matrix& out) {
  const int n = a.dim();
  if (&out == &a || &out == &b) throw std::logic_error("multiply_into: output aliases an input");
  if (out.dim() != n) out = Matrix(n);
  if (n == 2) {
    out(0, 0) = a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0);
    out(0, 1) = a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1);
    out(1, 0) = a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0);
    out(1, 1) = a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
    return;
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += a(r, k) * b(k, c);
      out(r, c) = s;
    }
  }
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("matrix dimension mismatch");
  Matrix out(a.dim());
  multiply_into(a, b, out);
  return out;
}

Vec operator*(const Matrix& a, const Vec& x) {
  if (a.dim() != x.dim()) throw std::invalid_argument("matrix/vector dimension mismatch");
  Vec y(a.dim());
  for (int r = 0; r < a.dim(); ++r) {
    double s = 0.0;
    for (int c = 0; c < a.dim(); ++c) s += a(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

Vec solve(const Matrix& a, const Vec& b) {
  const int n = a.dim();
  if (b.dim() != n) throw std::invalid_argument("solve: dimension mismatch");
  Matrix lu = a;
  Vec x = b;
  const double scale = std::max(a.max_abs_entry(), 1e-300);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int r = k + 1; r < n; ++r)
      if (std::abs(lu(r, k)) > std::abs(lu(piv, k))) piv = r;
    if (std::abs(lu(piv, k)) <= 1e-14 * scale) throw std::domain_error("solve: matrix is singular");
    if (piv != k) {
      for (int c = 0; c < n; ++c) std::swap(lu(k, c), lu(piv, c));
      std::swap(x[k], x[piv]);
    }
    for (int r = k + 1; r < n; ++r) {
      const double f = lu(r, k) / lu(k, k);
      for (int c = k; c < n; ++c) lu(r, c) -= f * lu(k, c);
      x[r] -= f * x[k];
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    double s = x[k];
    for (int c = k + 1; c < n; ++c) s -= lu(k, c) * x[c];
    x[k] = s / lu(k, k);
  }
  return x;
}

void singular_values_into(const Matrix& m, std::span<double> out) {
  switch (m.dim()) {
    case 1:
      out[0] = std::abs(m(0, 0));
      return;
    case 2:
      singular_values_2x2(m, out);
      return;
    default:
      singular_values_jacobi(m, out);
  }
}

std::vector<double> singular_values(const Matrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.dim()));
  singular_values_into(m, out);
  return out;
}

double operator_norm(const Matrix& m) {
  std::array<double, kMaxDim> sv{};
  singular_values_into(m, sv);
  return sv[0];
}

double smallest_singular_value(const Matrix& m) {
  std::array<double, kMaxDim> sv{};
  singular_values_into(m, sv);
  return sv[static_cast<std::size_t>(m.dim() - 1)];
}

double commutator_norm(const Matrix& a, const Matrix& b) { return operator_norm(a * b - b * a); }

// ---------------------------------------------------------------- Word

Word::Word(std::initializer_list<int> one_based) {
  letters_.reserve(one_based.size());
  for (int l : one_based) {
    if (l < 1) throw std::domain_error("word letters are one-based");
    letters_.push_back(l - 1);
  }
}

Word Word::from_letters(std::vector<int> zero_based) {
  Word w;
  for (int l : zero_based)
    if (l < 0) throw std::domain_error("negative letter");
  w.letters_ = std::move(zero_based);
  return w;
}

Word Word::parse(const std::string& text) {
  Word w;
  if (text.empty() || text == "-") return w;
  if (text.find('.') != std::string::npos) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, '.')) {
      const int l = std::stoi(item);
      if (l < 1) throw std::domain_error("word letters are one-based: " + text);
      w.letters_.push_back(l - 1);
    }
    return w;
  }
  for (char ch : text) {
    if (ch < '1' || ch > '9') throw std::domain_error("bad word letter in '" + text + "'");
    w.letters_.push_back(ch - '1');
  }
  return w;
}

Word Word::prefix(std::size_t n) const {
  Word w;
  w.letters_.assign(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(std::min(n, size())));
  return w;
}

Word& Word::operator+=(const Word& other) {
  letters_.insert(letters_.end(), other.letters_.begin(), other.letters_.end());
  return *this;
}

std::string Word::to_string() const {
  const bool digits = std::all_of(letters_.begin(), letters_.end(), [](int l) { return l < 9; });
  std::string s;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (!digits && i > 0) s += '.';
    s += digits ? std::string(1, static_cast<char>('1' + letters_[i])) : std::to_string(letters_[i] + 1);
  }
  return s;
}

Word longest_common_prefix(const Word& x, const Word& y) {
  std::size_t n = 0;
  while (n < x.size() && n < y.size() && x[n] == y[n]) ++n;
  return x.prefix(n);
}

Word shift_word(const Word& x, std::size_t n) {
  if (n > x.size()) {
    throw std::domain_error("shift by " + std::to_string(n) + " exceeds word length " +
                            std::to_string(x.size()));
  }
  std::vector<int> rest(x.letters().begin() + static_cast<std::ptrdiff_t>(n), x.letters().end());
  return Word::from_letters(std::move(rest));
}

// ---------------------------------------------------------------- MapTuple

MapTuple::MapTuple(std::vector<Matrix> maps) : maps_(std::move(maps)) {
  if (maps_.empty()) throw std::invalid_argument("a map tuple needs at least one matrix");
  dim_ = maps_.front().dim();
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const Matrix& t = maps_[i];
    const std::string which = "map " + std::to_string(i + 1);
    if (t.dim() != dim_) throw std::invalid_argument(which + ": dimension mismatch");
    if (!t.all_finite()) throw std::invalid_argument(which + ": non-finite entry");
    const double det = std::abs(t.determinant());
    const double scale = t.max_abs_entry();
    if (!(det > 1e-12 * std::pow(scale, dim_)) || scale == 0.0) {
      throw std::invalid_argument(which + ": matrix is singular");
    }
    norms_.push_back(operator_norm(t));
    abs_dets_.push_back(det);
  }
  delta_ = *std::max_element(norms_.begin(), norms_.end());
}

Matrix word_product(const MapTuple& tuple, const Word& word) {
  Matrix acc = Matrix::identity(tuple.dim());
  Matrix tmp(tuple.dim());
  for (int letter : word.letters()) {
    if (letter < 0 || letter >= tuple.size()) {
      throw std::domain_error("letter " + std::to_string(letter + 1) + " outside alphabet of size " +
                              std::to_string(tuple.size()));
    }
    multiply_into(acc, tuple[letter], tmp);
    std::swap(acc, tmp);
  }
  return acc;
}

}  // namespace affint
