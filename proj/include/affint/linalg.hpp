#pragma once

// Small dense matrices, singular values and symbolic words.
//
// Everything here is sized for the iterated-function-system use case: d is
// tiny (1..8) and products are formed billions of times, so Matrix and Vec
// keep their entries inline and never allocate.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace affint {

inline constexpr int kMaxDim = 8;

class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim);
  Vec(std::initializer_list<double> values);
  static Vec from(std::span<const double> values);

  int dim() const { return dim_; }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }
  std::span<const double> values() const { return {v_.data(), static_cast<std::size_t>(dim_)}; }

  double norm() const;
  double dot(const Vec& other) const;

  Vec& operator+=(const Vec& other);
  Vec& operator-=(const Vec& other);
  Vec& operator*=(double s);
  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }

 private:
  int dim_ = 0;
  std::array<double, kMaxDim> v_{};
};

class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int dim);  // zero matrix

  static Matrix identity(int dim);
  static Matrix diagonal(std::initializer_list<double> diag);
  static Matrix from_row_major(int dim, std::span<const double> entries);
  // s times the counter-clockwise rotation by `radians` (d = 2).
  static Matrix rotation(double radians, double scale = 1.0);

  int dim() const { return dim_; }
  double operator()(int r, int c) const { return a_[r * kMaxDim + c]; }
  double& operator()(int r, int c) { return a_[r * kMaxDim + c]; }

  std::vector<double> row_major() const;
  bool all_finite() const;
  double max_abs_entry() const;

  Matrix transpose() const;
  double determinant() const;
  Matrix inverse() const;
  double frobenius_norm() const;

  Matrix& operator*=(double s);
  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

 private:
  int dim_ = 0;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vec operator*(const Matrix& a, const Vec& x);

// out = a * b without temporaries; `out` must not alias a or b.
void multiply_into(const Matrix& a, const Matrix& b, Matrix& out);

// Solves a x = b by Gaussian elimination with partial pivoting.
// Throws std::domain_error when a is numerically singular.
Vec solve(const Matrix& a, const Vec& b);

// Descending singular values alpha_1 >= ... >= alpha_d.
std::vector<double> singular_values(const Matrix& m);
// Same, written into `out` (size >= dim); for hot loops.
void singular_values_into(const Matrix& m, std::span<double> out);
double operator_norm(const Matrix& m);
double smallest_singular_value(const Matrix& m);

// ||ab - ba||, operator norm.
double commutator_norm(const Matrix& a, const Matrix& b);

// A finite word over the alphabet {0, ..., m-1}. Letters are stored
// zero-based; to_string/parse use the one-based convention of the maths
// ("12" is letter 1 then letter 2).
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> one_based);
  static Word from_letters(std::vector<int> zero_based);
  // "112" (digits, one-based) or "1.12.3" (dot separated, for m > 9).
  static Word parse(const std::string& text);

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  int operator[](std::size_t i) const { return letters_[i]; }
  std::span<const int> letters() const { return letters_; }

  Word prefix(std::size_t n) const;
  void push_back(int zero_based) { letters_.push_back(zero_based); }
  Word& operator+=(const Word& other);
  friend Word operator+(Word a, const Word& b) { return a += b; }

  std::string to_string() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  std::vector<int> letters_;
};

Word longest_common_prefix(const Word& x, const Word& y);
// Drops the first n letters; throws std::domain_error when n > |x|.
Word shift_word(const Word& x, std::size_t n);

// The ordered tuple (T_1, ..., T_m) of contracting invertible matrices.
class MapTuple {
 public:
  // Throws std::invalid_argument on empty input, mixed dimensions,
  // non-finite entries or a numerically singular map.
  explicit MapTuple(std::vector<Matrix> maps);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(maps_.size()); }
  const Matrix& operator[](int i) const { return maps_[i]; }
  const std::vector<Matrix>& maps() const { return maps_; }

  // max_i ||T_i||
  double delta() const { return delta_; }
  double norm(int i) const { return norms_[i]; }
  double abs_det(int i) const { return abs_dets_[i]; }

 private:
  std::vector<Matrix> maps_;
  std::vector<double> norms_;
  std::vector<double> abs_dets_;
  int dim_ = 0;
  double delta_ = 0.0;
};

// T_{i_1} ... T_{i_n}; identity for the empty word.
// Throws std::domain_error on a letter outside the alphabet.
Matrix word_product(const MapTuple& tuple, const Word& word);

// Depth-first walk of the word tree rooted at `prefix`, carrying the
// product T_I down the tree. `visit(letters, product)` is called for every
// node of depth |prefix| .. |prefix| + max_extra (pre-order, lexicographic);
// returning false skips that node's subtree.
template <class Visit>
void walk_words(const MapTuple& tuple, int max_extra, Visit&& visit, const Word& prefix = {}) {
  const int m = tuple.size();
  std::vector<int> letters(prefix.letters().begin(), prefix.letters().end());
  const std::size_t base = letters.size();
  std::vector<Matrix> products(static_cast<std::size_t>(max_extra) + 1);
  products[0] = word_product(tuple, prefix);
  if (!visit(std::span<const int>(letters), products[0]) || max_extra == 0) return;

  // next[k] is the next letter to try at extra depth k+1.
  std::vector<int> next(static_cast<std::size_t>(max_extra), 0);
  int level = 0;
  while (level >= 0) {
    if (next[level] == m) {
      next[level] = 0;
      --level;
      if (level >= 0) letters.pop_back();
      continue;
    }
    const int letter = next[level]++;
    if (letters.size() > base + level) letters.pop_back();
    letters.push_back(letter);
    multiply_into(products[level], tuple[letter], products[level + 1]);
    const bool descend = visit(std::span<const int>(letters), products[level + 1]);
    if (descend && level + 1 < max_extra) {
      ++level;
    }
  }
}

}  // namespace affint
