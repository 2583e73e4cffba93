#include "fpdyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fpdyn/errors.hpp"

namespace fpdyn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw StructuralError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.front().size() : 0;
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw StructuralError("ragged matrix rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Vec Matrix::row(std::size_t i) const {
  return Vec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
             data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Vec Matrix::col(std::size_t j) const {
  Vec out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

Matrix Matrix::operator*(const Matrix& other) const {
  if (cols_ != other.rows_) throw StructuralError("matrix product dimension mismatch");
  Matrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  return out;
}

Vec Matrix::operator*(const Vec& v) const {
  if (v.size() != cols_) throw StructuralError("matrix-vector dimension mismatch");
  Vec out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
  return out;
}

Matrix Matrix::operator*(double k) const {
  Matrix out = *this;
  for (double& x : out.data_) x *= k;
  return out;
}

Matrix Matrix::operator+(const Matrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw StructuralError("matrix sum dimension mismatch");
  Matrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] += other.data_[k];
  return out;
}

Matrix Matrix::operator-(const Matrix& other) const { return *this + other * -1.0; }

Vec row_times(const Vec& v, const Matrix& m) {
  if (v.size() != m.rows()) throw StructuralError("row-vector product dimension mismatch");
  Vec out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m(i, j);
  return out;
}

namespace {

// LU with partial pivoting; returns false when a pivot vanishes.
bool lu_decompose(Matrix& a, std::vector<std::size_t>& perm, int& sign) {
  const std::size_t n = a.rows();
  perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  sign = 1;
  const double floor = 1e-14 * static_cast<double>(n) * a.max_abs();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (std::abs(a(p, k)) <= floor) return false;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(k, j));
      std::swap(perm[p], perm[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= a(i, k) * a(k, j);
    }
  }
  return true;
}

}  // namespace

double determinant(const Matrix& m) {
  if (!m.square()) throw StructuralError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (n == 3)
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  Matrix a = m;
  std::vector<std::size_t> perm;
  int sign = 1;
  if (!lu_decompose(a, perm, sign)) return 0.0;
  double d = sign;
  for (std::size_t i = 0; i < n; ++i) d *= a(i, i);
  return d;
}

bool is_nonsingular(const Matrix& m) {
  const double scale = std::pow(m.max_abs(), static_cast<double>(m.rows()));
  return std::abs(determinant(m)) > 1e-12 * scale;
}

Matrix inverse(const Matrix& m) {
  if (!m.square()) throw StructuralError("inverse of a non-square matrix");
  if (!is_nonsingular(m)) throw StructuralError("singular matrix");
  const std::size_t n = m.rows();
  const double d = determinant(m);
  if (n == 1) return Matrix{{1.0 / d}};
  if (n == 2) return Matrix{{m(1, 1) / d, -m(0, 1) / d}, {-m(1, 0) / d, m(0, 0) / d}};
  if (n == 3) {
    Matrix inv(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        // cofactor of (j, i)
        const std::size_t r0 = (j + 1) % 3, r1 = (j + 2) % 3;
        const std::size_t c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        inv(i, j) = (m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0)) / d;
      }
    return inv;
  }
  Matrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec e(n, 0.0);
    e[j] = 1.0;
    const Vec x = solve(m, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = x[i];
  }
  return inv;
}

Vec solve(const Matrix& m, const Vec& rhs) {
  if (!m.square() || rhs.size() != m.rows()) throw StructuralError("solve dimension mismatch");
  const std::size_t n = m.rows();
  Matrix a = m;
  std::vector<std::size_t> perm;
  int sign = 1;
  if (!lu_decompose(a, perm, sign)) throw StructuralError("singular system");
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= a(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw StructuralError("dot dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw StructuralError("vector dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

Vec lerp(const Vec& a, const Vec& b, double s) {
  if (a.size() != b.size()) throw StructuralError("vector dimension mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - s) * a[i] + s * b[i];
  return out;
}

Vec operator+(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw StructuralError("vector dimension mismatch");
  Vec out(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += b[i];
  return out;
}

Vec operator-(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw StructuralError("vector dimension mismatch");
  Vec out(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] -= b[i];
  return out;
}

Vec operator*(double k, const Vec& a) {
  Vec out(a);
  for (double& x : out) x *= k;
  return out;
}

}  // namespace fpdyn
