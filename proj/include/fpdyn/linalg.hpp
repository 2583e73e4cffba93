#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace fpdyn {

using Vec = std::vector<double>;

// Dense row-major matrix for the small systems used here (n <= 15).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vec row(std::size_t i) const;
  Vec col(std::size_t j) const;
  Matrix transpose() const;
  double max_abs() const;

  Matrix operator*(const Matrix& other) const;
  Vec operator*(const Vec& v) const;
  Matrix operator*(double k) const;
  Matrix operator+(const Matrix& other) const;
  Matrix operator-(const Matrix& other) const;
  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Row vector times matrix: (v^T M)^T.
Vec row_times(const Vec& v, const Matrix& m);

double determinant(const Matrix& m);
// |det| > 1e-12 * (max|entry|)^n
bool is_nonsingular(const Matrix& m);
// Adjugate formula for n <= 3, partial-pivot elimination otherwise.
// Throws StructuralError on a singular matrix.
Matrix inverse(const Matrix& m);
Vec solve(const Matrix& m, const Vec& rhs);

double dot(const Vec& a, const Vec& b);
double sum(const Vec& v);
double max_abs(const Vec& v);
double max_abs_diff(const Vec& a, const Vec& b);
double norm2(const Vec& v);
Vec lerp(const Vec& a, const Vec& b, double s);  // (1-s) a + s b
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double k, const Vec& a);

}  // namespace fpdyn
