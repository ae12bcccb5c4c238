#pragma once

// Dense real linear algebra for the small matrices that appear in MIMO
// detection: thin Householder QR, one-sided Jacobi singular values,
// triangular solves and the unit-triangular/diagonal split of R.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace mzf {

using Vector = std::vector<double>;

// Relative tolerances shared by the factorizations and their tests.
inline constexpr double kOrthTol = 1e-10;
inline constexpr double kReconTol = 1e-10;
inline constexpr double kRankTol = 1e-12;

// Counts floating-point operations for routines whose cost is data dependent.
struct FlopCounter {
  std::uint64_t count = 0;
  void add(std::uint64_t n) noexcept { count += n; }
};

// Row-major dense matrix. Entries are checked for finiteness when built from
// data; element writes through operator() are not re-checked.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  [[nodiscard]] Matrix transposed() const;
  [[nodiscard]] double max_abs() const noexcept;
  [[nodiscard]] double frobenius_norm() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, std::span<const double> x);

// a^T x without forming the transpose.
Vector multiply_transposed(const Matrix& a, std::span<const double> x);

// Largest |a_ij - b_ij|; shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

struct QrFactors {
  Matrix q;  // n x m, orthonormal columns
  Matrix r;  // m x m, upper triangular, nonnegative diagonal
};

// R = r_hat * diag(r_diag) with r_hat unit upper triangular.
struct RSplit {
  Matrix r_hat;
  Vector r_diag;
};

// Thin Householder QR. Requires rows >= cols and full column rank; a pivot
// below kRankTol * ||h||_F raises RankDeficient.
QrFactors qr_factorize(const Matrix& h);

// Requires a square upper-triangular r with |r_jj| above the rank tolerance.
RSplit split_r(const Matrix& r);

// Singular values in descending order, min(rows, cols) of them.
Vector singular_values(const Matrix& a, FlopCounter* flops = nullptr);

// sigma_max / sigma_min; +infinity when sigma_min < kRankTol * sigma_max.
double condition_number(const Matrix& a, FlopCounter* flops = nullptr);

// max|d| / min|d| for a diagonal matrix given by its entries.
double diagonal_condition_number(std::span<const double> diag);

// Solves r x = b for upper-triangular r. Costs exactly m^2 flops.
Vector back_substitute(const Matrix& r, std::span<const double> b, FlopCounter* flops = nullptr);

// (h^T h)^{-1} h^T through a Cholesky solve of the normal equations. This
// route shares nothing with qr_factorize and serves as the pseudo-inverse
// reference for zero forcing.
Matrix pseudo_inverse(const Matrix& h);

}  // namespace mzf
