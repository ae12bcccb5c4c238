#include "mzf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mzf/error.hpp"

namespace mzf {

namespace {

void require_finite(std::span<const double> data) {
  for (double v : data) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "matrix entry is not finite");
  }
}

std::string shape(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_upper_triangular_square(const Matrix& r, const char* who) {
  if (r.rows() != r.cols()) {
    throw Error(ErrorCode::InvalidArgument, std::string(who) + ": expected square matrix, got " + shape(r));
  }
}

// Pivot threshold relative to the magnitude of r; max|r_ij| <= sigma_max.
void require_nonsingular_diagonal(const Matrix& r, const char* who) {
  const double floor = kRankTol * r.max_abs();
  for (std::size_t j = 0; j < r.rows(); ++j) {
    if (!(std::abs(r(j, j)) > floor)) {
      throw Error(ErrorCode::SingularDiagonal,
                  std::string(who) + ": |r[" + std::to_string(j) + "][" + std::to_string(j) + "]| below rank tolerance");
    }
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::LengthMismatch, "matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                                               std::to_string(rows * cols));
  }
  require_finite(data_);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  if (rows_ == 0 || cols_ == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw Error(ErrorCode::LengthMismatch, "ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  require_finite(data_);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix out(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) out(i, i) = diag[i];
  require_finite(out.data_);
  return out;
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  }
  return out;
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::LengthMismatch, "product " + shape(a) + " * " + shape(b));
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::LengthMismatch, "difference " + shape(a) + " - " + shape(b));
  }
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  }
  return out;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = s * a(i, j);
  }
  return out;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::LengthMismatch, "matrix-vector product dimension mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    out[i] = s;
  }
  return out;
}

Vector multiply_transposed(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw Error(ErrorCode::LengthMismatch, "transposed product dimension mismatch");
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j) * xi;
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

QrFactors qr_factorize(const Matrix& h) {
  const std::size_t n = h.rows();
  const std::size_t m = h.cols();
  if (n < m) throw Error(ErrorCode::InvalidArgument, "qr_factorize needs rows >= cols, got " + shape(h));

  const double floor = kRankTol * h.frobenius_norm();
  Matrix a = h;
  std::vector<Vector> reflectors;
  reflectors.reserve(m);

  for (std::size_t k = 0; k < m; ++k) {
    double norm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) norm2 += a(i, k) * a(i, k);
    const double norm = std::sqrt(norm2);
    if (!(norm > floor)) {
      throw Error(ErrorCode::RankDeficient, "pivot " + std::to_string(k) + " below rank tolerance");
    }
    const double alpha = a(k, k) >= 0.0 ? -norm : norm;

    Vector v(n - k);
    for (std::size_t i = k; i < n; ++i) v[i - k] = a(i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double vi : v) vnorm2 += vi * vi;
    const double vnorm = std::sqrt(vnorm2);
    for (double& vi : v) vi /= vnorm;

    for (std::size_t j = k; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i - k] * a(i, j);
      for (std::size_t i = k; i < n; ++i) a(i, j) -= 2.0 * v[i - k] * dot;
    }
    a(k, k) = alpha;
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) = 0.0;
    reflectors.push_back(std::move(v));
  }

  Matrix r(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) r(i, j) = a(i, j);
  }

  // Q = H_0 H_1 ... H_{m-1} applied to the first m columns of the identity.
  Matrix q(n, m);
  for (std::size_t i = 0; i < m; ++i) q(i, i) = 1.0;
  for (std::size_t kk = m; kk-- > 0;) {
    const Vector& v = reflectors[kk];
    for (std::size_t j = 0; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t i = kk; i < n; ++i) dot += v[i - kk] * q(i, j);
      if (dot == 0.0) continue;
      for (std::size_t i = kk; i < n; ++i) q(i, j) -= 2.0 * v[i - kk] * dot;
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (r(i, i) < 0.0) {
      for (std::size_t j = i; j < m; ++j) r(i, j) = -r(i, j);
      for (std::size_t row = 0; row < n; ++row) q(row, i) = -q(row, i);
    }
  }
  return {std::move(q), std::move(r)};
}

RSplit split_r(const Matrix& r) {
  require_upper_triangular_square(r, "split_r");
  require_nonsingular_diagonal(r, "split_r");
  const std::size_t m = r.rows();
  RSplit out{Matrix::identity(m), Vector(m)};
  for (std::size_t j = 0; j < m; ++j) {
    const double d = r(j, j);
    out.r_diag[j] = d;
    for (std::size_t i = 0; i < j; ++i) out.r_hat(i, j) = r(i, j) / d;
  }
  return out;
}

Vector singular_values(const Matrix& a, FlopCounter* flops) {
  // One-sided Jacobi on the columns of the taller orientation.
  const bool tall = a.rows() >= a.cols();
  const std::size_t n = tall ? a.rows() : a.cols();
  const std::size_t m = tall ? a.cols() : a.rows();

  std::vector<Vector> col(m, Vector(n));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (tall) {
        col[j][i] = a(i, j);
      } else {
        col[i][j] = a(i, j);
      }
    }
  }

  constexpr int kMaxSweeps = 100;
  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(n);
  std::uint64_t count = 0;
  bool converged = false;

  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        Vector& ap = col[p];
        Vector& aq = col[q];
        double alpha = 0.0;
        double beta = 0.0;
        double gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += ap[i] * ap[i];
          beta += aq[i] * aq[i];
          gamma += ap[i] * aq[i];
        }
        count += 6 * n;
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;

        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double xp = ap[i];
          const double xq = aq[i];
          ap[i] = c * xp - s * xq;
          aq[i] = s * xp + c * xq;
        }
        count += 6 * n + 12;
      }
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "Jacobi SVD exceeded 100 sweeps");

  Vector sv(m);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (double v : col[j]) s += v * v;
    sv[j] = std::sqrt(s);
  }
  count += 2 * n * m + m;
  std::sort(sv.begin(), sv.end(), std::greater<>());
  if (flops != nullptr) flops->add(count);
  return sv;
}

double condition_number(const Matrix& a, FlopCounter* flops) {
  if (a.max_abs() == 0.0) throw Error(ErrorCode::ZeroMatrix, "condition number of a zero matrix");
  const Vector sv = singular_values(a, flops);
  const double smax = sv.front();
  const double smin = sv.back();
  if (flops != nullptr) flops->add(1);
  if (smin < kRankTol * smax) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

double diagonal_condition_number(std::span<const double> diag) {
  if (diag.empty()) throw Error(ErrorCode::InvalidArgument, "empty diagonal");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double d : diag) {
    lo = std::min(lo, std::abs(d));
    hi = std::max(hi, std::abs(d));
  }
  if (hi == 0.0) throw Error(ErrorCode::ZeroMatrix, "condition number of a zero matrix");
  if (lo < kRankTol * hi) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Vector back_substitute(const Matrix& r, std::span<const double> b, FlopCounter* flops) {
  require_upper_triangular_square(r, "back_substitute");
  if (b.size() != r.rows()) throw Error(ErrorCode::LengthMismatch, "back_substitute: rhs length mismatch");
  require_nonsingular_diagonal(r, "back_substitute");
  const std::size_t m = r.rows();
  Vector x(m);
  for (std::size_t ii = m; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < m; ++j) s -= r(ii, j) * x[j];
    x[ii] = s / r(ii, ii);
  }
  if (flops != nullptr) flops->add(static_cast<std::uint64_t>(m) * m);
  return x;
}

Matrix pseudo_inverse(const Matrix& h) {
  const std::size_t n = h.rows();
  const std::size_t m = h.cols();
  if (n < m) throw Error(ErrorCode::InvalidArgument, "pseudo_inverse needs rows >= cols, got " + shape(h));

  Matrix gram(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += h(k, i) * h(k, j);
      gram(i, j) = s;
    }
  }

  // gram = L L^T
  Matrix l(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    double d = gram(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw Error(ErrorCode::RankDeficient, "normal equations are not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = gram(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }

  Matrix out(m, n);
  Vector w(m);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = h(c, i);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * w[k];
      w[i] = s / l(i, i);
    }
    for (std::size_t ii = m; ii-- > 0;) {
      double s = w[ii];
      for (std::size_t k = ii + 1; k < m; ++k) s -= l(k, ii) * out(k, c);
      out(ii, c) = s / l(ii, ii);
    }
  }
  return out;
}

}  // namespace mzf
