#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "mzf/error.hpp"
#include "mzf/linalg.hpp"

using namespace mzf;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Matrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = nd(gen);
  }
  return a;
}

Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
  }
  return e;
}

Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix a(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) a(i, j) = e(i, j);
  }
  return a;
}

// U diag(s) V^T with s log-spaced from 1 down to 1/kappa; orthogonal factors
// come from Eigen so the construction is independent of qr_factorize.
Matrix matrix_with_condition(std::size_t n, double kappa, std::mt19937_64& gen) {
  const Eigen::MatrixXd u = Eigen::HouseholderQR<Eigen::MatrixXd>(to_eigen(random_matrix(n, n, gen))).householderQ();
  const Eigen::MatrixXd v = Eigen::HouseholderQR<Eigen::MatrixXd>(to_eigen(random_matrix(n, n, gen))).householderQ();
  Eigen::VectorXd s(n);
  for (std::size_t i = 0; i < n; ++i) s(i) = std::pow(kappa, -static_cast<double>(i) / static_cast<double>(n - 1));
  return from_eigen(u * s.asDiagonal() * v.transpose());
}

double orthogonality_error(const Matrix& q) {
  return max_abs_diff(q.transposed() * q, Matrix::identity(q.cols()));
}

}  // namespace

TEST_CASE("qr_factorize: identity and single column") {
  const auto f = qr_factorize(Matrix::identity(3));
  CHECK(f.q == Matrix::identity(3));
  CHECK(f.r == Matrix::identity(3));

  const auto g = qr_factorize(Matrix{{3}, {4}});
  CHECK(g.q(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(g.q(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(g.r(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("qr_factorize: random square and tall matrices satisfy the factor invariants") {
  std::mt19937_64 gen(7);
  for (std::size_t rows : {4U, 6U, 8U}) {
    for (std::size_t cols = 1; cols <= rows; ++cols) {
      const Matrix h = random_matrix(rows, cols, gen);
      const auto f = qr_factorize(h);
      REQUIRE(f.q.rows() == rows);
      REQUIRE(f.q.cols() == cols);
      CHECK(orthogonality_error(f.q) < kOrthTol);
      CHECK(max_abs_diff(f.q * f.r, h) < kReconTol * std::max(1.0, h.max_abs()));
      for (std::size_t i = 0; i < cols; ++i) {
        CHECK(f.r(i, i) >= 0.0);
        for (std::size_t j = 0; j < i; ++j) CHECK(f.r(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("qr_factorize: scaling covariance") {
  std::mt19937_64 gen(11);
  const Matrix h = random_matrix(6, 4, gen);
  const auto f = qr_factorize(h);
  const auto g = qr_factorize(3.5 * h);
  CHECK(max_abs_diff(f.q, g.q) < kReconTol);
  CHECK(max_abs_diff(3.5 * f.r, g.r) < kReconTol * 3.5 * f.r.max_abs());
}

TEST_CASE("qr_factorize: errors") {
  CHECK_THROWS_AS(qr_factorize(Matrix{{1, 2, 3}, {4, 5, 6}}), Error);
  try {
    qr_factorize(Matrix{{1, 2}, {2, 4}, {3, 6}});
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("Matrix rejects non-finite data") {
  CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}), Error);
  CHECK_THROWS_AS((Matrix{{1.0, std::numeric_limits<double>::infinity()}}), Error);
}

TEST_CASE("split_r: worked examples") {
  const auto s = split_r(Matrix{{2, 4}, {0, 3}});
  CHECK(s.r_hat(0, 0) == 1.0);
  CHECK(s.r_hat(1, 1) == 1.0);
  CHECK(s.r_hat(1, 0) == 0.0);
  CHECK(s.r_hat(0, 1) == doctest::Approx(4.0 / 3.0));
  CHECK(s.r_diag == Vector{2, 3});
  CHECK(max_abs_diff(s.r_hat * Matrix::diagonal(s.r_diag), Matrix{{2, 4}, {0, 3}}) < 1e-15);

  const auto id = split_r(Matrix::identity(4));
  CHECK(id.r_hat == Matrix::identity(4));
  CHECK(id.r_diag == Vector{1, 1, 1, 1});

  const auto d = split_r(Matrix{{1, 0}, {0, 5}});
  CHECK(d.r_hat == Matrix::identity(2));
  CHECK(d.r_diag == Vector{1, 5});
}

TEST_CASE("split_r: consistency on random R and singular diagonal error") {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 50; ++t) {
    const auto f = qr_factorize(random_matrix(5, 5, gen));
    const auto s = split_r(f.r);
    CHECK(max_abs_diff(s.r_hat * Matrix::diagonal(s.r_diag), f.r) < kReconTol * std::max(1.0, f.r.max_abs()));
    for (std::size_t i = 0; i < 5; ++i) CHECK(s.r_hat(i, i) == 1.0);
  }
  try {
    split_r(Matrix{{1, 2}, {0, 0}});
    FAIL("expected SingularDiagonal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularDiagonal);
  }
}

TEST_CASE("singular_values: examples and Frobenius identity") {
  CHECK(singular_values(Matrix{{3, 0, 0}, {0, 2, 0}, {0, 0, 1}}) == Vector{3, 2, 1});
  const Vector p = singular_values(Matrix{{0, 2}, {1, 0}});
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(1.0));

  std::mt19937_64 gen(5);
  for (int t = 0; t < 100; ++t) {
    const Matrix a = random_matrix(4, 4, gen);
    const Vector sv = singular_values(a);
    double sum = 0.0;
    for (double s : sv) sum += s * s;
    const double fro = a.frobenius_norm();
    CHECK(std::abs(sum - fro * fro) < 1e-9);
    CHECK(std::is_sorted(sv.rbegin(), sv.rend()));
  }
}

TEST_CASE("singular_values: agrees with Eigen on tall, wide and ill-conditioned inputs") {
  std::mt19937_64 gen(9);
  for (auto [rows, cols] : {std::pair{6U, 3U}, std::pair{3U, 6U}, std::pair{8U, 8U}}) {
    const Matrix a = random_matrix(rows, cols, gen);
    const Vector sv = singular_values(a);
    const Eigen::VectorXd ref = Eigen::JacobiSVD<Eigen::MatrixXd>(to_eigen(a)).singularValues();
    REQUIRE(sv.size() == static_cast<std::size_t>(ref.size()));
    for (std::size_t i = 0; i < sv.size(); ++i) CHECK(sv[i] == doctest::Approx(ref(static_cast<Eigen::Index>(i))).epsilon(1e-12));
  }
  const Matrix ill = matrix_with_condition(6, 1e4, gen);
  const Vector sv = singular_values(ill);
  CHECK(sv.back() == doctest::Approx(1e-4).epsilon(1e-10));
}

TEST_CASE("singular_values: flop counter is populated") {
  FlopCounter flops;
  (void)singular_values(Matrix{{1, 2}, {3, 4}}, &flops);
  CHECK(flops.count > 0);
}

TEST_CASE("condition_number: examples") {
  CHECK(condition_number(Matrix{{10, 0}, {0, 0.01}}) == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(condition_number(Matrix{{1, 1}, {0, 1}}) == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  const double c = std::cos(0.3);
  const double s = std::sin(0.3);
  CHECK(std::abs(condition_number(Matrix{{c, -s}, {s, c}}) - 1.0) < 1e-10);
  CHECK(std::isinf(condition_number(Matrix{{1, 2}, {2, 4}})));
  try {
    condition_number(Matrix(2, 2));
    FAIL("expected ZeroMatrix");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroMatrix);
  }
}

TEST_CASE("condition_number: invariant under the orthogonal factor of QR") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> logk(0.0, 4.0);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 7);
    const Matrix h = matrix_with_condition(n, std::pow(10.0, logk(gen)), gen);
    const double ch = condition_number(h);
    const double cr = condition_number(qr_factorize(h).r);
    CHECK(std::abs(ch - cr) / ch < 1e-8);
  }
}

TEST_CASE("diagonal_condition_number matches max/min directly") {
  const Vector d{2.0, -8.0, 0.5};
  CHECK(diagonal_condition_number(d) == 16.0);
  CHECK(condition_number(Matrix::diagonal(d)) == doctest::Approx(16.0).epsilon(1e-14));
}

TEST_CASE("back_substitute: examples, residual and cost") {
  CHECK(back_substitute(Matrix::identity(3), Vector{1, 2, 3}) == Vector{1, 2, 3});
  const Vector x = back_substitute(Matrix{{2, 4}, {0, 3}}, Vector{10, 6});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(2.0));

  std::mt19937_64 gen(17);
  std::normal_distribution<double> nd;
  Matrix r = Matrix::identity(6);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) r(i, j) = nd(gen);
  }
  Vector b(6);
  for (double& v : b) v = nd(gen);
  FlopCounter flops;
  const Vector sol = back_substitute(r, b, &flops);
  const Vector rb = r * std::span<const double>(sol);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(rb[i] - b[i]) < 1e-10);
  CHECK(flops.count == 36);

  CHECK_THROWS_AS(back_substitute(Matrix{{1, 1}, {0, 0}}, Vector{1, 1}), Error);
}

TEST_CASE("pseudo_inverse agrees with Eigen's complete orthogonal decomposition") {
  std::mt19937_64 gen(19);
  for (int t = 0; t < 20; ++t) {
    const Matrix h = random_matrix(6, 4, gen);
    const Matrix p = pseudo_inverse(h);
    const Eigen::MatrixXd ref = to_eigen(h).completeOrthogonalDecomposition().pseudoInverse();
    CHECK(max_abs_diff(p, from_eigen(ref)) < 1e-10);
  }
}
