#include <catch_amalgamated.hpp>

#include <limits>
#include <random>

#include "hoibc/linsolve.hpp"

using namespace hoibc;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

MatrixXcd random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  return a;
}

VectorXcd random_vector(int n, std::uint64_t seed) { return random_matrix(n, seed).col(0); }

double inf_norm(const MatrixXcd& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

TEST_CASE("identity factorization") {
  const MatrixXcd id = MatrixXcd::Identity(6, 6);
  const auto f = lu_factor(id);
  CHECK((f.lu - id).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(f.rcond_estimate - 1.0) < 1e-15);
  CHECK_FALSE(f.ill_conditioned());
  const VectorXcd b = random_vector(6, 3);
  CHECK((solve(f, b) - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pivoting on a permutation matrix") {
  MatrixXcd p(2, 2);
  p << 0, 1, 1, 0;
  const auto f = lu_factor(p);
  VectorXcd b(2);
  b << cplx(2, 1), cplx(-3, 0.5);
  const VectorXcd x = solve(f, b);
  CHECK(x(0) == b(1));
  CHECK(x(1) == b(0));
  CHECK(reconstruction_residual(p, f) == 0.0);
}

TEST_CASE("random complex system") {
  const int n = 50;
  const MatrixXcd a = random_matrix(n, 42);
  const VectorXcd b = random_vector(n, 43);
  const auto f = lu_factor(a);
  CHECK(reconstruction_residual(a, f) <= 1e-12);
  const VectorXcd x = solve(f, b);
  CHECK((a * x - b).norm() / b.norm() <= 1e-11);
  const double eps = std::numeric_limits<double>::epsilon();
  CHECK((a * x - b).cwiseAbs().maxCoeff() <=
        100 * n * eps * inf_norm(a) * x.cwiseAbs().maxCoeff());
  // rcond against the exact 1-norm condition number
  const MatrixXcd inv = a.inverse();
  const double exact = 1.0 / (a.cwiseAbs().colwise().sum().maxCoeff() *
                              inv.cwiseAbs().colwise().sum().maxCoeff());
  CHECK(f.rcond_estimate > 0.1 * exact);
  CHECK(f.rcond_estimate < 10 * exact);
}

TEST_CASE("zero pivot column is reported") {
  MatrixXcd a = random_matrix(5, 7);
  a.col(2).setZero();
  try {
    lu_factor(a);
    FAIL("no singular-matrix error");
  } catch (const SingularMatrixError& e) {
    CHECK(e.column() == 2);
  }
  CHECK_THROWS_AS(lu_factor(MatrixXcd::Zero(3, 3)), SingularMatrixError);
  CHECK_THROWS_AS(lu_factor(MatrixXcd::Zero(3, 4)), UsageError);
}

TEST_CASE("solve contracts") {
  const MatrixXcd a = random_matrix(12, 5);
  const auto f = lu_factor(a);
  CHECK(solve(f, VectorXcd(VectorXcd::Zero(12))).cwiseAbs().maxCoeff() == 0.0);
  const VectorXcd b = random_vector(12, 9);
  const cplx alpha{0.25, -2.0};
  const VectorXcd x = solve(f, b), y = solve(f, VectorXcd(alpha * b));
  CHECK((y - alpha * x).norm() <= 1e-13 * y.norm());
  CHECK_THROWS_AS(solve(f, VectorXcd(VectorXcd::Zero(11))), UsageError);
  CHECK_THROWS_AS(solve(f, MatrixXcd(MatrixXcd::Zero(13, 2))), UsageError);
}

TEST_CASE("batched solve equals looped solves bitwise") {
  const MatrixXcd a = random_matrix(30, 11);
  const auto f = lu_factor(a);
  const MatrixXcd b = random_matrix(30, 12).leftCols(7);
  const MatrixXcd x = solve(f, b);
  for (int c = 0; c < 7; ++c) {
    const VectorXcd xc = solve(f, VectorXcd(b.col(c)));
    for (int i = 0; i < 30; ++i) {
      CHECK(x(i, c).real() == xc(i).real());
      CHECK(x(i, c).imag() == xc(i).imag());
    }
  }
}

TEST_CASE("ill-conditioned matrices are flagged") {
  MatrixXcd a = MatrixXcd::Identity(4, 4);
  a(3, 3) = 1e-14;
  const auto f = lu_factor(a);
  CHECK(f.ill_conditioned());
}
