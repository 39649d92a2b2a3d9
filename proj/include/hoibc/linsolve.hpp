#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "hoibc/errors.hpp"
#include "hoibc/specfun.hpp"

namespace hoibc {

inline constexpr double kRcondWarning = 1e-12;

/// Partial-pivoted LU of a dense complex matrix. The factors come from Eigen;
/// substitution is done here so that every right-hand side, alone or in a
/// batch, goes through the same arithmetic.
struct Factorization {
  Eigen::MatrixXcd lu;               // unit-lower L below the diagonal, U on and above
  std::vector<Eigen::Index> perm;    // row i of PA is row perm[i] of A
  Eigen::Index n = 0;
  double rcond_estimate = 0;

  bool ill_conditioned() const { return rcond_estimate < kRcondWarning; }
};

inline Factorization lu_factor(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw UsageError("lu_factor needs a square matrix");
  if (!a.allFinite()) throw UsageError("lu_factor: matrix has non-finite entries");
  Factorization f;
  f.n = a.rows();
  if (f.n == 0) return f;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  f.lu = lu.matrixLU();
  for (Eigen::Index k = 0; k < f.n; ++k) {
    const std::complex<double> p = f.lu(k, k);
    if (p == std::complex<double>(0.0) || !std::isfinite(std::abs(p)))
      throw SingularMatrixError("zero pivot in column " + std::to_string(k), std::size_t(k));
  }
  const auto& pidx = lu.permutationP().indices();
  f.perm.assign(std::size_t(f.n), 0);
  for (Eigen::Index i = 0; i < f.n; ++i) f.perm[std::size_t(pidx(i))] = i;
  f.rcond_estimate = lu.rcond();
  return f;
}

inline Eigen::VectorXcd solve(const Factorization& f, const Eigen::VectorXcd& b) {
  if (b.size() != f.n) throw UsageError("solve: right-hand side has the wrong length");
  Eigen::VectorXcd y(f.n);
  for (Eigen::Index i = 0; i < f.n; ++i) {
    std::complex<double> s = b(f.perm[std::size_t(i)]);
    for (Eigen::Index k = 0; k < i; ++k) s -= f.lu(i, k) * y(k);
    y(i) = s;
  }
  for (Eigen::Index i = f.n - 1; i >= 0; --i) {
    std::complex<double> s = y(i);
    for (Eigen::Index k = i + 1; k < f.n; ++k) s -= f.lu(i, k) * y(k);
    y(i) = s / f.lu(i, i);
  }
  return y;
}

inline Eigen::MatrixXcd solve(const Factorization& f, const Eigen::MatrixXcd& b) {
  if (b.rows() != f.n) throw UsageError("solve: right-hand side has the wrong length");
  Eigen::MatrixXcd x(b.rows(), b.cols());
  for (Eigen::Index c = 0; c < b.cols(); ++c) x.col(c) = solve(f, Eigen::VectorXcd(b.col(c)));
  return x;
}

/// ||PA - LU||_F / ||A||_F
inline double reconstruction_residual(const Eigen::MatrixXcd& a, const Factorization& f) {
  const auto L = f.lu.triangularView<Eigen::UnitLower>().toDenseMatrix();
  const auto U = f.lu.triangularView<Eigen::Upper>().toDenseMatrix();
  Eigen::MatrixXcd pa(f.n, f.n);
  for (Eigen::Index i = 0; i < f.n; ++i) pa.row(i) = a.row(f.perm[std::size_t(i)]);
  return (pa - L * U).norm() / a.norm();
}

}  // namespace hoibc
