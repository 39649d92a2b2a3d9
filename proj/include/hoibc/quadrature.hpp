#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hoibc/errors.hpp"

namespace hoibc::specfun {

enum class QuadKind { gauss_legendre, gauss_log };

/// gauss_legendre: nodes in (-1, 1), integrates against weight 1.
/// gauss_log: nodes in (0, 1), integrates against weight -ln(t).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadKind kind = QuadKind::gauss_legendre;

  std::size_t size() const { return nodes.size(); }
};

inline constexpr int kMaxQuadOrder = 64;

namespace detail {

inline QuadratureRule gauss_legendre_rule(int n) {
  using ld = long double;
  QuadratureRule rule;
  rule.kind = QuadKind::gauss_legendre;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  constexpr ld pi = 3.141592653589793238462643383279502884L;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    ld x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    ld dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      ld p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const ld p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      const ld dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    // recompute derivative at converged node
    ld p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const ld p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0L : n * (x * p1 - p0) / (x * x - 1);
    const ld w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = double(-x);
    rule.nodes[n - 1 - i] = double(x);
    rule.weights[i] = double(w);
    rule.weights[n - 1 - i] = double(w);
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Modified Chebyshev algorithm with shifted monic Legendre polynomials,
// whose modified moments against -ln(t) on (0,1) are
//   m_0 = 1,  m_k = (-1)^k (k!)^2 / ((2k)! k (k+1)).
inline QuadratureRule gauss_log_rule(int n) {
  using ld = long double;
  const int m = 2 * n;
  std::vector<ld> mom(m);
  mom[0] = 1;
  ld ratio = 1;  // (k!)^2/(2k)!
  for (int k = 1; k < m; ++k) {
    ratio *= ld(k) * k / ((2.0L * k - 1) * (2.0L * k));
    mom[k] = ((k & 1) ? -1 : 1) * ratio / (ld(k) * (k + 1));
  }
  auto a = [](int) { return 0.5L; };
  auto b = [](int l) { return l == 0 ? 0.0L : ld(l) * l / (4.0L * (4.0L * l * l - 1)); };

  std::vector<ld> alpha(n), beta(n);
  std::vector<ld> sig_prev(m, 0), sig_cur(mom), sig_next(m, 0);
  alpha[0] = a(0) + mom[1] / mom[0];
  beta[0] = mom[0];
  for (int k = 1; k < n; ++k) {
    for (int l = k; l < m - k; ++l) {
      sig_next[l] = sig_cur[l + 1] - (alpha[k - 1] - a(l)) * sig_cur[l] -
                    beta[k - 1] * sig_prev[l] + b(l) * sig_cur[l - 1];
    }
    alpha[k] = a(k) + sig_next[k + 1] / sig_next[k] - sig_cur[k] / sig_cur[k - 1];
    beta[k] = sig_next[k] / sig_cur[k - 1];
    sig_prev = sig_cur;
    sig_cur = sig_next;
  }

  using Mat = Eigen::Matrix<ld, Eigen::Dynamic, Eigen::Dynamic>;
  Mat jac = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    jac(k, k) = alpha[k];
    if (k + 1 < n) {
      jac(k, k + 1) = std::sqrt(beta[k + 1]);
      jac(k + 1, k) = jac(k, k + 1);
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(jac);
  QuadratureRule rule;
  rule.kind = QuadKind::gauss_log;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = double(eig.eigenvalues()(i));
    const ld v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = double(beta[0] * v0 * v0);
  }
  return rule;
}

}  // namespace detail

inline QuadratureRule quad_rule(QuadKind kind, int n) {
  if (n < 1 || n > kMaxQuadOrder) {
    throw RangeError("quadrature order " + std::to_string(n) +
                     " outside [1, " + std::to_string(kMaxQuadOrder) + "]");
  }
  return kind == QuadKind::gauss_legendre ? detail::gauss_legendre_rule(n)
                                          : detail::gauss_log_rule(n);
}

/// Gauss-Legendre mapped to (0, 1).
inline QuadratureRule gauss_legendre_unit(int n) {
  auto r = quad_rule(QuadKind::gauss_legendre, n);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.nodes[i] = 0.5 * (r.nodes[i] + 1.0);
    r.weights[i] *= 0.5;
  }
  return r;
}

}  // namespace hoibc::specfun
