#pragma once

// Bessel/Hankel functions of integer order and complex argument, and the
// outgoing 2D Helmholtz kernel.
//
// Time convention is exp(+i omega t) throughout the library: outgoing waves
// are H^(2)(k r), lossy media have Im(eps_r) <= 0 and Im(mu_r) <= 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "hoibc/errors.hpp"

namespace hoibc {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kFreeSpaceImpedance = 376.730313668;
inline constexpr cplx kI{0.0, 1.0};

namespace specfun {

enum class TimeFactor { exp_plus_i_omega_t };

struct WaveConvention {
  TimeFactor time_factor = TimeFactor::exp_plus_i_omega_t;
  double k0 = 0.0;
};

inline constexpr int kMaxOrder = 200;
inline constexpr double kMaxArgument = 1.0e4;
/// Below this |z| the power series is used, above it Miller's recurrence.
inline constexpr double kSeriesRadius = 12.0;

namespace detail {

using ldouble = long double;
using lcplx = std::complex<long double>;

constexpr ldouble kPiL = 3.141592653589793238462643383279502884L;
constexpr ldouble kGammaL = 0.577215664901532860606512090082402431L;

inline void check_range(int order, cplx z) {
  if (order < 0 || order > kMaxOrder) {
    throw RangeError("Bessel order " + std::to_string(order) +
                     " outside [0, " + std::to_string(kMaxOrder) + "]");
  }
  if (!(std::abs(z) < kMaxArgument)) {
    throw RangeError("Bessel argument |z| = " + std::to_string(std::abs(z)) +
                     " outside working range");
  }
}

inline void check_branch(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0) {
    throw DomainError("Bessel Y/Hankel argument on the branch cut (z = " +
                      std::to_string(z.real()) + ")");
  }
}

// J_n(z) = (z/2)^n sum_k (-z^2/4)^k / (k! (n+k)!)
inline lcplx series_j(int n, lcplx z) {
  if (z == lcplx(0)) return n == 0 ? lcplx(1) : lcplx(0);
  const lcplx half = z / ldouble(2);
  lcplx lead(1);
  for (int m = 1; m <= n; ++m) lead *= half / ldouble(m);
  const lcplx q = -half * half;
  lcplx term(1), sum(1);
  const ldouble peak = std::abs(half);
  for (int k = 1; k < 400; ++k) {
    term *= q / (ldouble(k) * ldouble(n + k));
    sum += term;
    if (k > peak && std::abs(term) <= 1e-21L * std::abs(sum)) break;
  }
  return lead * sum;
}

// Y_0 and Y_1 by their logarithmic power series.
inline void series_y01(lcplx z, lcplx j0, lcplx j1, lcplx& y0, lcplx& y1) {
  const lcplx half = z / ldouble(2);
  const lcplx logterm = std::log(half) + kGammaL;
  const lcplx q = half * half;
  const ldouble peak = std::abs(half);

  // Y0 = (2/pi)[(ln(z/2)+gamma) J0 + sum_{k>=1} (-1)^{k+1} H_k q^k/(k!)^2]
  lcplx term(1), s0(0);
  ldouble harmonic = 0;
  for (int k = 1; k < 400; ++k) {
    term *= -q / (ldouble(k) * ldouble(k));
    harmonic += 1.0L / k;
    const lcplx add = -term * harmonic;
    s0 += add;
    if (k > peak && std::abs(add) <= 1e-21L * (std::abs(s0) + 1e-300L)) break;
  }
  y0 = (2.0L / kPiL) * (logterm * j0 + s0);

  // Y1 = -2/(pi z) + (2/pi) ln(z/2) J1
  //      - (1/pi)(z/2) sum_k [psi(k+1)+psi(k+2)] (-q)^k/(k!(k+1)!)
  lcplx t(1), s1(0);
  ldouble hk = 0;  // H_k
  for (int k = 0; k < 400; ++k) {
    if (k > 0) {
      t *= -q / (ldouble(k) * ldouble(k + 1));
      hk += 1.0L / k;
    }
    const ldouble psi_sum = (-kGammaL + hk) + (-kGammaL + hk + 1.0L / (k + 1));
    const lcplx add = psi_sum * t;
    s1 += add;
    if (k > peak && std::abs(add) <= 1e-21L * (std::abs(s1) + 1e-300L)) break;
  }
  y1 = -2.0L / (kPiL * z) + (2.0L / kPiL) * std::log(half) * j1 -
       (1.0L / kPiL) * half * s1;
}

inline int miller_start(int nmax, double absz) {
  const double base = std::max<double>(nmax, absz);
  int m = static_cast<int>(std::ceil(base + 30.0 + 3.0 * std::sqrt(base)));
  if (m % 2) ++m;
  return m;
}

// J_0..J_top(z) by Miller's downward recurrence. Normalized with
// exp(-+iz) = J0 + 2 sum (-+i)^k J_k, the sign chosen so the left side is
// not exponentially small.
inline std::vector<cplx> miller_j(int top, cplx z) {
  std::vector<cplx> f(static_cast<std::size_t>(top) + 2, cplx(0));
  const bool upper = z.imag() >= 0.0;
  const cplx t = upper ? cplx(0, -1) : cplx(0, 1);
  f[top + 1] = 0.0;
  f[top] = 1e-30;
  // powers t^k cycle with period 4
  auto tpow = [&](int k) {
    switch (k & 3) {
      case 0: return cplx(1, 0);
      case 1: return t;
      case 2: return cplx(-1, 0);
      default: return -t;
    }
  };
  cplx norm = 2.0 * tpow(top) * f[top];
  const cplx two_over_z = 2.0 / z;
  for (int k = top; k >= 1; --k) {
    f[k - 1] = double(k) * two_over_z * f[k] - f[k + 1];
    norm += (k - 1 == 0 ? 1.0 : 2.0) * tpow(k - 1) * f[k - 1];
    if (std::abs(f[k - 1]) > 1e200) {
      for (int m = k - 1; m <= top + 1; ++m) f[m] *= 1e-200;
      norm *= 1e-200;
    }
  }
  const cplx scale = std::exp(upper ? cplx(0, -1) * z : cplx(0, 1) * z) / norm;
  for (auto& v : f) v *= scale;
  return f;
}

// Y0, Y1 from J_k via the Neumann series (valid for any z off the cut).
inline void neumann_y01(const std::vector<cplx>& jk, cplx z, cplx& y0,
                        cplx& y1) {
  const cplx logterm = std::log(z / 2.0) + kEulerGamma;
  cplx s0(0), s1(0);
  const int top = static_cast<int>(jk.size()) - 2;
  for (int k = 1; 2 * k + 1 <= top; ++k) {
    const double sgn = (k & 1) ? -1.0 : 1.0;
    s0 += sgn * jk[2 * k] / double(k);
    s1 += sgn * (jk[2 * k - 1] - jk[2 * k + 1]) / double(k);
  }
  y0 = (2.0 / kPi) * logterm * jk[0] - (4.0 / kPi) * s0;
  y1 = (2.0 / kPi) * logterm * jk[1] - (2.0 / kPi) * jk[0] / z +
       (2.0 / kPi) * s1;
}

// H1_1/H1_0 = -H1_0'/H1_0 from Steed's continued fraction (modified Lentz).
inline cplx hankel1_ratio(cplx z) {
  constexpr double tiny = 1e-300;
  cplx a = 0.25, b = 2.0 * (z + kI);
  cplx f = tiny, c = f, d = 0;
  for (int k = 1; k < 100000; ++k) {
    if (k > 1) {
      a += 2.0 * (k - 1);
      b += 2.0 * kI;
    }
    d = b + a * d;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = b + a / c;
    if (std::abs(c) < tiny) c = tiny;
    const cplx del = c * d;
    f *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return -(-1.0 / (2.0 * z) + kI + (kI / z) * f);
}

// Y_0..Y_nmax for Im z > 0 through the recessive H1: H1_0 from the
// Wronskian with J, then upward recurrence on H1, Y = -i (H1 - J).
// Upward recurrence on Y itself loses the H1 part when Im z is large.
inline std::vector<cplx> y_from_hankel1(const std::vector<cplx>& j, cplx z,
                                        int nmax) {
  const cplx r = hankel1_ratio(z);
  std::vector<cplx> h(static_cast<std::size_t>(nmax) + 1);
  h[0] = 2.0 * kI / (kPi * z * (j[1] - j[0] * r));
  if (nmax >= 1) h[1] = r * h[0];
  for (int n = 1; n < nmax; ++n) h[n + 1] = (2.0 * n) / z * h[n] - h[n - 1];
  std::vector<cplx> y(h.size());
  for (int n = 0; n <= nmax; ++n) y[n] = -kI * (h[n] - j[n]);
  return y;
}

// Above this |Im z| the Y table is built from H1 (or H2 by symmetry).
inline constexpr double kHankelPathImag = 1.0;

}  // namespace detail

/// J_0..J_nmax and Y_0..Y_nmax at one argument. `y` is left empty when
/// `want_y` is false.
struct BesselTable {
  std::vector<cplx> j;
  std::vector<cplx> y;
};

/// J_n by power series (extended precision). Exposed for cross-checking
/// against the recurrence path.
inline cplx bessel_j_series(int order, cplx z) {
  detail::check_range(order, z);
  const auto v = detail::series_j(order, detail::lcplx(z.real(), z.imag()));
  return {double(v.real()), double(v.imag())};
}

/// J_n by Miller's recurrence regardless of |z|.
inline cplx bessel_j_recurrence(int order, cplx z) {
  detail::check_range(order, z);
  if (z == cplx(0)) return order == 0 ? 1.0 : 0.0;
  const auto f = detail::miller_j(detail::miller_start(order, std::abs(z)), z);
  return f[order];
}

inline BesselTable bessel_table(int nmax, cplx z, bool want_y = true) {
  detail::check_range(nmax, z);
  if (want_y) detail::check_branch(z);
  if (want_y && std::abs(z.imag()) > detail::kHankelPathImag) {
    // J and Y are real on the real axis, so conj(f(z)) = f(conj z)
    const bool lower = z.imag() < 0;
    const cplx zu = lower ? std::conj(z) : z;
    BesselTable out = bessel_table(std::max(nmax, 1), zu, false);
    out.y = detail::y_from_hankel1(out.j, zu, nmax);
    out.j.resize(static_cast<std::size_t>(nmax) + 1);
    if (lower) {
      for (auto& v : out.j) v = std::conj(v);
      for (auto& v : out.y) v = std::conj(v);
    }
    return out;
  }
  BesselTable out;
  out.j.resize(static_cast<std::size_t>(nmax) + 1);
  const double absz = std::abs(z);
  if (absz <= kSeriesRadius) {
    const detail::lcplx zl(z.real(), z.imag());
    detail::lcplx j0{}, j1{};
    for (int n = 0; n <= nmax; ++n) {
      const auto v = detail::series_j(n, zl);
      out.j[n] = {double(v.real()), double(v.imag())};
      if (n == 0) j0 = v;
      if (n == 1) j1 = v;
    }
    if (want_y) {
      if (nmax < 1) j1 = detail::series_j(1, zl);
      detail::lcplx y0, y1;
      detail::series_y01(zl, j0, j1, y0, y1);
      out.y.resize(out.j.size());
      out.y[0] = {double(y0.real()), double(y0.imag())};
      if (nmax >= 1) out.y[1] = {double(y1.real()), double(y1.imag())};
      detail::lcplx ym1 = y0, ycur = y1;
      for (int n = 1; n < nmax; ++n) {
        const detail::lcplx next = detail::ldouble(2 * n) / zl * ycur - ym1;
        ym1 = ycur;
        ycur = next;
        out.y[n + 1] = {double(next.real()), double(next.imag())};
      }
    }
    return out;
  }
  const auto f = detail::miller_j(detail::miller_start(nmax, absz), z);
  std::copy(f.begin(), f.begin() + nmax + 1, out.j.begin());
  if (want_y) {
    cplx y0, y1;
    detail::neumann_y01(f, z, y0, y1);
    out.y.resize(out.j.size());
    out.y[0] = y0;
    if (nmax >= 1) out.y[1] = y1;
    for (int n = 1; n < nmax; ++n) {
      out.y[n + 1] = (2.0 * n) / z * out.y[n] - out.y[n - 1];
    }
  }
  return out;
}

/// J_order(z). Working range: order <= 200, |z| < 1e4.
inline cplx bessel_j(int order, cplx z) {
  return bessel_table(order, z, false).j[order];
}

/// Y_order(z), principal branch; z must not lie on (-inf, 0].
inline cplx bessel_y(int order, cplx z) {
  detail::check_range(order, z);
  detail::check_branch(z);
  return bessel_table(order, z, true).y[order];
}

inline cplx hankel1(int order, cplx z) {
  const auto t = bessel_table(order, z, true);
  return t.j[order] + kI * t.y[order];
}

inline cplx hankel2(int order, cplx z) {
  const auto t = bessel_table(order, z, true);
  return t.j[order] - kI * t.y[order];
}

/// J0, J1, Y0, Y1 at a positive real argument. Hot path of the assembly.
struct RealBessel01 {
  double j0, j1, y0, y1;
};

inline RealBessel01 bessel01_real(double x) {
  using detail::ldouble;
  if (!(x > 0.0)) throw DomainError("bessel01_real requires x > 0");
  if (x <= kSeriesRadius) {
    const ldouble half = ldouble(x) / 2;
    const ldouble q = half * half;
    ldouble t0 = 1, j0 = 1, t1 = half, j1 = half;
    ldouble ty0 = 1, sy0 = 0, harmonic = 0;
    ldouble ty1 = 1, hk = 0;
    ldouble sy1 = 2 * (-detail::kGammaL) + 1;  // k = 0 term of psi sum
    for (int k = 1; k < 200; ++k) {
      t0 *= -q / (ldouble(k) * k);
      j0 += t0;
      t1 *= -q / (ldouble(k) * (k + 1));
      j1 += t1;
      harmonic += 1.0L / k;
      ty0 *= -q / (ldouble(k) * k);
      sy0 += -ty0 * harmonic;
      ty1 *= -q / (ldouble(k) * (k + 1));
      hk += 1.0L / k;
      sy1 += (2 * (-detail::kGammaL + hk) + 1.0L / (k + 1)) * ty1;
      if (k > half && std::fabs(t0) < 1e-22L && std::fabs(ty1) < 1e-22L) break;
    }
    const ldouble lg = std::log(half);
    const ldouble y0 = (2.0L / detail::kPiL) * ((lg + detail::kGammaL) * j0 + sy0);
    const ldouble y1 = -2.0L / (detail::kPiL * x) +
                       (2.0L / detail::kPiL) * lg * j1 -
                       (1.0L / detail::kPiL) * half * sy1;
    return {double(j0), double(j1), double(y0), double(y1)};
  }
  // Miller recurrence, classic normalization 1 = J0 + 2 sum J_2k (real x).
  const int top = detail::miller_start(1, x);
  std::vector<double> f(static_cast<std::size_t>(top) + 2, 0.0);
  f[top] = 1e-30;
  double norm = 0.0;
  for (int k = top; k >= 1; --k) {
    f[k - 1] = (2.0 * k / x) * f[k] - f[k + 1];
    if (((k - 1) & 1) == 0) norm += (k - 1 == 0 ? 1.0 : 2.0) * f[k - 1];
    if (std::fabs(f[k - 1]) > 1e200) {
      for (int m = k - 1; m <= top + 1; ++m) f[m] *= 1e-200;
      norm *= 1e-200;
    }
  }
  for (auto& v : f) v /= norm;
  const double logterm = std::log(x / 2.0) + kEulerGamma;
  double s0 = 0.0, s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= top; ++k) {
    const double sgn = (k & 1) ? -1.0 : 1.0;
    s0 += sgn * f[2 * k] / k;
    s1 += sgn * (f[2 * k - 1] - f[2 * k + 1]) / k;
  }
  const double y0 = (2.0 / kPi) * logterm * f[0] - (4.0 / kPi) * s0;
  const double y1 = (2.0 / kPi) * logterm * f[1] - (2.0 / kPi) * f[0] / x +
                    (2.0 / kPi) * s1;
  return {f[0], f[1], y0, y1};
}

/// Outgoing 2D Helmholtz kernel G(r) = H0^(2)(k r) / (4i).
inline cplx green2d(double k, double r) {
  if (!(r > 0.0)) throw DomainError("green2d requires r > 0");
  if (!(k > 0.0)) throw DomainError("green2d requires k > 0");
  const auto b = bessel01_real(k * r);
  return cplx(-b.y0, -b.j0) / 4.0;
}

/// dG/dr = (i k / 4) H1^(2)(k r). The gradient is dG/dr times (x - y)/r.
inline cplx green2d_dr(double k, double r) {
  if (!(r > 0.0)) throw DomainError("green2d_dr requires r > 0");
  if (!(k > 0.0)) throw DomainError("green2d_dr requires k > 0");
  const auto b = bessel01_real(k * r);
  return cplx(k * b.y1, k * b.j1) / 4.0;
}

/// Kernel pieces needed by singular quadrature at one distance.
///   g       = G(r)
///   dg_dr   = dG/dr
///   j0      = J0(k r)   (coefficient of -ln(r)/(2 pi) in G)
///   g_reg   = G(r) + J0(k r) ln(r) / (2 pi)   (smooth in r)
struct KernelSample {
  cplx g;
  cplx dg_dr;
  double j0;
  cplx g_reg;
};

inline KernelSample green2d_sample(double k, double r) {
  const auto b = bessel01_real(k * r);
  KernelSample s;
  s.g = cplx(-b.y0, -b.j0) / 4.0;
  s.dg_dr = cplx(k * b.y1, k * b.j1) / 4.0;
  s.j0 = b.j0;
  s.g_reg = s.g + b.j0 * std::log(r) / (2.0 * kPi);
  return s;
}

}  // namespace specfun
}  // namespace hoibc
