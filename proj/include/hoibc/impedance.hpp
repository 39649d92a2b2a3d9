#pragma once

#include <array>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoibc/errors.hpp"
#include "hoibc/specfun.hpp"

namespace hoibc {

enum class Polarization { TE, TM };
enum class IbcOrder { IBC0 = 0, IBC1 = 1, IBC2 = 2 };
enum class FitMethod { taylor, pade, collocation };

inline int pol_index(Polarization p) { return p == Polarization::TE ? 1 : 2; }
inline const char* to_string(Polarization p) { return p == Polarization::TE ? "TE" : "TM"; }
inline const char* to_string(IbcOrder o) {
  switch (o) {
    case IbcOrder::IBC0: return "IBC0";
    case IbcOrder::IBC1: return "IBC1";
    default: return "IBC2";
  }
}
inline const char* to_string(FitMethod m) {
  switch (m) {
    case FitMethod::taylor: return "taylor";
    case FitMethod::pade: return "pade";
    default: return "collocation";
  }
}

/// Single dielectric/magnetic layer on a perfect conductor.
struct CoatingSpec {
  cplx eps_r{1.0};
  cplx mu_r{1.0};
  double thickness = 0.0;  // m
};

/// Z(xi) = (a0 + a xi + ap xi^2) / (1 + b xi + bp xi^2), xi = -sin^2(theta).
/// Values are in the dimensionless xi convention; assembly rescales by k0.
struct IbcCoefficients {
  IbcOrder order = IbcOrder::IBC0;
  Polarization pol = Polarization::TE;
  cplx a0{0.0};
  cplx a{0.0};
  cplx b{0.0};
  cplx ap{0.0};  // a'_j
  cplx bp{0.0};  // b'_j
  std::optional<CoatingSpec> coating;  // material the fit came from, if any
};

struct SucClause {
  std::string name;
  double lhs = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct SucReport {
  bool passed = false;
  double tolerance = 0.0;
  std::vector<SucClause> clauses;
  // IBC2 only
  cplx delta{0.0};
  double alpha = 0.0;
  double beta = 0.0;

  const SucClause* find(const std::string& name) const {
    for (const auto& c : clauses)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline double xi_of_theta(double theta) {
  const double s = std::sin(theta);
  return -s * s;
}

inline void check_coating(const CoatingSpec& c, double k0) {
  if (!(k0 > 0) || !std::isfinite(k0)) throw RangeError("k0 must be positive and finite");
  if (!(c.thickness >= 0) || !std::isfinite(c.thickness))
    throw RangeError("coating thickness must be finite and non-negative");
  if (c.eps_r == cplx(0) || c.mu_r == cplx(0)) throw RangeError("eps_r and mu_r must be nonzero");
}

// tan(arg) with a pole guard; n is the branch pi/2 + n pi.
inline cplx guarded_tan(cplx arg) {
  const double n = std::round((arg.real() - kPi / 2) / kPi);
  const cplx pole = kPi / 2 + n * kPi;
  if (std::abs(arg - pole) < 1e-10) {
    std::ostringstream msg;
    msg << "impedance resonance: k_z d = " << arg.real() << " near pi/2 + " << n << " pi";
    throw ResonanceError(msg.str(), static_cast<long>(n));
  }
  return std::tan(arg);
}

// Z as a function of complex xi (analytic continuation used by the
// contour-integral Taylor coefficients).
inline cplx impedance_at(Polarization pol, cplx xi, const CoatingSpec& c, double k0) {
  const cplx s = std::sqrt(c.mu_r * c.eps_r + xi);
  const double t = k0 * c.thickness;
  if (pol == Polarization::TE) return kFreeSpaceImpedance * s * guarded_tan(s * t) / c.eps_r;
  if (std::abs(s) < 1e-8) return kFreeSpaceImpedance * c.mu_r * t;  // removable
  return kFreeSpaceImpedance * c.mu_r * guarded_tan(s * t) / s;
}

}  // namespace detail

/// Exact planar impedance of the coated ground plane for spectral variable xi.
inline cplx exact_impedance(Polarization pol, double xi, const CoatingSpec& c, double k0) {
  detail::check_coating(c, k0);
  if (!(xi > -1.0 - 1e-15 && xi <= 0.0)) throw RangeError("xi outside (-1, 0]");
  return detail::impedance_at(pol, xi, c, k0);
}

inline cplx leontovich_a0(const CoatingSpec& c, double k0) {
  detail::check_coating(c, k0);
  const cplx n = std::sqrt(c.mu_r * c.eps_r);
  return kFreeSpaceImpedance * std::sqrt(c.mu_r / c.eps_r) *
         detail::guarded_tan(n * k0 * c.thickness);
}

/// Taylor coefficients c_0..c_kmax of Z(xi) at xi = 0 from a Cauchy
/// integral on a circle of half the distance to the nearest tan pole.
inline std::vector<cplx> taylor_coefficients(Polarization pol, const CoatingSpec& c, double k0,
                                             int kmax) {
  detail::check_coating(c, k0);
  const cplx w0 = c.mu_r * c.eps_r;
  const double t = k0 * c.thickness;
  double dist = 1e6;
  if (t > 0) {
    for (int n = 0; n < 64; ++n) {
      const double sp = (n + 0.5) * kPi / t;
      dist = std::min(dist, std::abs(sp * sp - w0));
    }
  }
  const double rho = std::min(0.5 * dist, 1e3);
  constexpr int m = 128;
  std::vector<cplx> out(static_cast<std::size_t>(kmax) + 1, cplx(0));
  for (int j = 0; j < m; ++j) {
    const cplx e = std::polar(1.0, 2 * kPi * j / m);
    const cplx z = detail::impedance_at(pol, rho * e, c, k0);
    cplx ek = 1.0;
    for (int k = 0; k <= kmax; ++k) {
      out[k] += z / ek;
      ek *= e;
    }
  }
  double rk = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    out[k] /= (m * rk);
    rk *= rho;
  }
  out[0] = leontovich_a0(c, k0);
  return out;
}

/// c1 and c2 for TE in closed form.
inline std::array<cplx, 3> taylor_closed_form_te(const CoatingSpec& c, double k0) {
  const double z0 = kFreeSpaceImpedance;
  const cplx er = c.eps_r, mr = c.mu_r;
  const cplx n = std::sqrt(mr * er);
  const double kd = k0 * c.thickness;
  const cplx tn = detail::guarded_tan(n * kd);
  const cplx c0 = z0 * std::sqrt(mr / er) * tn;
  const cplx c1 = z0 * kd / (2.0 * er) + z0 * tn / (2.0 * n * er) + z0 * kd * tn * tn / (2.0 * er);
  const cplx c2 = z0 * kd / (8.0 * er * er * mr) +
                  (z0 * kd * kd / (4.0 * er * n) - z0 / (8.0 * er * n * n * n)) * tn +
                  z0 * kd / (8.0 * er * er * mr) * tn * tn +
                  z0 * kd * kd / (4.0 * er * n) * tn * tn * tn;
  return {c0, c1, c2};
}

/// IBC1 Pade coefficients from a Taylor series.
inline IbcCoefficients pade11_from_taylor(cplx c0, cplx c1, cplx c2, Polarization pol) {
  if (std::abs(c1) == 0.0) throw DegenerateFitError("Pade IBC1: first Taylor coefficient is zero");
  IbcCoefficients r;
  r.order = IbcOrder::IBC1;
  r.pol = pol;
  r.a0 = c0;
  r.b = -c2 / c1;
  r.a = c1 - c0 * c2 / c1;
  return r;
}

/// [2/2] Pade from c0..c4. When the series is exactly that of a [1/1]
/// rational the Hankel system is singular and the [1/1] form is returned.
inline IbcCoefficients pade22_from_taylor(const std::array<cplx, 5>& c, Polarization pol) {
  const cplx det = c[2] * c[2] - c[1] * c[3];
  const double scale = std::abs(c[2] * c[2]) + std::abs(c[1] * c[3]);
  IbcCoefficients r;
  r.pol = pol;
  r.a0 = c[0];
  if (scale == 0.0 || std::abs(det) <= 1e-13 * scale) {
    if (std::abs(c[1]) > 0) {
      const cplx b1 = -c[2] / c[1];
      const double s3 = std::abs(c[3]) + std::abs(b1 * c[2]);
      const double s4 = std::abs(c[4]) + std::abs(b1 * c[3]);
      const bool consistent = std::abs(c[3] + b1 * c[2]) <= 1e-10 * (s3 + 1e-300) &&
                              std::abs(c[4] + b1 * c[3]) <= 1e-10 * (s4 + 1e-300);
      if (consistent) {
        auto lower = pade11_from_taylor(c[0], c[1], c[2], pol);
        lower.order = IbcOrder::IBC2;
        return lower;
      }
    }
    throw DegenerateFitError("Pade IBC2: singular Hankel system");
  }
  // [c2 c1; c3 c2] [b; bp] = -[c3; c4]
  r.b = (-c[3] * c[2] + c[1] * c[4]) / det;
  r.bp = (-c[2] * c[4] + c[3] * c[3]) / det;
  r.a = c[1] + r.b * c[0];
  r.ap = c[2] + r.b * c[1] + r.bp * c[0];
  r.order = IbcOrder::IBC2;
  return r;
}

inline IbcCoefficients leontovich_ibc0(const CoatingSpec& c, Polarization pol, double k0) {
  IbcCoefficients r;
  r.order = IbcOrder::IBC0;
  r.pol = pol;
  r.a0 = leontovich_a0(c, k0);
  r.coating = c;
  return r;
}

/// First-order Taylor fit: b = 0, a = dZ/dxi at 0.
inline IbcCoefficients taylor_ibc1(const CoatingSpec& c, double k0,
                                   Polarization pol = Polarization::TE) {
  IbcCoefficients r;
  r.order = IbcOrder::IBC1;
  r.pol = pol;
  r.a0 = leontovich_a0(c, k0);
  r.a = pol == Polarization::TE ? taylor_closed_form_te(c, k0)[1]
                                : taylor_coefficients(pol, c, k0, 1)[1];
  r.coating = c;
  return r;
}

/// Second-order Taylor fit: b = bp = 0.
inline IbcCoefficients taylor_ibc2(const CoatingSpec& c, Polarization pol, double k0) {
  const auto t = taylor_coefficients(pol, c, k0, 2);
  IbcCoefficients r;
  r.order = IbcOrder::IBC2;
  r.pol = pol;
  r.a0 = t[0];
  r.a = t[1];
  r.ap = t[2];
  r.coating = c;
  return r;
}

inline IbcCoefficients pade_ibc1(const CoatingSpec& c, Polarization pol, double k0) {
  std::array<cplx, 3> t;
  if (pol == Polarization::TE) {
    t = taylor_closed_form_te(c, k0);
  } else {
    const auto n = taylor_coefficients(pol, c, k0, 2);
    t = {n[0], n[1], n[2]};
  }
  auto r = pade11_from_taylor(t[0], t[1], t[2], pol);
  r.coating = c;
  return r;
}

inline IbcCoefficients pade_ibc2(const CoatingSpec& c, Polarization pol, double k0) {
  const auto n = taylor_coefficients(pol, c, k0, 4);
  auto r = pade22_from_taylor({n[0], n[1], n[2], n[3], n[4]}, pol);
  r.coating = c;
  return r;
}

inline IbcCoefficients collocation_ibc1(const CoatingSpec& c, Polarization pol, double k0,
                                        double theta1, double theta2) {
  for (double th : {theta1, theta2})
    if (!(th > 0 && th < kPi / 2)) throw RangeError("collocation angle outside (0, pi/2)");
  if (theta1 == theta2) throw DegenerateFitError("collocation angles coincide");
  const cplx a0 = leontovich_a0(c, k0);
  const double x1 = detail::xi_of_theta(theta1), x2 = detail::xi_of_theta(theta2);
  const cplx z1 = exact_impedance(pol, x1, c, k0), z2 = exact_impedance(pol, x2, c, k0);
  // [x1, -x1 z1; x2, -x2 z2] [a; b] = [z1 - a0; z2 - a0]
  const cplx det = x1 * x2 * (z1 - z2);
  const double scale = std::abs(x1 * x2) * std::max(std::abs(z1), std::abs(z2));
  if (scale == 0.0 || std::abs(det) <= 1e-14 * scale)
    throw DegenerateFitError("collocation system is singular (collinear collocation)");
  const cplx r1 = z1 - a0, r2 = z2 - a0;
  IbcCoefficients r;
  r.order = IbcOrder::IBC1;
  r.pol = pol;
  r.a0 = a0;
  r.a = (-x2 * z2 * r1 + x1 * z1 * r2) / det;
  r.b = (-x2 * r1 + x1 * r2) / det;
  r.coating = c;
  return r;
}

inline IbcCoefficients collocation_ibc2(const CoatingSpec& c, Polarization pol, double k0,
                                        const std::array<double, 4>& thetas) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(thetas[i] > 0 && thetas[i] < kPi / 2))
      throw RangeError("collocation angle outside (0, pi/2)");
    for (std::size_t j = 0; j < i; ++j)
      if (thetas[i] == thetas[j]) throw DegenerateFitError("collocation angles coincide");
  }
  const cplx a0 = leontovich_a0(c, k0);
  Eigen::Matrix4cd m;
  Eigen::Vector4cd rhs;
  for (int k = 0; k < 4; ++k) {
    const double x = detail::xi_of_theta(thetas[k]);
    const cplx z = exact_impedance(pol, x, c, k0);
    // unknowns (a - a0 b, ap - a0 bp, b, bp); same conditions, better scaled
    m(k, 0) = x;
    m(k, 1) = x * x;
    m(k, 2) = -x * (z - a0);
    m(k, 3) = -x * x * (z - a0);
    rhs(k) = z - a0;
  }
  // condition of the column-equilibrated matrix
  Eigen::Matrix4cd eq = m;
  Eigen::Vector4d colscale;
  for (int j = 0; j < 4; ++j) {
    colscale(j) = eq.col(j).norm();
    if (colscale(j) == 0.0)
      throw DegenerateFitError("IBC2 collocation system is singular (zero column)");
    eq.col(j) /= colscale(j);
  }
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(eq);
  const auto sv = svd.singularValues();
  const double cond = sv(3) > 0 ? sv(0) / sv(3) : INFINITY;
  if (!(cond <= 1e12)) {
    std::ostringstream msg;
    msg << "IBC2 collocation system ill-conditioned (condition " << cond << ")";
    throw DegenerateFitError(msg.str());
  }
  const Eigen::Vector4cd y = eq.fullPivLu().solve(rhs);
  IbcCoefficients r;
  r.order = IbcOrder::IBC2;
  r.pol = pol;
  r.a0 = a0;
  r.b = y(2) / colscale(2);
  r.bp = y(3) / colscale(3);
  r.a = y(0) / colscale(0) + a0 * r.b;
  r.ap = y(1) / colscale(1) + a0 * r.bp;
  r.coating = c;
  return r;
}

inline const std::array<double, 2> kDefaultCollocation1{kPi / 6, kPi / 3};
inline const std::array<double, 4> kDefaultCollocation2{kPi / 9, 2 * kPi / 9, kPi / 3,
                                                         4 * kPi / 9};

/// Dispatch on order and method. Collocation angles in radians; empty
/// means the defaults (30, 60 deg for IBC1; 20, 40, 60, 80 deg for IBC2).
inline IbcCoefficients fit_coefficients(const CoatingSpec& c, Polarization pol, double k0,
                                        IbcOrder order, FitMethod method,
                                        const std::vector<double>& angles = {}) {
  if (order == IbcOrder::IBC0) return leontovich_ibc0(c, pol, k0);
  if (order == IbcOrder::IBC1) {
    switch (method) {
      case FitMethod::taylor: return taylor_ibc1(c, k0, pol);
      case FitMethod::pade: return pade_ibc1(c, pol, k0);
      default: {
        if (!angles.empty() && angles.size() != 2)
          throw UsageError("IBC1 collocation needs exactly 2 angles");
        const auto th = angles.empty() ? kDefaultCollocation1
                                       : std::array<double, 2>{angles[0], angles[1]};
        return collocation_ibc1(c, pol, k0, th[0], th[1]);
      }
    }
  }
  switch (method) {
    case FitMethod::taylor: return taylor_ibc2(c, pol, k0);
    case FitMethod::pade: return pade_ibc2(c, pol, k0);
    default: {
      if (!angles.empty() && angles.size() != 4)
        throw UsageError("IBC2 collocation needs exactly 4 angles");
      const auto th = angles.empty()
                          ? kDefaultCollocation2
                          : std::array<double, 4>{angles[0], angles[1], angles[2], angles[3]};
      return collocation_ibc2(c, pol, k0, th);
    }
  }
}

inline cplx eval_rational(const IbcCoefficients& k, double xi) {
  const cplx num = k.a0 + k.a * xi + k.ap * xi * xi;
  const cplx den = 1.0 + k.b * xi + k.bp * xi * xi;
  const double scale = 1.0 + std::abs(k.b * xi) + std::abs(k.bp * xi * xi);
  if (std::abs(den) <= 1e-14 * scale) {
    std::ostringstream msg;
    msg << "rational impedance has a pole at xi = " << xi;
    throw PoleError(msg.str());
  }
  return num / den;
}

/// Multiply the impedance-valued coefficients by i. The fitted values are
/// the real-valued reactance form; under exp(+i omega t) the surface
/// impedance of the layer is i times that.
inline IbcCoefficients to_physical(IbcCoefficients k) {
  k.a0 *= kI;
  k.a *= kI;
  k.ap *= kI;
  return k;
}

namespace detail {

inline void add_material_clauses(const IbcCoefficients& k, SucReport& r) {
  const double im_mu = k.coating ? k.coating->mu_r.imag() : 0.0;
  const double im_eps = k.coating ? k.coating->eps_r.imag() : 0.0;
  r.clauses.push_back({"Im(mu) <= 0", im_mu, 0.0, im_mu <= 0.0});
  r.clauses.push_back({"Im(eps) <= 0", im_eps, 0.0, im_eps <= 0.0});
}

// Relative counterpart of an absolute tolerance given in ohms.
inline double relative_tolerance(const IbcCoefficients& k, double tol) {
  return std::abs(k.a0) > 0 ? tol / std::abs(k.a0) : tol;
}

inline void finish(SucReport& r) {
  r.passed = true;
  for (const auto& c : r.clauses) r.passed = r.passed && c.pass;
}

}  // namespace detail

inline double default_suc_tolerance(const IbcCoefficients& k) { return 1e-9 * std::abs(k.a0); }

/// Sufficient uniqueness conditions for IBC1. Equalities are tested with
/// |.| <= tol; sign conditions allow tol/|a0| times the size of their terms.
/// Material clauses use the recorded coating and pass trivially when none
/// is recorded.
inline SucReport suc_check_ibc1(const IbcCoefficients& k, double tol) {
  if (k.order != IbcOrder::IBC1) throw UsageError("suc_check_ibc1 needs IBC1 coefficients");
  SucReport r;
  r.tolerance = tol;
  detail::add_material_clauses(k, r);
  const cplx g = k.a - std::conj(k.b) * k.a0;
  r.clauses.push_back({"a - conj(b) a0 != 0", std::abs(g), tol, std::abs(g) > tol});
  r.clauses.push_back({"Re(a - conj(b) a0) = 0", std::abs(g.real()), tol,
                       std::abs(g.real()) <= tol});
  const double rel = detail::relative_tolerance(k, tol);
  const double p1 = (std::conj(k.a0) * k.a).imag() * g.imag();
  const double t1 = rel * std::abs(k.a0) * std::abs(k.a) * std::abs(g);
  r.clauses.push_back({"Im(conj(a0) a) Im(a - conj(b) a0) >= 0", p1, t1, p1 >= -t1});
  const double p2 = k.b.imag() * g.imag();
  const double t2 = rel * std::abs(k.b) * std::abs(g);
  r.clauses.push_back({"Im(b) Im(a - conj(b) a0) >= 0", p2, t2, p2 >= -t2});
  detail::finish(r);
  return r;
}

/// IBC2 conditions with Delta, alpha, beta. Delta-weighted equalities are
/// divided by |Delta| so the tolerance keeps impedance units.
inline SucReport suc_check_ibc2(const IbcCoefficients& k, double tol) {
  if (k.order != IbcOrder::IBC2) throw UsageError("suc_check_ibc2 needs IBC2 coefficients");
  SucReport r;
  r.tolerance = tol;
  detail::add_material_clauses(k, r);
  const cplx a0 = k.a0, a = k.a, b = k.b, ap = k.ap, bp = k.bp;
  const cplx u = a * std::conj(bp) - ap * std::conj(b);
  const cplx v = ap - a0 * std::conj(bp);
  const cplx delta = (a0 * std::conj(b) - a) * u - v * v;
  const double alpha = (std::conj(delta) * u).imag();
  const double beta = (std::conj(delta) * (a0 * std::conj(bp) - ap)).imag();
  r.delta = delta;
  r.alpha = alpha;
  r.beta = beta;

  // "Delta != 0" is judged against the size of the terms that form it
  const double ad = std::abs(delta);
  const double dscale = std::abs((a0 * std::conj(b) - a) * u) + std::abs(v * v);
  const double rel = detail::relative_tolerance(k, tol);
  r.clauses.push_back({"Delta != 0", dscale > 0 ? ad / dscale : 0.0, rel,
                       dscale > 0 && ad > rel * dscale});
  const double e1 = ad > 0 ? std::abs((std::conj(delta) * u).real()) / ad : 0.0;
  r.clauses.push_back({"Re[conj(Delta)(a conj(bp) - ap conj(b))] = 0", e1, tol, e1 <= tol});
  const double e2 = ad > 0 ? std::abs((std::conj(delta) * v).real()) / ad : 0.0;
  r.clauses.push_back({"Re[conj(Delta)(ap - a0 conj(bp))] = 0", e2, tol, e2 <= tol});

  // inequalities pass within rel times the magnitude of their terms
  const double aa = std::abs(alpha), ab = std::abs(beta);
  const double i1 = alpha * bp.imag() + beta * (b * std::conj(bp)).imag();
  const double s1 = rel * (aa * std::abs(bp) + ab * std::abs(b * bp));
  r.clauses.push_back({"alpha Im(bp) + beta Im(b conj(bp)) <= 0", i1, s1, i1 <= s1});
  const double i2 = alpha * (ap * std::conj(a0)).imag() - beta * (ap * std::conj(a)).imag();
  const double s2 = rel * (aa * std::abs(ap * a0) + ab * std::abs(ap * a));
  r.clauses.push_back({"alpha Im(ap conj(a0)) - beta Im(ap conj(a)) <= 0", i2, s2, i2 <= s2});
  const double i3 = -alpha * b.imag() + beta * bp.imag();
  const double s3 = rel * (aa * std::abs(b) + ab * std::abs(bp));
  r.clauses.push_back({"-alpha Im(b) + beta Im(bp) <= 0", i3, s3, i3 <= s3});
  const double i4 = alpha * (a * std::conj(a0)).imag() - beta * (ap * std::conj(a0)).imag();
  const double s4 = rel * (aa * std::abs(a * a0) + ab * std::abs(ap * a0));
  r.clauses.push_back({"alpha Im(a conj(a0)) - beta Im(ap conj(a0)) >= 0", i4, s4, i4 >= -s4});
  detail::finish(r);
  return r;
}

/// Coercivity condition Re(a) + |a0| |b + conj(a)/conj(a0)| / 2 = 0.
inline SucReport wellposedness_check(const IbcCoefficients& k, double tol) {
  if (k.order == IbcOrder::IBC0) throw UsageError("well-posedness check needs IBC1 or IBC2");
  if (k.a0 == cplx(0)) throw UsageError("well-posedness check: a0 = 0");
  SucReport r;
  r.tolerance = tol;
  const double lhs =
      k.a.real() + std::abs(k.a0) * std::abs(k.b + std::conj(k.a) / std::conj(k.a0)) / 2.0;
  const std::string name =
      "Re(a" + std::to_string(pol_index(k.pol)) + ") + |a0| |b + conj(a)/conj(a0)|/2 = 0";
  r.clauses.push_back({name, lhs, tol, std::abs(lhs) <= tol});
  detail::finish(r);
  return r;
}

inline void write_report(std::ostream& os, const std::string& prefix, const SucReport& r) {
  os << std::setprecision(10);
  for (std::size_t i = 0; i < r.clauses.size(); ++i) {
    const auto& c = r.clauses[i];
    os << prefix << ".clause" << i << ".name=" << c.name << "\n"
       << prefix << ".clause" << i << ".lhs=" << c.lhs << "\n"
       << prefix << ".clause" << i << ".tol=" << c.tol << "\n"
       << prefix << ".clause" << i << ".pass=" << (c.pass ? "true" : "false") << "\n";
  }
  os << prefix << ".passed=" << (r.passed ? "true" : "false") << "\n";
}

struct ImpedanceRow {
  double theta_deg;
  cplx exact, ibc0, ibc1, ibc2;
};

/// Exact and fitted impedances on a theta grid (degrees).
inline std::vector<ImpedanceRow> impedance_table(const CoatingSpec& c, Polarization pol, double k0,
                                                 const IbcCoefficients& ibc1,
                                                 const IbcCoefficients& ibc2,
                                                 const std::vector<double>& thetas_deg) {
  const cplx a0 = leontovich_a0(c, k0);
  std::vector<ImpedanceRow> rows;
  rows.reserve(thetas_deg.size());
  for (double th : thetas_deg) {
    const double xi = detail::xi_of_theta(th * kPi / 180.0);
    rows.push_back({th, exact_impedance(pol, xi, c, k0), a0, eval_rational(ibc1, xi),
                    eval_rational(ibc2, xi)});
  }
  return rows;
}

inline double max_abs_error(const std::vector<ImpedanceRow>& rows, int order) {
  double m = 0;
  for (const auto& r : rows) {
    const cplx z = order == 0 ? r.ibc0 : order == 1 ? r.ibc1 : r.ibc2;
    m = std::max(m, std::abs(z - r.exact));
  }
  return m;
}

inline void write_impedance_csv(std::ostream& os, const std::vector<ImpedanceRow>& rows) {
  os << "theta_deg,Re_Zexact,Im_Zexact,Re_Zibc0,Im_Zibc0,Re_Zibc1,Im_Zibc1,Re_Zibc2,Im_Zibc2,"
        "abs_err_ibc0,abs_err_ibc1,abs_err_ibc2\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.theta_deg << ',' << r.exact.real() << ',' << r.exact.imag() << ','
       << r.ibc0.real() << ',' << r.ibc0.imag() << ',' << r.ibc1.real() << ','
       << r.ibc1.imag() << ',' << r.ibc2.real() << ',' << r.ibc2.imag() << ','
       << std::abs(r.ibc0 - r.exact) << ',' << std::abs(r.ibc1 - r.exact) << ','
       << std::abs(r.ibc2 - r.exact) << '\n';
  }
}

}  // namespace hoibc
