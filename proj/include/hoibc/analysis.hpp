#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hoibc/assembly.hpp"
#include "hoibc/linsolve.hpp"

namespace hoibc {

struct RcsPattern {
  std::vector<double> angles;  // degrees (or GHz for frequency sweeps)
  std::vector<double> sigma;   // dB(m)
  std::map<std::string, std::string> meta;
  std::string axis = "angle_deg";
};

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double deg2rad(double d) { return d * kPi / 180.0; }

/// C0 in  G(x, y) ~ C0 e^{-ikr} / sqrt(r) * e^{ik xhat.y}
inline cplx far_field_constant(double k) {
  return (-kI / 4.0) * std::sqrt(2.0 / (kPi * k)) * std::exp(kI * (kPi / 4.0));
}

/// Far-field amplitude F(phi), u_sc ~ F e^{-ikr}/sqrt(r), at angles in radians.
inline std::vector<cplx> far_field(const SurfaceCurrents& cur, const Contour& c, Polarization pol,
                                   double k, const std::vector<double>& phis, int order = 8) {
  const auto r = detail::unit_rule(QuadKind::gauss_legendre, order);
  const double z0 = kFreeSpaceImpedance;
  const cplx c0 = far_field_constant(k);
  const bool p0 = cur.field_space == SpaceKind::P0_elementwise;
  std::vector<cplx> out;
  out.reserve(phis.size());
  for (double phi : phis) {
    const Vec2 xh{std::cos(phi), std::sin(phi)};
    cplx acc = 0;
    for (std::size_t e = 0; e < c.element_count(); ++e) {
      const double nx = dot(c.normal[e], xh), h = c.length[e];
      const std::size_t n0 = c.elements[e][0], n1 = c.elements[e][1];
      for (std::size_t q = 0; q < r.t.size(); ++q) {
        const double t = r.t[q];
        const cplx j = (1 - t) * cur.j(n0) + t * cur.j(n1);
        const cplx m = p0 ? cur.m(e) : (1 - t) * cur.m(n0) + t * cur.m(n1);
        const cplx ph = std::exp(kI * (k * dot(xh, c.point(e, t))));
        const cplx integrand = pol == Polarization::TE
                                   ? -kI * k * nx * j - kI * (k / z0) * m
                                   : kI * k * nx * m - kI * k * z0 * j;
        acc += r.w[q] * h * integrand * ph;
      }
    }
    out.push_back(c0 * acc);
  }
  return out;
}

/// Scattered field at a point from the same layer potentials as far_field.
inline cplx scattered_field(const SurfaceCurrents& cur, const Contour& c, Polarization pol,
                            double k, Vec2 x, int order = 8) {
  const auto r = detail::unit_rule(QuadKind::gauss_legendre, order);
  const double z0 = kFreeSpaceImpedance;
  const bool p0 = cur.field_space == SpaceKind::P0_elementwise;
  cplx acc = 0;
  for (std::size_t e = 0; e < c.element_count(); ++e) {
    const std::size_t n0 = c.elements[e][0], n1 = c.elements[e][1];
    for (std::size_t q = 0; q < r.t.size(); ++q) {
      const double t = r.t[q];
      const Vec2 y = c.point(e, t);
      const Vec2 d = x - y;
      const double rr = norm(d);
      const cplx g = specfun::green2d(k, rr);
      // dG/dn_y = dG/dr (y - x).n / r
      const cplx dgn = -specfun::green2d_dr(k, rr) * dot(d, c.normal[e]) / rr;
      const cplx j = (1 - t) * cur.j(n0) + t * cur.j(n1);
      const cplx m = p0 ? cur.m(e) : (1 - t) * cur.m(n0) + t * cur.m(n1);
      const cplx integrand =
          pol == Polarization::TE ? -dgn * j - kI * (k / z0) * g * m : dgn * m - kI * k * z0 * g * j;
      acc += r.w[q] * c.length[e] * integrand;
    }
  }
  return acc;
}

/// sigma = 2 pi |F|^2 / |A|^2 in dB(m).
inline RcsPattern echo_width(const std::vector<cplx>& f, const std::vector<double>& angles_deg,
                             cplx amplitude) {
  if (f.size() != angles_deg.size()) throw UsageError("echo_width: size mismatch");
  RcsPattern p;
  p.angles = angles_deg;
  for (const cplx v : f) p.sigma.push_back(to_db(2 * kPi * std::norm(v) / std::norm(amplitude)));
  return p;
}

// ---------------------------------------------------------------------------
// Series solution for a PEC cylinder of radius a with one coating layer to b.

struct SeriesSolutionSpec {
  double a = 1.0;
  double d = 0.1;
  cplx eps_r = 1.0, mu_r = 1.0;
  double k0 = 2 * kPi;
  int n_max = -1;  // <0: default truncation
  double b() const { return a + d; }
};

inline int default_truncation(double k0b) {
  return int(std::ceil(k0b)) +
         std::max(15, int(std::ceil(4.0 * std::cbrt(k0b))));
}

/// Modal coefficients c_0..c_N with u_sc = sum (-i)^n c_n H_n^(2)(k0 r) e^{in(phi - phi_inc)}.
inline std::vector<cplx> series_coefficients(const SeriesSolutionSpec& s, Polarization pol) {
  if (!(s.a > 0) || !(s.d >= 0) || !(s.k0 > 0)) throw UsageError("series: bad geometry");
  const double b = s.b(), x0 = s.k0 * b;
  const int nmax = s.n_max >= 0 ? s.n_max : default_truncation(x0);
  const auto t0 = specfun::bessel_table(nmax + 1, x0);
  std::vector<cplx> c(std::size_t(nmax) + 1);
  const bool pec = s.d == 0.0;
  specfun::BesselTable ta, tb;
  cplx k1 = 0, p = 0;
  if (!pec) {
    k1 = s.k0 * std::sqrt(s.eps_r * s.mu_r);
    ta = specfun::bessel_table(nmax + 1, k1 * s.a);
    tb = specfun::bessel_table(nmax + 1, k1 * b);
    p = pol == Polarization::TM ? 1.0 / s.mu_r : 1.0 / s.eps_r;
  }
  auto deriv = [](const std::vector<cplx>& f, int n, cplx z) {
    return n == 0 ? -f[1] : f[std::size_t(n) - 1] - double(n) / z * f[std::size_t(n)];
  };
  for (int n = 0; n <= nmax; ++n) {
    const std::size_t i = std::size_t(n);
    const cplx j = t0.j[i], y = t0.y[i];
    const cplx jp = deriv(t0.j, n, x0), yp = deriv(t0.y, n, x0);
    const cplx h = j - kI * y, hp = jp - kI * yp;
    if (pec) {
      c[i] = pol == Polarization::TM ? -j / h : -jp / hp;
      continue;
    }
    const cplx za = k1 * s.a, zb = k1 * b;
    cplx ua, va;  // R(r) = J_n(k1 r) ua - Y_n(k1 r) va
    if (pol == Polarization::TM) {
      ua = ta.y[i];
      va = ta.j[i];
    } else {
      ua = deriv(ta.y, n, za);
      va = deriv(ta.j, n, za);
    }
    const cplx R = tb.j[i] * ua - tb.y[i] * va;
    const cplx Rp = deriv(tb.j, n, zb) * ua - deriv(tb.y, n, zb) * va;
    c[i] = -(s.k0 * jp * R - p * k1 * Rp * j) / (s.k0 * hp * R - p * k1 * Rp * h);
  }
  return c;
}

/// S(psi) = c_0 + 2 sum c_n cos(n psi); sigma = (4/k0) |S|^2.
inline cplx series_amplitude(const std::vector<cplx>& c, double psi) {
  cplx s = c[0];
  for (std::size_t n = 1; n < c.size(); ++n) s += 2.0 * c[n] * std::cos(double(n) * psi);
  return s;
}

enum class SeriesMode { bistatic, monostatic };

struct SeriesDiagnostics {
  int n_max = 0;
  double tail = 0;  // 2 |c_N| / max |S|
};

/// Bistatic: angles are observation angles for incidence phi_inc.
/// Monostatic: angles are incidence directions and the pattern is backscatter,
/// which for a circular cylinder is the same value at every angle.
inline RcsPattern series_coated_cylinder(const SeriesSolutionSpec& s, Polarization pol,
                                         const std::vector<double>& angles_deg, SeriesMode mode,
                                         double phi_inc_deg = 0.0,
                                         SeriesDiagnostics* diag = nullptr,
                                         double tail_limit = 1e-10) {
  const auto c = series_coefficients(s, pol);
  RcsPattern p;
  p.angles = angles_deg;
  std::vector<cplx> amp;
  double smax = 0;
  for (double a : angles_deg) {
    const double psi = mode == SeriesMode::bistatic ? deg2rad(a - phi_inc_deg) : kPi;
    amp.push_back(series_amplitude(c, psi));
    smax = std::max(smax, std::abs(amp.back()));
  }
  const double tail = smax > 0 ? 2 * std::abs(c.back()) / smax : 0.0;
  if (tail > tail_limit) {
    std::ostringstream os;
    os << "series truncation tail " << tail << " exceeds " << tail_limit << " at N_max "
       << c.size() - 1;
    throw TruncationError(os.str());
  }
  for (const cplx v : amp) p.sigma.push_back(to_db(4.0 / s.k0 * std::norm(v)));
  if (diag) *diag = {int(c.size()) - 1, tail};
  p.meta["source"] = "exact";
  p.meta["pol"] = to_string(pol);
  p.meta["k0"] = std::to_string(s.k0);
  p.meta["n_max"] = std::to_string(c.size() - 1);
  std::ostringstream t;
  t << tail;
  p.meta["truncation_tail"] = t.str();
  return p;
}

/// Extinction width from the forward amplitude and scattering width from the
/// angular integral of sigma (both linear, in m).
struct OpticalTheorem {
  double extinction = 0, scattering = 0;
};

inline OpticalTheorem optical_theorem(const SeriesSolutionSpec& s, Polarization pol,
                                      int samples = 0) {
  const auto c = series_coefficients(s, pol);
  if (samples <= 0) samples = 8 * int(c.size()) + 16;
  OpticalTheorem o;
  o.extinction = -4.0 / s.k0 * series_amplitude(c, 0.0).real();
  double acc = 0;
  for (int i = 0; i < samples; ++i)
    acc += 4.0 / s.k0 * std::norm(series_amplitude(c, 2 * kPi * i / samples));
  o.scattering = acc / samples;
  return o;
}

// ---------------------------------------------------------------------------
// BEM pipeline

struct BemSolution {
  AssembledSystem system;
  Factorization factorization;
  std::vector<SurfaceCurrents> currents;  // one per incidence angle
  std::vector<double> phi_inc;            // radians
};

/// Assemble, reduce and factor once; solve for each incidence direction.
inline BemSolution bem_solve(const Contour& c, const IbcCoefficients& coeffs, double k0,
                             const std::vector<double>& phi_inc, const AssemblyOptions& opt = {},
                             cplx amplitude = 1.0) {
  if (phi_inc.empty()) throw UsageError("bem_solve: no incidence angles");
  BemSolution out;
  IncidentWave w{phi_inc.front(), amplitude, coeffs.pol, k0};
  out.system = reduce_system(build_full_system(c, coeffs, w, opt));
  out.factorization = lu_factor(out.system.reduced_matrix);
  out.phi_inc = phi_inc;
  const FieldLayout& L = out.system.layout;
  for (double phi : phi_inc) {
    w.phi = phi;
    const RhsPair r = assemble_rhs(c, w, opt.field_space);
    CVector b(L.primary_size());
    b.head(L.nj()) = detail::restrict_to(r.e, L.p1_free);
    b.tail(L.nw()) = detail::restrict_to(r.h, L.field_free);
    out.currents.push_back(expand_currents(out.system, solve(out.factorization, b)));
  }
  return out;
}

inline std::map<std::string, std::string> solver_meta(const BemSolution& s) {
  std::map<std::string, std::string> m;
  m["source"] = "bem";
  m["pol"] = to_string(s.system.meta.pol);
  m["ibc"] = to_string(s.system.meta.order);
  std::ostringstream k, g, rc;
  k.precision(17);
  k << s.system.meta.k0;
  g << std::hex << s.system.meta.geometry_hash;
  rc << s.factorization.rcond_estimate;
  m["k0"] = k.str();
  m["geometry_hash"] = g.str();
  m["rcond"] = rc.str();
  m["field_space"] = s.system.meta.field_space == SpaceKind::P1_nodal ? "P1" : "P0";
  m["lumped"] = s.system.meta.lumped ? "1" : "0";
  return m;
}

/// Bistatic echo width of the first solved incidence at observation angles.
inline RcsPattern bistatic_rcs(const BemSolution& s, const Contour& c,
                               const std::vector<double>& angles_deg, std::size_t which = 0,
                               cplx amplitude = 1.0) {
  std::vector<double> rad;
  for (double a : angles_deg) rad.push_back(deg2rad(a));
  const auto f = far_field(s.currents.at(which), c, s.system.meta.pol, s.system.meta.k0, rad);
  RcsPattern p = echo_width(f, angles_deg, amplitude);
  p.meta = solver_meta(s);
  return p;
}

/// Backscatter versus incidence angle at one frequency, one factorization.
inline RcsPattern monostatic_sweep(const Contour& c, const IbcCoefficients& coeffs, double k0,
                                   const std::vector<double>& phi_inc_deg,
                                   const AssemblyOptions& opt = {},
                                   BemSolution* keep = nullptr) {
  std::vector<double> rad;
  for (double a : phi_inc_deg) rad.push_back(deg2rad(a));
  BemSolution s = bem_solve(c, coeffs, k0, rad, opt);
  RcsPattern p;
  p.angles = phi_inc_deg;
  for (std::size_t i = 0; i < rad.size(); ++i) {
    const auto f = far_field(s.currents[i], c, coeffs.pol, k0, {rad[i] + kPi});
    p.sigma.push_back(to_db(2 * kPi * std::norm(f[0])));
  }
  p.meta = solver_meta(s);
  p.meta["mode"] = "monostatic";
  if (keep) *keep = std::move(s);
  return p;
}

/// Backscatter versus frequency; coefficients are refitted and the system
/// re-assembled at every point.
inline RcsPattern monostatic_frequency_sweep(const Contour& c, const CoatingSpec& coating,
                                             Polarization pol, IbcOrder order, FitMethod method,
                                             const std::vector<double>& freqs_hz,
                                             double phi_inc_deg,
                                             const AssemblyOptions& opt = {}) {
  RcsPattern p;
  p.axis = "freq_GHz";
  for (double f : freqs_hz) {
    const double k0 = 2 * kPi * f / kSpeedOfLight;
    const auto coeffs = fit_coefficients(coating, pol, k0, order, method);
    const RcsPattern one = monostatic_sweep(c, coeffs, k0, {phi_inc_deg}, opt);
    p.angles.push_back(f * 1e-9);
    p.sigma.push_back(one.sigma[0]);
    p.meta = one.meta;
  }
  p.meta["mode"] = "monostatic";
  p.meta.erase("k0");
  return p;
}

inline RcsPattern series_frequency_sweep(const SeriesSolutionSpec& base, Polarization pol,
                                         const std::vector<double>& freqs_hz) {
  RcsPattern p;
  p.axis = "freq_GHz";
  for (double f : freqs_hz) {
    SeriesSolutionSpec s = base;
    s.k0 = 2 * kPi * f / kSpeedOfLight;
    const RcsPattern one = series_coated_cylinder(s, pol, {180.0}, SeriesMode::bistatic, 0.0);
    p.angles.push_back(f * 1e-9);
    p.sigma.push_back(one.sigma[0]);
  }
  p.meta["source"] = "exact";
  p.meta["pol"] = to_string(pol);
  p.meta["mode"] = "monostatic";
  return p;
}

// ---------------------------------------------------------------------------

struct RcsComparison {
  std::vector<double> abs_diff_db;
  double max_abs_db = 0, mean_abs_db = 0;
  double fraction_within(double threshold_db) const {
    if (abs_diff_db.empty()) return 1.0;
    std::size_t n = 0;
    for (double d : abs_diff_db) n += d <= threshold_db ? 1 : 0;
    return double(n) / double(abs_diff_db.size());
  }
};

inline RcsComparison compare_rcs(const RcsPattern& a, const RcsPattern& b) {
  if (a.angles.size() != b.angles.size()) throw UsageError("compare_rcs: grid sizes differ");
  RcsComparison r;
  for (std::size_t i = 0; i < a.angles.size(); ++i) {
    if (std::abs(a.angles[i] - b.angles[i]) > 1e-9 * std::max(1.0, std::abs(a.angles[i])))
      throw UsageError("compare_rcs: angle grids differ at index " + std::to_string(i));
    const double d = std::abs(a.sigma[i] - b.sigma[i]);
    r.abs_diff_db.push_back(d);
    r.max_abs_db = std::max(r.max_abs_db, d);
    r.mean_abs_db += d;
  }
  if (!r.abs_diff_db.empty()) r.mean_abs_db /= double(r.abs_diff_db.size());
  return r;
}

inline std::vector<double> angle_grid(double start, double stop, double step) {
  std::vector<double> g;
  const long n = std::lround((stop - start) / step);
  for (long i = 0; i <= n; ++i) g.push_back(start + double(i) * step);
  return g;
}

inline void write_rcs_csv(std::ostream& os, const RcsPattern& p) {
  for (const auto& [k, v] : p.meta) os << "# " << k << '=' << v << '\n';
  os << p.axis << ",sigma_dBm\n";
  char buf[64];
  for (std::size_t i = 0; i < p.angles.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%.12e\n", p.angles[i], p.sigma[i]);
    os << buf;
  }
}

inline RcsPattern read_rcs_csv(std::istream& is) {
  RcsPattern p;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) p.meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (!header) {
      p.axis = line.substr(0, line.find(','));
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("malformed RCS row: " + line);
    try {
      p.angles.push_back(std::stod(line.substr(0, comma)));
      p.sigma.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ValidationError("malformed RCS row: " + line);
    }
  }
  if (!header) throw ValidationError("RCS file has no header row");
  return p;
}

}  // namespace hoibc
