// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,5] [--expect-fail 1,3] [--pin]
//
// Exit status is the number of failing criteria that were not listed in
// --expect-fail. --pin prints the plate regression curve instead of checking it.

#include <boost/multiprecision/cpp_complex.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "hoibc/analysis.hpp"

using namespace hoibc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string f6(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

bool g_pin = false;

// ---------------------------------------------------------------------------
// shared configuration: coated PEC cylinder, a = lambda0 = 1 m, d = 0.1 m

const double kK0 = 2 * kPi;
const double kRadius = 1.0, kThick = 0.1;
const cplx kEps{4.0, -0.5};
const CoatingSpec kCoat{kEps, 1.0, kThick};

const std::vector<double>& full_circle() {
  static const auto g = angle_grid(0, 359, 1);
  return g;
}

const RcsPattern& series_reference(Polarization pol) {
  static std::map<Polarization, RcsPattern> cache;
  auto it = cache.find(pol);
  if (it == cache.end())
    it = cache
             .emplace(pol, series_coated_cylinder({kRadius, kThick, kEps, 1.0, kK0}, pol,
                                                  full_circle(), SeriesMode::bistatic))
             .first;
  return it->second;
}

// bistatic echo width on the 1 degree grid, cached per (pol, order, N)
const RcsPattern& cylinder_rcs(Polarization pol, IbcOrder order, int n) {
  static std::map<std::tuple<int, int, int>, RcsPattern> cache;
  const auto key = std::make_tuple(int(pol), int(order), n);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const Contour c = mesh_circle(kRadius + kThick, std::size_t(n));
    const auto coeffs = fit_coefficients(kCoat, pol, kK0, order, FitMethod::pade);
    const auto sol = bem_solve(c, coeffs, kK0, {0.0});
    it = cache.emplace(key, bistatic_rcs(sol, c, full_circle())).first;
  }
  return it->second;
}

double mean_error(Polarization pol, IbcOrder order, int n) {
  return compare_rcs(cylinder_rcs(pol, order, n), series_reference(pol)).mean_abs_db;
}

// ---------------------------------------------------------------------------
// 1. impedance-fit error on the thin lossless layer

Outcome impedance_fit_error() {
  const CoatingSpec thin{4.0, 1.0, 0.005};
  std::vector<double> th;
  for (int i = 0; i <= 89; ++i) th.push_back(i);
  Outcome o{true, ""};
  for (auto pol : {Polarization::TE, Polarization::TM}) {
    const auto i1 = fit_coefficients(thin, pol, kK0, IbcOrder::IBC1, FitMethod::pade);
    const auto i2 = fit_coefficients(thin, pol, kK0, IbcOrder::IBC2, FitMethod::pade);
    const auto rows = impedance_table(thin, pol, kK0, i1, i2, th);
    const double e1 = max_abs_error(rows, 1), e2 = max_abs_error(rows, 2);
    const bool ok = e1 >= 0.30 && e1 <= 0.50 && e2 < e1;
    o.pass = o.pass && ok;
    o.detail += std::string(to_string(pol)) + " max|dZ| IBC1 " + f6(e1) + " ohm, IBC2 " + f6(e2) +
                " ohm; ";
  }
  o.detail += "want IBC1 in [0.30, 0.50] and IBC2 < IBC1";
  return o;
}

// 2. collocation interpolates the exact impedance at its nodes

Outcome collocation_exactness() {
  double worst = 0;
  int fits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int attempt = 0;; ++attempt) {
      const CoatingSpec c{cplx(1.5 + 10.5 * u(rng), -3.0 * u(rng)), cplx(1.0 + u(rng), -0.5 * u(rng)),
                          0.002 + 0.048 * u(rng)};
      std::vector<double> n1{5 + 80 * u(rng), 5 + 80 * u(rng)};
      std::vector<double> n2;
      for (int k = 0; k < 4; ++k) n2.push_back(5 + 80 * u(rng));
      std::sort(n1.begin(), n1.end());
      std::sort(n2.begin(), n2.end());
      bool spread = n1[1] - n1[0] > 5;
      for (int k = 1; k < 4; ++k) spread = spread && n2[std::size_t(k)] - n2[std::size_t(k) - 1] > 5;
      if (!spread) continue;
      try {
        double local = 0;
        for (auto pol : {Polarization::TE, Polarization::TM})
          for (const auto* nodes : {&n1, &n2}) {
            std::vector<double> rad;
            for (double d : *nodes) rad.push_back(deg2rad(d));
            const auto order = nodes->size() == 2 ? IbcOrder::IBC1 : IbcOrder::IBC2;
            const auto f = fit_coefficients(c, pol, kK0, order, FitMethod::collocation, rad);
            for (double r : rad) {
              const double xi = -std::sin(r) * std::sin(r);
              const cplx z = exact_impedance(pol, xi, c, kK0);
              local = std::max(local, std::abs(eval_rational(f, xi) - z) / std::abs(z));
            }
          }
        worst = std::max(worst, local);
        fits += 4;
        break;
      } catch (const NumericalError&) {
        // resonant or degenerate draw; not an admissible coating
        if (attempt > 20) return {false, "seed " + std::to_string(seed) + ": no admissible coating"};
      }
    }
  }
  return {worst <= 1e-10, std::to_string(fits) + " fits, worst relative node error " + f6(worst) +
                              " (limit 1e-10)"};
}

// 3. Pade residual R = Z_fit - Z_exact scales like xi^3 (IBC1) and xi^5 (IBC2)

using mp_complex = boost::multiprecision::cpp_complex_50;
using mp_real = boost::multiprecision::cpp_bin_float_50;

mp_complex mp(cplx z) { return {z.real(), z.imag()}; }

mp_complex exact_mp(Polarization pol, const mp_real& xi, const CoatingSpec& c, double k0) {
  const mp_complex er = mp(c.eps_r), mr = mp(c.mu_r);
  const mp_complex s = sqrt(mr * er + mp_complex(xi));
  const mp_complex t = mp_complex(mp_real(k0) * mp_real(c.thickness));
  const mp_complex z0 = mp_complex(mp_real(kFreeSpaceImpedance));
  if (pol == Polarization::TE) return z0 * s * tan(s * t) / er;
  return z0 * mr * tan(s * t) / s;
}

Outcome pade_order_conditions() {
  Outcome o{true, ""};
  for (auto pol : {Polarization::TE, Polarization::TM})
    for (auto order : {IbcOrder::IBC1, IbcOrder::IBC2}) {
      const auto k = fit_coefficients(kCoat, pol, kK0, order, FitMethod::pade);
      const int p = order == IbcOrder::IBC1 ? 3 : 5;
      double lo = 1e300, hi = 0;
      for (double x : {-1e-2, -1e-3, -1e-4}) {
        const mp_real xi = x;
        const mp_complex X(xi);
        const mp_complex num = mp(k.a0) + mp(k.a) * X + mp(k.ap) * X * X;
        const mp_complex den = mp_complex(1) + mp(k.b) * X + mp(k.bp) * X * X;
        const mp_complex r = num / den - exact_mp(pol, xi, kCoat, kK0);
        const double ratio = double(abs(r) / pow(abs(xi), p));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      const double spread = hi / lo;
      o.pass = o.pass && spread < 10;
      o.detail += std::string(to_string(pol)) + " " + to_string(order) + " |R/xi^" +
                  std::to_string(p) + "| spread " + f6(spread) + "; ";
    }
  o.detail += "limit 10";
  return o;
}

// 4. uniqueness-condition checker fixtures

Outcome suc_fixtures() {
  IbcCoefficients ok;
  ok.order = IbcOrder::IBC1;
  ok.a0 = 1.0;
  ok.a = kI;
  ok.b = kI;
  const auto r1 = suc_check_ibc1(ok, 1e-9);
  bool pass = r1.passed && r1.clauses.size() == 6;
  for (const auto& c : r1.clauses) pass = pass && c.pass;

  IbcCoefficients leon;
  leon.order = IbcOrder::IBC1;
  leon.a0 = 11.85093116439266;
  const auto r0 = suc_check_ibc1(leon, 1e-9);
  std::string failing;
  for (const auto& c : r0.clauses)
    if (!c.pass) failing += (failing.empty() ? "" : ", ") + c.name;
  pass = pass && !r0.passed && failing == "a - conj(b) a0 != 0";
  return {pass, "all-pass set " + std::string(r1.passed ? "passes" : "fails") +
                    "; Leontovich set fails only [" + failing + "]"};
}

// 5. full and reduced systems give the same currents

Outcome full_vs_reduced() {
  const Contour c = mesh_circle(kRadius + kThick, 128);
  double worst = 0;
  for (auto pol : {Polarization::TE, Polarization::TM})
    for (auto order : {IbcOrder::IBC1, IbcOrder::IBC2}) {
      const auto coeffs = fit_coefficients(kCoat, pol, kK0, order, FitMethod::pade);
      const auto sys = reduce_system(build_full_system(c, coeffs, {0.0, 1.0, pol, kK0}, {}));
      const CVector xf = solve(lu_factor(sys.full_matrix), sys.full_rhs);
      const CVector xr = solve(lu_factor(sys.reduced_matrix), sys.reduced_rhs);
      const auto np = Eigen::Index(sys.layout.primary_size());
      worst = std::max(worst, (xf.head(np) - xr).norm() / xr.norm());
    }
  return {worst <= 1e-8, "worst relative (J, M) difference " + f6(worst) + " (limit 1e-8)"};
}

// 6. cylinder echo width against the series solution

Outcome cylinder_oracle_agreement() {
  const auto& ref = series_reference(Polarization::TE);
  const auto c1 = compare_rcs(cylinder_rcs(Polarization::TE, IbcOrder::IBC1, 512), ref);
  const double m0 = mean_error(Polarization::TE, IbcOrder::IBC0, 512);
  const double m1 = c1.mean_abs_db;
  const double m2 = mean_error(Polarization::TE, IbcOrder::IBC2, 512);
  const double within = c1.fraction_within(1.0);
  const bool ordering = m0 > m1 && m1 >= m2;
  return {within >= 0.9 && ordering,
          "TE N=512: IBC1 within 1 dB on " + f6(100 * within) + "% of angles (want >= 90%); mean " +
              "|dB| IBC0 " + f6(m0) + ", IBC1 " + f6(m1) + ", IBC2 " + f6(m2) + " (ordering " +
              (ordering ? "holds" : "violated") + ")"};
}

// 7. mesh convergence

Outcome mesh_convergence() {
  Outcome o{true, "TE mean |dB| vs N=64/128/256/512:"};
  for (auto order : {IbcOrder::IBC1, IbcOrder::IBC2}) {
    double prev = 1e300;
    o.detail += std::string(" ") + to_string(order);
    for (int n : {64, 128, 256, 512}) {
      const double m = mean_error(Polarization::TE, order, n);
      o.pass = o.pass && m <= prev + 0.1;
      prev = m;
      o.detail += " " + f6(m);
    }
    o.detail += ";";
  }
  o.detail += " non-increasing within 0.1 dB";
  return o;
}

// 8. symmetry and rotational invariance on the circle

Outcome symmetry() {
  const Contour c = mesh_circle(kRadius + kThick, 256);
  double asym = 0, spread = 0;
  for (auto pol : {Polarization::TE, Polarization::TM}) {
    const auto coeffs = fit_coefficients(kCoat, pol, kK0, IbcOrder::IBC1, FitMethod::pade);
    const std::vector<double> inc{0.0, 10.0, 45.0, 90.0, 137.5, 222.2};
    BemSolution s;
    const auto mono = monostatic_sweep(c, coeffs, kK0, inc, {}, &s);
    for (double v : mono.sigma) spread = std::max(spread, std::abs(v - mono.sigma[0]));
    const auto p = bistatic_rcs(s, c, full_circle());
    for (int d = 1; d < 180; ++d) {
      const double a = std::pow(10.0, p.sigma[std::size_t(d)] / 10);
      const double b = std::pow(10.0, p.sigma[std::size_t(360 - d)] / 10);
      asym = std::max(asym, std::abs(a - b) / std::max(a, b));
    }
  }
  return {asym <= 1e-6 && spread <= 0.05,
          "N=256 bistatic asymmetry " + f6(asym) + " (limit 1e-6), monostatic spread " +
              f6(spread) + " dB (limit 0.05)"};
}

// 9. series solution self-checks

Outcome oracle_self_checks() {
  double pec = 0, optical = 0, trunc = 0;
  const auto ang = angle_grid(0, 180, 5);
  for (auto pol : {Polarization::TE, Polarization::TM}) {
    const SeriesSolutionSpec p0{kRadius, 0.0, kEps, 1.0, kK0};
    SeriesSolutionSpec thin = p0;
    thin.d = 1e-11;
    const auto a = series_coated_cylinder(thin, pol, ang, SeriesMode::bistatic);
    const auto b = series_coated_cylinder(p0, pol, ang, SeriesMode::bistatic);
    for (std::size_t i = 0; i < ang.size(); ++i) {
      const double la = std::pow(10.0, a.sigma[i] / 10), lb = std::pow(10.0, b.sigma[i] / 10);
      pec = std::max(pec, std::abs(la - lb) / lb);
    }
    const auto o = optical_theorem({kRadius, kThick, 4.0, 1.0, kK0}, pol);
    optical = std::max(optical, std::abs(o.extinction - o.scattering) / o.scattering);

    SeriesSolutionSpec s{kRadius, kThick, kEps, 1.0, kK0};
    SeriesDiagnostics diag;
    const auto x = series_coated_cylinder(s, pol, full_circle(), SeriesMode::bistatic, 0, &diag);
    s.n_max = diag.n_max + 10;
    const auto y = series_coated_cylinder(s, pol, full_circle(), SeriesMode::bistatic);
    for (std::size_t i = 0; i < x.sigma.size(); ++i) {
      const double lx = std::pow(10.0, x.sigma[i] / 10), ly = std::pow(10.0, y.sigma[i] / 10);
      trunc = std::max(trunc, std::abs(lx - ly) / ly);
    }
  }
  return {pec <= 1e-8 && optical <= 1e-8 && trunc <= 1e-10,
          "PEC limit " + f6(pec) + " (1e-8), optical theorem " + f6(optical) +
              " (1e-8), truncation " + f6(trunc) + " (1e-10)"};
}

// 10. open plate

// IBC1 curve at 0, 30, ..., 330 degrees, TE then TM; pinned from a validated run
const double kPlatePin[2][12] = {
    {-3.329458096376e+01, -2.809070304588e+01, -2.155609459829e+01, -2.325325297500e+00,
     -2.155609459826e+01, -2.809070304588e+01, -3.329458096376e+01, -1.889419060713e+01,
     -1.003165519435e+01, 8.344082677735e+00, -1.003165519436e+01, -1.889419060713e+01},
    {-2.486596307324e+01, -2.544690585424e+01, -2.048709546291e+01, -2.833785128447e+00,
     -2.048709546289e+01, -2.544690585424e+01, -2.486596307324e+01, -1.806334808421e+01,
     -1.003041693750e+01, 8.388805653155e+00, -1.003041693751e+01, -1.806334808421e+01},
};

Outcome open_plate() {
  const double f = 6.8e9, k0 = 2 * kPi * f / kSpeedOfLight, lam = 2 * kPi / k0;
  const CoatingSpec coat{cplx(10.0, -5.0), 1.0, 0.004};
  const Contour c = mesh_plate(5 * lam, 100);
  const auto pin = angle_grid(0, 330, 30);
  const auto ang = full_circle();
  bool zero = true;
  double min_diff = 1e300, pin_err = 0;
  std::ostringstream pins;
  for (auto pol : {Polarization::TE, Polarization::TM}) {
    std::map<int, RcsPattern> rcs;
    for (auto order : {IbcOrder::IBC0, IbcOrder::IBC1, IbcOrder::IBC2}) {
      const auto coeffs = fit_coefficients(coat, pol, k0, order, FitMethod::pade);
      const auto sol = bem_solve(c, coeffs, k0, {deg2rad(270.0)});
      const auto& cur = sol.currents[0];
      const auto last = c.node_count() - 1;
      zero = zero && cur.j(0) == cplx(0.0) && cur.j(Eigen::Index(last)) == cplx(0.0) &&
             cur.m(0) == cplx(0.0) && cur.m(Eigen::Index(last)) == cplx(0.0);
      for (const auto& a : cur.aux)
        zero = zero && a(0) == cplx(0.0) && a(Eigen::Index(last)) == cplx(0.0);
      rcs[int(order)] = bistatic_rcs(sol, c, ang);
    }
    min_diff = std::min(min_diff, compare_rcs(rcs[1], rcs[0]).mean_abs_db);
    const int p = pol == Polarization::TE ? 0 : 1;
    pins << (p ? "TM" : "TE") << ":";
    for (std::size_t i = 0; i < pin.size(); ++i) {
      const double v = rcs[1].sigma[std::size_t(pin[i])];
      char b[32];
      std::snprintf(b, sizeof b, " %.12e,", v);
      pins << b;
      pin_err = std::max(pin_err, std::abs(v - kPlatePin[p][i]));
    }
    pins << "\n";
  }
  if (g_pin) std::cout << pins.str();
  const bool pinned = pin_err <= 1e-6;
  return {zero && min_diff > 1e-3 && pinned,
          std::string("endpoint dofs ") + (zero ? "exactly zero" : "NOT zero") +
              ", mean |dB| IBC1 vs IBC0 " + f6(min_diff) + " (must be nonzero), regression pin " +
              f6(pin_err) + " dB (limit 1e-6)"};
}

// 11. numerical kernels

template <class F>
cplx brute_force(F f) {
  const int n = 500;
  const double g[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  cplx acc = 0;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < 2; ++a) {
      const double u = (i + g[a]) / n;
      const double s = 1.0 - u * u * u, js = 3 * u * u / n / 2;
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < 2; ++b) {
          const double v = (j + g[b]) / n;
          const double t = v * v * v, jt = 3 * v * v / n / 2;
          acc += js * jt * f(s, t);
        }
    }
  return acc;
}

Outcome numerical_kernels() {
  // Wronskian J_n Y_n' - J_n' Y_n = 2 / (pi z)
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> mag(0.1, 50.0), ang(-kPi, kPi);
  double wr = 0;
  for (int samples = 0; samples < 200;) {
    const cplx z = std::polar(mag(rng), ang(rng));
    if (std::abs(z.imag()) > 20.0) continue;
    if (z.real() <= 0 && std::abs(z.imag()) < 1e-3) continue;
    ++samples;
    const auto t = specfun::bessel_table(51, z);
    for (int n = 0; n <= 50; ++n) {
      const cplx jp = n == 0 ? -t.j[1] : t.j[std::size_t(n) - 1] - double(n) / z * t.j[std::size_t(n)];
      const cplx yp = n == 0 ? -t.y[1] : t.y[std::size_t(n) - 1] - double(n) / z * t.y[std::size_t(n)];
      const cplx w = t.j[std::size_t(n)] * yp - jp * t.y[std::size_t(n)];
      const cplx expect = 2.0 / (kPi * z);
      const double scale = std::max({std::abs(t.j[std::size_t(n)] * yp),
                                     std::abs(jp * t.y[std::size_t(n)]), std::abs(expect)});
      wr = std::max(wr, std::abs(w - expect) / scale);
    }
  }

  // quadrature exactness
  double qerr = 0;
  for (int n = 1; n <= specfun::kMaxQuadOrder; ++n) {
    const auto gl = specfun::quad_rule(specfun::QuadKind::gauss_legendre, n);
    const auto lg = specfun::quad_rule(specfun::QuadKind::gauss_log, n);
    for (int m = 0; m <= 2 * n - 1; ++m) {
      double a = 0, b = 0;
      for (std::size_t i = 0; i < gl.size(); ++i) a += gl.weights[i] * std::pow(gl.nodes[i], m);
      for (std::size_t i = 0; i < lg.size(); ++i) b += lg.weights[i] * std::pow(lg.nodes[i], m);
      const double ea = m % 2 ? 0.0 : 2.0 / (m + 1), eb = 1.0 / ((m + 1.0) * (m + 1.0));
      qerr = std::max({qerr, std::abs(a - ea), std::abs(b - eb)});
    }
  }

  // brute-force (B - S) and Q entries on a 120 degree corner
  Contour c;
  c.nodes = {{0.0, 0.0}, {0.3, 0.0}, {0.3 + 0.2 * std::cos(kPi / 3), 0.2 * std::sin(kPi / 3)}};
  c.elements = {{0, 1}, {1, 2}};
  c.closed = false;
  compute_frames(c);
  const double k = kK0, h0 = c.length[0], h1 = c.length[1];
  const double tt = dot(c.tangent[0], c.tangent[1]);
  const auto km = assemble_kernels(c, k);
  const CMatrix qm = assemble_q(c, k);
  const cplx bs = brute_force([&](double s, double t) {
    const cplx g = specfun::green2d(k, norm(c.point(0, s) - c.point(1, t)));
    return kI * (k * tt * g * (1 - s) * t - g * (-1 / h0) * (1 / h1) / k) * h0 * h1;
  });
  const cplx q = brute_force([&](double s, double t) {
    const Vec2 d = c.point(0, s) - c.point(1, t);
    const double r = norm(d);
    return -(1 - s) * t * specfun::green2d_dr(k, r) * dot(d, c.normal[0]) / r * h0 * h1;
  });
  const double ebs = std::abs(km.bs(0, 2) - bs) / std::abs(bs);
  const double eq = std::abs(qm(0, 2) - q) / std::abs(q);
  return {wr <= 1e-11 && qerr <= 1e-12 && ebs <= 1e-6 && eq <= 1e-6,
          "Wronskian " + f6(wr) + " (1e-11), quadrature " + f6(qerr) + " (1e-12), B-S entry " +
              f6(ebs) + ", Q entry " + f6(eq) + " (1e-6)"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, expect_fail;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) only = parse_list(argv[++i]);
    else if (a == "--expect-fail" && i + 1 < argc) expect_fail = parse_list(argv[++i]);
    else if (a == "--pin") g_pin = true;
    else {
      std::cerr << "usage: acceptance [--only LIST] [--expect-fail LIST] [--pin]\n";
      return 2;
    }
  }

  const std::vector<Criterion> all = {
      {1, "impedance fit error", 1, impedance_fit_error},
      {2, "collocation exactness", 1, collocation_exactness},
      {3, "Pade order conditions", 1, pade_order_conditions},
      {4, "uniqueness checker fixtures", 1, suc_fixtures},
      {5, "full vs reduced system", 30, full_vs_reduced},
      {6, "cylinder vs series solution", 300, cylinder_oracle_agreement},
      {7, "mesh convergence", 600, mesh_convergence},
      {8, "symmetry", 120, symmetry},
      {9, "series self-checks", 10, oracle_self_checks},
      {10, "open plate", 120, open_plate},
      {11, "numerical kernels", 30, numerical_kernels},
  };

  int failed = 0, unexpected = 0, ran = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt <= c.limit_s;
    const bool pass = o.pass && in_time;
    std::printf("[%s] %2d %-28s %s; %.2f s (limit %g s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), dt, c.limit_s, in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
    if (!pass) {
      ++failed;
      if (!expect_fail.count(c.id)) ++unexpected;
    }
  }
  std::printf("%d of %d criteria pass", ran - failed, ran);
  if (!expect_fail.empty()) std::printf(", %d unexpected failure(s)", unexpected);
  std::printf("\n");
  return unexpected;
}
