#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hoibc/errors.hpp"
#include "hoibc/geometry.hpp"
#include "hoibc/impedance.hpp"
#include "hoibc/quadrature.hpp"
#include "hoibc/specfun.hpp"

namespace hoibc {

using specfun::QuadKind;
using specfun::quad_rule;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

struct QuadratureOptions {
  int self_order = 8;       // gauss_log and gauss_legendre on the self element
  int adjacent_order = 16;  // Duffy rule on elements sharing a node
  int near_order = 12;
  int far_order = 6;
  double near_factor = 2.0;  // midpoint distance < near_factor * h => near
};

struct AssemblyOptions {
  QuadratureOptions quad;
  SpaceKind field_space = SpaceKind::P1_nodal;  // space of M and the auxiliaries
  bool lumped = false;                          // row-sum mass in the auxiliary rows
};

struct IncidentWave {
  double phi = 0.0;  // propagation direction [rad]
  cplx amplitude = 1.0;
  Polarization pol = Polarization::TE;
  double k0 = 1.0;
  Vec2 direction() const { return {std::cos(phi), std::sin(phi)}; }
};

inline void check_resolution(const Contour& c, double k0) {
  for (std::size_t e = 0; e < c.element_count(); ++e)
    if (!(k0 * c.length[e] < 2.0))
      throw ResolutionError("element " + std::to_string(e) + " too long for k0 (k0 h = " +
                                std::to_string(k0 * c.length[e]) + ", limit 2)",
                            e);
}

/// Local moments of one element pair, indexed by local hat functions:
///   g[a][b]   = int_e int_f G(|x-y|) phi_a(x) phi_b(y)
///   dnx[a][b] = same with dG/dn_x,  dny[a][b] = same with dG/dn_y
struct PairMoments {
  cplx g[2][2] = {};
  cplx dnx[2][2] = {};
  cplx dny[2][2] = {};
};

namespace detail {

struct UnitRule {
  std::vector<double> t, w;  // on [0, 1]
};

inline UnitRule unit_rule(QuadKind kind, int n) {
  const auto q = quad_rule(kind, n);
  UnitRule r;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (kind == QuadKind::gauss_legendre) {
      r.t.push_back(0.5 * (q.nodes[i] + 1.0));
      r.w.push_back(0.5 * q.weights[i]);
    } else {
      r.t.push_back(q.nodes[i]);
      r.w.push_back(q.weights[i]);
    }
  }
  return r;
}

inline double hat(int a, double t) { return a == 0 ? 1.0 - t : t; }

inline void accumulate_regular(const Contour& c, std::size_t e, std::size_t f, double k,
                               const UnitRule& r, PairMoments& m) {
  const Vec2 ne = c.normal[e], nf = c.normal[f];
  const double jac = c.length[e] * c.length[f];
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    const Vec2 x = c.point(e, r.t[i]);
    for (std::size_t j = 0; j < r.t.size(); ++j) {
      const Vec2 y = c.point(f, r.t[j]);
      const Vec2 d = x - y;
      const double rr = norm(d);
      const auto s = specfun::green2d_sample(k, rr);
      const double w = r.w[i] * r.w[j] * jac;
      const cplx gx = s.dg_dr * dot(d, ne) / rr, gy = -s.dg_dr * dot(d, nf) / rr;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double p = w * hat(a, r.t[i]) * hat(b, r.t[j]);
          m.g[a][b] += p * s.g;
          m.dnx[a][b] += p * gx;
          m.dny[a][b] += p * gy;
        }
    }
  }
}

// Self element: split the square along the diagonal, map the lower triangle
// with s = sigma, t = sigma (1 - v) so that |x - y| = h sigma v, and integrate
// the ln(sigma) and ln(v) parts of G with gauss_log.
inline void accumulate_self(const Contour& c, std::size_t e, double k, int order,
                            PairMoments& m) {
  const UnitRule gl = unit_rule(QuadKind::gauss_legendre, order);
  const UnitRule lg = unit_rule(QuadKind::gauss_log, order);
  const double h = c.length[e], h2 = h * h, lnh = std::log(h);
  cplx low[2][2] = {};
  auto add = [&](double sig, double v, cplx kernel, double w) {
    const double s = sig, t = sig * (1.0 - v);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) low[a][b] += w * sig * h2 * hat(a, s) * hat(b, t) * kernel;
  };
  for (std::size_t i = 0; i < gl.t.size(); ++i)
    for (std::size_t j = 0; j < gl.t.size(); ++j) {
      const double sig = gl.t[i], v = gl.t[j];
      const auto smp = specfun::green2d_sample(k, h * sig * v);
      add(sig, v, smp.g_reg - smp.j0 * lnh / (2 * kPi), gl.w[i] * gl.w[j]);
    }
  // -J0/(2 pi) ln(sigma): int f ln(sigma) = -sum wlog f
  for (std::size_t i = 0; i < lg.t.size(); ++i)
    for (std::size_t j = 0; j < gl.t.size(); ++j) {
      const double sig = lg.t[i], v = gl.t[j];
      const double j0 = specfun::bessel01_real(k * h * sig * v).j0;
      add(sig, v, j0 / (2 * kPi), lg.w[i] * gl.w[j]);
    }
  for (std::size_t i = 0; i < gl.t.size(); ++i)
    for (std::size_t j = 0; j < lg.t.size(); ++j) {
      const double sig = gl.t[i], v = lg.t[j];
      const double j0 = specfun::bessel01_real(k * h * sig * v).j0;
      add(sig, v, j0 / (2 * kPi), gl.w[i] * lg.w[j]);
    }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m.g[a][b] += low[a][b] + low[b][a];
  // dG/dn vanishes identically on a straight element
}

// Elements sharing one node: coordinates measured from the shared node and a
// Duffy map on each half of the square, which turns the vertex singularity into
// rho * ln(rho).
inline void accumulate_adjacent(const Contour& c, std::size_t e, std::size_t f, int ae, int af,
                                double k, int order, PairMoments& m) {
  const UnitRule gl = unit_rule(QuadKind::gauss_legendre, order);
  const UnitRule lg = unit_rule(QuadKind::gauss_log, order);
  const Vec2 p = c.nodes[c.elements[e][ae]];
  const Vec2 ue = c.nodes[c.elements[e][1 - ae]] - p;
  const Vec2 uf = c.nodes[c.elements[f][1 - af]] - p;
  const Vec2 ne = c.normal[e], nf = c.normal[f];
  const double jac = c.length[e] * c.length[f];
  auto local = [](int shared, double s) { return shared == 0 ? s : 1.0 - s; };

  for (int tri = 0; tri < 2; ++tri) {
    // tri 0: t <= s (s = rho, t = rho w); tri 1: s <= t (t = rho, s = rho w)
    auto coords = [&](double rho, double w, double& s, double& t) {
      if (tri == 0) {
        s = rho;
        t = rho * w;
      } else {
        s = rho * w;
        t = rho;
      }
    };
    auto dir = [&](double w) { return tri == 0 ? ue - w * uf : w * ue - uf; };
    auto add_g = [&](double rho, double w, cplx kernel, double wt) {
      double s, t;
      coords(rho, w, s, t);
      const double ts = local(ae, s), tt = local(af, t);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) m.g[a][b] += wt * rho * jac * hat(a, ts) * hat(b, tt) * kernel;
    };
    // radial derivative times the normal projections, n.(x - y)/r = n.dir/q
    auto add_dn = [&](double rho, double w, cplx dgdr, double wt) {
      double s, t;
      coords(rho, w, s, t);
      const double ts = local(ae, s), tt = local(af, t);
      const Vec2 dv = dir(w);
      const double q = norm(dv);
      const cplx gx = dgdr * dot(dv, ne) / q, gy = -dgdr * dot(dv, nf) / q;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double pw = wt * rho * jac * hat(a, ts) * hat(b, tt);
          m.dnx[a][b] += pw * gx;
          m.dny[a][b] += pw * gy;
        }
    };
    for (std::size_t i = 0; i < gl.t.size(); ++i)
      for (std::size_t j = 0; j < gl.t.size(); ++j) {
        const double rho = gl.t[i], w = gl.t[j];
        const Vec2 dv = dir(w);
        const double q = norm(dv), r = rho * q;
        const auto smp = specfun::green2d_sample(k, r);
        const double wt = gl.w[i] * gl.w[j];
        add_g(rho, w, smp.g_reg - smp.j0 * std::log(q) / (2 * kPi), wt);
        // dG/dr carries k J1(kr) ln(r) / (2 pi); its ln(rho) part goes to gauss_log
        const double j1 = specfun::bessel01_real(k * r).j1;
        add_dn(rho, w, smp.dg_dr - k * j1 * std::log(rho) / (2 * kPi), wt);
      }
    for (std::size_t i = 0; i < lg.t.size(); ++i)
      for (std::size_t j = 0; j < gl.t.size(); ++j) {
        const double rho = lg.t[i], w = gl.t[j];
        const auto b = specfun::bessel01_real(k * rho * norm(dir(w)));
        add_g(rho, w, b.j0 / (2 * kPi), lg.w[i] * gl.w[j]);
        add_dn(rho, w, -k * b.j1 / (2 * kPi), lg.w[i] * gl.w[j]);
      }
  }
}

// Local index of the node shared by e and f, or -1 pairs if none.
inline bool shared_node(const Contour& c, std::size_t e, std::size_t f, int& ae, int& af) {
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      if (c.elements[e][a] == c.elements[f][b]) {
        ae = a;
        af = b;
        return true;
      }
  return false;
}

}  // namespace detail

/// Moments of one ordered element pair, with the quadrature picked from the
/// pair classification (self, adjacent, near, far).
inline PairMoments pair_moments(const Contour& c, std::size_t e, std::size_t f, double k,
                                const QuadratureOptions& q = {}) {
  PairMoments m;
  if (e == f) {
    detail::accumulate_self(c, e, k, q.self_order, m);
    return m;
  }
  int ae, af;
  if (detail::shared_node(c, e, f, ae, af)) {
    detail::accumulate_adjacent(c, e, f, ae, af, k, q.adjacent_order, m);
    return m;
  }
  const double d = norm(c.midpoint(e) - c.midpoint(f));
  const bool near = d < q.near_factor * std::max(c.length[e], c.length[f]);
  detail::accumulate_regular(
      c, e, f, k,
      detail::unit_rule(QuadKind::gauss_legendre, near ? q.near_order : q.far_order), m);
  return m;
}

/// All kernel matrices on the full (unconstrained) index sets.
///   bs   P1 x P1   i int int [k G (tau_i . tau_j) phi phi - (1/k) G phi' phi']
///   b    P1 x P1   i k int int G phi phi
///   kp   P1 x P1   int int phi_i(x) dG/dn_x phi_j(y)
///   b0   P0 x P0,  kp0  P1 x P0   (only when requested)
struct KernelMatrices {
  CMatrix bs, b, kp, b0, kp0;
};

inline KernelMatrices assemble_kernels(const Contour& c, double k, const QuadratureOptions& q = {},
                                       bool want_p0 = false) {
  check_resolution(c, k);
  const std::size_t nn = c.node_count(), ne = c.element_count();
  KernelMatrices km;
  km.bs = CMatrix::Zero(nn, nn);
  km.b = CMatrix::Zero(nn, nn);
  km.kp = CMatrix::Zero(nn, nn);
  if (want_p0) {
    km.b0 = CMatrix::Zero(ne, ne);
    km.kp0 = CMatrix::Zero(nn, ne);
  }
  auto scatter = [&](std::size_t e, std::size_t f, const cplx g[2][2], const cplx dn[2][2]) {
    const double tt = dot(c.tangent[e], c.tangent[f]);
    const double he = c.length[e], hf = c.length[f];
    cplx gsum = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) gsum += g[a][b];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const std::size_t i = c.elements[e][a], j = c.elements[f][b];
        const double da = (a == 0 ? -1.0 : 1.0) / he, db = (b == 0 ? -1.0 : 1.0) / hf;
        km.bs(i, j) += kI * (k * tt * g[a][b] - da * db * gsum / k);
        km.b(i, j) += kI * k * g[a][b];
        km.kp(i, j) += dn[a][b];
        if (want_p0) km.kp0(i, f) += dn[a][b];
      }
    if (want_p0) km.b0(e, f) += kI * k * gsum;
  };
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t f = e; f < ne; ++f) {
      const PairMoments m = pair_moments(c, e, f, k, q);
      scatter(e, f, m.g, m.dnx);
      if (f != e) {
        cplx gt[2][2], dt[2][2];
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            gt[a][b] = m.g[b][a];
            dt[a][b] = m.dny[b][a];
          }
        scatter(f, e, gt, dt);
      }
    }
  return km;
}

inline CMatrix assemble_bs(const Contour& c, double k, const QuadratureOptions& q = {}) {
  return assemble_kernels(c, k, q).bs;
}

/// Double-layer coupling Q = -int int phi_i phi_j dG/dn_x (P1 trial) or with
/// P0 trial functions.
inline CMatrix assemble_q(const Contour& c, double k, const QuadratureOptions& q = {},
                          SpaceKind trial = SpaceKind::P1_nodal) {
  const auto km = assemble_kernels(c, k, q, trial == SpaceKind::P0_elementwise);
  return trial == SpaceKind::P0_elementwise ? CMatrix(-km.kp0) : CMatrix(-km.kp);
}

/// Mass, derivative and stiffness matrices on full index sets.
///   i1 = int phi phi (P1),  i2 = int psi psi (field space)
///   d1 = int phi_i d psi_j, d3 = int psi_i d psi_j, d5 = int psi_i d phi_j
///   k  = int phi_i' phi_j' (P1 only)
struct MassMatrices {
  RMatrix i1, i2, d1, d3, d5, k;
};

inline RMatrix lump(const RMatrix& m) {
  RMatrix d = RMatrix::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) d(i, i) = m.row(i).sum();
  return d;
}

inline MassMatrices assemble_mass_and_d(const Contour& c, SpaceKind field = SpaceKind::P1_nodal) {
  const std::size_t nn = c.node_count(), ne = c.element_count();
  MassMatrices m;
  m.i1 = RMatrix::Zero(nn, nn);
  RMatrix dp1 = RMatrix::Zero(nn, nn);
  m.k = RMatrix::Zero(nn, nn);
  for (std::size_t e = 0; e < ne; ++e) {
    const double h = c.length[e];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const std::size_t i = c.elements[e][a], j = c.elements[e][b];
        m.i1(i, j) += h / 6.0 * (a == b ? 2.0 : 1.0);
        dp1(i, j) += 0.5 * (b == 0 ? -1.0 : 1.0);
        m.k(i, j) += (a == b ? 1.0 : -1.0) / h;
      }
  }
  if (field == SpaceKind::P1_nodal) {
    m.i2 = m.i1;
    m.d1 = dp1;
    m.d3 = dp1;
    m.d5 = dp1;
    return m;
  }
  m.i2 = RMatrix::Zero(ne, ne);
  m.d5 = RMatrix::Zero(ne, nn);
  m.d3 = RMatrix::Zero(ne, ne);
  for (std::size_t e = 0; e < ne; ++e) {
    m.i2(e, e) = c.length[e];
    m.d5(e, c.elements[e][0]) = -1.0;
    m.d5(e, c.elements[e][1]) = 1.0;
  }
  // derivative of psi_j is +delta at its first node and -delta at its second;
  // the delta is tested against the average of the neighbouring psi_i
  for (std::size_t j = 0; j < ne; ++j)
    for (int a = 0; a < 2; ++a) {
      const double sgn = a == 0 ? 1.0 : -1.0;
      const std::size_t node = c.elements[j][a];
      for (std::size_t i = 0; i < ne; ++i)
        if (c.elements[i][0] == node || c.elements[i][1] == node) m.d3(i, j) += 0.5 * sgn;
    }
  m.d1 = -m.d5.transpose();
  return m;
}

/// Incident-field tests of the J row (P1) and the M row (field space).
struct RhsPair {
  CVector e, h;
};

inline RhsPair assemble_rhs(const Contour& c, const IncidentWave& w,
                            SpaceKind field = SpaceKind::P1_nodal, int order = 12) {
  const std::size_t nn = c.node_count(), ne = c.element_count();
  const auto r = detail::unit_rule(QuadKind::gauss_legendre, order);
  const Vec2 d = w.direction();
  const double z0 = kFreeSpaceImpedance;
  RhsPair out{CVector::Zero(nn), CVector::Zero(field == SpaceKind::P1_nodal ? nn : ne)};
  for (std::size_t e = 0; e < ne; ++e) {
    const double ndd = dot(c.normal[e], d), h = c.length[e];
    for (std::size_t q = 0; q < r.t.size(); ++q) {
      const Vec2 x = c.point(e, r.t[q]);
      const cplx u = w.amplitude * std::exp(-kI * (w.k0 * dot(d, x)));
      cplx fe, fh;
      if (w.pol == Polarization::TE) {
        fe = z0 * ndd * u;
        fh = u;
      } else {
        fe = u;
        fh = -ndd * u / z0;
      }
      const double wt = r.w[q] * h;
      for (int a = 0; a < 2; ++a) {
        const double ph = detail::hat(a, r.t[q]);
        out.e(c.elements[e][a]) += wt * ph * fe;
        if (field == SpaceKind::P1_nodal) out.h(c.elements[e][a]) += wt * ph * fh;
      }
      if (field == SpaceKind::P0_elementwise) out.h(e) += wt * fh;
    }
  }
  return out;
}

/// Coefficients as used in the weak form: i-scaled to physical impedances and
/// converted from the xi variable to tangential derivatives.
inline IbcCoefficients spatial_coefficients(const IbcCoefficients& k, double k0) {
  IbcCoefficients s = to_physical(k);
  const double k2 = k0 * k0, k4 = k2 * k2;
  s.a /= k2;
  s.b /= k2;
  s.ap /= k4;
  s.bp /= k4;
  return s;
}

/// Index bookkeeping: which full-space DOFs survive the endpoint constraints.
struct FieldLayout {
  std::vector<std::size_t> p1_free;     // J space
  std::vector<std::size_t> field_free;  // M and auxiliaries
  std::size_t p1_total = 0, field_total = 0;
  int aux_levels = 0;  // 0, 1 (X, Y) or 2 (X, Y, X', Y')

  std::size_t nj() const { return p1_free.size(); }
  std::size_t nw() const { return field_free.size(); }
  std::size_t primary_size() const { return nj() + nw(); }
  std::size_t full_size() const { return primary_size() + 2 * aux_levels * nw(); }
};

struct SystemMeta {
  Polarization pol = Polarization::TE;
  IbcOrder order = IbcOrder::IBC0;
  double k0 = 0;
  IbcCoefficients coefficients;  // spatially scaled
  SpaceKind field_space = SpaceKind::P1_nodal;
  bool lumped = false;
  std::uint64_t geometry_hash = 0;
};

struct AssembledSystem {
  KernelMatrices kernels;
  MassMatrices mass;
  FieldLayout layout;
  CMatrix full_matrix;
  CVector full_rhs;
  CMatrix reduced_matrix;
  CVector reduced_rhs;
  SystemMeta meta;
};

namespace detail {

template <class M>
CMatrix restrict_to(const M& a, const std::vector<std::size_t>& rows,
                    const std::vector<std::size_t>& cols) {
  CMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  return out;
}

inline CVector restrict_to(const CVector& v, const std::vector<std::size_t>& idx) {
  CVector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
  return out;
}

inline std::vector<std::size_t> free_indices(const DofSpace& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.count; ++i)
    if (!s.is_constrained(i)) out.push_back(i);
  return out;
}

}  // namespace detail

/// Block system with auxiliary unknowns, ordered [J, M, X, Y, X', Y'].
inline AssembledSystem build_full_system(const Contour& c, const IbcCoefficients& coeffs,
                                         const IncidentWave& w, const AssemblyOptions& opt = {}) {
  if (coeffs.pol != w.pol) throw UsageError("coefficient and wave polarizations differ");
  if (coeffs.a0 == cplx(0.0)) throw UsageError("a0 = 0: the weak form divides by a0");
  const bool p0 = opt.field_space == SpaceKind::P0_elementwise;
  if (p0 && (w.pol != Polarization::TE || coeffs.order == IbcOrder::IBC2))
    throw UsageError("P0 field space is available for TE with IBC0 or IBC1 only");

  AssembledSystem sys;
  const double k0 = w.k0;
  const IbcCoefficients s = spatial_coefficients(coeffs, k0);
  sys.meta = {w.pol, coeffs.order, k0, s, opt.field_space, opt.lumped, geometry_hash(c)};
  sys.kernels = assemble_kernels(c, k0, opt.quad, p0);
  sys.mass = assemble_mass_and_d(c, opt.field_space);

  FieldLayout& L = sys.layout;
  const DofSpace sj = make_space(c, SpaceKind::P1_nodal), sw = make_space(c, opt.field_space);
  L.p1_free = detail::free_indices(sj);
  L.field_free = detail::free_indices(sw);
  L.p1_total = sj.count;
  L.field_total = sw.count;
  L.aux_levels = static_cast<int>(coeffs.order);

  const auto& P = L.p1_free;
  const auto& W = L.field_free;
  const std::size_t nj = L.nj(), nw = L.nw(), n = L.full_size();
  const double z0 = kFreeSpaceImpedance;
  const double sg = w.pol == Polarization::TE ? 1.0 : -1.0;
  const KernelMatrices& km = sys.kernels;
  const MassMatrices& mm = sys.mass;

  // Q = -Kp; TE couples J<-M with Q and M<-J with -Q^T, TM the transposed pair
  const CMatrix kp = p0 ? km.kp0 : km.kp;
  CMatrix kj, kmm, cjm, cmj;
  if (w.pol == Polarization::TE) {
    kj = z0 * detail::restrict_to(km.bs, P, P);
    kmm = detail::restrict_to(p0 ? km.b0 : km.b, W, W) / z0;
    cjm = -detail::restrict_to(kp, P, W);
    cmj = detail::restrict_to(CMatrix(kp.transpose()), W, P);
  } else {
    kj = z0 * detail::restrict_to(km.b, P, P);
    kmm = detail::restrict_to(km.bs, W, W) / z0;
    cjm = -detail::restrict_to(CMatrix(kp.transpose()), P, W);
    cmj = detail::restrict_to(kp, W, P);
  }
  const CMatrix i1 = detail::restrict_to(mm.i1, P, P);
  const CMatrix i2 = detail::restrict_to(mm.i2, W, W);
  const CMatrix i2aux = detail::restrict_to(opt.lumped ? lump(mm.i2) : mm.i2, W, W);
  const CMatrix d1 = detail::restrict_to(mm.d1, P, W);
  const CMatrix d3 = detail::restrict_to(mm.d3, W, W);
  const CMatrix d5 = detail::restrict_to(mm.d5, W, P);

  CMatrix& A = sys.full_matrix;
  A = CMatrix::Zero(n, n);
  const std::size_t oJ = 0, oM = nj, oX = nj + nw, oY = oX + nw, oX2 = oY + nw, oY2 = oX2 + nw;
  A.block(oJ, oJ, nj, nj) = kj + (s.a0 / 2.0) * i1;
  A.block(oJ, oM, nj, nw) = cjm;
  A.block(oM, oJ, nw, nj) = cmj;
  A.block(oM, oM, nw, nw) = kmm + (1.0 / (2.0 * s.a0)) * i2;
  if (L.aux_levels >= 1) {
    A.block(oJ, oX, nj, nw) = (s.a / 2.0) * d1;
    A.block(oJ, oY, nj, nw) = (sg * s.b / 2.0) * d1;
    A.block(oM, oX, nw, nw) = (sg * s.a / (2.0 * s.a0)) * d3;
    A.block(oM, oY, nw, nw) = (s.b / (2.0 * s.a0)) * d3;
    A.block(oX, oJ, nw, nj) = -d5;
    A.block(oX, oX, nw, nw) = i2aux;
    A.block(oY, oM, nw, nw) = -d3;
    A.block(oY, oY, nw, nw) = i2aux;
  }
  if (L.aux_levels >= 2) {
    const CMatrix kw = detail::restrict_to(mm.k, W, W);
    const CMatrix kpw = detail::restrict_to(mm.k, P, W);
    A.block(oJ, oX2, nj, nw) = (-s.ap / 2.0) * kpw;
    A.block(oJ, oY2, nj, nw) = (-sg * s.bp / 2.0) * kpw;
    A.block(oM, oX2, nw, nw) = (-sg * s.ap / (2.0 * s.a0)) * kw;
    A.block(oM, oY2, nw, nw) = (-s.bp / (2.0 * s.a0)) * kw;
    A.block(oX2, oX, nw, nw) = -detail::restrict_to(mm.d5, W, W);
    A.block(oX2, oX2, nw, nw) = i2aux;
    A.block(oY2, oY, nw, nw) = -d3;
    A.block(oY2, oY2, nw, nw) = i2aux;
  }
  const RhsPair r = assemble_rhs(c, w, opt.field_space);
  sys.full_rhs = CVector::Zero(n);
  sys.full_rhs.segment(oJ, nj) = detail::restrict_to(r.e, P);
  sys.full_rhs.segment(oM, nw) = detail::restrict_to(r.h, W);
  if (L.aux_levels == 0) {
    sys.reduced_matrix = A;
    sys.reduced_rhs = sys.full_rhs;
  }
  return sys;
}

/// Eliminate the trailing `tail` unknowns of A x = b by a Schur complement.
inline void schur_eliminate(const CMatrix& a, const CVector& b, std::size_t keep, CMatrix& ar,
                            CVector& br) {
  const std::size_t tail = a.rows() - keep;
  if (tail == 0) {
    ar = a;
    br = b;
    return;
  }
  Eigen::PartialPivLU<CMatrix> lu(a.bottomRightCorner(tail, tail));
  const CMatrix s = lu.solve(a.bottomLeftCorner(tail, keep));
  const CVector t = lu.solve(b.tail(tail));
  ar = a.topLeftCorner(keep, keep) - a.topRightCorner(keep, tail) * s;
  br = b.head(keep) - a.topRightCorner(keep, tail) * t;
}

/// Nested elimination of the auxiliary levels, innermost (X', Y') first.
inline AssembledSystem reduce_system(AssembledSystem sys) {
  const FieldLayout& L = sys.layout;
  CMatrix a = sys.full_matrix;
  CVector b = sys.full_rhs;
  for (int lev = L.aux_levels; lev >= 1; --lev) {
    const std::size_t keep = L.primary_size() + 2 * (lev - 1) * L.nw();
    CMatrix ar;
    CVector br;
    schur_eliminate(a, b, keep, ar, br);
    a = std::move(ar);
    b = std::move(br);
  }
  sys.reduced_matrix = std::move(a);
  sys.reduced_rhs = std::move(b);
  return sys;
}

/// Currents on the full index sets; constrained DOFs are exactly zero.
struct SurfaceCurrents {
  CVector j, m;
  std::vector<CVector> aux;  // X, Y, X', Y' as present
  SpaceKind field_space = SpaceKind::P1_nodal;
};

inline SurfaceCurrents expand_currents(const AssembledSystem& sys, const CVector& x) {
  const FieldLayout& L = sys.layout;
  if (static_cast<std::size_t>(x.size()) != L.primary_size() &&
      static_cast<std::size_t>(x.size()) != L.full_size())
    throw UsageError("solution vector does not match the system layout");
  SurfaceCurrents s;
  s.field_space = sys.meta.field_space;
  auto scatter = [](const CVector& part, const std::vector<std::size_t>& idx, std::size_t total) {
    CVector out = CVector::Zero(total);
    for (std::size_t i = 0; i < idx.size(); ++i) out(idx[i]) = part(i);
    return out;
  };
  s.j = scatter(x.segment(0, L.nj()), L.p1_free, L.p1_total);
  s.m = scatter(x.segment(L.nj(), L.nw()), L.field_free, L.field_total);
  if (static_cast<std::size_t>(x.size()) == L.full_size())
    for (int a = 0; a < 2 * L.aux_levels; ++a)
      s.aux.push_back(scatter(x.segment(L.primary_size() + a * L.nw(), L.nw()), L.field_free,
                              L.field_total));
  return s;
}

/// Dense dump: row-major little-endian doubles, re/im interleaved, plus a
/// JSON sidecar "<path>.json" with dimensions and metadata.
inline void dump_matrix(const std::string& path, const CMatrix& a, const SystemMeta& meta,
                        const std::string& name) {
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double v[2] = {a(i, j).real(), a(i, j).imag()};
        os.write(reinterpret_cast<const char*>(v), sizeof v);
      }
  }
  nlohmann::json j;
  j["name"] = name;
  j["rows"] = a.rows();
  j["cols"] = a.cols();
  j["layout"] = "row-major, little-endian float64, complex interleaved re/im";
  j["polarization"] = to_string(meta.pol);
  j["ibc"] = to_string(meta.order);
  j["k0"] = meta.k0;
  j["field_space"] = meta.field_space == SpaceKind::P1_nodal ? "P1" : "P0";
  j["lumped"] = meta.lumped;
  j["geometry_hash"] = meta.geometry_hash;
  std::ofstream js(path + ".json");
  js << j.dump(2) << '\n';
}

}  // namespace hoibc
