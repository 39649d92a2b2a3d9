#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "hoibc/errors.hpp"
#include "hoibc/specfun.hpp"

namespace hoibc {

struct Vec2 {
  double x = 0, y = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Straight-segment contour. Element e runs from nodes[elements[e][0]] to
/// nodes[elements[e][1]]; tau points along that direction and the normal is
/// tau rotated by -90 degrees, (tau.y, -tau.x).
struct Contour {
  std::vector<Vec2> nodes;
  std::vector<std::array<std::size_t, 2>> elements;
  bool closed = false;
  std::vector<Vec2> tangent;
  std::vector<Vec2> normal;
  std::vector<double> length;
  std::string id;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t element_count() const { return elements.size(); }
  Vec2 point(std::size_t e, double t) const {
    const Vec2 a = nodes[elements[e][0]], b = nodes[elements[e][1]];
    return a + t * (b - a);
  }
  Vec2 midpoint(std::size_t e) const { return point(e, 0.5); }
  double max_length() const {
    double m = 0;
    for (double h : length) m = std::max(m, h);
    return m;
  }
  double perimeter() const {
    double s = 0;
    for (double h : length) s += h;
    return s;
  }
};

inline void compute_frames(Contour& c) {
  const std::size_t ne = c.elements.size();
  c.tangent.resize(ne);
  c.normal.resize(ne);
  c.length.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const Vec2 d = c.nodes[c.elements[e][1]] - c.nodes[c.elements[e][0]];
    const double h = norm(d);
    if (!(h > 0)) throw MeshError("zero-length element " + std::to_string(e));
    c.length[e] = h;
    c.tangent[e] = (1.0 / h) * d;
    c.normal[e] = {c.tangent[e].y, -c.tangent[e].x};
  }
}

inline constexpr std::size_t kMinElements = 8;

/// Counter-clockwise polygon inscribed in the circle; node i sits at angle
/// 2 pi i / n, so mesh_circle(r, 2n) contains every node of mesh_circle(r, n).
inline Contour mesh_circle(double radius, std::size_t n_elements) {
  if (n_elements < kMinElements)
    throw MeshError("mesh too coarse: circle needs at least 8 elements");
  if (!(radius > 0)) throw MeshError("circle radius must be positive");
  Contour c;
  c.closed = true;
  c.nodes.resize(n_elements);
  c.elements.resize(n_elements);
  for (std::size_t i = 0; i < n_elements; ++i) {
    const double a = 2 * kPi * double(i) / double(n_elements);
    c.nodes[i] = {radius * std::cos(a), radius * std::sin(a)};
    c.elements[i] = {i, (i + 1) % n_elements};
  }
  compute_frames(c);
  c.id = "circle:r=" + std::to_string(radius) + ":n=" + std::to_string(n_elements);
  return c;
}

/// Straight plate of the given length centred on the origin along the x axis.
/// Nodes run from +L/2 to -L/2 so that the normal (tau.y, -tau.x) is +y.
inline Contour mesh_plate(double length, std::size_t n_elements) {
  if (n_elements < kMinElements)
    throw MeshError("mesh too coarse: plate needs at least 8 elements");
  if (!(length > 0)) throw MeshError("plate length must be positive");
  Contour c;
  c.closed = false;
  c.nodes.resize(n_elements + 1);
  c.elements.resize(n_elements);
  for (std::size_t i = 0; i <= n_elements; ++i)
    c.nodes[i] = {length / 2 - length * double(i) / double(n_elements), 0.0};
  for (std::size_t i = 0; i < n_elements; ++i) c.elements[i] = {i, i + 1};
  compute_frames(c);
  c.id = "plate:L=" + std::to_string(length) + ":n=" + std::to_string(n_elements);
  return c;
}

enum class SpaceKind { P1_nodal, P0_elementwise };

struct DofSpace {
  SpaceKind kind = SpaceKind::P1_nodal;
  std::size_t count = 0;
  std::vector<std::size_t> constrained;

  bool is_constrained(std::size_t i) const {
    for (std::size_t c : constrained)
      if (c == i) return true;
    return false;
  }
  std::size_t free_count() const { return count - constrained.size(); }
};

inline DofSpace make_space(const Contour& c, SpaceKind kind) {
  DofSpace s;
  s.kind = kind;
  if (kind == SpaceKind::P0_elementwise) {
    s.count = c.element_count();
    return s;
  }
  s.count = c.node_count();
  if (!c.closed) s.constrained = {0, c.node_count() - 1};
  return s;
}

struct BasisValue {
  std::size_t dof;
  double value;
  double dl;  // derivative along tau
};

/// Basis functions supported on element e at local coordinate t in [0, 1].
inline std::vector<BasisValue> basis_eval(const DofSpace& s, const Contour& c, std::size_t e,
                                          double t) {
  if (e >= c.element_count()) throw UsageError("element index out of range");
  if (s.kind == SpaceKind::P0_elementwise) return {{e, 1.0, 0.0}};
  const double h = c.length[e];
  return {{c.elements[e][0], 1.0 - t, -1.0 / h}, {c.elements[e][1], t, 1.0 / h}};
}

/// Debug dump: node table then element table.
inline void write_mesh_csv(std::ostream& os, const Contour& c) {
  os.precision(17);
  os << "# id=" << c.id << "\n# closed=" << (c.closed ? 1 : 0) << "\n";
  os << "node,x,y\n";
  for (std::size_t i = 0; i < c.nodes.size(); ++i)
    os << i << ',' << c.nodes[i].x << ',' << c.nodes[i].y << '\n';
  os << "element,n0,n1,length,tx,ty,nx,ny\n";
  for (std::size_t e = 0; e < c.elements.size(); ++e)
    os << e << ',' << c.elements[e][0] << ',' << c.elements[e][1] << ',' << c.length[e] << ','
       << c.tangent[e].x << ',' << c.tangent[e].y << ',' << c.normal[e].x << ','
       << c.normal[e].y << '\n';
}

/// FNV-1a over node coordinates and connectivity; used to tag runs that
/// share a mesh.
inline std::uint64_t geometry_hash(const Contour& c) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const Vec2& v : c.nodes) {
    mix(&v.x, sizeof v.x);
    mix(&v.y, sizeof v.y);
  }
  for (const auto& e : c.elements) mix(e.data(), sizeof(std::size_t) * 2);
  const unsigned char cl = c.closed ? 1 : 0;
  mix(&cl, 1);
  return h;
}

}  // namespace hoibc
