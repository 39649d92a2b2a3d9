#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "hoibc/geometry.hpp"

using namespace hoibc;

TEST_CASE("circle mesh geometry") {
  const Contour c = mesh_circle(1.0, 64);
  CHECK(c.closed);
  CHECK(c.node_count() == 64);
  CHECK(c.element_count() == 64);
  CHECK(std::abs(c.perimeter() - 2 * kPi) / (2 * kPi) < 2e-3);
  CHECK(c.perimeter() < 2 * kPi);
  Vec2 sum{};
  for (std::size_t e = 0; e < c.element_count(); ++e) {
    const Vec2 m = c.midpoint(e);
    CHECK(dot(c.normal[e], (1.0 / norm(m)) * m) > 0.99);
    CHECK(std::abs(dot(c.normal[e], c.tangent[e])) < 1e-14);
    CHECK(std::abs(norm(c.normal[e]) - 1) < 1e-14);
    CHECK(std::abs(norm(c.tangent[e]) - 1) < 1e-14);
    sum = sum + c.length[e] * c.tangent[e];
    // consecutive elements share exactly one node
    CHECK(c.elements[e][1] == c.elements[(e + 1) % 64][0]);
  }
  CHECK(norm(sum) < 1e-12 * c.perimeter());
  for (const Vec2& p : c.nodes) CHECK(std::abs(norm(p) - 1.0) < 1e-15);
}

TEST_CASE("circle meshes are nested") {
  const Contour a = mesh_circle(2.5, 32), b = mesh_circle(2.5, 64);
  for (std::size_t i = 0; i < a.node_count(); ++i) {
    CHECK(std::abs(a.nodes[i].x - b.nodes[2 * i].x) < 1e-15);
    CHECK(std::abs(a.nodes[i].y - b.nodes[2 * i].y) < 1e-15);
  }
}

TEST_CASE("coarse or degenerate meshes are rejected") {
  CHECK_THROWS_AS(mesh_circle(1.0, 7), MeshError);
  CHECK_THROWS_AS(mesh_plate(1.0, 4), MeshError);
  CHECK_THROWS_AS(mesh_circle(0.0, 16), MeshError);
  CHECK_THROWS_AS(mesh_plate(-1.0, 16), MeshError);
  CHECK_NOTHROW(mesh_circle(1.0, 8));
}

TEST_CASE("plate mesh") {
  const Contour c = mesh_plate(1.0, 10);
  CHECK_FALSE(c.closed);
  CHECK(c.node_count() == 11);
  CHECK(c.element_count() == 10);
  for (std::size_t e = 0; e < 10; ++e) {
    CHECK(std::abs(c.length[e] - 0.1) < 1e-14);
    CHECK(std::abs(c.normal[e].x) < 1e-15);
    CHECK(c.normal[e].y == 1.0);
    CHECK(c.tangent[e].x == -1.0);
  }
  CHECK(c.nodes.front().x == 0.5);
  CHECK(c.nodes.back().x == -0.5);
  const DofSpace s = make_space(c, SpaceKind::P1_nodal);
  CHECK(s.count == 11);
  CHECK(s.free_count() == 9);
  CHECK(s.is_constrained(0));
  CHECK(s.is_constrained(10));
  CHECK_FALSE(s.is_constrained(5));
  const DofSpace p0 = make_space(c, SpaceKind::P0_elementwise);
  CHECK(p0.count == 10);
  CHECK(p0.constrained.empty());
}

TEST_CASE("closed P1 space has one dof per node") {
  const Contour c = mesh_circle(1.0, 16);
  const DofSpace s = make_space(c, SpaceKind::P1_nodal);
  CHECK(s.count == 16);
  CHECK(s.constrained.empty());
}

TEST_CASE("basis functions") {
  const Contour c = mesh_circle(1.0, 12);
  const DofSpace s = make_space(c, SpaceKind::P1_nodal);
  const auto b0 = basis_eval(s, c, 3, 0.0);
  REQUIRE(b0.size() == 2);
  CHECK(b0[0].value == 1.0);
  CHECK(b0[1].value == 0.0);
  CHECK(b0[0].dof == 3);
  CHECK(b0[1].dof == 4);
  const double h = c.length[3];
  CHECK(std::abs(b0[0].dl + 1 / h) < 1e-14);
  CHECK(std::abs(b0[1].dl - 1 / h) < 1e-14);
  for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    double sum = 0;
    for (const auto& v : basis_eval(s, c, 7, t)) sum += v.value;
    CHECK(std::abs(sum - 1.0) < 1e-15);
  }
  // int d_l phi_i over a closed contour telescopes to zero
  std::vector<double> integral(s.count, 0.0);
  for (std::size_t e = 0; e < c.element_count(); ++e)
    for (const auto& v : basis_eval(s, c, e, 0.5)) integral[v.dof] += v.dl * c.length[e];
  for (double v : integral) CHECK(std::abs(v) < 1e-14);

  const DofSpace p0 = make_space(c, SpaceKind::P0_elementwise);
  const auto q = basis_eval(p0, c, 5, 0.3);
  REQUIRE(q.size() == 1);
  CHECK(q[0].dof == 5);
  CHECK(q[0].value == 1.0);
  CHECK(q[0].dl == 0.0);
  CHECK_THROWS_AS(basis_eval(s, c, 12, 0.5), UsageError);
}

TEST_CASE("mesh dump and hash") {
  const Contour a = mesh_circle(1.0, 16), b = mesh_circle(1.0, 16), d = mesh_circle(1.0, 32);
  CHECK(geometry_hash(a) == geometry_hash(b));
  CHECK(geometry_hash(a) != geometry_hash(d));
  std::ostringstream os;
  write_mesh_csv(os, a);
  const std::string s = os.str();
  CHECK(s.find("node,x,y\n") != std::string::npos);
  CHECK(s.find("element,n0,n1,length,tx,ty,nx,ny\n") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 2 + 1 + 16 + 1 + 16);
}
