#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "sfr/mesh/generators.hpp"
#include "sfr/mesh/mesh.hpp"

using namespace sfr;

namespace {

SubdomainMesh roundtrip(const SubdomainMesh& m) {
  std::stringstream ss;
  write_subdomain(ss, m);
  return parse_subdomain(ss, "roundtrip");
}

void expect_chain(const AssembledMesh& m, const InterfaceSide& side) {
  const size_t n = side.faces.size();
  std::set<std::pair<int, int>> seen;
  for (size_t i = 0; i < n; ++i) {
    EXPECT_EQ(side.faces[i].v_end, side.faces[(i + 1) % n].v_start);
    seen.insert({side.faces[i].cell, side.faces[i].face});
  }
  EXPECT_EQ(seen.size(), n);
  (void)m;
}

}  // namespace

TEST(MeshIo, SingleCellRoundTrip) {
  auto m = single_cell_mesh();
  auto r = roundtrip(m);
  EXPECT_EQ(r.vertices.size(), 4u);
  EXPECT_EQ(r.cells.size(), 1u);
  EXPECT_EQ(r.boundary.size(), 4u);
  std::stringstream a, b;
  write_subdomain(a, m);
  write_subdomain(b, r);
  EXPECT_EQ(a.str(), b.str());
}

TEST(MeshIo, BitExactFloats) {
  auto ms = vortex_box_meshes({0.1, 3.0});
  for (auto& m : ms) {
    auto r = roundtrip(m);
    ASSERT_EQ(r.vertices.size(), m.vertices.size());
    for (size_t i = 0; i < m.vertices.size(); ++i) {
      EXPECT_EQ(r.vertices[i].x, m.vertices[i].x);
      EXPECT_EQ(r.vertices[i].y, m.vertices[i].y);
    }
    EXPECT_EQ(r.rotation.omega, m.rotation.omega);
  }
}

TEST(MeshIo, TaylorCouetteInnerCounts) {
  auto ms = annulus_meshes();
  auto r = roundtrip(ms[0]);
  EXPECT_EQ(r.cells.size(), 24u);
  EXPECT_EQ(roundtrip(ms[1]).cells.size(), 32u);
}

TEST(MeshIo, CorruptedVertexCountNamesLine) {
  std::stringstream ss;
  write_subdomain(ss, single_cell_mesh());
  std::string s = ss.str();
  s.replace(s.find("VERTICES 4"), 10, "VERTICES 5");
  std::stringstream in(s);
  try {
    parse_subdomain(in, "bad.mesh");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.mesh:7"), std::string::npos) << e.what();
  }
}

TEST(MeshIo, NonQuadAndNegativeArea) {
  std::stringstream tri("VERTICES 3\n0 0\n1 0\n0 1\nCELLS 1\n0 1 2\n");
  EXPECT_THROW(parse_subdomain(tri), ParseError);
  std::stringstream cw("VERTICES 4\n0 0\n1 0\n1 1\n0 1\nCELLS 1\n0 3 2 1\nBOUNDARY 0\n");
  EXPECT_THROW(parse_subdomain(cw), GeometryError);
  std::stringstream unk("FACES 1\n");
  EXPECT_THROW(parse_subdomain(unk), ParseError);
  EXPECT_THROW(read_subdomain("/nonexistent/x.mesh"), ParseError);
}

TEST(Assemble, OffsetsAndCounts) {
  auto ms = vortex_box_meshes();
  ASSERT_EQ(ms[0].cells.size(), 20u);
  ASSERT_EQ(ms[1].cells.size(), 52u);
  auto m = build_mesh(ms);
  EXPECT_EQ(m.cells.size(), 72u);
  EXPECT_EQ(m.cell_offset[1], 20);  // 21st cell in one-based numbering
  EXPECT_EQ(m.cells[20].subdomain, 1);
  ASSERT_EQ(m.interfaces.size(), 1u);
  EXPECT_EQ(m.interfaces[0].inner.faces.size(), 8u);
  EXPECT_EQ(m.interfaces[0].outer.faces.size(), 12u);
  for (const auto& c : m.cells)
    for (int v : c.v) EXPECT_LT(v, static_cast<int>(m.vertices.size()));
  // every interior face joins two cells with opposite traversal
  for (const auto& f : m.interior_faces) {
    auto [a0, a1] = m.face_vertices(f.cell[0], f.face[0]);
    auto [b0, b1] = m.face_vertices(f.cell[1], f.face[1]);
    EXPECT_EQ(a0, b1);
    EXPECT_EQ(a1, b0);
  }
  // each cell face is exactly one of: interior, boundary, sliding
  std::map<std::pair<int, int>, int> uses;
  for (const auto& f : m.interior_faces) {
    uses[{f.cell[0], f.face[0]}]++;
    uses[{f.cell[1], f.face[1]}]++;
  }
  for (const auto& f : m.boundary_faces) uses[{f.cell, f.face}]++;
  for (const auto* s : {&m.interfaces[0].inner, &m.interfaces[0].outer})
    for (const auto& f : s->faces) uses[{f.cell, f.face}]++;
  EXPECT_EQ(uses.size(), 72u * 4u);
  for (auto& [k, n] : uses) EXPECT_EQ(n, 1);
}

TEST(Assemble, SingleSubdomainIdentity) {
  auto s = cartesian_mesh(3, 2);
  auto m = build_mesh({s});
  EXPECT_EQ(m.cells.size(), 6u);
  EXPECT_EQ(m.vertices.size(), s.vertices.size());
  for (size_t i = 0; i < s.cells.size(); ++i)
    for (int k = 0; k < 4; ++k) EXPECT_EQ(m.cells[i].v[k], s.cells[i][k]);
  EXPECT_EQ(m.interior_faces.size(), 7u);
  EXPECT_EQ(m.boundary_faces.size(), 10u);
  EXPECT_TRUE(m.interfaces.empty());
}

TEST(Assemble, ThreeConcentricSubdomains) {
  auto ms = concentric_meshes({0.0, 1.0, 1.6, 2.2}, {8, 12, 10}, {1.0, 0.5, 0.0});
  auto m = build_mesh(ms);
  ASSERT_EQ(m.interfaces.size(), 2u);
  EXPECT_EQ(m.interfaces[0].inner.faces.size(), 8u);
  EXPECT_EQ(m.interfaces[0].outer.faces.size(), 12u);
  EXPECT_EQ(m.interfaces[1].inner.faces.size(), 12u);
  EXPECT_EQ(m.interfaces[1].outer.faces.size(), 10u);
  EXPECT_EQ(m.interfaces[0].inner.subdomain, 0);
  EXPECT_EQ(m.interfaces[0].outer.subdomain, 1);
  EXPECT_EQ(m.interfaces[1].inner.subdomain, 1);
  EXPECT_EQ(m.interfaces[1].outer.subdomain, 2);
  for (auto& i : m.interfaces) {
    expect_chain(m, i.inner);
    expect_chain(m, i.outer);
  }
}

TEST(Assemble, ErrorPaths) {
  auto ms = vortex_box_meshes();
  auto lonely = ms;
  lonely.pop_back();
  EXPECT_THROW(assemble(lonely), TopologyError);
  auto twice = ms;
  twice.push_back(ms[1]);
  EXPECT_THROW(assemble(twice), TopologyError);
  auto untagged = ms;
  untagged[1].boundary.pop_back();
  EXPECT_THROW(assemble(untagged), TopologyError);
}

TEST(Reorder, PermutedAndReversedRing) {
  auto ms = vortex_box_meshes();
  auto base = build_mesh(ms);
  std::mt19937 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    auto m = assemble(ms);
    for (auto* s : {&m.interfaces[0].inner, &m.interfaces[0].outer}) {
      std::shuffle(s->faces.begin(), s->faces.end(), rng);
      std::swap(s->faces[0].v_start, s->faces[0].v_end);  // one reversed pair
    }
    reorder_sliding_faces(m);
    expect_chain(m, m.interfaces[0].inner);
    expect_chain(m, m.interfaces[0].outer);
    // counterclockwise about the center
    for (auto* s : {&m.interfaces[0].inner, &m.interfaces[0].outer})
      for (auto& f : s->faces)
        EXPECT_GT(cross(m.vertices[f.v_start] - m.interfaces[0].center, m.vertices[f.v_end] - m.interfaces[0].center), 0.0);
    // same set of faces as the unshuffled ordering, up to cyclic shift
    const auto& a = base.interfaces[0].inner.faces;
    const auto& b = m.interfaces[0].inner.faces;
    size_t shift = 0;
    while (shift < b.size() && b[shift].cell != a[0].cell) ++shift;
    ASSERT_LT(shift, b.size());
    for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].cell, b[(i + shift) % b.size()].cell);
  }
}

TEST(Reorder, BrokenLoops) {
  auto m = assemble(vortex_box_meshes());
  auto gap = m;
  gap.interfaces[0].inner.faces.pop_back();
  EXPECT_THROW(reorder_sliding_faces(gap), TopologyError);
  auto branch = m;
  branch.interfaces[0].outer.faces.push_back(branch.interfaces[0].outer.faces[0]);
  EXPECT_THROW(reorder_sliding_faces(branch), TopologyError);
}

TEST(RadiusCorrection, NoOpPerturbedAndJitter) {
  auto ms = vortex_box_meshes();
  auto m = build_mesh(ms);
  const auto& i0 = m.interfaces[0];
  for (auto* s : {&i0.inner, &i0.outer})
    for (auto& f : s->faces) EXPECT_NEAR(norm(m.vertices[f.v_start] - i0.center), i0.radius, 1e-14);

  // one vertex perturbed radially by 1e-6
  auto p = assemble(ms);
  reorder_sliding_faces(p);
  const int v = p.interfaces[0].outer.faces[3].v_start;
  const Vec2 d = p.vertices[v] - p.interfaces[0].center;
  const double th = std::atan2(d.y, d.x);
  p.vertices[v] = p.vertices[v] + 1e-6 * ((1.0 / norm(d)) * d);
  correct_interface_radius(p, 0);
  const Vec2 e = p.vertices[v] - p.interfaces[0].center;
  EXPECT_NEAR(norm(e), p.interfaces[0].radius, 1e-14);
  EXPECT_NEAR(std::atan2(e.y, e.x), th, 1e-15);

  // random jitter on everything
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1e-8, 1e-8);
  auto j = assemble(ms);
  for (auto& x : j.vertices) x = x + Vec2{u(rng), u(rng)};
  reorder_sliding_faces(j);
  correct_interface_radius(j, 0);
  for (auto* s : {&j.interfaces[0].inner, &j.interfaces[0].outer})
    for (auto& f : s->faces) EXPECT_NEAR(norm(j.vertices[f.v_start] - j.interfaces[0].center), j.interfaces[0].radius, 1e-14);

  auto bad = assemble(ms);
  reorder_sliding_faces(bad);
  bad.vertices[bad.interfaces[0].inner.faces[2].v_start] = bad.interfaces[0].center;
  EXPECT_THROW(correct_interface_radius(bad, 0), GeometryError);
}

TEST(Generators, CellCountsAndAreas) {
  auto conf = conforming_box_mesh(0.1);
  EXPECT_EQ(conf.cells.size(), 85u);
  auto cm = build_mesh({conf});
  EXPECT_TRUE(cm.interfaces.empty());
  auto cyl = cylinder_meshes();
  auto m = build_mesh(cyl);
  EXPECT_GT(m.cells.size(), 1200u);
  EXPECT_LT(m.cells.size(), 1800u);
  double area = 0.0;
  for (size_t s = 0; s < cyl.size(); ++s)
    for (auto& c : cyl[s].cells) area += signed_area(cyl[s], c);
  // far-field box minus the square cylinder (side D / sqrt 2); circle faces are
  // polygonal in this count so compare loosely
  EXPECT_NEAR(area, 45.0 * 30.0 - 0.5, 0.05);
}
