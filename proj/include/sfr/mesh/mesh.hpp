#pragma once

// Subdomain meshes, their text format, and assembly into a single mesh with
// sliding interfaces.
//
// File grammar (one record per line, '#' starts a comment):
//
//   VERTICES <n>       then n lines: x y
//   CELLS <m>          then m lines: v0 v1 v2 v3   (counterclockwise, 0-based)
//   BOUNDARY <k>       then k lines: v0 v1 tag
//   CURVED <c>         then c lines: v0 v1 cx cy   (optional; arc edges about (cx,cy))
//   ROTATION 1         then one line: cx cy omega
//
// Sliding faces carry the tag "sliding:<id>:inner" or "sliding:<id>:outer".

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "sfr/core/types.hpp"
#include "sfr/geometry/mapping.hpp"

namespace sfr {

struct BoundaryRecord {
  int v0 = 0, v1 = 0;
  std::string tag;
};

struct CurvedRecord {
  int v0 = 0, v1 = 0;
  Vec2 center;
};

struct SubdomainMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 4>> cells;
  std::vector<BoundaryRecord> boundary;
  std::vector<CurvedRecord> curved;
  RigidRotation rotation;
};

enum class InterfaceSideKind { inner, outer };

struct SlidingTag {
  int id = 0;
  InterfaceSideKind side = InterfaceSideKind::inner;
};

inline std::optional<SlidingTag> parse_sliding_tag(const std::string& tag) {
  if (tag.rfind("sliding:", 0) != 0) return std::nullopt;
  const auto p = tag.find(':', 8);
  if (p == std::string::npos) throw ParseError("malformed sliding tag '" + tag + "'");
  SlidingTag s;
  try {
    s.id = std::stoi(tag.substr(8, p - 8));
  } catch (...) {
    throw ParseError("malformed sliding tag '" + tag + "'");
  }
  const std::string side = tag.substr(p + 1);
  if (side == "inner") s.side = InterfaceSideKind::inner;
  else if (side == "outer") s.side = InterfaceSideKind::outer;
  else throw ParseError("sliding tag side must be inner or outer: '" + tag + "'");
  return s;
}

inline std::string sliding_tag(int id, InterfaceSideKind side) {
  return "sliding:" + std::to_string(id) + (side == InterfaceSideKind::inner ? ":inner" : ":outer");
}

inline double signed_area(const SubdomainMesh& m, const std::array<int, 4>& c) {
  double a = 0.0;
  for (int k = 0; k < 4; ++k) a += cross(m.vertices[c[k]], m.vertices[c[(k + 1) % 4]]);
  return 0.5 * a;
}

inline void validate(const SubdomainMesh& m, const std::string& name = "mesh") {
  const int nv = static_cast<int>(m.vertices.size());
  auto check = [&](int v) {
    if (v < 0 || v >= nv) throw TopologyError(name + ": vertex id " + std::to_string(v) + " out of range");
  };
  for (size_t i = 0; i < m.cells.size(); ++i) {
    for (int v : m.cells[i]) check(v);
    if (!(signed_area(m, m.cells[i]) > 0.0))
      throw GeometryError(name + ": cell " + std::to_string(i) + " has non-positive area (must be counterclockwise)");
  }
  for (const auto& b : m.boundary) {
    check(b.v0);
    check(b.v1);
    parse_sliding_tag(b.tag);
  }
  for (const auto& c : m.curved) {
    check(c.v0);
    check(c.v1);
  }
}

// ------------------------------------------------------------------------- I/O

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_subdomain(std::ostream& os, const SubdomainMesh& m) {
  os << "# sliding-mesh subdomain\n";
  os << "VERTICES " << m.vertices.size() << "\n";
  for (auto v : m.vertices) os << format_double(v.x) << " " << format_double(v.y) << "\n";
  os << "CELLS " << m.cells.size() << "\n";
  for (auto& c : m.cells) os << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << "\n";
  os << "BOUNDARY " << m.boundary.size() << "\n";
  for (auto& b : m.boundary) os << b.v0 << " " << b.v1 << " " << b.tag << "\n";
  os << "CURVED " << m.curved.size() << "\n";
  for (auto& c : m.curved)
    os << c.v0 << " " << c.v1 << " " << format_double(c.center.x) << " " << format_double(c.center.y) << "\n";
  os << "ROTATION 1\n";
  os << format_double(m.rotation.center.x) << " " << format_double(m.rotation.center.y) << " "
     << format_double(m.rotation.omega) << "\n";
}

inline void write_subdomain(const std::string& path, const SubdomainMesh& m) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_subdomain(f, m);
  if (!f) throw Error("write failed for '" + path + "'");
}

inline SubdomainMesh parse_subdomain(std::istream& is, const std::string& name = "<stream>") {
  std::vector<std::pair<int, std::string>> lines;
  {
    std::string raw;
    int no = 0;
    while (std::getline(is, raw)) {
      ++no;
      const auto h = raw.find('#');
      if (h != std::string::npos) raw.erase(h);
      if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
      lines.emplace_back(no, raw);
    }
  }
  auto fail = [&](int line, const std::string& msg) -> ParseError {
    return ParseError(name + ":" + std::to_string(line) + ": " + msg);
  };
  SubdomainMesh m;
  bool have_rotation = false;
  size_t pos = 0;
  while (pos < lines.size()) {
    const auto [no, text] = lines[pos++];
    std::istringstream hs(text);
    std::string key;
    long count = -1;
    hs >> key >> count;
    if (!hs || count < 0) throw fail(no, "expected section header '<NAME> <count>', got '" + text + "'");
    std::string extra;
    if (hs >> extra) throw fail(no, "trailing text after section header");
    auto record = [&](const char* what) -> std::pair<int, std::istringstream> {
      if (pos >= lines.size()) throw fail(lines.back().first, std::string("missing ") + what + " record");
      const auto& [ln, t] = lines[pos++];
      return {ln, std::istringstream(t)};
    };
    auto finish = [&](int ln, std::istringstream& s, const char* what) {
      if (!s) throw fail(ln, std::string("malformed ") + what + " record");
      std::string rest;
      if (s >> rest) throw fail(ln, std::string("unexpected extra field in ") + what + " record (bad count?)");
    };
    if (key == "VERTICES") {
      for (long i = 0; i < count; ++i) {
        auto [ln, s] = record("vertex");
        Vec2 v;
        s >> v.x >> v.y;
        finish(ln, s, "vertex");
        m.vertices.push_back(v);
      }
    } else if (key == "CELLS") {
      for (long i = 0; i < count; ++i) {
        auto [ln, s] = record("cell");
        std::array<int, 4> c{};
        s >> c[0] >> c[1] >> c[2] >> c[3];
        if (!s) throw fail(ln, "cell record must list exactly 4 vertex ids (quadrilaterals only)");
        finish(ln, s, "cell (quadrilaterals only)");
        m.cells.push_back(c);
      }
    } else if (key == "BOUNDARY") {
      for (long i = 0; i < count; ++i) {
        auto [ln, s] = record("boundary");
        BoundaryRecord b;
        s >> b.v0 >> b.v1 >> b.tag;
        finish(ln, s, "boundary");
        try {
          parse_sliding_tag(b.tag);
        } catch (const ParseError& e) {
          throw fail(ln, e.what());
        }
        m.boundary.push_back(b);
      }
    } else if (key == "CURVED") {
      for (long i = 0; i < count; ++i) {
        auto [ln, s] = record("curved");
        CurvedRecord c;
        s >> c.v0 >> c.v1 >> c.center.x >> c.center.y;
        finish(ln, s, "curved");
        m.curved.push_back(c);
      }
    } else if (key == "ROTATION") {
      if (count != 1) throw fail(no, "ROTATION section holds exactly one record");
      auto [ln, s] = record("rotation");
      s >> m.rotation.center.x >> m.rotation.center.y >> m.rotation.omega;
      finish(ln, s, "rotation");
      have_rotation = true;
    } else {
      throw fail(no, "unknown section '" + key + "'");
    }
  }
  if (!have_rotation) m.rotation = RigidRotation{};
  const int nv = static_cast<int>(m.vertices.size());
  for (size_t i = 0; i < m.cells.size(); ++i)
    for (int v : m.cells[i])
      if (v < 0 || v >= nv) throw ParseError(name + ": cell " + std::to_string(i) + " references vertex " + std::to_string(v) + " out of range");
  validate(m, name);
  return m;
}

inline SubdomainMesh read_subdomain(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open mesh file '" + path + "'");
  return parse_subdomain(f, path);
}

// -------------------------------------------------------------------- assembly

struct MeshCell {
  std::array<int, 4> v{};
  int subdomain = 0;
};

struct InteriorFace {
  int cell[2] = {0, 0};
  int face[2] = {0, 0};
};

struct BoundaryFace {
  int cell = 0, face = 0;
  std::string tag;
};

struct CurvedFace {
  int cell = 0, face = 0;
  Vec2 center;
};

// A sliding face in interface counterclockwise order (start -> end).
struct SlidingFace {
  int cell = 0, face = 0;
  int v_start = 0, v_end = 0;
};

struct InterfaceSide {
  int subdomain = -1;
  std::vector<SlidingFace> faces;
};

struct SlidingInterface {
  int id = 0;
  Vec2 center;
  double radius = 0.0;
  InterfaceSide inner, outer;
};

struct AssembledMesh {
  std::vector<Vec2> vertices;
  std::vector<MeshCell> cells;
  std::vector<int> cell_offset;    // first global cell of each subdomain
  std::vector<int> vertex_offset;  // first global vertex of each subdomain
  std::vector<RigidRotation> rotation;
  std::vector<InteriorFace> interior_faces;
  std::vector<BoundaryFace> boundary_faces;
  std::vector<CurvedFace> curved_faces;
  std::vector<SlidingInterface> interfaces;

  int subdomains() const { return static_cast<int>(rotation.size()); }
  std::pair<int, int> face_vertices(int cell, int face) const {
    const auto& c = cells[cell].v;
    return {c[face], c[(face + 1) % 4]};
  }
};

inline AssembledMesh assemble(const std::vector<SubdomainMesh>& meshes) {
  if (meshes.empty()) throw TopologyError("assemble: no subdomains");
  AssembledMesh out;
  std::map<int, SlidingInterface> ifaces;
  for (size_t sd = 0; sd < meshes.size(); ++sd) {
    const auto& m = meshes[sd];
    validate(m, "subdomain " + std::to_string(sd));
    const int voff = static_cast<int>(out.vertices.size());
    const int coff = static_cast<int>(out.cells.size());
    out.vertex_offset.push_back(voff);
    out.cell_offset.push_back(coff);
    out.rotation.push_back(m.rotation);
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    for (const auto& c : m.cells) out.cells.push_back({{c[0] + voff, c[1] + voff, c[2] + voff, c[3] + voff}, static_cast<int>(sd)});

    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;
    for (size_t i = 0; i < m.cells.size(); ++i)
      for (int f = 0; f < 4; ++f) {
        const int a = m.cells[i][f], b = m.cells[i][(f + 1) % 4];
        edges[{std::min(a, b), std::max(a, b)}].push_back({static_cast<int>(i) + coff, f});
      }
    std::map<std::pair<int, int>, const BoundaryRecord*> records;
    for (const auto& b : m.boundary) {
      auto key = std::make_pair(std::min(b.v0, b.v1), std::max(b.v0, b.v1));
      if (records.count(key)) throw TopologyError("subdomain " + std::to_string(sd) + ": duplicate boundary record for edge " + std::to_string(b.v0) + "-" + std::to_string(b.v1));
      records[key] = &b;
    }
    std::map<std::pair<int, int>, Vec2> curved;
    for (const auto& c : m.curved) curved[{std::min(c.v0, c.v1), std::max(c.v0, c.v1)}] = c.center;

    size_t used = 0;
    for (const auto& [key, users] : edges) {
      if (users.size() > 2)
        throw TopologyError("subdomain " + std::to_string(sd) + ": edge " + std::to_string(key.first) + "-" + std::to_string(key.second) + " shared by more than two cells");
      if (users.size() == 2) {
        const auto [ca, fa] = users[0];
        const auto [cb, fb] = users[1];
        if (out.cells[ca].v[fa] != out.cells[cb].v[(fb + 1) % 4])
          throw TopologyError("subdomain " + std::to_string(sd) + ": cells " + std::to_string(ca) + " and " + std::to_string(cb) + " traverse a shared edge in the same direction");
        out.interior_faces.push_back({{ca, cb}, {fa, fb}});
        if (records.count(key)) throw TopologyError("subdomain " + std::to_string(sd) + ": boundary record on interior edge");
        continue;
      }
      const auto [c, f] = users[0];
      auto it = records.find(key);
      if (it == records.end())
        throw TopologyError("subdomain " + std::to_string(sd) + ": untagged boundary edge " + std::to_string(key.first) + "-" + std::to_string(key.second));
      ++used;
      if (auto cv = curved.find(key); cv != curved.end()) out.curved_faces.push_back({c, f, cv->second});
      if (auto st = parse_sliding_tag(it->second->tag)) {
        auto& iface = ifaces[st->id];
        iface.id = st->id;
        auto& side = st->side == InterfaceSideKind::inner ? iface.inner : iface.outer;
        if (side.subdomain >= 0 && side.subdomain != static_cast<int>(sd))
          throw TopologyError("interface " + std::to_string(st->id) + ": side declared by two subdomains");
        side.subdomain = static_cast<int>(sd);
        side.faces.push_back({c, f, out.cells[c].v[f], out.cells[c].v[(f + 1) % 4]});
      } else {
        out.boundary_faces.push_back({c, f, it->second->tag});
      }
    }
    if (used != m.boundary.size())
      throw TopologyError("subdomain " + std::to_string(sd) + ": boundary record does not match any boundary edge");
  }
  for (auto& [id, iface] : ifaces) {
    if (iface.inner.subdomain < 0 || iface.outer.subdomain < 0)
      throw TopologyError("interface " + std::to_string(id) + ": unpaired side");
    if (iface.inner.subdomain == iface.outer.subdomain)
      throw TopologyError("interface " + std::to_string(id) + ": both sides in one subdomain");
    iface.center = out.rotation[iface.inner.subdomain].center;
    const auto& outer_rot = out.rotation[iface.outer.subdomain];
    if (outer_rot.omega != 0.0 && norm(outer_rot.center - iface.center) > 1e-12)
      throw GeometryError("interface " + std::to_string(id) + ": sides declare different rotation centers");
    out.interfaces.push_back(iface);
  }
  return out;
}

// Orient every sliding face counterclockwise about the interface center and
// chain them so that each face starts where the previous one ends.
inline void reorder_sliding_faces(AssembledMesh& mesh) {
  for (auto& iface : mesh.interfaces) {
    for (InterfaceSide* side : {&iface.inner, &iface.outer}) {
      auto faces = side->faces;
      if (faces.empty()) throw TopologyError("interface " + std::to_string(iface.id) + ": empty side");
      for (auto& f : faces) {
        const Vec2 a = mesh.vertices[f.v_start] - iface.center, b = mesh.vertices[f.v_end] - iface.center;
        if (cross(a, b) < 0.0) std::swap(f.v_start, f.v_end);
      }
      std::map<int, int> by_start;
      for (size_t i = 0; i < faces.size(); ++i) {
        if (!by_start.emplace(faces[i].v_start, static_cast<int>(i)).second)
          throw TopologyError("interface " + std::to_string(iface.id) + ": sliding loop branches at vertex " + std::to_string(faces[i].v_start));
      }
      std::vector<SlidingFace> ordered;
      std::vector<char> seen(faces.size(), 0);
      int cur = 0;
      for (size_t step = 0; step < faces.size(); ++step) {
        if (seen[cur]) throw TopologyError("interface " + std::to_string(iface.id) + ": sliding faces form more than one loop");
        seen[cur] = 1;
        ordered.push_back(faces[cur]);
        auto it = by_start.find(faces[cur].v_end);
        if (it == by_start.end()) throw TopologyError("interface " + std::to_string(iface.id) + ": sliding loop has a gap at vertex " + std::to_string(faces[cur].v_end));
        cur = it->second;
      }
      if (cur != 0) throw TopologyError("interface " + std::to_string(iface.id) + ": sliding loop does not close");
      side->faces = std::move(ordered);
    }
  }
}

// Move every vertex of the interface onto the reference radius (that of the
// first vertex), preserving its angle.
inline void correct_interface_radius(AssembledMesh& mesh, int which) {
  auto& iface = mesh.interfaces.at(which);
  const Vec2 c = iface.center;
  const double rref = norm(mesh.vertices[iface.inner.faces.front().v_start] - c);
  std::set<int> verts;
  for (const InterfaceSide* side : {&iface.inner, &iface.outer})
    for (const auto& f : side->faces) {
      verts.insert(f.v_start);
      verts.insert(f.v_end);
    }
  for (int v : verts) {
    const Vec2 d = mesh.vertices[v] - c;
    if (norm(d) <= 1e-14 * std::max(1.0, rref))
      throw GeometryError("interface " + std::to_string(iface.id) + ": vertex " + std::to_string(v) + " coincides with the center");
    const double th = std::atan2(d.y, d.x);
    mesh.vertices[v] = {c.x + rref * std::cos(th), c.y + rref * std::sin(th)};
  }
  iface.radius = rref;
}

// read -> assemble -> reorder -> correct, the order the driver uses.
inline AssembledMesh build_mesh(const std::vector<SubdomainMesh>& meshes) {
  AssembledMesh m = assemble(meshes);
  reorder_sliding_faces(m);
  for (size_t i = 0; i < m.interfaces.size(); ++i) correct_interface_radius(m, static_cast<int>(i));
  return m;
}

}  // namespace sfr
