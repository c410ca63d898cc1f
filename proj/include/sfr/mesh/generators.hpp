#pragma once

// Structured generators for the verification meshes. All meshes are built from
// closed point loops joined by quadrilateral rings plus Cartesian frames.

#include <cmath>
#include <map>

#include "sfr/mesh/mesh.hpp"

namespace sfr {

// Accumulates vertices with coordinate de-duplication.
class MeshBuilder {
 public:
  int vertex(Vec2 p) {
    const auto key = std::make_pair(std::llround(p.x * 1e9), std::llround(p.y * 1e9));
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    const int id = static_cast<int>(mesh_.vertices.size());
    mesh_.vertices.push_back(p);
    ids_.emplace(key, id);
    return id;
  }
  void cell(int a, int b, int c, int d) { mesh_.cells.push_back({a, b, c, d}); }
  void boundary(int a, int b, const std::string& tag) { mesh_.boundary.push_back({a, b, tag}); }
  void curved(int a, int b, Vec2 c) { mesh_.curved.push_back({a, b, c}); }
  void rotation(Vec2 c, double omega) { mesh_.rotation = {c, omega}; }
  SubdomainMesh& mesh() { return mesh_; }

  // Quad ring between two counterclockwise loops of equal length; inner loop first.
  std::vector<int> ring(const std::vector<Vec2>& in, const std::vector<Vec2>& out) {
    const size_t n = in.size();
    std::vector<int> a(n), b(n);
    for (size_t k = 0; k < n; ++k) {
      a[k] = vertex(in[k]);
      b[k] = vertex(out[k]);
    }
    for (size_t k = 0; k < n; ++k) cell(a[k], b[k], b[(k + 1) % n], a[(k + 1) % n]);
    return b;
  }

  // Tag every edge of a closed loop (in loop order).
  void tag_loop(const std::vector<Vec2>& loop, const std::string& tag, std::optional<Vec2> arc_center = std::nullopt) {
    const size_t n = loop.size();
    for (size_t k = 0; k < n; ++k) {
      const int a = vertex(loop[k]), b = vertex(loop[(k + 1) % n]);
      boundary(a, b, tag);
      if (arc_center) curved(a, b, *arc_center);
    }
  }

 private:
  SubdomainMesh mesh_;
  std::map<std::pair<long long, long long>, int> ids_;
};

inline std::vector<Vec2> circle_loop(Vec2 c, double r, int n, double start) {
  std::vector<Vec2> p(n);
  for (int k = 0; k < n; ++k) {
    const double t = start + two_pi * k / n;
    p[k] = {c.x + r * std::cos(t), c.y + r * std::sin(t)};
  }
  return p;
}

// Boundary of the axis-aligned square [c-h, c+h]^2 with m segments per side,
// counterclockwise, starting at the corner at angle start_corner (multiple of 45 deg).
inline std::vector<Vec2> square_loop(Vec2 c, double h, int m, int start_corner) {
  const Vec2 corners[4] = {{h, -h}, {h, h}, {-h, h}, {-h, -h}};  // angles -45, 45, 135, 225
  std::vector<Vec2> p;
  for (int s = 0; s < 4; ++s) {
    const Vec2 a = corners[(start_corner + s) % 4], b = corners[(start_corner + s + 1) % 4];
    for (int k = 0; k < m; ++k) p.push_back(c + (1.0 - double(k) / m) * a + (double(k) / m) * b);
  }
  return p;
}

inline std::vector<Vec2> blend_loops(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double t) {
  std::vector<Vec2> p(a.size());
  for (size_t k = 0; k < a.size(); ++k) p[k] = (1.0 - t) * a[k] + t * b[k];
  return p;
}

inline void scale_mesh(SubdomainMesh& m, double s) {
  for (auto& v : m.vertices) v = s * v;
  for (auto& c : m.curved) c.center = s * c.center;
  m.rotation.center = s * m.rotation.center;
}

// ---------------------------------------------------------------- vortex box

struct VortexBoxOptions {
  double scale = 1.0;   // 1 -> [0,10]^2, 0.1 -> [0,1]^2
  double omega = 0.0;   // inner subdomain angular speed
  int interface_id = 1;
};

// Two subdomains: a disk of radius 2 centered at (5,5) with 20 cells (2x2 core
// square plus an 8x2 O-ring) and the surrounding box with 52 cells (12x3 O-grid
// plus a 16-cell Cartesian frame). Sliding faces 8 (inner) vs 12 (outer).
inline std::vector<SubdomainMesh> vortex_box_meshes(const VortexBoxOptions& opt = {}) {
  const Vec2 c{5.0, 5.0};
  const double r = 2.0, a = 0.75, b = 3.0;
  std::vector<SubdomainMesh> out;
  {
    MeshBuilder mb;
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        auto p = [&](int ii, int jj) { return mb.vertex({c.x - a + a * ii, c.y - a + a * jj}); };
        mb.cell(p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1));
      }
    const auto sq = square_loop(c, a, 2, 0);
    const auto circ = circle_loop(c, r, 8, -pi / 4);
    mb.ring(sq, blend_loops(sq, circ, 0.5));
    mb.ring(blend_loops(sq, circ, 0.5), circ);
    mb.tag_loop(circ, sliding_tag(opt.interface_id, InterfaceSideKind::inner));
    mb.rotation(c, opt.omega);
    out.push_back(mb.mesh());
  }
  {
    MeshBuilder mb;
    const auto circ = circle_loop(c, r, 12, pi / 4);
    const auto sq = square_loop(c, b, 3, 1);
    auto prev = circ;
    for (int l = 1; l <= 3; ++l) {
      auto next = blend_loops(circ, sq, l / 3.0);
      mb.ring(prev, next);
      prev = next;
    }
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 5; ++i) {
        if (i >= 1 && i <= 3 && j >= 1 && j <= 3) continue;
        auto p = [&](int ii, int jj) { return mb.vertex({2.0 * ii, 2.0 * jj}); };
        mb.cell(p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1));
      }
    for (int k = 0; k < 5; ++k) {
      mb.boundary(mb.vertex({2.0 * k, 0}), mb.vertex({2.0 * k + 2, 0}), "bottom");
      mb.boundary(mb.vertex({10, 2.0 * k}), mb.vertex({10, 2.0 * k + 2}), "right");
      mb.boundary(mb.vertex({2.0 * k, 10}), mb.vertex({2.0 * k + 2, 10}), "top");
      mb.boundary(mb.vertex({0, 2.0 * k}), mb.vertex({0, 2.0 * k + 2}), "left");
    }
    mb.tag_loop(circ, sliding_tag(opt.interface_id, InterfaceSideKind::outer));
    mb.rotation(c, 0.0);
    out.push_back(mb.mesh());
  }
  for (auto& m : out) scale_mesh(m, opt.scale);
  return out;
}

// Single-subdomain conforming counterpart of the vortex box: 3x3 core, 12x2
// inner ring and 12x3 outer ring sharing a polygonal (straight-edged) circle, so
// every element is bilinear. 85 cells.
inline SubdomainMesh conforming_box_mesh(double scale = 1.0) {
  const Vec2 c{5.0, 5.0};
  const double r = 2.0, a = 0.75, b = 3.0;
  MeshBuilder mb;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      auto p = [&](int ii, int jj) { return mb.vertex({c.x - a + 2 * a * ii / 3.0, c.y - a + 2 * a * jj / 3.0}); };
      mb.cell(p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1));
    }
  const auto sq = square_loop(c, a, 3, 1);
  const auto circ = circle_loop(c, r, 12, pi / 4);
  mb.ring(sq, blend_loops(sq, circ, 0.5));
  mb.ring(blend_loops(sq, circ, 0.5), circ);
  const auto outer = square_loop(c, b, 3, 1);
  auto prev = circ;
  for (int l = 1; l <= 3; ++l) {
    auto next = blend_loops(circ, outer, l / 3.0);
    mb.ring(prev, next);
    prev = next;
  }
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) {
      if (i >= 1 && i <= 3 && j >= 1 && j <= 3) continue;
      auto p = [&](int ii, int jj) { return mb.vertex({2.0 * ii, 2.0 * jj}); };
      mb.cell(p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1));
    }
  for (int k = 0; k < 5; ++k) {
    mb.boundary(mb.vertex({2.0 * k, 0}), mb.vertex({2.0 * k + 2, 0}), "bottom");
    mb.boundary(mb.vertex({10, 2.0 * k}), mb.vertex({10, 2.0 * k + 2}), "right");
    mb.boundary(mb.vertex({2.0 * k, 10}), mb.vertex({2.0 * k + 2, 10}), "top");
    mb.boundary(mb.vertex({0, 2.0 * k}), mb.vertex({0, 2.0 * k + 2}), "left");
  }
  mb.rotation(c, 0.0);
  SubdomainMesh m = mb.mesh();
  scale_mesh(m, scale);
  return m;
}

// ------------------------------------------------------------------- annulus

struct AnnulusOptions {
  double r_inner = 1.0, r_slide = 1.5, r_outer = 2.0;
  int n_theta_inner = 12, n_r_inner = 2;
  int n_theta_outer = 16, n_r_outer = 2;
  double omega = 0.0;
  int interface_id = 1;
};

// Concentric annuli about the origin: walls at r_inner ("inner_wall") and
// r_outer ("outer_wall") are exact arcs; interior circumferential faces are straight.
inline std::vector<SubdomainMesh> annulus_meshes(const AnnulusOptions& o = {}) {
  const Vec2 c{0.0, 0.0};
  std::vector<SubdomainMesh> out;
  auto build = [&](double r0, double r1, int nt, int nr, const std::string& wall, bool wall_inside, InterfaceSideKind side,
                   double omega) {
    MeshBuilder mb;
    auto prev = circle_loop(c, r0, nt, 0.0);
    for (int l = 1; l <= nr; ++l) {
      auto next = circle_loop(c, r0 + (r1 - r0) * l / nr, nt, 0.0);
      mb.ring(prev, next);
      prev = next;
    }
    const auto lo = circle_loop(c, r0, nt, 0.0), hi = circle_loop(c, r1, nt, 0.0);
    mb.tag_loop(wall_inside ? lo : hi, wall, c);
    mb.tag_loop(wall_inside ? hi : lo, sliding_tag(o.interface_id, side));
    mb.rotation(c, omega);
    return mb.mesh();
  };
  out.push_back(build(o.r_inner, o.r_slide, o.n_theta_inner, o.n_r_inner, "inner_wall", true, InterfaceSideKind::inner, o.omega));
  out.push_back(build(o.r_slide, o.r_outer, o.n_theta_outer, o.n_r_outer, "outer_wall", false, InterfaceSideKind::outer, 0.0));
  return out;
}

// n concentric rings (for multi-interface assembly): ring i spans
// [radii[i], radii[i+1]] with nt[i] azimuthal cells; ring 0 contains a core disk.
inline std::vector<SubdomainMesh> concentric_meshes(const std::vector<double>& radii, const std::vector<int>& nt,
                                                    const std::vector<double>& omega) {
  const Vec2 c{0.0, 0.0};
  std::vector<SubdomainMesh> out;
  const size_t n = nt.size();
  for (size_t i = 0; i < n; ++i) {
    MeshBuilder mb;
    if (i == 0) {
      const int m = nt[0] / 4;
      const double a = 0.4 * radii[1];
      for (int jj = 0; jj < m; ++jj)
        for (int ii = 0; ii < m; ++ii) {
          auto p = [&](int x, int y) { return mb.vertex({-a + 2 * a * x / m, -a + 2 * a * y / m}); };
          mb.cell(p(ii, jj), p(ii + 1, jj), p(ii + 1, jj + 1), p(ii, jj + 1));
        }
      const auto sq = square_loop(c, a, m, 0);
      mb.ring(sq, circle_loop(c, radii[1], nt[0], -pi / 4));
    } else {
      mb.ring(circle_loop(c, radii[i], nt[i], 0.0), circle_loop(c, radii[i + 1], nt[i], 0.0));
    }
    const double lo_start = (i == 0) ? -pi / 4 : 0.0;
    if (i > 0) mb.tag_loop(circle_loop(c, radii[i], nt[i], 0.0), sliding_tag(static_cast<int>(i), InterfaceSideKind::outer));
    if (i + 1 < n) mb.tag_loop(circle_loop(c, radii[i + 1], nt[i], lo_start), sliding_tag(static_cast<int>(i + 1), InterfaceSideKind::inner));
    else mb.tag_loop(circle_loop(c, radii[i + 1], nt[i], i == 0 ? lo_start : 0.0), "outer_wall", c);
    mb.rotation(c, omega[i]);
    out.push_back(mb.mesh());
  }
  return out;
}

// -------------------------------------------------------------- square cylinder

struct CylinderOptions {
  double diagonal = 1.0;        // square cylinder diagonal D
  double slide_diameter = 1.2;  // rotating disk diameter
  int per_side = 8;             // inner O-grid segments per square side
  int inner_layers = 2;
  int outer_per_side = 10;      // segments per side of the O-grid outer square
  int outer_layers = 9;
  double box_half = 2.0;        // O-grid outer square half-size
  double upstream = 15.0, downstream = 30.0, lateral = 15.0;
  int n_up = 8, n_down = 20, n_lat = 10;
  double omega = pi / 2;
  int interface_id = 1;
};

namespace detail {
// Node positions from x0 (spacing h0 next to x0) to x0 + len in n cells with
// geometric growth.
inline std::vector<double> graded(double len, int n, double h0) {
  double lo = 1.0, hi = 2.0;
  auto total = [&](double q) { return std::abs(q - 1.0) < 1e-12 ? h0 * n : h0 * (std::pow(q, n) - 1.0) / (q - 1.0); };
  if (total(1.0) > len) {
    hi = 1.0;
    lo = 0.5;
  }
  while (total(hi) < len) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < len ? lo : hi) = mid;
  }
  const double q = 0.5 * (lo + hi);
  std::vector<double> x(n + 1, 0.0);
  double h = h0;
  for (int i = 1; i <= n; ++i) {
    x[i] = x[i - 1] + h;
    h *= q;
  }
  x[n] = len;
  return x;
}
}  // namespace detail

// Rotating square cylinder (wall tag "wall") inside a disk, embedded in a
// stretched Cartesian far field (tag "farfield").
inline std::vector<SubdomainMesh> cylinder_meshes(const CylinderOptions& o = {}) {
  const Vec2 c{0.0, 0.0};
  const double rs = 0.5 * o.slide_diameter, hd = 0.5 * o.diagonal;
  std::vector<SubdomainMesh> out;
  {
    MeshBuilder mb;
    // square with vertices at angles 0, 90, 180, 270 degrees
    std::vector<Vec2> sq;
    const Vec2 v[4] = {{hd, 0}, {0, hd}, {-hd, 0}, {0, -hd}};
    for (int s = 0; s < 4; ++s)
      for (int k = 0; k < o.per_side; ++k) {
        const double t = double(k) / o.per_side;
        sq.push_back((1.0 - t) * v[s] + t * v[(s + 1) % 4]);
      }
    const auto circ = circle_loop(c, rs, 4 * o.per_side, 0.0);
    auto prev = sq;
    for (int l = 1; l <= o.inner_layers; ++l) {
      auto next = blend_loops(sq, circ, double(l) / o.inner_layers);
      mb.ring(prev, next);
      prev = next;
    }
    mb.tag_loop(sq, "wall");
    mb.tag_loop(circ, sliding_tag(o.interface_id, InterfaceSideKind::inner));
    mb.rotation(c, o.omega);
    out.push_back(mb.mesh());
  }
  {
    MeshBuilder mb;
    const int m = o.outer_per_side;
    const auto circ = circle_loop(c, rs, 4 * m, pi / 4);
    const auto sq = square_loop(c, o.box_half, m, 1);
    // geometric layer distribution: first layer thickness matches the circle spacing
    const double h0 = two_pi * rs / (4 * m);
    const auto t = detail::graded(o.box_half - rs, o.outer_layers, std::min(h0, (o.box_half - rs) / o.outer_layers));
    auto prev = circ;
    for (int l = 1; l <= o.outer_layers; ++l) {
      auto next = blend_loops(circ, sq, t[l] / (o.box_half - rs));
      mb.ring(prev, next);
      prev = next;
    }
    const double hb = 2.0 * o.box_half / m;
    std::vector<double> xs, ys;
    {
      auto up = detail::graded(o.upstream - o.box_half, o.n_up, hb);
      for (int i = o.n_up; i >= 1; --i) xs.push_back(-o.box_half - up[i]);
      for (int i = 0; i <= m; ++i) xs.push_back(-o.box_half + hb * i);
      auto dn = detail::graded(o.downstream - o.box_half, o.n_down, hb);
      for (int i = 1; i <= o.n_down; ++i) xs.push_back(o.box_half + dn[i]);
      auto lat = detail::graded(o.lateral - o.box_half, o.n_lat, hb);
      for (int i = o.n_lat; i >= 1; --i) ys.push_back(-o.box_half - lat[i]);
      for (int i = 0; i <= m; ++i) ys.push_back(-o.box_half + hb * i);
      for (int i = 1; i <= o.n_lat; ++i) ys.push_back(o.box_half + lat[i]);
    }
    // snap the box nodes so they coincide with the O-grid square loop
    const int ix0 = o.n_up, iy0 = o.n_lat;
    for (int i = 0; i <= m; ++i) {
      xs[ix0 + i] = -o.box_half + 2.0 * o.box_half * i / m;
      ys[iy0 + i] = -o.box_half + 2.0 * o.box_half * i / m;
    }
    const int nx = static_cast<int>(xs.size()) - 1, ny = static_cast<int>(ys.size()) - 1;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (i >= ix0 && i < ix0 + m && j >= iy0 && j < iy0 + m) continue;
        auto p = [&](int ii, int jj) { return mb.vertex({xs[ii], ys[jj]}); };
        mb.cell(p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1));
      }
    for (int i = 0; i < nx; ++i) {
      mb.boundary(mb.vertex({xs[i], ys[0]}), mb.vertex({xs[i + 1], ys[0]}), "farfield");
      mb.boundary(mb.vertex({xs[i], ys[ny]}), mb.vertex({xs[i + 1], ys[ny]}), "farfield");
    }
    for (int j = 0; j < ny; ++j) {
      mb.boundary(mb.vertex({xs[0], ys[j]}), mb.vertex({xs[0], ys[j + 1]}), "farfield");
      mb.boundary(mb.vertex({xs[nx], ys[j]}), mb.vertex({xs[nx], ys[j + 1]}), "farfield");
    }
    mb.tag_loop(circ, sliding_tag(o.interface_id, InterfaceSideKind::outer));
    mb.rotation(c, 0.0);
    out.push_back(mb.mesh());
  }
  return out;
}

// Single square cell [x0,x0+h]^2 with one boundary tag on every edge.
inline SubdomainMesh single_cell_mesh(double h = 1.0, const std::string& tag = "wall") {
  MeshBuilder mb;
  const int a = mb.vertex({0, 0}), b = mb.vertex({h, 0}), c = mb.vertex({h, h}), d = mb.vertex({0, h});
  mb.cell(a, b, c, d);
  mb.boundary(a, b, tag);
  mb.boundary(b, c, tag);
  mb.boundary(c, d, tag);
  mb.boundary(d, a, tag);
  return mb.mesh();
}

// nx x ny Cartesian grid on [0,lx]x[0,ly] with tags bottom/right/top/left.
inline SubdomainMesh cartesian_mesh(int nx, int ny, double lx = 1.0, double ly = 1.0) {
  MeshBuilder mb;
  auto p = [&](int i, int j) { return mb.vertex({lx * i / nx, ly * j / ny}); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) mb.cell(p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1));
  for (int i = 0; i < nx; ++i) {
    mb.boundary(p(i, 0), p(i + 1, 0), "bottom");
    mb.boundary(p(i, ny), p(i + 1, ny), "top");
  }
  for (int j = 0; j < ny; ++j) {
    mb.boundary(p(0, j), p(0, j + 1), "left");
    mb.boundary(p(nx, j), p(nx, j + 1), "right");
  }
  return mb.mesh();
}

}  // namespace sfr
