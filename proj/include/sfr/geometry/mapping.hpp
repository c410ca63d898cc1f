#pragma once

// Element mappings (serendipity iso-parametric and transfinite), motion, and
// metric terms for moving quadrilaterals.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sfr/core/types.hpp"

namespace sfr {

// Position and reference-space tangents of a mapping at one point.
struct MapSample {
  Vec2 x;
  Vec2 d_xi;   // (x_xi, y_xi)
  Vec2 d_eta;  // (x_eta, y_eta)
};

// ---------------------------------------------------------------- iso-parametric

// Serendipity node layout on [0,1]^2: corners (0,0),(1,0),(1,1),(0,1) first,
// then edge nodes walking the boundary counterclockwise.
inline std::vector<Vec2> serendipity_nodes(int k) {
  std::vector<Vec2> c = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  if (k == 4) return c;
  if (k == 8) {
    c.insert(c.end(), {{0.5, 0}, {1, 0.5}, {0.5, 1}, {0, 0.5}});
    return c;
  }
  if (k == 12) {
    const double a = 1.0 / 3.0, b = 2.0 / 3.0;
    c.insert(c.end(), {{a, 0}, {b, 0}, {1, a}, {1, b}, {b, 1}, {a, 1}, {0, b}, {0, a}});
    return c;
  }
  throw ConfigError("iso-parametric map: unsupported node count K=" + std::to_string(k));
}

// Shape functions M_i and their (xi, eta) derivatives at a point.
inline void serendipity_shape(int k, double xi, double eta, double* m, double* mxi, double* meta) {
  const double r = 2.0 * xi - 1.0, s = 2.0 * eta - 1.0;
  const auto nodes = serendipity_nodes(k);
  for (int i = 0; i < k; ++i) {
    const double ri = 2.0 * nodes[i].x - 1.0, si = 2.0 * nodes[i].y - 1.0;
    double v = 0, dr = 0, ds = 0;
    if (k == 4) {
      v = 0.25 * (1 + r * ri) * (1 + s * si);
      dr = 0.25 * ri * (1 + s * si);
      ds = 0.25 * (1 + r * ri) * si;
    } else if (k == 8) {
      if (i < 4) {
        const double a = 1 + r * ri, b = 1 + s * si, c = r * ri + s * si - 1;
        v = 0.25 * a * b * c;
        dr = 0.25 * (ri * b * c + a * b * ri);
        ds = 0.25 * (a * si * c + a * b * si);
      } else if (ri == 0.0) {
        v = 0.5 * (1 - r * r) * (1 + s * si);
        dr = -r * (1 + s * si);
        ds = 0.5 * (1 - r * r) * si;
      } else {
        v = 0.5 * (1 + r * ri) * (1 - s * s);
        dr = 0.5 * ri * (1 - s * s);
        ds = -(1 + r * ri) * s;
      }
    } else {
      if (i < 4) {
        const double a = 1 + r * ri, b = 1 + s * si, c = 9 * (r * r + s * s) - 10;
        v = a * b * c / 32.0;
        dr = (ri * b * c + a * b * 18 * r) / 32.0;
        ds = (a * si * c + a * b * 18 * s) / 32.0;
      } else if (std::abs(std::abs(ri) - 1.0) < 1e-12) {
        // edge xi = const, node at s = si (+-1/3)
        const double a = 1 + r * ri, b = 1 - s * s, c = 1 + 9 * s * si;
        v = 9.0 / 32.0 * a * b * c;
        dr = 9.0 / 32.0 * ri * b * c;
        ds = 9.0 / 32.0 * a * (-2 * s * c + b * 9 * si);
      } else {
        const double a = 1 + s * si, b = 1 - r * r, c = 1 + 9 * r * ri;
        v = 9.0 / 32.0 * a * b * c;
        ds = 9.0 / 32.0 * si * b * c;
        dr = 9.0 / 32.0 * a * (-2 * r * c + b * 9 * ri);
      }
    }
    m[i] = v;
    mxi[i] = 2.0 * dr;
    meta[i] = 2.0 * ds;
  }
}

struct IsoElementMap {
  int k = 4;
  std::vector<Vec2> nodes;  // physical node coordinates in serendipity order

  MapSample sample(double xi, double eta) const {
    double m[12], mx[12], me[12];
    serendipity_shape(k, xi, eta, m, mx, me);
    MapSample s{};
    for (int i = 0; i < k; ++i) {
      s.x = s.x + m[i] * nodes[i];
      s.d_xi = s.d_xi + mx[i] * nodes[i];
      s.d_eta = s.d_eta + me[i] * nodes[i];
    }
    return s;
  }
};

inline Vec2 map_iso(const IsoElementMap& el, double xi, double eta) { return el.sample(xi, eta).x; }

// ------------------------------------------------------------------- face curves

// A face parameterised on s in [0,1]: a segment, or a circular arc whose angle
// is affine in s.
struct FaceCurve {
  bool arc = false;
  Vec2 a, b;            // segment endpoints
  Vec2 center;          // arc center
  double radius = 0.0;  // arc radius
  double theta1 = 0.0, theta2 = 0.0;

  static FaceCurve line(Vec2 p, Vec2 q) {
    FaceCurve c;
    c.a = p;
    c.b = q;
    return c;
  }
  static FaceCurve circle(Vec2 center, double radius, double t1, double t2) {
    FaceCurve c;
    c.arc = true;
    c.center = center;
    c.radius = radius;
    c.theta1 = t1;
    c.theta2 = t2;
    c.a = c.eval(0.0);
    c.b = c.eval(1.0);
    return c;
  }
  // Arc through p (s=0) and q (s=1) about center, taking the short way round.
  static FaceCurve arc_through(Vec2 center, Vec2 p, Vec2 q) {
    const double t1 = std::atan2(p.y - center.y, p.x - center.x);
    double t2 = std::atan2(q.y - center.y, q.x - center.x);
    while (t2 - t1 > pi) t2 -= two_pi;
    while (t2 - t1 < -pi) t2 += two_pi;
    FaceCurve c = circle(center, norm(p - center), t1, t2);
    c.a = p;  // keep the endpoints bit-identical to the corner coordinates
    c.b = q;
    return c;
  }

  Vec2 eval(double s) const {
    if (!arc) return (1.0 - s) * a + s * b;
    const double th = theta1 + s * (theta2 - theta1);
    return {center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
  }
  Vec2 deriv(double s) const {
    if (!arc) return b - a;
    const double dth = theta2 - theta1;
    const double th = theta1 + s * dth;
    return {-radius * dth * std::sin(th), radius * dth * std::cos(th)};
  }
  double length() const { return arc ? radius * std::abs(theta2 - theta1) : norm(b - a); }
};

// ------------------------------------------------------------------- transfinite

// Faces follow the reference directions: f[0] bottom (eta=0, param xi),
// f[1] right (xi=1, param eta), f[2] top (eta=1, param xi), f[3] left (xi=0, param eta).
struct TransfiniteElementMap {
  std::array<Vec2, 4> corners;  // (0,0), (1,0), (1,1), (0,1)
  std::array<FaceCurve, 4> faces;

  void validate(double tol = 1e-10) const {
    auto near = [&](Vec2 p, Vec2 q) { return norm(p - q) <= tol * std::max(1.0, norm(p)); };
    const bool ok = near(faces[0].eval(0), corners[0]) && near(faces[0].eval(1), corners[1]) &&
                    near(faces[1].eval(0), corners[1]) && near(faces[1].eval(1), corners[2]) &&
                    near(faces[2].eval(0), corners[3]) && near(faces[2].eval(1), corners[2]) &&
                    near(faces[3].eval(0), corners[0]) && near(faces[3].eval(1), corners[3]);
    if (!ok) throw GeometryError("transfinite map: face curve endpoints do not match element corners");
  }

  MapSample sample(double xi, double eta) const {
    const auto& [x1, x2, x3, x4] = corners;
    const Vec2 f1 = faces[0].eval(xi), f2 = faces[1].eval(eta), f3 = faces[2].eval(xi), f4 = faces[3].eval(eta);
    const Vec2 d1 = faces[0].deriv(xi), d2 = faces[1].deriv(eta), d3 = faces[2].deriv(xi), d4 = faces[3].deriv(eta);
    MapSample s;
    s.x = (1 - eta) * f1 + xi * f2 + eta * f3 + (1 - xi) * f4 -
          ((1 - xi) * (1 - eta) * x1 + xi * (1 - eta) * x2 + xi * eta * x3 + (1 - xi) * eta * x4);
    s.d_xi = (1 - eta) * d1 + f2 + eta * d3 - f4 - (-(1 - eta) * x1 + (1 - eta) * x2 + eta * x3 - eta * x4);
    s.d_eta = -1.0 * f1 + xi * d2 + f3 + (1 - xi) * d4 - (-(1 - xi) * x1 - xi * x2 + xi * x3 + (1 - xi) * x4);
    return s;
  }
};

inline Vec2 map_transfinite_element(const TransfiniteElementMap& el, double xi, double eta) {
  return el.sample(xi, eta).x;
}

using ElementMap = std::variant<IsoElementMap, TransfiniteElementMap>;

inline MapSample sample_map(const ElementMap& m, double xi, double eta) {
  return std::visit([&](const auto& e) { return e.sample(xi, eta); }, m);
}

// ------------------------------------------------------------------------ motion

// Rigid rotation about a fixed center; omega = 0 is a static subdomain.
struct RigidRotation {
  Vec2 center;
  double omega = 0.0;

  double angle(double t) const { return omega * t; }
  Vec2 position(Vec2 x0, double t) const {
    const double a = angle(t);
    return center + rotate(x0 - center, std::cos(a), std::sin(a));
  }
  Vec2 velocity(Vec2 x) const { return {-omega * (x.y - center.y), omega * (x.x - center.x)}; }
};

// Algebraic vertex motion x = X + d(X, t) with analytic velocity.
struct Deformation {
  std::function<Vec2(Vec2, double)> displacement;
  std::function<Vec2(Vec2, double)> velocity;
};

// Metric terms at one point at one time.
struct MetricState {
  Vec2 x;
  double x_xi = 0, x_eta = 0, y_xi = 0, y_eta = 0;
  double x_t = 0, y_t = 0;
  double jac = 0;  // analytic |J|
};

inline MetricState metric_from(const MapSample& s, Vec2 vg) {
  MetricState m;
  m.x = s.x;
  m.x_xi = s.d_xi.x;
  m.y_xi = s.d_xi.y;
  m.x_eta = s.d_eta.x;
  m.y_eta = s.d_eta.y;
  m.x_t = vg.x;
  m.y_t = vg.y;
  m.jac = m.x_xi * m.y_eta - m.x_eta * m.y_xi;
  return m;
}

// Rigidly rotate a static sample to time t.
inline MetricState rotate_metric(const MapSample& s0, const RigidRotation& rot, double t) {
  const double a = rot.angle(t), c = std::cos(a), sn = std::sin(a);
  MapSample s;
  s.x = rot.center + rotate(s0.x - rot.center, c, sn);
  s.d_xi = rotate(s0.d_xi, c, sn);
  s.d_eta = rotate(s0.d_eta, c, sn);
  return metric_from(s, rot.velocity(s.x));
}

inline void check_jacobian(const MetricState& m, int element) {
  if (!(m.jac > 0.0))
    throw GeometryError("inverted element " + std::to_string(element) + ": |J| = " + std::to_string(m.jac) +
                        " at (" + std::to_string(m.x.x) + ", " + std::to_string(m.x.y) + ")");
}

inline MetricState metrics_at(const ElementMap& el, const RigidRotation& rot, double t, double xi, double eta,
                              int element = -1) {
  MetricState m = rotate_metric(sample_map(el, xi, eta), rot, t);
  check_jacobian(m, element);
  return m;
}

// Iso-parametric element whose nodes follow a deformation.
inline MetricState metrics_at(const IsoElementMap& el, const Deformation& def, double t, double xi, double eta,
                              int element = -1) {
  double m[12], mx[12], me[12];
  serendipity_shape(el.k, xi, eta, m, mx, me);
  MapSample s{};
  Vec2 v{};
  for (int i = 0; i < el.k; ++i) {
    const Vec2 xn = el.nodes[i] + def.displacement(el.nodes[i], t);
    s.x = s.x + m[i] * xn;
    s.d_xi = s.d_xi + mx[i] * xn;
    s.d_eta = s.d_eta + me[i] * xn;
    v = v + m[i] * def.velocity(el.nodes[i], t);
  }
  MetricState r = metric_from(s, v);
  check_jacobian(r, element);
  return r;
}

// Outward scaled normal N and unit normal n of a local face at a metric point.
// Local faces: 0 eta=0, 1 xi=1, 2 eta=1, 3 xi=0.
struct FaceNormal {
  Vec2 big;   // N, |N| is the face-length scaling
  Vec2 unit;  // n
  double mag = 0.0;
};

inline FaceNormal face_normal(const MetricState& m, int face) {
  Vec2 nn;
  switch (face) {
    case 0: nn = {m.y_xi, -m.x_xi}; break;
    case 1: nn = {m.y_eta, -m.x_eta}; break;
    case 2: nn = {-m.y_xi, m.x_xi}; break;
    default: nn = {-m.y_eta, m.x_eta}; break;
  }
  FaceNormal f;
  f.big = nn;
  f.mag = norm(nn);
  if (!(f.mag > 0.0)) throw GeometryError("degenerate face: zero-length normal");
  f.unit = (1.0 / f.mag) * nn;
  return f;
}

// Normal of a curve parameterised on s: N = (y_s, -x_s).
inline FaceNormal face_normal(const FaceCurve& c, double s) {
  const Vec2 d = c.deriv(s);
  FaceNormal f;
  f.big = {d.y, -d.x};
  f.mag = norm(f.big);
  if (!(f.mag > 0.0)) throw GeometryError("degenerate face: zero-length normal");
  f.unit = (1.0 / f.mag) * f.big;
  return f;
}

// Reference location of flux point k on local face f (points in increasing
// reference parameter).
inline std::pair<double, double> face_point(int face, double s) {
  switch (face) {
    case 0: return {s, 0.0};
    case 1: return {1.0, s};
    case 2: return {s, 1.0};
    default: return {0.0, s};
  }
}

}  // namespace sfr
