#include <gtest/gtest.h>

#include <random>

#include "sfr/basis/basis.hpp"
#include "sfr/geometry/mapping.hpp"

using namespace sfr;

namespace {

IsoElementMap quad4(Vec2 a, Vec2 b, Vec2 c, Vec2 d) { return IsoElementMap{4, {a, b, c, d}}; }

double deg(double d) { return d * pi / 180.0; }

// Element with three straight edges and one arc edge (bottom), R=2, centre (0,R).
TransfiniteElementMap arc_element() {
  const double r = 2.0, t1 = deg(-110), t2 = deg(-70);
  const Vec2 c{0.0, r};
  const Vec2 x1 = c + Vec2{r * std::cos(t1), r * std::sin(t1)};
  const Vec2 x2 = c + Vec2{r * std::cos(t2), r * std::sin(t2)};
  const Vec2 x3{-0.5 * r / std::tan(t2), 0.5 * r};
  const Vec2 x4{-0.5 * r / std::tan(t1), 0.5 * r};
  TransfiniteElementMap m;
  m.corners = {x1, x2, x3, x4};
  m.faces = {FaceCurve::circle(c, r, t1, t2), FaceCurve::line(x2, x3), FaceCurve::line(x4, x3), FaceCurve::line(x1, x4)};
  m.corners[0] = m.faces[0].eval(0);
  m.corners[1] = m.faces[0].eval(1);
  m.faces[1] = FaceCurve::line(m.corners[1], x3);
  m.faces[3] = FaceCurve::line(m.corners[0], x4);
  return m;
}

}  // namespace

TEST(IsoMap, NodalReproductionAllK) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int k : {4, 8, 12}) {
    auto ref = serendipity_nodes(k);
    IsoElementMap el{k, {}};
    for (auto p : ref) el.nodes.push_back({2.0 * p.x + 0.3 * p.y + u(rng), p.y + 0.1 * p.x * p.x + u(rng)});
    for (int i = 0; i < k; ++i) {
      Vec2 x = map_iso(el, ref[i].x, ref[i].y);
      EXPECT_NEAR(x.x, el.nodes[i].x, 1e-15);
      EXPECT_NEAR(x.y, el.nodes[i].y, 1e-15);
    }
  }
  EXPECT_THROW(serendipity_nodes(9), ConfigError);
}

TEST(IsoMap, IdentityAndCentroid) {
  for (int k : {4, 8, 12}) {
    IsoElementMap el{k, serendipity_nodes(k)};
    for (double xi : {0.0, 0.3, 1.0})
      for (double eta : {0.2, 0.9}) {
        auto s = el.sample(xi, eta);
        EXPECT_NEAR(s.x.x, xi, 1e-15);
        EXPECT_NEAR(s.x.y, eta, 1e-15);
        EXPECT_NEAR(s.d_xi.x, 1.0, 1e-14);
        EXPECT_NEAR(s.d_eta.y, 1.0, 1e-14);
        EXPECT_NEAR(s.d_xi.y, 0.0, 1e-14);
        EXPECT_NEAR(s.d_eta.x, 0.0, 1e-14);
      }
  }
  auto el = quad4({0, 0}, {2, 0}, {2, 1}, {0, 1});
  auto c = map_iso(el, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(c.x, 1.0);
  EXPECT_DOUBLE_EQ(c.y, 0.5);
}

TEST(IsoMap, ShapeDerivativesMatchCentralDifferences) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k : {4, 8, 12}) {
    double m[12], mx[12], me[12], mp[12], mm[12], t1[12], t2[12];
    for (int trial = 0; trial < 10; ++trial) {
      const double xi = u(rng), eta = u(rng), e = 1e-6;
      serendipity_shape(k, xi, eta, m, mx, me);
      serendipity_shape(k, xi + e, eta, mp, t1, t2);
      serendipity_shape(k, xi - e, eta, mm, t1, t2);
      double sum = 0.0;
      for (int i = 0; i < k; ++i) {
        EXPECT_NEAR(mx[i], (mp[i] - mm[i]) / (2 * e), 1e-8);
        sum += m[i];
      }
      EXPECT_NEAR(sum, 1.0, 1e-14);
      serendipity_shape(k, xi, eta + e, mp, t1, t2);
      serendipity_shape(k, xi, eta - e, mm, t1, t2);
      for (int i = 0; i < k; ++i) EXPECT_NEAR(me[i], (mp[i] - mm[i]) / (2 * e), 1e-8);
    }
  }
}

TEST(IsoMap, QuadraticEdgeBeatsLinearOnTenDegreeArc) {
  // edge eta=0 on a unit-radius 10 degree arc
  const double t1 = 0.0, t2 = deg(10);
  auto on = [&](double s) { const double t = t1 + s * (t2 - t1); return Vec2{std::cos(t), std::sin(t)}; };
  IsoElementMap l{4, {on(0), on(1), {1.1 * std::cos(t2), 1.1 * std::sin(t2)}, {1.1, 0}}};
  IsoElementMap q{8, {l.nodes[0], l.nodes[1], l.nodes[2], l.nodes[3], on(0.5), 0.5 * (l.nodes[1] + l.nodes[2]),
                      0.5 * (l.nodes[2] + l.nodes[3]), 0.5 * (l.nodes[3] + l.nodes[0])}};
  const double el = std::abs(norm(map_iso(l, 0.5, 0.0)) - 1.0);
  const double eq = std::abs(norm(map_iso(q, 0.5, 0.0)) - 1.0);
  EXPECT_LT(eq, 1e-14);  // midpoint is a node
  double ml = 0, mq = 0;
  for (int i = 0; i <= 100; ++i) {
    ml = std::max(ml, std::abs(norm(map_iso(l, i / 100.0, 0.0)) - 1.0));
    mq = std::max(mq, std::abs(norm(map_iso(q, i / 100.0, 0.0)) - 1.0));
  }
  EXPECT_GT(el, 1e-4);
  EXPECT_LT(mq, ml);
  EXPECT_LT(mq, 1e-4 * ml * 100);
}

TEST(Transfinite, LinearFacesEqualBilinear) {
  const Vec2 a{0.1, -0.2}, b{1.3, 0.1}, c{1.1, 1.4}, d{-0.2, 0.9};
  TransfiniteElementMap t;
  t.corners = {a, b, c, d};
  t.faces = {FaceCurve::line(a, b), FaceCurve::line(b, c), FaceCurve::line(d, c), FaceCurve::line(a, d)};
  t.validate();
  auto q = quad4(a, b, c, d);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double xi = u(rng), eta = u(rng);
    auto s1 = t.sample(xi, eta), s2 = q.sample(xi, eta);
    EXPECT_NEAR(s1.x.x, s2.x.x, 1e-13);
    EXPECT_NEAR(s1.x.y, s2.x.y, 1e-13);
    EXPECT_NEAR(s1.d_xi.x, s2.d_xi.x, 1e-13);
    EXPECT_NEAR(s1.d_eta.y, s2.d_eta.y, 1e-13);
  }
}

TEST(Transfinite, ArcEdgeOnCircleAndCornerMismatch) {
  auto m = arc_element();
  m.validate();
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) worst = std::max(worst, std::abs(norm(map_transfinite_element(m, i / 100.0, 0.0) - Vec2{0, 2}) - 2.0));
  EXPECT_LE(worst, 1e-13);
  auto bad = m;
  bad.corners[2] = bad.corners[2] + Vec2{1e-3, 0};
  EXPECT_THROW(bad.validate(), GeometryError);
}

TEST(Transfinite, DerivativesMatchCentralDifferences) {
  auto m = arc_element();
  const double e = 1e-6;
  for (double xi : {0.1, 0.5, 0.77})
    for (double eta : {0.0, 0.4, 0.95}) {
      auto s = m.sample(xi, eta);
      auto fx = (1.0 / (2 * e)) * (m.sample(xi + e, eta).x - m.sample(xi - e, eta).x);
      auto fe = (1.0 / (2 * e)) * (m.sample(xi, eta + e).x - m.sample(xi, eta - e).x);
      EXPECT_NEAR(s.d_xi.x, fx.x, 1e-8);
      EXPECT_NEAR(s.d_xi.y, fx.y, 1e-8);
      EXPECT_NEAR(s.d_eta.x, fe.x, 1e-8);
      EXPECT_NEAR(s.d_eta.y, fe.y, 1e-8);
    }
}

TEST(Transfinite, QuadraticCloserThanLinear) {
  auto t = arc_element();
  auto& c = t.corners;
  IsoElementMap l{4, {c[0], c[1], c[2], c[3]}};
  IsoElementMap q{8, {c[0], c[1], c[2], c[3], t.faces[0].eval(0.5), t.faces[1].eval(0.5), t.faces[2].eval(0.5), t.faces[3].eval(0.5)}};
  double dl = 0, dq = 0;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const double xi = i / 40.0, eta = j / 40.0;
      auto xt = t.sample(xi, eta).x;
      dl = std::max(dl, norm(map_iso(l, xi, eta) - xt));
      dq = std::max(dq, norm(map_iso(q, xi, eta) - xt));
    }
  EXPECT_LT(dq, dl);
}

TEST(Metrics, StaticUnitSquare) {
  ElementMap m = IsoElementMap{4, serendipity_nodes(4)};
  auto s = metrics_at(m, RigidRotation{}, 0.0, 0.3, 0.6);
  EXPECT_DOUBLE_EQ(s.x_xi, 1.0);
  EXPECT_DOUBLE_EQ(s.y_eta, 1.0);
  EXPECT_DOUBLE_EQ(s.x_eta, 0.0);
  EXPECT_DOUBLE_EQ(s.y_xi, 0.0);
  EXPECT_DOUBLE_EQ(s.jac, 1.0);
  EXPECT_DOUBLE_EQ(s.x_t, 0.0);
  EXPECT_DOUBLE_EQ(s.y_t, 0.0);
}

TEST(Metrics, RigidRotationJacobianConstantAndVelocityFd) {
  ElementMap m = arc_element();
  RigidRotation rot{{0.3, -0.4}, 2.5};
  const double e = 1e-6;
  for (double t : {0.0, 0.4, 1.7}) {
    for (double xi : {0.2, 0.8})
      for (double eta : {0.1, 0.6}) {
        auto a = metrics_at(m, rot, t, xi, eta);
        auto b = metrics_at(m, RigidRotation{}, 0.0, xi, eta);
        EXPECT_NEAR(a.jac, b.jac, 1e-13);
        EXPECT_NEAR(a.jac, a.x_xi * a.y_eta - a.x_eta * a.y_xi, 1e-15);
        auto p = metrics_at(m, rot, t + e, xi, eta), q = metrics_at(m, rot, t - e, xi, eta);
        EXPECT_NEAR(a.x_t, (p.x.x - q.x.x) / (2 * e), 1e-8);
        EXPECT_NEAR(a.y_t, (p.x.y - q.x.y) / (2 * e), 1e-8);
      }
  }
}

TEST(Metrics, DeformationVelocityFd) {
  IsoElementMap el{4, {{0, 0}, {1, 0}, {1.2, 1}, {0, 0.8}}};
  Deformation d{[](Vec2 x, double t) { return Vec2{0.05 * std::sin(t) * x.y, 0.1 * std::sin(2 * t) * x.x * x.x}; },
                [](Vec2 x, double t) { return Vec2{0.05 * std::cos(t) * x.y, 0.2 * std::cos(2 * t) * x.x * x.x}; }};
  const double e = 1e-6;
  auto a = metrics_at(el, d, 0.7, 0.3, 0.4);
  auto p = metrics_at(el, d, 0.7 + e, 0.3, 0.4), q = metrics_at(el, d, 0.7 - e, 0.3, 0.4);
  EXPECT_NEAR(a.x_t, (p.x.x - q.x.x) / (2 * e), 1e-8);
  EXPECT_NEAR(a.y_t, (p.x.y - q.x.y) / (2 * e), 1e-8);
}

TEST(Metrics, InvertedElementNamed) {
  ElementMap m = quad4({0, 0}, {0, 1}, {1, 1}, {1, 0});  // clockwise
  try {
    metrics_at(m, RigidRotation{}, 0.0, 0.5, 0.5, 17);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("17"), std::string::npos);
  }
}

TEST(FaceNormal, StraightAndArc) {
  ElementMap m = IsoElementMap{4, serendipity_nodes(4)};
  auto s = metrics_at(m, RigidRotation{}, 0.0, 1.0, 0.5);
  auto n = face_normal(s, 1);
  EXPECT_DOUBLE_EQ(n.big.x, 1.0);
  EXPECT_DOUBLE_EQ(n.big.y, 0.0);
  auto n3 = face_normal(metrics_at(m, RigidRotation{}, 0.0, 0.0, 0.5), 3);
  EXPECT_DOUBLE_EQ(n3.big.x, -1.0);

  auto arc = FaceCurve::circle({0.2, 0.1}, 1.5, deg(20), deg(30));
  for (double z : {0.0, 0.3, 1.0}) {
    auto fn = face_normal(arc, z);
    EXPECT_NEAR(fn.mag, 1.5 * pi / 18.0, 1e-14);
    // numeric differentiation cross-check
    const double e = 1e-6;
    auto d = (1.0 / (2 * e)) * (arc.eval(z + e) - arc.eval(z - e));
    EXPECT_NEAR(fn.mag, norm(d), 1e-8);
    // radially outward for a counterclockwise arc
    auto r = arc.eval(z) - arc.center;
    EXPECT_NEAR(dot(fn.unit, (1.0 / norm(r)) * r), 1.0, 1e-14);
  }
  EXPECT_THROW(face_normal(FaceCurve::line({1, 1}, {1, 1}), 0.5), GeometryError);
}

TEST(FaceNormal, MortarSpaceScaling) {
  // a mortar covering [o, o+s] of the face: dx/dz = s dx/dxi, so N_mortar = s N_face
  auto arc = FaceCurve::circle({0, 0}, 2.0, deg(10), deg(40));
  const double o = 0.25, s = 0.4;
  auto sub = FaceCurve::circle({0, 0}, 2.0, deg(10) + o * deg(30), deg(10) + (o + s) * deg(30));
  for (double z : {0.1, 0.5, 0.9}) {
    auto nf = face_normal(arc, o + s * z), nm = face_normal(sub, z);
    EXPECT_NEAR(nf.big.x, nm.big.x / s, 1e-13);
    EXPECT_NEAR(nf.big.y, nm.big.y / s, 1e-13);
  }
}

TEST(Gcl, FirstTwoIdentitiesOnQuadraticElement) {
  // d/dxi(y_eta) - d/deta(y_xi) = 0 and d/dxi(-x_eta) + d/deta(x_xi) = 0 with the
  // FR derivative operator on a curved K=8 element.
  IsoElementMap el{8, {{0, 0}, {1, 0.1}, {1.2, 1.1}, {-0.1, 0.9}, {0.5, -0.1}, {1.15, 0.6}, {0.5, 1.2}, {-0.1, 0.45}}};
  for (int n = 3; n <= 7; ++n) {
    const auto& b = basis_for(n);
    std::vector<MapSample> s(n * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) s[i + n * j] = el.sample(b.x[i], b.x[j]);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double gx = 0, gy = 0;
        for (int m = 0; m < n; ++m) {
          gx += b.deriv(i, m) * s[m + n * j].d_eta.y - b.deriv(j, m) * s[i + n * m].d_xi.y;
          gy += -b.deriv(i, m) * s[m + n * j].d_eta.x + b.deriv(j, m) * s[i + n * m].d_xi.x;
        }
        EXPECT_NEAR(gx, 0.0, 1e-12);
        EXPECT_NEAR(gy, 0.0, 1e-12);
      }
  }
}

TEST(Gcl, RigidRotationVelocityDivergenceFree) {
  IsoElementMap el{8, {{0, 0}, {1, 0.1}, {1.2, 1.1}, {-0.1, 0.9}, {0.5, -0.1}, {1.15, 0.6}, {0.5, 1.2}, {-0.1, 0.45}}};
  ElementMap m = el;
  RigidRotation rot{{0.4, 0.3}, 7.0};
  const int n = 5;
  const auto& b = basis_for(n);
  std::vector<MetricState> s(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) s[i + n * j] = metrics_at(m, rot, 0.3, b.x[i], b.x[j]);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double uxi = 0, ueta = 0, vxi = 0, veta = 0;
      for (int k = 0; k < n; ++k) {
        uxi += b.deriv(i, k) * s[k + n * j].x_t;
        ueta += b.deriv(j, k) * s[i + n * k].x_t;
        vxi += b.deriv(i, k) * s[k + n * j].y_t;
        veta += b.deriv(j, k) * s[i + n * k].y_t;
      }
      const auto& p = s[i + n * j];
      const double div = ((p.y_eta * uxi - p.y_xi * ueta) + (-p.x_eta * vxi + p.x_xi * veta)) / p.jac;
      EXPECT_NEAR(div, 0.0, 1e-12);
    }
}
