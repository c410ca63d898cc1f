#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "sfr/mortar/mortar.hpp"

using namespace sfr;

namespace {

InterfaceSideState uniform_side(int n, double start, int first_vertex) {
  InterfaceSideState s;
  for (int i = 0; i < n; ++i) {
    s.vertex.push_back(first_vertex + i);
    s.angle.push_back(wrap_angle(start + two_pi * i / n));
  }
  return s;
}

InterfaceSideState side_from_degrees(const std::vector<double>& deg, int first_vertex) {
  InterfaceSideState s;
  for (size_t i = 0; i < deg.size(); ++i) {
    s.vertex.push_back(first_vertex + static_cast<int>(i));
    s.angle.push_back(wrap_angle(deg[i] * pi / 180.0));
  }
  return s;
}

void expect_invariants(const MortarConnectivity& c) {
  ASSERT_EQ(c.nm, c.nf);
  EXPECT_EQ(c.vom[c.nm - 1][1], c.vom[0][0]);
  std::vector<int> refs(c.nf, 0);
  for (int k = 0; k < c.nm; ++k) {
    ASSERT_GE(c.fom[k][0], 0);
    ASSERT_LT(c.fom[k][0], c.nfl);
    ASSERT_GE(c.fom[k][1], c.nfl);
    ASSERT_LT(c.fom[k][1], c.nf);
    ++refs[c.fom[k][0]];
    ++refs[c.fom[k][1]];
    EXPECT_GE(c.mortar_theta2[k], c.mortar_theta1[k]);
    if (k > 0) EXPECT_EQ(c.mortar_theta1[k], c.mortar_theta2[k - 1]);
  }
  double total = 0.0;
  for (int k = 0; k < c.nm; ++k) total += c.mortar_span(k);
  EXPECT_NEAR(total, two_pi, 1e-12);
  for (int f = 0; f < c.nf; ++f) {
    EXPECT_EQ(refs[f], c.mof[f][1]) << "face " << f;
    EXPECT_GT(c.face_theta2[f], c.face_theta1[f]);
    double sum = 0.0;
    for (int j = 0; j < c.mof[f][1]; ++j) {
      const int k = (c.mof[f][0] + j) % c.nm;
      const auto [s, o] = scaling_offset(c, f, k);
      EXPECT_GE(o, -1e-12);
      EXPECT_LE(o + s, 1.0 + 1e-12);
      sum += s;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12) << "face " << f;
  }
}

// Adaptive Simpson quadrature, used as an independent oracle.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 0) {
  const double m = 0.5 * (a + b), fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double left = (m - a) / 6.0 * (fa + 4 * f(lm) + fm), right = (b - m) / 6.0 * (fm + 4 * f(rm) + fb);
  if (depth > 40 || std::fabs(left + right - whole) < 15 * tol) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, tol / 2, depth + 1) + adaptive_simpson(f, m, b, tol / 2, depth + 1);
}

}  // namespace

TEST(MortarConnectivity, AlignedFourFourGivesDegenerateMortars) {
  const auto c = update_connectivity(uniform_side(4, 0.0, 0), uniform_side(4, 0.0, 10));
  expect_invariants(c);
  EXPECT_EQ(c.nm, 8);
  int zero = 0, one = 0;
  for (int k = 0; k < c.nm; ++k) {
    const double s = c.s_left[k];
    EXPECT_EQ(s, c.s_right[k]);
    if (std::fabs(s) < 1e-12) ++zero;
    if (std::fabs(s - 1.0) < 1e-12) ++one;
  }
  EXPECT_EQ(zero, 4);
  EXPECT_EQ(one, 4);
}

TEST(MortarConnectivity, HalfFaceOffsetSplitsEveryFace) {
  const auto c = update_connectivity(uniform_side(4, pi / 4, 0), uniform_side(4, 0.0, 10));
  expect_invariants(c);
  for (int k = 0; k < c.nm; ++k) {
    EXPECT_NEAR(c.s_left[k], 0.5, 1e-12);
    EXPECT_NEAR(c.s_right[k], 0.5, 1e-12);
  }
}

TEST(MortarConnectivity, TwoToOneTiling) {
  const auto c = update_connectivity(uniform_side(4, 0.0, 0), uniform_side(8, 0.0, 10));
  expect_invariants(c);
  EXPECT_EQ(c.nm, 12);
  for (int f = 0; f < 4; ++f) {
    int nonzero = 0;
    for (int j = 0; j < c.mof[f][1]; ++j) {
      const int k = (c.mof[f][0] + j) % c.nm;
      if (c.s_left[k] > 1e-12) {
        ++nonzero;
        EXPECT_NEAR(c.s_left[k], 0.5, 1e-12);
      }
    }
    EXPECT_EQ(nonzero, 2);
  }
}

TEST(MortarConnectivity, AngleRatiosAndOffsets) {
  // left face 0 spans 0..12 degrees; a right vertex at 5 degrees splits it 5:7
  const auto left = side_from_degrees({0, 12, 100, 200}, 0);
  const auto right = side_from_degrees({-30, 5, 90, 180, 270}, 10);
  const auto c = update_connectivity(left, right);
  expect_invariants(c);
  ASSERT_EQ(c.mof[0][0], 0);
  ASSERT_EQ(c.mof[0][1], 2);
  auto [s0, o0] = scaling_offset(c, 0, 0);
  auto [s1, o1] = scaling_offset(c, 0, 1);
  EXPECT_NEAR(s0, 5.0 / 12.0, 1e-13);
  EXPECT_NEAR(o0, 0.0, 1e-15);
  EXPECT_NEAR(s1, 7.0 / 12.0, 1e-13);
  EXPECT_NEAR(o1, 5.0 / 12.0, 1e-13);
  // mortar 0 belongs to left face 0, not left face 2
  EXPECT_THROW(scaling_offset(c, 2, 0), TopologyError);
}

TEST(MortarConnectivity, RandomRotationsKeepInvariants) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (auto [nl, nr] : {std::pair{4, 8}, std::pair{5, 7}, std::pair{8, 12}, std::pair{1, 3}}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto c = update_connectivity(uniform_side(nl, u(rng), 0), uniform_side(nr, 0.3, 100));
      expect_invariants(c);
    }
  }
}

TEST(MortarConnectivity, SeamAndTimeReversal) {
  // connectivity is rebuilt from the current angles only: rotating to +phi
  // and back to -phi gives the same arrays as building at -phi directly
  const double phi = 0.37;
  const auto a = update_connectivity(uniform_side(5, -phi, 0), uniform_side(7, 0.0, 10));
  const auto fwd = update_connectivity(uniform_side(5, phi, 0), uniform_side(7, 0.0, 10));
  expect_invariants(fwd);
  const auto back = update_connectivity(uniform_side(5, wrap_angle(phi - 2 * phi), 0), uniform_side(7, 0.0, 10));
  ASSERT_EQ(a.nm, back.nm);
  for (int k = 0; k < a.nm; ++k) {
    EXPECT_EQ(a.fom[k], back.fom[k]);
    EXPECT_NEAR(a.s_left[k], back.s_left[k], 1e-14);
    EXPECT_NEAR(a.s_right[k], back.s_right[k], 1e-14);
  }
}

TEST(MortarConnectivity, MisalignmentIsReported) {
  auto left = uniform_side(4, 0.0, 0);
  left.angle[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(update_connectivity(left, uniform_side(4, 0.0, 10)), GeometryError);
  EXPECT_THROW(update_connectivity(InterfaceSideState{}, uniform_side(4, 0.0, 10)), TopologyError);
}

TEST(MortarProjection, ConstantsIdentityAndPolynomialExactness) {
  for (int n = 1; n <= 10; ++n) {
    const BasisSet& b = basis_for(n);
    const auto id = make_projector(b, 1.0, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) EXPECT_NEAR(id.forward(i, j), i == j ? 1.0 : 0.0, 1e-14);
    const auto p = make_projector(b, 0.5, 0.5);
    std::vector<double> face(n), mortar(n), ones(n, 3.0), out(n);
    project_to_mortar(p.forward, ones.data(), out.data(), 1);
    for (double v : out) EXPECT_NEAR(v, 3.0, 1e-13);
    // polynomial of degree n-1
    auto f = [&](double x) { return std::pow(x, n - 1) - (n > 1 ? 0.3 * x : 0.0) + 1.0; };
    for (int i = 0; i < n; ++i) face[i] = f(b.x[i]);
    project_to_mortar(p.forward, face.data(), mortar.data(), 1);
    for (int j = 0; j < n; ++j) EXPECT_NEAR(mortar[j], f(0.5 + 0.5 * b.x[j]), 1e-12);
    // degenerate mortar: point values at o
    const auto z = make_projector(b, 0.0, 0.25);
    project_to_mortar(z.forward, face.data(), mortar.data(), 1);
    for (int j = 0; j < n; ++j) EXPECT_NEAR(mortar[j], f(0.25), 1e-12);
  }
}

TEST(MortarProjection, OutflowIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, two_pi);
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n)
    for (auto [nl, nr] : {std::pair{4, 8}, std::pair{5, 7}})
      for (int trial = 0; trial < 50; ++trial) {
        const auto c = update_connectivity(uniform_side(nl, u(rng), 0), uniform_side(nr, 0.0, 100));
        worst = std::max(worst, outflow_residual(c, build_projection_cache(basis_for(n), c)));
      }
  EXPECT_LE(worst, 1e-12);
}

TEST(MortarProjection, PiecewiseBackProjectionMatchesQuadrature) {
  for (int n : {3, 6, 9}) {
    const BasisSet& b = basis_for(n);
    const auto p0 = make_projector(b, 0.5, 0.0), p1 = make_projector(b, 0.5, 0.5);
    std::vector<double> m0(n, 1.0), m1(n, 2.0), face(n, 0.0);
    project_back_add(p0.back, m0.data(), face.data(), 1, 0.5);
    project_back_add(p1.back, m1.data(), face.data(), 1, 0.5);
    for (int j = 0; j < n; ++j) {
      auto hj = [&](double x) { return lagrange_eval(b, j, x); };
      const double piece = adaptive_simpson(hj, 0.0, 0.5, 1e-14) + 2.0 * adaptive_simpson(hj, 0.5, 1.0, 1e-14);
      double poly = 0.0;
      for (int i = 0; i < n; ++i) poly += b.w[i] * face[i] * hj(b.x[i]);
      EXPECT_NEAR(poly, piece, 1e-12) << "n=" << n << " j=" << j;
    }
  }
}

TEST(MortarExchange, CommonSolutionAndConservation) {
  const int n = 5, nc = 2;
  const BasisSet& b = basis_for(n);
  const auto c = update_connectivity(uniform_side(5, 0.4, 0), uniform_side(7, 0.0, 100));
  const auto pc = build_projection_cache(b, c);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FaceField faces(c.nf, std::vector<double>(n * nc));
  for (auto& f : faces)
    for (double& v : f) v = u(rng);

  // mean of two equal sides is that side
  FaceField same(c.nf, std::vector<double>(n * nc, 0.75)), common;
  exchange_common_solution(c, pc, same, nc, common);
  for (const auto& f : common)
    for (double v : f) EXPECT_NEAR(v, 0.75, 1e-13);

  // breve fluxes on mortars, back to faces, conservation per face
  FaceField ml, mr, breve(c.nm), face_flux;
  faces_to_mortars(c, pc, faces, true, nc, ml);
  faces_to_mortars(c, pc, faces, false, nc, mr);
  for (int k = 0; k < c.nm; ++k) {
    breve[k].resize(n * nc);
    const double len = c.mortar_span(k) * 1.5;
    for (int i = 0; i < n * nc; ++i) breve[k][i] = len * 0.5 * (ml[k][i] + mr[k][i]);
  }
  FaceField left, right;
  mortars_to_faces(c, pc, breve, true, nc, false, left);
  mortars_to_faces(c, pc, breve, false, nc, false, right);
  face_flux.resize(c.nf);
  for (int f = 0; f < c.nf; ++f) face_flux[f] = f < c.nfl ? left[f] : right[f];
  EXPECT_LE(check_interface_conservation(b, c, face_flux, breve, nc), 1e-12);

  // perturbation of one back-projected node is detected at w_i * 1e-6
  face_flux[2][3 * nc] += 1e-6;
  EXPECT_NEAR(check_interface_conservation(b, c, face_flux, breve, nc), b.w[3] * 1e-6, 1e-12);

  FaceField zeros(c.nf, std::vector<double>(n * nc, 0.0)), zm(c.nm, std::vector<double>(n * nc, 0.0));
  EXPECT_EQ(check_interface_conservation(b, c, zeros, zm, nc), 0.0);
}

TEST(MortarExchange, ViscousMethodsAgreeForLinearFlux) {
  // constant state and normal: the viscous flux is linear in the gradient, so
  // projecting gradients (method 1) and projecting fluxes (method 2) coincide
  const int n = 6;
  const BasisSet& b = basis_for(n);
  const auto c = update_connectivity(uniform_side(4, 0.9, 0), uniform_side(8, 0.0, 100));
  const auto pc = build_projection_cache(b, c);
  const FluidModel fm = FluidModel::from_groups(0.3, 50.0);
  const State q = to_conservative({1.0, 0.2, 0.1, fm.gas_constant}, fm);
  const Vec2 nrm{0.0, 1.0};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int ng = 2 * nvar;
  FaceField grad(c.nf, std::vector<double>(n * ng));
  for (int f = 0; f < c.nf; ++f) {
    double coef[ng][3];
    for (auto& row : coef)
      for (double& v : row) v = u(rng);
    for (int i = 0; i < n; ++i)
      for (int g = 0; g < ng; ++g) grad[f][i * ng + g] = coef[g][0] + coef[g][1] * b.x[i] + coef[g][2] * b.x[i] * b.x[i];
  }
  auto flux_of = [&](const double* g) {
    StateGradient sg;
    for (int k = 0; k < nvar; ++k) {
      sg.gx[k] = g[k];
      sg.gy[k] = g[nvar + k];
    }
    return viscous_normal_flux(q, sg, fm, nrm);
  };
  // method 1
  FaceField gcom;
  viscous_exchange_gradient(c, pc, grad, ng, gcom);
  // method 2, face fluxes carry the face length
  FaceField fl(c.nf, std::vector<double>(n * nvar)), fcom;
  for (int f = 0; f < c.nf; ++f)
    for (int i = 0; i < n; ++i) {
      const State v = flux_of(&grad[f][i * ng]);
      for (int k = 0; k < nvar; ++k) fl[f][i * nvar + k] = c.face_span(f) * v[k];
    }
  viscous_exchange_flux(c, pc, fl, nvar, fcom);
  for (int f = 0; f < c.nf; ++f)
    for (int i = 0; i < n; ++i) {
      const State m1 = flux_of(&gcom[f][i * ng]);
      for (int k = 0; k < nvar; ++k) EXPECT_NEAR(c.face_span(f) * m1[k], fcom[f][i * nvar + k], 1e-11);
    }

  // zero gradients give zero flux
  FaceField zg(c.nf, std::vector<double>(n * ng, 0.0));
  viscous_exchange_gradient(c, pc, zg, ng, gcom);
  for (int f = 0; f < c.nf; ++f)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < nvar; ++k) EXPECT_EQ(flux_of(&gcom[f][i * ng])[k], 0.0);

  EXPECT_EQ(parse_viscous_exchange("method2"), ViscousExchange::flux_projection);
  EXPECT_THROW(parse_viscous_exchange("method3"), ConfigError);
}

TEST(MortarExchange, CommonFluxAdmissibility) {
  const FluidModel f = FluidModel::from_groups(0.3, 0.0);
  const State good = to_conservative({1.0, 0.1, 0.0, 8.0}, f), bad{-1.0, 0.0, 0.0, 1.0};
  const State h = mortar_common_inviscid_flux(good, good, {1, 0}, 0.0, f, 3);
  const State fn = normal_flux(good, f, {1, 0});
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(h[k], fn[k], 1e-14);
  try {
    mortar_common_inviscid_flux(good, bad, {1, 0}, 0.0, f, 42);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("mortar 42"), std::string::npos);
  }
  double out[3];
  const double l[3] = {0, 1, 2}, r[3] = {2, 3, 4};
  mortar_common_solution(l, r, out, 3);
  EXPECT_EQ(out[0], 1.0);
  EXPECT_EQ(out[2], 3.0);
}
