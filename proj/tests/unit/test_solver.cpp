#include <gtest/gtest.h>

#include <cmath>

#include "sfr/mesh/generators.hpp"
#include "sfr/solver/solver.hpp"
#include "sfr/time/ssp_rk.hpp"

using namespace sfr;

namespace {

FluidModel air(double re = 0.0) { return FluidModel::from_groups(0.3, re); }

State freestream(const FluidModel& f) { return to_conservative({1.0, 1.0, 0.4, 1.0 / (f.gamma * 0.09)}, f); }

SolverOptions options(int p, const FluidModel& f, const std::vector<std::string>& tags, const StateFunction& data,
                      BcKind kind = BcKind::characteristic_farfield) {
  SolverOptions o;
  o.p = p;
  o.fluid = f;
  for (const auto& t : tags) o.boundary[t] = BoundaryCondition{kind, data, 1.0};
  return o;
}

const std::vector<std::string> box_tags = {"bottom", "right", "top", "left"};

// max |r_Q - Q r_J| over the mesh: vanishes when a uniform state is preserved.
double freestream_defect(Solver& s, const std::vector<double>& u, double t) {
  std::vector<double> r;
  s.residual(t, u, r);
  double worst = 0.0;
  for (size_t p = 0; p < r.size() / state_stride; ++p) {
    const State q = Solver::physical(u, p);
    for (int k = 0; k < nvar; ++k) worst = std::max(worst, std::abs(r[p * state_stride + k] - q[k] * r[p * state_stride + nvar]));
  }
  return worst;
}

double max_abs(const std::vector<double>& v, int comp) {
  double m = 0.0;
  for (size_t p = comp; p < v.size(); p += state_stride) m = std::max(m, std::abs(v[p]));
  return m;
}

}  // namespace

TEST(Solver, UniformFlowOnStaticGrid) {
  const FluidModel f = air();
  const State q = freestream(f);
  StateFunction uni = [&](double, Vec2) { return q; };
  for (int p : {0, 1, 3, 5}) {
    Solver s(build_mesh({cartesian_mesh(3, 2, 2.0, 1.0)}), options(p, f, box_tags, uni));
    const auto u = s.initial_state(uni, 0.0);
    std::vector<double> r;
    s.residual(0.0, u, r);
    for (int k = 0; k < state_stride; ++k) EXPECT_LE(max_abs(r, k), 1e-13) << "p=" << p << " comp " << k;
  }
}

TEST(Solver, FiniteVolumeLimitMatchesHandComputedFluxes) {
  // P = 0 on two unit cells: the residual is minus the sum of outward Rusanov fluxes.
  const FluidModel f = air();
  const State a = to_conservative({1.0, 0.3, 0.1, 8.0}, f), b = to_conservative({0.8, 0.2, -0.1, 7.0}, f);
  StateFunction init = [&](double, Vec2 x) { return x.x < 1.0 ? a : b; };
  const State g = freestream(f);
  StateFunction ghost = [&](double, Vec2) { return g; };
  Solver s(build_mesh({cartesian_mesh(2, 1, 2.0, 1.0)}), options(0, f, box_tags, ghost, BcKind::dirichlet));
  const auto u = s.initial_state(init, 0.0);
  std::vector<double> r;
  s.residual(0.0, u, r);
  const Vec2 ex{1, 0}, ey{0, 1}, wx{-1, 0}, wy{0, -1};
  auto hflux = [&](const State& l, const State& rr, Vec2 n) { return rusanov(l, rr, n, 0.0, f); };
  for (int cell = 0; cell < 2; ++cell) {
    const State& qi = cell == 0 ? a : b;
    const State& qn = cell == 0 ? b : a;
    State expect{};
    const State fe = cell == 0 ? hflux(qi, qn, ex) : hflux(qi, g, ex);
    const State fw = cell == 0 ? hflux(qi, g, wx) : hflux(qi, qn, wx);
    const State fn = hflux(qi, g, ey), fs = hflux(qi, g, wy);
    for (int k = 0; k < nvar; ++k) expect[k] = -(fe[k] + fw[k] + fn[k] + fs[k]);
    // cells are ordered along x by the generator
    const double cx = s.sp_metric(cell, 0).x.x;
    const int c = cx < 1.0 ? 0 : 1;
    ASSERT_EQ(c, cell);
    for (int k = 0; k < nvar; ++k) EXPECT_NEAR(r[cell * state_stride + k], expect[k], 1e-13) << cell << " " << k;
  }
}

TEST(Solver, FreestreamOnRigidlyRotatingBilinearGrid) {
  const FluidModel f = air();
  const State q = freestream(f);
  StateFunction uni = [&](double, Vec2) { return q; };
  AssembledMesh m = build_mesh({cartesian_mesh(3, 3, 1.0, 1.0)});
  m.rotation[0] = {{0.4, 0.6}, 3.0};
  for (int p : {1, 4}) {
    Solver s(m, options(p, f, box_tags, uni));
    const auto u = s.initial_state(uni, 0.0);
    EXPECT_LE(freestream_defect(s, u, 0.37), 1e-12) << p;
    std::vector<double> r;
    s.residual(0.37, u, r);
    // rigid rotation keeps the Jacobian constant
    EXPECT_LE(max_abs(r, nvar), 1e-12) << p;
  }
}

TEST(Solver, FreestreamOnDeformingGridStaysExact) {
  const FluidModel f = air();
  const State q = freestream(f);
  StateFunction uni = [&](double, Vec2) { return q; };
  SolverOptions o = options(3, f, box_tags, uni);
  o.deformation = Deformation{[](Vec2 x, double t) { return Vec2{0.0, 0.1 * std::sin(t) * std::sin(0.3 * x.x)}; },
                              [](Vec2 x, double t) { return Vec2{0.0, 0.1 * std::cos(t) * std::sin(0.3 * x.x)}; }};
  Solver s(build_mesh({conforming_box_mesh()}), o);
  auto u = s.initial_state(uni, 0.0);
  EXPECT_LE(freestream_defect(s, u, 0.8), 1e-11);
  RungeKutta rk(make_scheme("ssp(10,4)"));
  Residual res = [&](double t, const std::vector<double>& y, std::vector<double>& out) { s.residual(t, y, out); };
  const double dt = 0.02;
  for (int n = 0; n < 20; ++n) rk.advance(u, n * dt, dt, res, n);
  double worst = 0.0;
  for (size_t p = 0; p < u.size() / state_stride; ++p) {
    const State qq = Solver::physical(u, p);
    worst = std::max(worst, std::abs(pressure(qq, f) - pressure(q, f)) / pressure(q, f));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Solver, SlidingFreestreamErrorShrinksWithDegree) {
  const FluidModel f = air();
  const State q = freestream(f);
  StateFunction uni = [&](double, Vec2) { return q; };
  double prev = 1.0;
  for (int p : {2, 4, 6}) {
    Solver s(build_mesh(vortex_box_meshes({.scale = 1.0, .omega = 0.5})), options(p, f, box_tags, uni));
    const auto u = s.initial_state(uni, 0.0);
    const double d = freestream_defect(s, u, 0.3);
    EXPECT_LT(d, 0.2 * prev) << p;
    prev = d;
  }
}

TEST(Solver, GlobalConservationAcrossSlidingInterface) {
  const FluidModel f = air(100.0);
  StateFunction vortexish = [&](double, Vec2 x) {
    const double r2 = (x.x - 5) * (x.x - 5) + (x.y - 5) * (x.y - 5);
    const double e = std::exp(-0.5 * r2);
    return to_conservative({1.0 - 0.05 * e, 1.0 - 0.3 * (x.y - 5) * e, 0.3 * (x.x - 5) * e, 7.9 - 0.2 * e}, f);
  };
  Solver s(build_mesh(vortex_box_meshes({.scale = 1.0, .omega = 2.0})), options(3, f, box_tags, vortexish));
  const auto u = s.initial_state(vortexish, 0.0);
  const State e = s.conservation_error(0.41, u);
  for (int k = 0; k < nvar; ++k) EXPECT_LE(std::abs(e[k]), 1e-12) << k;
  EXPECT_LE(s.interface_defect(), 1e-12);
  EXPECT_LE(s.corrected_trace_defect(), 1e-12);
}

TEST(Solver, LinearFieldGradientIsExact) {
  const FluidModel f = air(50.0);
  StateFunction lin = [&](double, Vec2 x) { return State{1.0 + 0.1 * x.x, 0.2 + 0.3 * x.y, -0.1 * x.x, 9.0 + x.x - x.y}; };
  AssembledMesh m = build_mesh({cartesian_mesh(2, 3, 1.0, 1.5)});
  m.rotation[0] = {{0.2, 0.1}, 1.5};
  // boundary data: the initial field carried along by the rotation
  StateFunction carried = [&](double t, Vec2 x) {
    const Vec2 x0 = Vec2{0.2, 0.1} + rotate(x - Vec2{0.2, 0.1}, std::cos(1.5 * t), -std::sin(1.5 * t));
    return lin(0.0, x0);
  };
  Solver s(m, options(2, f, box_tags, carried, BcKind::dirichlet));
  const auto u = s.initial_state(lin, 0.0);
  std::vector<double> r;
  const double t = 0.5;
  s.residual(t, u, r);
  // the state was laid down at t = 0 and is carried by the rotation: grad Q = R grad Q0
  const double c = std::cos(1.5 * t), sn = std::sin(1.5 * t);
  const State g0x{0.1, 0.0, -0.1, 1.0}, g0y{0.0, 0.3, 0.0, -1.0};
  for (int e = 0; e < s.elements(); ++e)
    for (int p = 0; p < s.points_per_element(); ++p) {
      const StateGradient& g = s.sp_gradient(e, p);
      for (int k = 0; k < nvar; ++k) {
        EXPECT_NEAR(g.gx[k], c * g0x[k] - sn * g0y[k], 1e-12);
        EXPECT_NEAR(g.gy[k], sn * g0x[k] + c * g0y[k], 1e-12);
      }
    }
}

TEST(Solver, WorkerCountDoesNotChangeTheResidual) {
  const FluidModel f = air(200.0);
  StateFunction init = [&](double, Vec2 x) {
    return to_conservative({1.0 + 0.1 * std::sin(x.x), 0.5, 0.1 * std::cos(x.y), 7.9}, f);
  };
  Solver s(build_mesh(vortex_box_meshes({.scale = 1.0, .omega = 1.0})), options(3, f, box_tags, init));
  const auto u = s.initial_state(init, 0.0);
  std::vector<double> r1, r4;
  s.residual(0.2, u, r1);
  s.set_threads(4);
  s.residual(0.2, u, r4);
  for (size_t i = 0; i < r1.size(); ++i) ASSERT_EQ(r1[i], r4[i]) << i;
}

TEST(Solver, WallForceOfLinearShear) {
  // u = U y / H: the fluid drags the top wall backwards with mu U / H per unit length
  const double re = 20.0, h = 1.0, uw = 1.0, len = 2.0;
  const FluidModel f = air(re);
  StateFunction shear = [&](double, Vec2 x) { return to_conservative({1.0, uw * x.y / h, 0.0, 1.0 / (f.gamma * 0.09)}, f); };
  Solver s(build_mesh({cartesian_mesh(2, 2, len, h)}), options(2, f, box_tags, shear, BcKind::dirichlet));
  const auto u = s.initial_state(shear, 0.0);
  const ForceResult fr = s.forces(0.0, u, {"top"});
  EXPECT_NEAR(fr.viscous.x, -f.mu * uw / h * len, 1e-12);
  EXPECT_NEAR(fr.viscous.y, 0.0, 1e-12);
  EXPECT_NEAR(fr.pressure.y, pressure(shear(0, {0, 0}), f) * len, 1e-11);
  EXPECT_THROW(s.forces(0.0, u, {"nothing"}), ConfigError);
}

TEST(Solver, MissingBoundaryConditionIsAConfigError) {
  SolverOptions o;
  o.fluid = air();
  EXPECT_THROW(Solver(build_mesh({cartesian_mesh(1, 1)}), o), ConfigError);
}

TEST(Solver, InadmissibleStateNamesTheElement) {
  const FluidModel f = air();
  const State q = freestream(f);
  StateFunction uni = [&](double, Vec2) { return q; };
  Solver s(build_mesh({cartesian_mesh(2, 2)}), options(1, f, box_tags, uni));
  auto u = s.initial_state(uni, 0.0);
  u[3 * 4 * state_stride + 0] = -1.0;  // element 3, point 0 density
  std::vector<double> r;
  try {
    s.residual(0.0, u, r);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("element 3"), std::string::npos) << e.what();
  }
}
