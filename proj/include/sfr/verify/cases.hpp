#pragma once

// Ready-made verification and demonstration cases, and the study drivers
// built on them.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sfr/app/simulation.hpp"
#include "sfr/mesh/generators.hpp"
#include "sfr/verify/exact.hpp"

namespace sfr {

struct CaseOptions {
  int p = 3;
  double omega = 0.0;          // angular speed of the rotating subdomain
  std::string scheme;          // empty: case default
  double dt = 0.0;             // 0: from cfl
  double cfl = 0.0;            // 0: case default
  double t_end = -1.0;         // < 0: case default
  int threads = 1;
  ViscousExchange viscous_exchange = ViscousExchange::flux_projection;
  // fluid overrides; unset keeps the case value
  std::optional<double> mach, reynolds, prandtl, gamma;
};

struct CaseSetup {
  std::string name;
  std::vector<SubdomainMesh> subdomains;
  AssembledMesh mesh;  // built from subdomains
  SolverOptions solver;
  StateFunction initial;
  std::optional<ExactSolution> exact;
  std::string scheme = "ssp(10,4)";
  double dt = 0.0, t_end = 1.0, cfl = 1.0;
  std::set<std::string> wall_tags;  // surfaces integrated for forces
  double force_scale = 1.0;         // 1 / (rho U^2 D / 2)
  State reference{};                // free-stream state where one exists
};

inline const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names = {"euler_vortex", "taylor_couette",       "flat_couette",
                                                 "free_stream",  "free_stream_deforming", "rotating_cylinder"};
  return names;
}

// Vertical displacement 0.1 sin t of the mesh center, blended to zero at the box edge.
inline Deformation center_heave(Vec2 c, double r_in, double r_out, double amplitude = 0.1) {
  auto blend = [=](Vec2 x) {
    const double r = norm(x - c);
    if (r <= r_in) return 1.0;
    if (r >= r_out) return 0.0;
    return 0.5 * (1.0 + std::cos(pi * (r - r_in) / (r_out - r_in)));
  };
  return Deformation{[=](Vec2 x, double t) { return Vec2{0.0, amplitude * std::sin(t) * blend(x)}; },
                     [=](Vec2 x, double t) { return Vec2{0.0, amplitude * std::cos(t) * blend(x)}; }};
}

namespace detail {

// Case fluid with the requested overrides applied.
inline FluidModel override_fluid(const FluidModel& f, const CaseOptions& o) {
  if (!o.mach && !o.reynolds && !o.prandtl && !o.gamma) return f;
  const double mach = o.mach.value_or(1.0 / std::sqrt(f.gamma * f.gas_constant));
  const double re = o.reynolds.value_or(f.mu > 0.0 ? 1.0 / f.mu : 0.0);
  return FluidModel::from_groups(mach, re, o.prandtl.value_or(f.prandtl), o.gamma.value_or(f.gamma));
}

inline ExactSolution with_fluid(ExactSolution ex, const CaseOptions& o) {
  ex.set_fluid(override_fluid(ex.fluid(), o));
  return ex;
}

inline void dirichlet_everywhere(CaseSetup& c, const std::vector<std::string>& tags, const StateFunction& f) {
  for (const auto& t : tags) c.solver.boundary[t] = BoundaryCondition{BcKind::dirichlet, f, 1.0};
}

inline const std::vector<std::string> box_tags = {"bottom", "right", "top", "left"};

}  // namespace detail

inline CaseSetup make_case(const std::string& name, const CaseOptions& o = {}) {
  if (o.p < 1) throw ConfigError("polynomial degree must be >= 1");
  CaseSetup c;
  c.name = name;
  c.solver.p = o.p;
  c.solver.threads = o.threads;
  c.solver.viscous_exchange = o.viscous_exchange;
  if (name == "euler_vortex") {
    const ExactSolution ex = detail::with_fluid(ExactSolution::vortex(), o);
    c.exact = ex;
    c.subdomains = vortex_box_meshes({.scale = 1.0, .omega = o.omega});
    c.solver.fluid = ex.fluid();
    detail::dirichlet_everywhere(c, detail::box_tags, ex.function());
    c.initial = ex.function();
    c.scheme = "ssp(5,4)";
    c.t_end = 2.0;
    c.cfl = 1.0;
  } else if (name == "taylor_couette") {
    const ExactSolution ex = detail::with_fluid(ExactSolution::taylor_couette(), o);
    c.exact = ex;
    c.subdomains = annulus_meshes({.omega = o.omega});
    c.solver.fluid = ex.fluid();
    c.solver.boundary["inner_wall"] = BoundaryCondition{BcKind::dirichlet, ex.function(), 1.0};
    c.solver.boundary["outer_wall"] =
        BoundaryCondition{BcKind::noslip_isothermal, {}, ex.taylor_couette_params().wall_temperature};
    c.initial = ex.function();
    c.scheme = "ssp(5,4)";
    c.t_end = 10.0;
    c.cfl = 1.0;
  } else if (name == "flat_couette") {
    const ExactSolution ex = detail::with_fluid(ExactSolution::flat_couette(), o);
    c.exact = ex;
    c.subdomains = vortex_box_meshes({.scale = 0.1, .omega = o.omega});
    c.solver.fluid = ex.fluid();
    detail::dirichlet_everywhere(c, detail::box_tags, ex.function());
    c.initial = ex.function();
    c.scheme = "ssp(5,4)";
    c.t_end = 2.0;
    c.cfl = 1.0;
  } else if (name == "free_stream" || name == "free_stream_deforming") {
    const ExactSolution ex = detail::with_fluid(ExactSolution::free_stream(), o);
    c.exact = ex;
    if (name == "free_stream") {
      c.subdomains = vortex_box_meshes({.scale = 0.1, .omega = o.omega});
    } else {
      if (o.omega != 0.0) throw ConfigError("free_stream_deforming has no rotating subdomain");
      c.subdomains = {conforming_box_mesh(0.1)};
      c.solver.deformation = center_heave({0.5, 0.5}, 0.2, 0.5);
    }
    c.solver.fluid = ex.fluid();
    detail::dirichlet_everywhere(c, detail::box_tags, ex.function());
    c.initial = ex.function();
    c.reference = ex(0.0, {0.0, 0.0});
    c.scheme = "ssp(10,4)";
    c.dt = 1e-3;
    c.t_end = 5.0;
  } else if (name == "rotating_cylinder") {
    // Ma 0.1, Re_D 100, counterclockwise rotation omega D / U = pi / 2
    const FluidModel f = detail::override_fluid(FluidModel::from_groups(0.1, 100.0), o);
    c.subdomains = cylinder_meshes({.omega = o.omega != 0.0 ? o.omega : pi / 2});
    c.solver.fluid = f;
    const State inf = to_conservative({1.0, 1.0, 0.0, f.gas_constant}, f);
    c.reference = inf;
    StateFunction far = [inf](double, Vec2) { return inf; };
    c.solver.boundary["farfield"] = BoundaryCondition{BcKind::characteristic_farfield, far, 1.0};
    c.solver.boundary["wall"] = BoundaryCondition{BcKind::noslip_adiabatic, {}, 1.0};
    c.initial = far;
    c.scheme = "ssp(10,4)";
    c.t_end = 4.0;
    c.cfl = 2.0;
    c.wall_tags = {"wall"};
    c.force_scale = 1.0 / (0.5 * 1.0 * 1.0 * 1.0);
  } else {
    throw ConfigError("unknown case '" + name + "'");
  }
  if (!o.scheme.empty()) c.scheme = o.scheme;
  if (o.cfl > 0.0) c.cfl = o.cfl;
  if (o.dt > 0.0) c.dt = o.dt;
  if (o.t_end >= 0.0) c.t_end = o.t_end;
  make_scheme(c.scheme);  // validate early
  c.mesh = build_mesh(c.subdomains);
  return c;
}

// Builds the simulation and fills in an automatic time step when none is set.
inline Simulation start_case(CaseSetup& c) {
  Simulation sim(c.mesh, c.solver, make_scheme(c.scheme));
  sim.initialize(c.initial, 0.0);
  if (!(c.dt > 0.0)) {
    c.dt = sim.solver().estimate_dt(sim.state(), 0.0, c.cfl);
    // land on round multiples of the end time
    if (c.t_end > 0.0) c.dt = c.t_end / std::ceil(c.t_end / c.dt);
  }
  return sim;
}

// ------------------------------------------------------------ measurements

// Component k of the physical state (0 rho, 1 u, 2 v, 3 p) at every solution point.
inline std::vector<double> primitive_field(const Simulation& s, int k) {
  const FluidModel& f = s.solver().options().fluid;
  std::vector<double> out;
  for (const State& q : s.physical_states()) {
    const Primitive w = to_primitive(q, f);
    out.push_back(k == 0 ? w.rho : k == 1 ? w.u : k == 2 ? w.v : w.p);
  }
  return out;
}

inline std::vector<double> exact_field(const Simulation& s, const ExactSolution& ex, double t, int k) {
  const Solver& sol = s.solver();
  std::vector<double> out;
  const_cast<Solver&>(sol).update_geometry(t);
  for (int e = 0; e < sol.elements(); ++e)
    for (int p = 0; p < sol.points_per_element(); ++p) {
      const Primitive w = ex.primitive(t, sol.sp_metric(e, p).x);
      out.push_back(k == 0 ? w.rho : k == 1 ? w.u : k == 2 ? w.v : w.p);
    }
  return out;
}

// Normalised L2 error of pressure against a uniform reference.
inline double pressure_deviation(const Simulation& s, double p_ref) {
  const std::vector<double> p = primitive_field(s, 3);
  return l2_error(p, std::vector<double>(p.size(), p_ref)) / p_ref;
}

// ------------------------------------------------------------------ studies

struct StudyPoint {
  int p = 0;
  double omega = 0.0, dt = 0.0, error = 0.0;
};

// Density L2 error of the vortex at its end time.
inline StudyPoint vortex_error(int p, double omega, const CaseOptions& base = {}) {
  CaseOptions o = base;
  o.p = p;
  o.omega = omega;
  CaseSetup c = make_case("euler_vortex", o);
  Simulation sim = start_case(c);
  sim.run_to(c.t_end, c.dt);
  return {p, omega, c.dt, l2_error(primitive_field(sim, 0), exact_field(sim, *c.exact, sim.time(), 0))};
}

// Velocity L2 error of Taylor-Couette flow after marching to a residual plateau.
struct SteadyResult {
  StudyPoint point;
  double final_time = 0.0, residual = 0.0;
};

inline SteadyResult taylor_couette_error(int p, double omega, const CaseOptions& base = {}, double t_max = 20.0,
                                         double check_every = 0.5) {
  CaseOptions o = base;
  o.p = p;
  o.omega = omega;
  o.t_end = t_max;
  CaseSetup c = make_case("taylor_couette", o);
  Simulation sim = start_case(c);
  const ExactSolution& ex = *c.exact;
  double prev_err = -1.0, err = 0.0;
  std::vector<double> r;
  double res = 0.0;
  while (sim.time() < t_max - 1e-12) {
    sim.run_to(std::min(t_max, sim.time() + check_every), c.dt);
    err = l2_error(primitive_field(sim, 1), exact_field(sim, ex, sim.time(), 1));
    sim.solver().residual(sim.time(), sim.state(), r);
    res = 0.0;
    for (size_t i = 0; i < r.size(); i += state_stride) res = std::max(res, std::abs(r[i + 1]));
    // plateau: the error has stopped changing
    if (prev_err > 0.0 && std::abs(err - prev_err) <= 1e-3 * err) break;
    prev_err = err;
  }
  return {{p, omega, c.dt, err}, sim.time(), res};
}

// Normalised pressure error of a uniform flow after t_end.
inline StudyPoint freestream_error(int p, double omega, bool deforming, const CaseOptions& base = {}) {
  CaseOptions o = base;
  o.p = p;
  o.omega = omega;
  CaseSetup c = make_case(deforming ? "free_stream_deforming" : "free_stream", o);
  Simulation sim = start_case(c);
  const double p_ref = pressure(c.reference, c.solver.fluid);
  sim.run_to(c.t_end, c.dt);
  return {p, omega, c.dt, pressure_deviation(sim, p_ref)};
}

// Largest |E| component over the run, checked every `every` steps and at the end.
struct ConservationResult {
  State final_error{};
  double worst = 0.0;
  double worst_interface_defect = 0.0;
};

inline ConservationResult couette_conservation(int p, double omega, double t_end, const CaseOptions& base = {},
                                               int every = 50) {
  CaseOptions o = base;
  o.p = p;
  o.omega = omega;
  o.t_end = t_end;
  CaseSetup c = make_case("flat_couette", o);
  Simulation sim = start_case(c);
  ConservationResult out;
  auto monitor = [&](Simulation& s) {
    const State e = s.solver().conservation_error(s.time(), s.state());
    for (double v : e) out.worst = std::max(out.worst, std::abs(v));
    out.worst_interface_defect = std::max(out.worst_interface_defect, s.solver().interface_defect());
    out.final_error = e;
  };
  sim.run_to(c.t_end, c.dt, [&](Simulation& s) {
    if (s.step() % every == 0) monitor(s);
  });
  monitor(sim);
  return out;
}

// Temporal error of the vortex density at t_end against a reference run of the
// same spatial discretisation with a much smaller step, so spatial error cancels.
struct TemporalStudy {
  std::vector<double> dts, errors;
  double spatial_error = 0.0;  // reference run against the exact solution
  LineFit fit;
};

namespace detail {

inline CaseOptions temporal_options(int p, double omega, double t_end, const CaseOptions& base) {
  CaseOptions o = base;
  o.p = p;
  o.omega = omega;
  o.t_end = t_end;
  return o;
}

// Density field at t_end and the exact density at the same points.
inline std::pair<std::vector<double>, std::vector<double>> vortex_density(const CaseOptions& o, const std::string& scheme,
                                                                          double dt) {
  CaseOptions oo = o;
  oo.scheme = scheme;
  oo.dt = dt;
  CaseSetup c = make_case("euler_vortex", oo);
  Simulation sim = start_case(c);
  sim.run_to(c.t_end, c.dt);
  return {primitive_field(sim, 0), exact_field(sim, *c.exact, sim.time(), 0)};
}

}  // namespace detail

// SSP(10,4) run at a small step; shared by the temporal studies of one (p, omega, t_end).
struct TemporalReference {
  int p = 0;
  double omega = 0.0, t_end = 0.0, dt = 0.0;
  std::vector<double> density;
  double spatial_error = 0.0;
};

inline TemporalReference vortex_temporal_reference(int p, double omega, double t_end, double dt,
                                                   const CaseOptions& base = {}) {
  auto [ref, exact] = detail::vortex_density(detail::temporal_options(p, omega, t_end, base), "ssp(10,4)", dt);
  TemporalReference r{p, omega, t_end, dt, std::move(ref), 0.0};
  r.spatial_error = l2_error(r.density, exact);
  return r;
}

inline TemporalStudy vortex_temporal_study(const std::string& scheme, const std::vector<double>& dts,
                                           const TemporalReference& ref, const CaseOptions& base = {}) {
  const CaseOptions o = detail::temporal_options(ref.p, ref.omega, ref.t_end, base);
  TemporalStudy st;
  st.dts = dts;
  st.spatial_error = ref.spatial_error;
  for (double dt : dts) st.errors.push_back(l2_error(detail::vortex_density(o, scheme, dt).first, ref.density));
  st.fit = fit_loglog(st.dts, st.errors);
  return st;
}

// Reference at an eighth of the smallest step.
inline TemporalStudy vortex_temporal_study(const std::string& scheme, const std::vector<double>& dts, int p,
                                           double omega, double t_end, const CaseOptions& base = {}) {
  const double dt_ref = *std::min_element(dts.begin(), dts.end()) / 8.0;
  return vortex_temporal_study(scheme, dts, vortex_temporal_reference(p, omega, t_end, dt_ref, base), base);
}

}  // namespace sfr
