#pragma once

// Compressible Navier-Stokes physics: state conversions, inviscid and viscous
// fluxes, the Rusanov flux with grid motion, and weak boundary ghost states.

#include <functional>
#include <limits>
#include <string>

#include "sfr/core/types.hpp"

namespace sfr {

struct FluidModel {
  double gamma = 1.4;
  double gas_constant = 1.0;  // R
  double mu = 0.0;            // dynamic viscosity, constant
  double prandtl = 0.72;

  double cp() const { return gamma * gas_constant / (gamma - 1.0); }
  double kappa() const { return mu * cp() / prandtl; }
  bool viscous() const { return mu > 0.0; }

  // rho_ref = U_ref = L_ref = 1 and T_ref = 1: p_ref = 1 / (gamma Ma^2),
  // R = p_ref, mu = 1 / Re (Re <= 0 means inviscid).
  static FluidModel from_groups(double mach, double reynolds, double prandtl = 0.72, double gamma = 1.4) {
    if (!(mach > 0.0)) throw ConfigError("Mach number must be positive");
    if (!(prandtl > 0.0)) throw ConfigError("Prandtl number must be positive");
    FluidModel f;
    f.gamma = gamma;
    f.gas_constant = 1.0 / (gamma * mach * mach);
    f.mu = reynolds > 0.0 ? 1.0 / reynolds : 0.0;
    f.prandtl = prandtl;
    return f;
  }
};

struct Primitive {
  double rho, u, v, p;
};

inline Primitive to_primitive(const State& q, const FluidModel& f) {
  const double rho = q[0], u = q[1] / rho, v = q[2] / rho;
  return {rho, u, v, (f.gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v))};
}

inline State to_conservative(const Primitive& w, const FluidModel& f) {
  return {w.rho, w.rho * w.u, w.rho * w.v, w.p / (f.gamma - 1.0) + 0.5 * w.rho * (w.u * w.u + w.v * w.v)};
}

inline double pressure(const State& q, const FluidModel& f) {
  return (f.gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0]);
}
inline double temperature(const State& q, const FluidModel& f) { return pressure(q, f) / (q[0] * f.gas_constant); }
inline double sound_speed(const State& q, const FluidModel& f) { return std::sqrt(f.gamma * pressure(q, f) / q[0]); }

inline bool admissible(const State& q, const FluidModel& f) {
  if (!std::isfinite(q[0]) || !std::isfinite(q[1]) || !std::isfinite(q[2]) || !std::isfinite(q[3])) return false;
  return q[0] > 0.0 && pressure(q, f) > 0.0;
}

inline void require_admissible(const State& q, const FluidModel& f, const std::string& where) {
  if (!admissible(q, f))
    throw NumericalError("inadmissible state at " + where + ": rho=" + std::to_string(q[0]) + " p=" + std::to_string(pressure(q, f)));
}

// Physical inviscid fluxes F (x) and G (y).
inline void inviscid_flux(const State& q, const FluidModel& f, State& fx, State& gy) {
  const double rho = q[0], u = q[1] / rho, v = q[2] / rho;
  const double p = (f.gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v));
  fx = {q[1], q[1] * u + p, q[1] * v, u * (q[3] + p)};
  gy = {q[2], q[2] * u, q[2] * v + p, v * (q[3] + p)};
}

// F n_x + G n_y.
inline State normal_flux(const State& q, const FluidModel& f, Vec2 n) {
  const double rho = q[0], u = q[1] / rho, v = q[2] / rho;
  const double p = (f.gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v));
  const double vn = u * n.x + v * n.y;
  return {rho * vn, q[1] * vn + p * n.x, q[2] * vn + p * n.y, (q[3] + p) * vn};
}

enum class SoundSpeedPolicy { average_state, max_of_sides };

// Rusanov flux across unit normal n for a face moving with normal speed vgn:
// 1/2 (Fn(L) + Fn(R)) - vgn 1/2 (L + R) - 1/2 lambda (R - L),
// lambda = |1/2 (vn_L + vn_R) - vgn| + c.
inline State rusanov(const State& ql, const State& qr, Vec2 n, double vgn, const FluidModel& f,
                     SoundSpeedPolicy policy = SoundSpeedPolicy::average_state) {
  const State fl = normal_flux(ql, f, n), fr = normal_flux(qr, f, n);
  const double vnl = (ql[1] * n.x + ql[2] * n.y) / ql[0];
  const double vnr = (qr[1] * n.x + qr[2] * n.y) / qr[0];
  double c;
  if (policy == SoundSpeedPolicy::average_state) {
    State qa;
    for (int k = 0; k < nvar; ++k) qa[k] = 0.5 * (ql[k] + qr[k]);
    c = sound_speed(qa, f);
  } else {
    c = std::max(sound_speed(ql, f), sound_speed(qr, f));
  }
  const double lam = std::abs(0.5 * (vnl + vnr) - vgn) + c;
  State out;
  for (int k = 0; k < nvar; ++k) out[k] = 0.5 * (fl[k] + fr[k]) - vgn * 0.5 * (ql[k] + qr[k]) - 0.5 * lam * (qr[k] - ql[k]);
  return out;
}

// Gradient of the conservative variables: gx[k] = dQ_k/dx, gy[k] = dQ_k/dy.
struct StateGradient {
  State gx{}, gy{};
};

struct ViscousTerms {
  double txx, txy, tyy, qx, qy;  // stresses and heat flux -kappa grad T (stored as kappa grad T)
  double u, v;
};

inline ViscousTerms viscous_terms(const State& q, const StateGradient& g, const FluidModel& f) {
  const double rho = q[0], u = q[1] / rho, v = q[2] / rho;
  const double ux = (g.gx[1] - u * g.gx[0]) / rho, uy = (g.gy[1] - u * g.gy[0]) / rho;
  const double vx = (g.gx[2] - v * g.gx[0]) / rho, vy = (g.gy[2] - v * g.gy[0]) / rho;
  const double p = (f.gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v));
  const double px = (f.gamma - 1.0) * (g.gx[3] - 0.5 * (u * u + v * v) * g.gx[0] - rho * (u * ux + v * vx));
  const double py = (f.gamma - 1.0) * (g.gy[3] - 0.5 * (u * u + v * v) * g.gy[0] - rho * (u * uy + v * vy));
  const double r = f.gas_constant;
  const double tx = (px / rho - p * g.gx[0] / (rho * rho)) / r;
  const double ty = (py / rho - p * g.gy[0] / (rho * rho)) / r;
  const double mu = f.mu, lam = -2.0 / 3.0 * mu, k = f.kappa();
  ViscousTerms t;
  t.txx = 2.0 * mu * ux + lam * (ux + vy);
  t.tyy = 2.0 * mu * vy + lam * (ux + vy);
  t.txy = mu * (uy + vx);
  t.qx = k * tx;
  t.qy = k * ty;
  t.u = u;
  t.v = v;
  return t;
}

// Physical viscous fluxes F_vis, G_vis = -[0, tau_x., tau_y., u tau + kappa grad T].
inline void viscous_flux(const State& q, const StateGradient& g, const FluidModel& f, State& fx, State& gy) {
  const ViscousTerms t = viscous_terms(q, g, f);
  fx = {0.0, -t.txx, -t.txy, -(t.u * t.txx + t.v * t.txy + t.qx)};
  gy = {0.0, -t.txy, -t.tyy, -(t.u * t.txy + t.v * t.tyy + t.qy)};
}

// Normal viscous flux; heat flux dropped for adiabatic walls.
inline State viscous_normal_flux(const State& q, const StateGradient& g, const FluidModel& f, Vec2 n,
                                 bool adiabatic = false) {
  const ViscousTerms t = viscous_terms(q, g, f);
  const double qn = adiabatic ? 0.0 : t.qx * n.x + t.qy * n.y;
  const double sx = t.txx * n.x + t.txy * n.y, sy = t.txy * n.x + t.tyy * n.y;
  return {0.0, -sx, -sy, -(t.u * sx + t.v * sy + qn)};
}

// ----------------------------------------------------------- boundary conditions

enum class BcKind { dirichlet, noslip_isothermal, noslip_adiabatic, characteristic_farfield };

inline BcKind parse_bc_kind(const std::string& s) {
  if (s == "dirichlet") return BcKind::dirichlet;
  if (s == "noslip_isothermal") return BcKind::noslip_isothermal;
  if (s == "noslip_adiabatic") return BcKind::noslip_adiabatic;
  if (s == "characteristic_farfield") return BcKind::characteristic_farfield;
  throw ConfigError("unknown boundary condition kind '" + s + "'");
}

using StateFunction = std::function<State(double t, Vec2 x)>;

struct BoundaryCondition {
  BcKind kind = BcKind::dirichlet;
  StateFunction data;        // dirichlet data or far-field state (evaluated pointwise)
  double wall_temperature = 1.0;
};

// Exterior state for weak imposition. vw is the wall (grid) velocity at the point.
inline State ghost_state(const BoundaryCondition& bc, const State& qin, Vec2 n, Vec2 x, Vec2 vw, double t,
                         const FluidModel& f) {
  switch (bc.kind) {
    case BcKind::dirichlet: return bc.data(t, x);
    case BcKind::noslip_isothermal: {
      const double rho = qin[0];
      return to_conservative({rho, vw.x, vw.y, rho * f.gas_constant * bc.wall_temperature}, f);
    }
    case BcKind::noslip_adiabatic: {
      const Primitive w = to_primitive(qin, f);
      return to_conservative({w.rho, vw.x, vw.y, w.p}, f);
    }
    case BcKind::characteristic_farfield: {
      const State qinf = bc.data(t, x);
      const Primitive wi = to_primitive(qin, f), wf = to_primitive(qinf, f);
      const double g = f.gamma;
      const double ci = std::sqrt(g * wi.p / wi.rho), cf = std::sqrt(g * wf.p / wf.rho);
      const double vni = wi.u * n.x + wi.v * n.y - dot(vw, n);
      const double vnf = wf.u * n.x + wf.v * n.y - dot(vw, n);
      if (vni >= ci) return qin;      // supersonic outflow
      if (vni <= -ci) return qinf;    // supersonic inflow
      // Riemann invariants R+ from inside, R- from the far field; written as
      // increments on the upwind state so an exact free stream is reproduced bitwise
      const double dvn = vni - vnf, dc = ci - cf;
      const double vnb = vnf + 0.5 * dvn + dc / (g - 1.0);
      const double cb = cf + 0.25 * (g - 1.0) * dvn + 0.5 * dc;
      const bool out = vnb > 0.0;
      const Primitive& src = out ? wi : wf;
      const double csrc = out ? ci : cf, vnsrc = out ? vni : vnf;
      // isentropic with the upwind entropy
      const double ratio = cb / csrc;
      const double rho = src.rho * std::pow(ratio, 2.0 / (g - 1.0));
      const double p = src.p * std::pow(ratio, 2.0 * g / (g - 1.0));
      const double dv = vnb - vnsrc;  // replace the normal velocity, keep the tangential one
      return to_conservative({rho, src.u + dv * n.x, src.v + dv * n.y, p}, f);
    }
  }
  return qin;
}

}  // namespace sfr
