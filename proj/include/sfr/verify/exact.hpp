#pragma once

// Exact solutions, error norms, least-squares fits and the curved-mapping study.

#include <cmath>
#include <string>
#include <vector>

#include "sfr/basis/basis.hpp"
#include "sfr/geometry/mapping.hpp"
#include "sfr/solver/physics.hpp"

namespace sfr {

enum class CaseTag { euler_vortex, taylor_couette, flat_couette, free_stream };

inline CaseTag parse_case_tag(const std::string& s) {
  if (s == "euler_vortex") return CaseTag::euler_vortex;
  if (s == "taylor_couette") return CaseTag::taylor_couette;
  if (s == "flat_couette") return CaseTag::flat_couette;
  if (s == "free_stream") return CaseTag::free_stream;
  throw ConfigError("unknown exact solution '" + s + "'");
}

struct VortexParams {
  double u_inf = 1.0, rho_inf = 1.0, mach = 0.3;
  double theta = std::atan(0.5);
  double eps = 1.0, rc = 1.0;
  Vec2 x0{5.0, 5.0};
};

// Reference state at the inner cylinder: rho_i = 1, T_i = 1, Ma and Re
// built from v_theta_i and r_i.
struct TaylorCouetteParams {
  Vec2 center{0.0, 0.0};
  double ri = 1.0, ro = 2.0, vi = 1.0, vo = 0.0;
  double mach = 0.1, reynolds = 10.0;
  double wall_temperature = 1.0;  // outer wall, in units of T_i
};

// Density 1 at T = 1; the plate Mach number fixes R.
struct PlateCouetteParams {
  double u = 1.0, h = 1.0, t0 = 1.0, t1 = 1.0;
  double mach = 0.8, reynolds = 100.0;
};

struct FreeStreamParams {
  double mach = 0.3, angle = 0.0;
};

class ExactSolution {
 public:
  static ExactSolution vortex(VortexParams p = {}) {
    ExactSolution e(CaseTag::euler_vortex, FluidModel::from_groups(p.mach, 0.0));
    e.vortex_ = p;
    return e;
  }
  static ExactSolution taylor_couette(TaylorCouetteParams p = {}) {
    ExactSolution e(CaseTag::taylor_couette, FluidModel::from_groups(p.mach, p.reynolds));
    e.tc_ = p;
    e.setup_taylor_couette();
    return e;
  }
  static ExactSolution flat_couette(PlateCouetteParams p = {}) {
    ExactSolution e(CaseTag::flat_couette, FluidModel::from_groups(p.mach, p.reynolds));
    e.plate_ = p;
    return e;
  }
  static ExactSolution free_stream(FreeStreamParams p = {}) {
    ExactSolution e(CaseTag::free_stream, FluidModel::from_groups(p.mach, 0.0));
    e.fs_ = p;
    return e;
  }
  static ExactSolution make(const std::string& tag) {
    switch (parse_case_tag(tag)) {
      case CaseTag::euler_vortex: return vortex();
      case CaseTag::taylor_couette: return taylor_couette();
      case CaseTag::flat_couette: return flat_couette();
      default: return free_stream();
    }
  }

  CaseTag tag() const { return tag_; }
  const FluidModel& fluid() const { return fluid_; }
  void set_fluid(const FluidModel& f) {
    fluid_ = f;
    if (tag_ == CaseTag::taylor_couette) setup_taylor_couette();
  }

  Primitive primitive(double t, Vec2 x) const {
    const double g = fluid_.gamma;
    switch (tag_) {
      case CaseTag::euler_vortex: {
        const VortexParams& v = vortex_;
        const double ub = v.u_inf * std::cos(v.theta), vb = v.u_inf * std::sin(v.theta);
        const double xr = x.x - v.x0.x - ub * t, yr = x.y - v.x0.y - vb * t;
        const double e1 = std::exp((1.0 - xr * xr - yr * yr) / (2.0 * v.rc * v.rc));
        const double p_inf = v.rho_inf * v.u_inf * v.u_inf / (g * v.mach * v.mach);
        const double base = 1.0 - 0.5 * (g - 1.0) * (v.eps * v.mach) * (v.eps * v.mach) * e1 * e1;
        return {v.rho_inf * std::pow(base, 1.0 / (g - 1.0)), v.u_inf * (std::cos(v.theta) - v.eps * yr / v.rc * e1),
                v.u_inf * (std::sin(v.theta) + v.eps * xr / v.rc * e1), p_inf * std::pow(base, g / (g - 1.0))};
      }
      case CaseTag::taylor_couette: {
        const Vec2 d = x - tc_.center;
        const double r = norm(d);
        const double vt = azimuthal_speed(r), temp = tc_temperature(r), p = tc_pressure(r);
        const double rho = p / (fluid_.gas_constant * temp);
        return {rho, -vt * d.y / r, vt * d.x / r, p};
      }
      case CaseTag::flat_couette: {
        const PlateCouetteParams& c = plate_;
        const double eta = x.y / c.h;
        const double temp = c.t0 + (c.t1 - c.t0) * eta + fluid_.mu * c.u * c.u / (2.0 * fluid_.kappa()) * (eta - eta * eta);
        const double p = fluid_.gas_constant;  // rho = 1 at T = 1
        return {p / (fluid_.gas_constant * temp), c.u * eta, 0.0, p};
      }
      default:
        return {1.0, std::cos(fs_.angle), std::sin(fs_.angle), 1.0 / (g * fs_.mach * fs_.mach)};
    }
  }

  State operator()(double t, Vec2 x) const { return to_conservative(primitive(t, x), fluid_); }
  StateFunction function() const {
    return [e = *this](double t, Vec2 x) { return e(t, x); };
  }

  // Taylor-Couette profile pieces
  double azimuthal_speed(double r) const {
    const auto& c = tc_;
    const double den = c.ro / c.ri - c.ri / c.ro;
    return c.vi * (c.ro / r - r / c.ro) / den + c.vo * (r / c.ri - c.ri / r) / den;
  }
  double tc_temperature(double r) const { return -tc_q_ / (r * r) + tc_c1_ * std::log(r) + tc_c2_; }
  double tc_pressure(double r) const {
    // radial balance dp/dr = rho v^2 / r = p v^2 / (R T r), integrated by Gauss quadrature
    const auto& rule = tc_rule();
    const double a = tc_.ri, len = r - a;
    double s = 0.0;
    for (size_t k = 0; k < rule.points.size(); ++k) {
      const double rr = a + len * rule.points[k], v = azimuthal_speed(rr);
      s += rule.weights[k] * v * v / (fluid_.gas_constant * tc_temperature(rr) * rr);
    }
    return tc_pi_ * std::exp(len * s);
  }
  const TaylorCouetteParams& taylor_couette_params() const { return tc_; }
  const VortexParams& vortex_params() const { return vortex_; }
  const PlateCouetteParams& plate_params() const { return plate_; }

 private:
  ExactSolution(CaseTag t, FluidModel f) : tag_(t), fluid_(f) {}

  static const LegendreRule& tc_rule() {
    static const LegendreRule rule = legendre_rule(48);
    return rule;
  }

  // T'' + T'/r = -(mu/kappa) (r d(v/r)/dr)^2 with v = A r + B/r: T = -q/r^2 + C1 ln r + C2.
  void setup_taylor_couette() {
    const auto& c = tc_;
    if (!(c.ro > c.ri && c.ri > 0.0)) throw ConfigError("Taylor-Couette radii must satisfy 0 < r_i < r_o");
    const double den = c.ro / c.ri - c.ri / c.ro;
    const double b = (c.vi * c.ro - c.vo * c.ri) / den;
    tc_q_ = fluid_.mu * b * b / fluid_.kappa();
    const double ti = 1.0, to = c.wall_temperature;
    tc_c1_ = (to - ti + tc_q_ / (c.ro * c.ro) - tc_q_ / (c.ri * c.ri)) / std::log(c.ro / c.ri);
    tc_c2_ = ti + tc_q_ / (c.ri * c.ri) - tc_c1_ * std::log(c.ri);
    tc_pi_ = fluid_.gas_constant * ti;  // rho_i = 1
  }

  CaseTag tag_;
  FluidModel fluid_;
  VortexParams vortex_;
  TaylorCouetteParams tc_;
  PlateCouetteParams plate_;
  FreeStreamParams fs_;
  double tc_q_ = 0.0, tc_c1_ = 0.0, tc_c2_ = 0.0, tc_pi_ = 1.0;
};

// sqrt(sum (a - b)^2 / N).
inline double l2_error(const std::vector<double>& numeric, const std::vector<double>& exact) {
  if (numeric.size() != exact.size() || numeric.empty()) throw Error("l2_error: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < numeric.size(); ++i) s += (numeric[i] - exact[i]) * (numeric[i] - exact[i]);
  return std::sqrt(s / static_cast<double>(numeric.size()));
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

// Slope of log(err) against log(dt).
inline LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& err) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(err[i]));
  }
  return fit_line(lx, ly);
}

// log(err) against P.
inline LineFit fit_semilog(const std::vector<double>& p, const std::vector<double>& err) {
  std::vector<double> ly;
  for (double e : err) ly.push_back(std::log(e));
  return fit_line(p, ly);
}

// ------------------------------------------------------------- mapping study

struct MappingStudy {
  double transfinite_dr = 0.0;         // 1D arc, max |r - R|
  std::vector<int> orders{4, 8, 12};   // serendipity node counts: linear, quadratic, cubic
  std::vector<double> iso_dr;          // 1D arc, per order
  std::vector<double> iso_nodal_dr;    // at the nodes, per order
  double transfinite_dr_2d = 0.0;      // arc edge of the 2D element
  std::vector<double> coord_diff_2d;   // max ||x_iso - x_T|| over the element, per order
};

// Straight-sided element with one arc edge: corners x1, x2 on the arc (radius
// R about (0, R)), x3, x4 where the radial lines through x2 and x1 meet y = R/2.
inline TransfiniteElementMap appendix_element(double r = 2.0, double t1 = -110.0 * pi / 180.0, double t2 = -70.0 * pi / 180.0) {
  const Vec2 c{0.0, r};
  const Vec2 x1{r * std::cos(t1) + c.x, r * std::sin(t1) + c.y}, x2{r * std::cos(t2) + c.x, r * std::sin(t2) + c.y};
  const Vec2 x3{-0.5 * r / std::tan(t2), 0.5 * r}, x4{-0.5 * r / std::tan(t1), 0.5 * r};
  TransfiniteElementMap m;
  m.corners = {x1, x2, x3, x4};
  m.faces = {FaceCurve::circle(c, r, t1, t2), FaceCurve::line(x2, x3), FaceCurve::line(x4, x3), FaceCurve::line(x1, x4)};
  m.faces[0].a = x1;
  m.faces[0].b = x2;
  return m;
}

inline MappingStudy mapping_error_study(int samples = 100) {
  MappingStudy out;
  // 1D arc: theta 0..10 degrees, R = 1, center at the origin
  const double r = 1.0, th2 = 10.0 * pi / 180.0;
  const FaceCurve arc = FaceCurve::circle({0.0, 0.0}, r, 0.0, th2);
  for (int i = 0; i <= samples; ++i) {
    const double s = static_cast<double>(i) / samples;
    out.transfinite_dr = std::max(out.transfinite_dr, std::abs(norm(arc.eval(s)) - r));
  }
  // iso-parametric 1D: Lagrange interpolation through equispaced arc nodes
  for (int k : out.orders) {
    const int nodes = k / 4 + 1;  // 2, 3, 4 nodes along an edge
    std::vector<double> xs(nodes);
    std::vector<Vec2> ps(nodes);
    for (int j = 0; j < nodes; ++j) {
      xs[j] = static_cast<double>(j) / (nodes - 1);
      ps[j] = arc.eval(xs[j]);
    }
    double worst = 0.0, nodal = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const double s = static_cast<double>(i) / samples;
      Vec2 p{};
      for (int j = 0; j < nodes; ++j) p = p + lagrange_eval(xs, j, s) * ps[j];
      worst = std::max(worst, std::abs(norm(p) - r));
    }
    for (const Vec2& p : ps) nodal = std::max(nodal, std::abs(norm(p) - r));
    out.iso_dr.push_back(worst);
    out.iso_nodal_dr.push_back(nodal);
  }
  // 2D element
  const TransfiniteElementMap tm = appendix_element();
  for (int i = 0; i <= samples; ++i) {
    const Vec2 p = tm.sample(static_cast<double>(i) / samples, 0.0).x;
    out.transfinite_dr_2d = std::max(out.transfinite_dr_2d, std::abs(norm(p - Vec2{0.0, 2.0}) - 2.0));
  }
  for (int k : out.orders) {
    IsoElementMap iso{k, {}};
    for (Vec2 n : serendipity_nodes(k)) iso.nodes.push_back(tm.sample(n.x, n.y).x);
    double worst = 0.0;
    const int m = 40;
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const double xi = static_cast<double>(i) / m, eta = static_cast<double>(j) / m;
        worst = std::max(worst, norm(iso.sample(xi, eta).x - tm.sample(xi, eta).x));
      }
    out.coord_diff_2d.push_back(worst);
  }
  return out;
}

}  // namespace sfr
