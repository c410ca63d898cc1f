#pragma once

// Flux-reconstruction residual for the 2D compressible Navier-Stokes equations
// in ALE form on quadrilateral meshes with rotating subdomains coupled through
// sliding mortars. The unknowns per solution point are Q~ = |J| Q (4 values)
// followed by the co-integrated Jacobian |J|_num.

#include <cmath>
#include <limits>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sfr/basis/basis.hpp"
#include "sfr/geometry/mapping.hpp"
#include "sfr/mesh/mesh.hpp"
#include "sfr/mortar/mortar.hpp"
#include "sfr/solver/physics.hpp"

namespace sfr {

inline constexpr int state_stride = nvar + 1;

enum class CurvedMap { transfinite, iso8, iso12 };

struct SolverOptions {
  int p = 3;  // polynomial degree, N = p + 1 points per direction
  FluidModel fluid;
  SoundSpeedPolicy sound_speed = SoundSpeedPolicy::average_state;
  ViscousExchange viscous_exchange = ViscousExchange::flux_projection;
  std::map<std::string, BoundaryCondition> boundary;  // by boundary tag
  std::optional<Deformation> deformation;             // vertex motion for every element (conforming meshes only)
  CurvedMap curved_map = CurvedMap::transfinite;      // elements touching curved walls
  bool numerical_jacobian = true;                     // false: analytic |J| replaces the GCL unknown
  int threads = 1;
};

enum class FaceKind { interior, boundary, sliding };

struct FaceLink {
  FaceKind kind = FaceKind::boundary;
  int index = -1;         // interior face, boundary face or interface
  int side = 0;           // interior: 0/1 within the pair; sliding: 0 inner, 1 outer
  int slot = -1;          // sliding: interface face number (inner first)
  bool same_dir = true;   // sliding: flux points already run counterclockwise about the center
};

struct InterfaceRuntime {
  int id = 0;
  Vec2 center;
  double radius = 0.0;
  int nfl = 0, nfr = 0;
  std::vector<int> cell, face;
  std::vector<char> same_dir;
  std::vector<double> theta0;  // start-vertex angles at t = 0
  double omega_in = 0.0, omega_out = 0.0;
  MortarConnectivity conn;
  ProjectionCache cache;
  double cache_time = std::numeric_limits<double>::quiet_NaN();
  bool built = false;
  // last residual evaluation
  FaceField mortar_flux, face_flux;
  double last_defect = 0.0;

  bool moving() const { return omega_in != 0.0 || omega_out != 0.0; }
};

struct ForceResult {
  Vec2 pressure, viscous;
  Vec2 total() const { return pressure + viscous; }
};

// Runs fn(i) for i in [0, count) on the worker pool; the exception of the
// lowest failing index is rethrown on the calling thread.
template <class F>
void parallel_for(int threads, int count, F&& fn) {
  std::exception_ptr err;
  int err_index = std::numeric_limits<int>::max();
  std::mutex mtx;
#pragma omp parallel for num_threads(threads) schedule(static)
  for (int i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mtx);
      if (i < err_index) {
        err_index = i;
        err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

class Solver {
 public:
  Solver(const AssembledMesh& mesh, SolverOptions opt) : opt_(std::move(opt)), mesh_(mesh) {
    if (opt_.p < 0 || opt_.p > 15) throw ConfigError("polynomial degree must be in [0, 15]");
    if (opt_.threads < 1) throw ConfigError("worker count must be >= 1");
    b_ = &basis_for(opt_.p + 1);
    n_ = b_->n;
    np_ = n_ * n_;
    ne_ = static_cast<int>(mesh_.cells.size());
    if (opt_.deformation && !mesh_.interfaces.empty())
      throw ConfigError("mesh deformation cannot be combined with sliding interfaces");
    build_maps();
    build_links();
    allocate();
  }

  int n() const { return n_; }
  int points_per_element() const { return np_; }
  int elements() const { return ne_; }
  size_t state_size() const { return static_cast<size_t>(ne_) * np_ * state_stride; }
  const BasisSet& basis() const { return *b_; }
  const AssembledMesh& mesh() const { return mesh_; }
  const SolverOptions& options() const { return opt_; }
  void set_threads(int t) {
    if (t < 1) throw ConfigError("worker count must be >= 1");
    opt_.threads = t;
  }
  const std::vector<InterfaceRuntime>& interfaces() const { return ifaces_; }

  size_t sp(int e, int p) const { return static_cast<size_t>(e) * np_ + p; }
  size_t fp(int e, int f, int k) const { return (static_cast<size_t>(e) * 4 + f) * n_ + k; }

  // Geometry at time t (cached per time).
  void update_geometry(double t) {
    if (geometry_valid_ && (t == geometry_time_ || static_geometry_)) return;
    const double nan_guard = t;
    (void)nan_guard;
    if (opt_.deformation) {
      // vertex positions and velocities once per call, then bilinear maps
      const size_t nv = mesh_.vertices.size();
      std::vector<Vec2> xv(nv), vv(nv);
      for (size_t i = 0; i < nv; ++i) {
        const Vec2 x0 = mesh_.vertices[i];
        xv[i] = x0 + opt_.deformation->displacement(x0, t);
        vv[i] = opt_.deformation->velocity(x0, t);
      }
      auto eval = [&](int e, double xi, double eta) {
        double m[4], mx[4], me[4];
        serendipity_shape(4, xi, eta, m, mx, me);
        MapSample s{};
        Vec2 v{};
        for (int c = 0; c < 4; ++c) {
          const int id = mesh_.cells[e].v[c];
          s.x = s.x + m[c] * xv[id];
          s.d_xi = s.d_xi + mx[c] * xv[id];
          s.d_eta = s.d_eta + me[c] * xv[id];
          v = v + m[c] * vv[id];
        }
        MetricState r = metric_from(s, v);
        check_jacobian(r, e);
        return r;
      };
      parallel_for(opt_.threads, ne_, [&](int e) {
        for (int j = 0; j < n_; ++j)
          for (int i = 0; i < n_; ++i) spm_[sp(e, j * n_ + i)] = eval(e, b_->x[i], b_->x[j]);
        for (int f = 0; f < 4; ++f)
          for (int k = 0; k < n_; ++k) {
            const auto [xi, eta] = face_point(f, b_->x[k]);
            fpm_[fp(e, f, k)] = eval(e, xi, eta);
          }
      });
    } else {
      std::vector<std::array<double, 2>> cs(mesh_.subdomains());
      for (int s = 0; s < mesh_.subdomains(); ++s) {
        const double a = mesh_.rotation[s].angle(t);
        cs[s] = {std::cos(a), std::sin(a)};
      }
      parallel_for(opt_.threads, ne_, [&](int e) {
        const RigidRotation& rot = mesh_.rotation[mesh_.cells[e].subdomain];
        const double c = cs[mesh_.cells[e].subdomain][0], s = cs[mesh_.cells[e].subdomain][1];
        for (int p = 0; p < np_; ++p) {
          spm_[sp(e, p)] = rotated(sp0_[sp(e, p)], rot, c, s);
          check_jacobian(spm_[sp(e, p)], e);
        }
        for (int f = 0; f < 4; ++f)
          for (int k = 0; k < n_; ++k) fpm_[fp(e, f, k)] = rotated(fp0_[fp(e, f, k)], rot, c, s);
      });
    }
    geometry_time_ = t;
    geometry_valid_ = true;
  }

  const MetricState& sp_metric(int e, int p) const { return spm_[sp(e, p)]; }
  const MetricState& fp_metric(int e, int f, int k) const { return fpm_[fp(e, f, k)]; }

  // Q~ = |J| Q and |J|_num = |J| at t0.
  std::vector<double> initial_state(const StateFunction& q0, double t0) {
    update_geometry(t0);
    std::vector<double> u(state_size());
    for (int e = 0; e < ne_; ++e)
      for (int p = 0; p < np_; ++p) {
        const MetricState& m = spm_[sp(e, p)];
        const State q = q0(t0, m.x);
        double* o = &u[sp(e, p) * state_stride];
        for (int k = 0; k < nvar; ++k) o[k] = m.jac * q[k];
        o[nvar] = m.jac;
      }
    return u;
  }

  static State physical(const std::vector<double>& u, size_t point) { return divided(u, point, u[point * state_stride + nvar]); }

  // With the analytic Jacobian the stored |J| slot is refreshed after each step.
  void sync_jacobian(std::vector<double>& u, double t) {
    if (opt_.numerical_jacobian) return;
    update_geometry(t);
    for (size_t p = 0; p < u.size() / state_stride; ++p) u[p * state_stride + nvar] = spm_[p].jac;
  }

  // Spatial residual dU/dt at time t.
  void residual(double t, const std::vector<double>& u, std::vector<double>& r) {
    if (u.size() != state_size()) throw Error("residual: state vector has wrong size");
    r.assign(u.size(), 0.0);
    update_geometry(t);
    update_interfaces(t);
    last_time_ = t;
    solution_and_traces(u);
    common_inviscid(t);
    if (opt_.fluid.viscous()) {
      gradients();
      common_viscous();
    }
    assemble_residual(r);
    gcl_residual(r);
  }

  // Last-evaluated buffers (valid after residual()).
  const State& trace(int e, int f, int k) const { return qf_[fp(e, f, k)]; }
  const State& common_solution(int e, int f, int k) const { return qc_[fp(e, f, k)]; }
  const State& common_flux(int e, int f, int k) const { return fc_[fp(e, f, k)]; }
  const State& sp_solution(int e, int p) const { return qsp_[sp(e, p)]; }
  const StateGradient& sp_gradient(int e, int p) const { return gsp_[sp(e, p)]; }
  const StateGradient& fp_gradient(int e, int f, int k) const { return gf_[fp(e, f, k)]; }
  // Corrected flux traces: interior outward trace plus correction, used for checks.
  double corrected_trace_defect() const { return trace_defect_; }

  // Sum over elements of the quadrature of the residual plus the outward
  // boundary fluxes: zero for a conservative discretisation.
  State conservation_error(double t, const std::vector<double>& u) {
    std::vector<double> r;
    residual(t, u, r);
    return conservation_error_from(r);
  }

  // Same, for r from the last residual() call.
  State conservation_error_from(const std::vector<double>& r) const {
    State acc{};
    for (int e = 0; e < ne_; ++e)
      for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i) {
          const double w = b_->w[i] * b_->w[j];
          const double* ri = &r[sp(e, j * n_ + i) * state_stride];
          for (int k = 0; k < nvar; ++k) acc[k] += w * ri[k];
        }
    for (const auto& bf : mesh_.boundary_faces)
      for (int k = 0; k < n_; ++k) {
        const State& f = fc_[fp(bf.cell, bf.face, k)];
        for (int c = 0; c < nvar; ++c) acc[c] += b_->w[k] * f[c];
      }
    return acc;
  }

  // Force exerted by the fluid on the walls with the given tags.
  ForceResult forces(double t, const std::vector<double>& u, const std::set<std::string>& tags) {
    std::vector<double> r;
    residual(t, u, r);
    return forces_from_last(tags);
  }

  ForceResult forces_from_last(const std::set<std::string>& tags) const {
    ForceResult out;
    bool any = false;
    for (const auto& bf : mesh_.boundary_faces) {
      if (!tags.count(bf.tag)) continue;
      any = true;
      for (int k = 0; k < n_; ++k) {
        const FaceNormal nn = face_normal(fpm_[fp(bf.cell, bf.face, k)], bf.face);
        const State& q = qc_[fp(bf.cell, bf.face, k)];
        const double p = pressure(q, opt_.fluid);
        const double ds = b_->w[k] * nn.mag;
        // outward element normal points into the body
        out.pressure = out.pressure + (p * ds) * nn.unit;
        if (opt_.fluid.viscous()) {
          const ViscousTerms v = viscous_terms(q, gf_[fp(bf.cell, bf.face, k)], opt_.fluid);
          const Vec2 tn{v.txx * nn.unit.x + v.txy * nn.unit.y, v.txy * nn.unit.x + v.tyy * nn.unit.y};
          out.viscous = out.viscous - ds * tn;
        }
      }
    }
    if (!any) throw ConfigError("force integration: no boundary faces carry the requested wall tag");
    return out;
  }

  // Largest interface conservation defect of the last residual evaluation.
  double interface_defect() const {
    double d = 0.0;
    for (const auto& it : ifaces_) d = std::max(d, it.last_defect);
    return d;
  }

  // Stable step estimate from the inviscid and viscous spectral radii.
  double estimate_dt(const std::vector<double>& u, double t, double cfl) {
    update_geometry(t);
    const FluidModel& f = opt_.fluid;
    const double pp = (opt_.p + 1.0) * (opt_.p + 1.0);
    double lam_max = 0.0;
    for (int e = 0; e < ne_; ++e)
      for (int p = 0; p < np_; ++p) {
        const MetricState& m = spm_[sp(e, p)];
        const State q = physical(u, sp(e, p));
        const double c = sound_speed(q, f), uu = q[1] / q[0], vv = q[2] / q[0];
        const double ju = 1.0 / m.jac;
        const double xix = m.y_eta * ju, xiy = -m.x_eta * ju, etx = -m.y_xi * ju, ety = m.x_xi * ju;
        const double gx = std::hypot(xix, xiy), ge = std::hypot(etx, ety);
        const double ur = uu - m.x_t, vr = vv - m.y_t;
        double lam = (std::abs(xix * ur + xiy * vr) + c * gx + std::abs(etx * ur + ety * vr) + c * ge) * pp;
        if (f.viscous()) lam += f.mu * std::max(1.0, f.gamma / f.prandtl) / q[0] * (gx * gx + ge * ge) * pp * pp;
        lam_max = std::max(lam_max, lam);
      }
    if (!(lam_max > 0.0)) throw NumericalError("time step estimate failed");
    return cfl / lam_max;
  }

 private:
  static MetricState rotated(const MapSample& s0, const RigidRotation& rot, double c, double s) {
    MapSample r;
    r.x = rot.center + rotate(s0.x - rot.center, c, s);
    r.d_xi = rotate(s0.d_xi, c, s);
    r.d_eta = rotate(s0.d_eta, c, s);
    return metric_from(r, rot.velocity(r.x));
  }

  void build_maps() {
    std::map<std::pair<int, int>, Vec2> arc_center;  // undirected edge -> arc center
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    std::set<std::pair<int, int>> wall_arcs;
    for (const auto& cf : mesh_.curved_faces) {
      const auto [a, b] = mesh_.face_vertices(cf.cell, cf.face);
      arc_center[key(a, b)] = cf.center;
      wall_arcs.insert(key(a, b));
    }
    for (const auto& it : mesh_.interfaces)
      for (const InterfaceSide* side : {&it.inner, &it.outer})
        for (const auto& sf : side->faces) arc_center[key(sf.v_start, sf.v_end)] = it.center;

    maps_.resize(ne_);
    for (int e = 0; e < ne_; ++e) {
      const auto& v = mesh_.cells[e].v;
      const std::array<Vec2, 4> x = {mesh_.vertices[v[0]], mesh_.vertices[v[1]], mesh_.vertices[v[2]], mesh_.vertices[v[3]]};
      if (opt_.deformation) {
        for (int f = 0; f < 4; ++f)
          if (arc_center.count(key(v[f], v[(f + 1) % 4])))
            throw ConfigError("mesh deformation requires straight-edged elements");
        maps_[e] = IsoElementMap{4, {x[0], x[1], x[2], x[3]}};
        continue;
      }
      TransfiniteElementMap tm;
      tm.corners = x;
      // (start, end) corner of each face in its parameter direction
      const int ends[4][2] = {{0, 1}, {1, 2}, {3, 2}, {0, 3}};
      bool wall_curved = false, sliding_curved = false;
      for (int f = 0; f < 4; ++f) {
        const int a = ends[f][0], b = ends[f][1];
        auto it = arc_center.find(key(v[a], v[b]));
        if (it == arc_center.end()) {
          tm.faces[f] = FaceCurve::line(x[a], x[b]);
        } else {
          tm.faces[f] = FaceCurve::arc_through(it->second, x[a], x[b]);
          (wall_arcs.count(key(v[a], v[b])) ? wall_curved : sliding_curved) = true;
        }
      }
      tm.validate();
      if (wall_curved && !sliding_curved && opt_.curved_map != CurvedMap::transfinite) {
        const int k = opt_.curved_map == CurvedMap::iso8 ? 8 : 12;
        IsoElementMap iso{k, {}};
        for (Vec2 r : serendipity_nodes(k)) iso.nodes.push_back(tm.sample(r.x, r.y).x);
        maps_[e] = iso;
      } else {
        maps_[e] = tm;
      }
    }
    sp0_.resize(static_cast<size_t>(ne_) * np_);
    fp0_.resize(static_cast<size_t>(ne_) * 4 * n_);
    for (int e = 0; e < ne_; ++e) {
      for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i) sp0_[sp(e, j * n_ + i)] = sample_map(maps_[e], b_->x[i], b_->x[j]);
      for (int f = 0; f < 4; ++f)
        for (int k = 0; k < n_; ++k) {
          const auto [xi, eta] = face_point(f, b_->x[k]);
          fp0_[fp(e, f, k)] = sample_map(maps_[e], xi, eta);
        }
    }
    bool any_motion = false;
    for (const auto& rot : mesh_.rotation) any_motion = any_motion || rot.omega != 0.0;
    static_geometry_ = !any_motion && !opt_.deformation;
  }

  void build_links() {
    links_.assign(static_cast<size_t>(ne_) * 4, FaceLink{});
    std::vector<char> seen(static_cast<size_t>(ne_) * 4, 0);
    for (size_t i = 0; i < mesh_.interior_faces.size(); ++i) {
      const auto& f = mesh_.interior_faces[i];
      for (int s = 0; s < 2; ++s) {
        auto& l = links_[f.cell[s] * 4 + f.face[s]];
        l.kind = FaceKind::interior;
        l.index = static_cast<int>(i);
        l.side = s;
        seen[f.cell[s] * 4 + f.face[s]] = 1;
      }
    }
    bface_bc_.resize(mesh_.boundary_faces.size());
    for (size_t i = 0; i < mesh_.boundary_faces.size(); ++i) {
      const auto& f = mesh_.boundary_faces[i];
      auto it = opt_.boundary.find(f.tag);
      if (it == opt_.boundary.end()) throw ConfigError("no boundary condition given for tag '" + f.tag + "'");
      bface_bc_[i] = &it->second;
      auto& l = links_[f.cell * 4 + f.face];
      l.kind = FaceKind::boundary;
      l.index = static_cast<int>(i);
      seen[f.cell * 4 + f.face] = 1;
    }
    for (size_t ii = 0; ii < mesh_.interfaces.size(); ++ii) {
      const auto& it = mesh_.interfaces[ii];
      InterfaceRuntime rt;
      rt.id = it.id;
      rt.center = it.center;
      rt.radius = it.radius;
      rt.nfl = static_cast<int>(it.inner.faces.size());
      rt.nfr = static_cast<int>(it.outer.faces.size());
      rt.omega_in = mesh_.rotation[it.inner.subdomain].omega;
      rt.omega_out = mesh_.rotation[it.outer.subdomain].omega;
      for (int s = 0; s < 2; ++s) {
        const InterfaceSide& side = s == 0 ? it.inner : it.outer;
        for (const auto& sf : side.faces) {
          const int slot = static_cast<int>(rt.cell.size());
          rt.cell.push_back(sf.cell);
          rt.face.push_back(sf.face);
          const bool ccw_local = mesh_.face_vertices(sf.cell, sf.face).first == sf.v_start;
          rt.same_dir.push_back(ccw_local == (sf.face < 2));
          const Vec2 d = mesh_.vertices[sf.v_start] - it.center;
          rt.theta0.push_back(std::atan2(d.y, d.x));
          auto& l = links_[sf.cell * 4 + sf.face];
          l.kind = FaceKind::sliding;
          l.index = static_cast<int>(ii);
          l.side = s;
          l.slot = slot;
          l.same_dir = rt.same_dir.back();
          seen[sf.cell * 4 + sf.face] = 1;
        }
      }
      ifaces_.push_back(std::move(rt));
    }
    for (int e = 0; e < ne_; ++e)
      for (int f = 0; f < 4; ++f)
        if (!seen[e * 4 + f])
          throw TopologyError("element " + std::to_string(e) + " face " + std::to_string(f) + " has no neighbour or boundary");
  }

  void allocate() {
    const size_t nsp = static_cast<size_t>(ne_) * np_, nfp = static_cast<size_t>(ne_) * 4 * n_;
    spm_.resize(nsp);
    fpm_.resize(nfp);
    qsp_.resize(nsp);
    gsp_.resize(nsp);
    qf_.resize(nfp);
    qc_.resize(nfp);
    fc_.resize(nfp);
    gf_.resize(nfp);
  }

  // Flux point of the other side of an interior face.
  int mate_index(const InteriorFace& f, int k) const {
    return ((f.face[0] < 2) == (f.face[1] < 2)) ? n_ - 1 - k : k;
  }
  int slot_point(const InterfaceRuntime& it, int slot, int j) const { return it.same_dir[slot] ? j : n_ - 1 - j; }

  void update_interfaces(double t) {
    for (auto& it : ifaces_) {
      if (it.built && (!it.moving() || it.cache_time == t)) continue;
      InterfaceSideState l, r;
      for (int q = 0; q < it.nfl + it.nfr; ++q) {
        const bool inner = q < it.nfl;
        InterfaceSideState& s = inner ? l : r;
        s.vertex.push_back(q);
        s.angle.push_back(wrap_angle(it.theta0[q] + (inner ? it.omega_in : it.omega_out) * t));
      }
      it.conn = update_connectivity(l, r);
      it.cache = build_projection_cache(*b_, it.conn);
      it.cache_time = t;
      it.built = true;
    }
  }

  static State divided(const std::vector<double>& u, size_t point, double j) {
    const double* o = &u[point * state_stride];
    return {o[0] / j, o[1] / j, o[2] / j, o[3] / j};
  }

  void solution_and_traces(const std::vector<double>& u) {
    const BasisSet& b = *b_;
    const int n = n_;
    parallel_for(opt_.threads, ne_, [&](int e) {
      for (int p = 0; p < np_; ++p) {
        const State q = opt_.numerical_jacobian ? physical(u, sp(e, p)) : divided(u, sp(e, p), spm_[sp(e, p)].jac);
        if (!admissible(q, opt_.fluid)) require_admissible(q, opt_.fluid, "element " + std::to_string(e) + " point " + std::to_string(p));
        qsp_[sp(e, p)] = q;
      }
      for (int k = 0; k < n; ++k) {
        // difference form: constants are reproduced exactly
        const State& r0 = qsp_[sp(e, k)];
        const State& r1 = qsp_[sp(e, k * n)];
        State a = r0, bb = r1, c = r0, d = r1;
        for (int m = 0; m < n; ++m) {
          const State& q0 = qsp_[sp(e, m * n + k)];  // column i = k, varying eta
          const State& q1 = qsp_[sp(e, k * n + m)];  // row j = k, varying xi
          for (int v = 0; v < nvar; ++v) {
            a[v] += b.h0[m] * (q0[v] - r0[v]);
            c[v] += b.h1[m] * (q0[v] - r0[v]);
            bb[v] += b.h1[m] * (q1[v] - r1[v]);
            d[v] += b.h0[m] * (q1[v] - r1[v]);
          }
        }
        qf_[fp(e, 0, k)] = a;
        qf_[fp(e, 2, k)] = c;
        qf_[fp(e, 1, k)] = bb;
        qf_[fp(e, 3, k)] = d;
      }
    });
  }

  void common_inviscid(double t) {
    const FluidModel& fm = opt_.fluid;
    const int nif = static_cast<int>(mesh_.interior_faces.size());
    parallel_for(opt_.threads, nif, [&](int i) {
      const InteriorFace& f = mesh_.interior_faces[i];
      for (int k = 0; k < n_; ++k) {
        const int kb = mate_index(f, k);
        const size_t a = fp(f.cell[0], f.face[0], k), b = fp(f.cell[1], f.face[1], kb);
        const MetricState& m = fpm_[a];
        const FaceNormal nn = face_normal(m, f.face[0]);
        const double vgn = m.x_t * nn.unit.x + m.y_t * nn.unit.y;
        State qc;
        for (int v = 0; v < nvar; ++v) qc[v] = 0.5 * (qf_[a][v] + qf_[b][v]);
        qc_[a] = qc;
        qc_[b] = qc;
        const State h = rusanov(qf_[a], qf_[b], nn.unit, vgn, fm, opt_.sound_speed);
        for (int v = 0; v < nvar; ++v) {
          fc_[a][v] = h[v] * nn.mag;
          fc_[b][v] = -h[v] * nn.mag;
        }
      }
    });
    const int nbf = static_cast<int>(mesh_.boundary_faces.size());
    parallel_for(opt_.threads, nbf, [&](int i) {
      const BoundaryFace& f = mesh_.boundary_faces[i];
      for (int k = 0; k < n_; ++k) {
        const size_t a = fp(f.cell, f.face, k);
        const MetricState& m = fpm_[a];
        const FaceNormal nn = face_normal(m, f.face);
        const Vec2 vw{m.x_t, m.y_t};
        const State g = ghost_state(*bface_bc_[i], qf_[a], nn.unit, m.x, vw, t, fm);
        require_admissible(g, fm, "boundary '" + f.tag + "' ghost state");
        for (int v = 0; v < nvar; ++v) qc_[a][v] = 0.5 * (qf_[a][v] + g[v]);
        const State h = rusanov(qf_[a], g, nn.unit, dot(vw, nn.unit), fm, opt_.sound_speed);
        for (int v = 0; v < nvar; ++v) fc_[a][v] = h[v] * nn.mag;
      }
    });
    for (auto& it : ifaces_) sliding_inviscid(it);
  }

  void gather(const InterfaceRuntime& it, const std::vector<State>& src, FaceField& out) const {
    const int nf = it.nfl + it.nfr;
    out.assign(nf, std::vector<double>(static_cast<size_t>(n_) * nvar));
    for (int q = 0; q < nf; ++q)
      for (int j = 0; j < n_; ++j) {
        const State& s = src[fp(it.cell[q], it.face[q], slot_point(it, q, j))];
        for (int v = 0; v < nvar; ++v) out[q][j * nvar + v] = s[v];
      }
  }

  void sliding_inviscid(InterfaceRuntime& it) {
    const MortarConnectivity& c = it.conn;
    const int nf = c.nf;
    FaceField faces, ml, mr, common;
    gather(it, qf_, faces);
    exchange_common_solution(c, it.cache, faces, nvar, common);
    faces_to_mortars(c, it.cache, faces, true, nvar, ml);
    faces_to_mortars(c, it.cache, faces, false, nvar, mr);
    it.mortar_flux.assign(c.nm, std::vector<double>(static_cast<size_t>(n_) * nvar, 0.0));
    parallel_for(opt_.threads, c.nm, [&](int k) {
      const double len = it.radius * c.mortar_span(k);
      if (len == 0.0) return;
      for (int j = 0; j < n_; ++j) {
        const double th = c.mortar_theta1[k] + c.mortar_span(k) * b_->x[j];
        const Vec2 nrm{std::cos(th), std::sin(th)};
        State ql, qr;
        for (int v = 0; v < nvar; ++v) {
          ql[v] = ml[k][j * nvar + v];
          qr[v] = mr[k][j * nvar + v];
        }
        const State h = mortar_common_inviscid_flux(ql, qr, nrm, 0.0, opt_.fluid, k, opt_.sound_speed);
        for (int v = 0; v < nvar; ++v) it.mortar_flux[k][j * nvar + v] = len * h[v];
      }
    });
    FaceField left, right;
    mortars_to_faces(c, it.cache, it.mortar_flux, true, nvar, false, left);
    mortars_to_faces(c, it.cache, it.mortar_flux, false, nvar, false, right);
    it.face_flux.resize(nf);
    for (int q = 0; q < nf; ++q) {
      const bool inner = q < c.nfl;
      it.face_flux[q] = inner ? left[q] : right[q];
      const double sgn = inner ? 1.0 : -1.0;
      for (int j = 0; j < n_; ++j) {
        const size_t a = fp(it.cell[q], it.face[q], slot_point(it, q, j));
        for (int v = 0; v < nvar; ++v) {
          qc_[a][v] = common[q][j * nvar + v];
          fc_[a][v] = sgn * it.face_flux[q][j * nvar + v];
        }
      }
    }
    if (!opt_.fluid.viscous()) it.last_defect = check_interface_conservation(*b_, c, it.face_flux, it.mortar_flux, nvar);
  }

  // Corrected gradients of the physical solution at solution points and their traces.
  void gradients() {
    const BasisSet& b = *b_;
    const int n = n_;
#pragma omp parallel num_threads(opt_.threads)
    {
      std::vector<State> dxi(np_), deta(np_);
#pragma omp for schedule(static)
      for (int e = 0; e < ne_; ++e) {
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            State a{}, c{};
            for (int m = 0; m < n; ++m) {
              const double di = b.deriv(i, m), dj = b.deriv(j, m);
              const State& qa = qsp_[sp(e, j * n + m)];
              const State& qb = qsp_[sp(e, m * n + i)];
              const State& qi = qsp_[sp(e, j * n + i)];
              for (int v = 0; v < nvar; ++v) {
                a[v] += di * (qa[v] - qi[v]);
                c[v] += dj * (qb[v] - qi[v]);
              }
            }
            const size_t f3 = fp(e, 3, j), f1 = fp(e, 1, j), f0 = fp(e, 0, i), f2 = fp(e, 2, i);
            for (int v = 0; v < nvar; ++v) {
              a[v] += (qc_[f3][v] - qf_[f3][v]) * b.gl[i] + (qc_[f1][v] - qf_[f1][v]) * b.gr[i];
              c[v] += (qc_[f0][v] - qf_[f0][v]) * b.gl[j] + (qc_[f2][v] - qf_[f2][v]) * b.gr[j];
            }
            dxi[j * n + i] = a;
            deta[j * n + i] = c;
          }
        for (int p = 0; p < np_; ++p) {
          const MetricState& m = spm_[sp(e, p)];
          const double ij = 1.0 / m.jac;
          StateGradient g;
          for (int v = 0; v < nvar; ++v) {
            g.gx[v] = ij * (m.y_eta * dxi[p][v] - m.y_xi * deta[p][v]);
            g.gy[v] = ij * (-m.x_eta * dxi[p][v] + m.x_xi * deta[p][v]);
          }
          gsp_[sp(e, p)] = g;
        }
        for (int k = 0; k < n; ++k) {
          StateGradient t0, t1, t2, t3;
          for (int m = 0; m < n; ++m) {
            const StateGradient& ga = gsp_[sp(e, m * n + k)];
            const StateGradient& gb = gsp_[sp(e, k * n + m)];
            for (int v = 0; v < nvar; ++v) {
              t0.gx[v] += b.h0[m] * ga.gx[v];
              t0.gy[v] += b.h0[m] * ga.gy[v];
              t2.gx[v] += b.h1[m] * ga.gx[v];
              t2.gy[v] += b.h1[m] * ga.gy[v];
              t1.gx[v] += b.h1[m] * gb.gx[v];
              t1.gy[v] += b.h1[m] * gb.gy[v];
              t3.gx[v] += b.h0[m] * gb.gx[v];
              t3.gy[v] += b.h0[m] * gb.gy[v];
            }
          }
          gf_[fp(e, 0, k)] = t0;
          gf_[fp(e, 1, k)] = t1;
          gf_[fp(e, 2, k)] = t2;
          gf_[fp(e, 3, k)] = t3;
        }
      }
    }
  }

  static StateGradient average(const StateGradient& a, const StateGradient& b) {
    StateGradient g;
    for (int v = 0; v < nvar; ++v) {
      g.gx[v] = 0.5 * (a.gx[v] + b.gx[v]);
      g.gy[v] = 0.5 * (a.gy[v] + b.gy[v]);
    }
    return g;
  }

  void common_viscous() {
    const FluidModel& fm = opt_.fluid;
    const int nif = static_cast<int>(mesh_.interior_faces.size());
    parallel_for(opt_.threads, nif, [&](int i) {
      const InteriorFace& f = mesh_.interior_faces[i];
      for (int k = 0; k < n_; ++k) {
        const size_t a = fp(f.cell[0], f.face[0], k), b = fp(f.cell[1], f.face[1], mate_index(f, k));
        const FaceNormal nn = face_normal(fpm_[a], f.face[0]);
        const State h = viscous_normal_flux(qc_[a], average(gf_[a], gf_[b]), fm, nn.unit);
        for (int v = 0; v < nvar; ++v) {
          fc_[a][v] += h[v] * nn.mag;
          fc_[b][v] -= h[v] * nn.mag;
        }
      }
    });
    const int nbf = static_cast<int>(mesh_.boundary_faces.size());
    parallel_for(opt_.threads, nbf, [&](int i) {
      const BoundaryFace& f = mesh_.boundary_faces[i];
      const bool adiabatic = bface_bc_[i]->kind == BcKind::noslip_adiabatic;
      for (int k = 0; k < n_; ++k) {
        const size_t a = fp(f.cell, f.face, k);
        const FaceNormal nn = face_normal(fpm_[a], f.face);
        const State h = viscous_normal_flux(qc_[a], gf_[a], fm, nn.unit, adiabatic);
        for (int v = 0; v < nvar; ++v) fc_[a][v] += h[v] * nn.mag;
      }
    });
    for (auto& it : ifaces_) sliding_viscous(it);
  }

  void sliding_viscous(InterfaceRuntime& it) {
    const MortarConnectivity& c = it.conn;
    const int nf = c.nf;
    const FluidModel& fm = opt_.fluid;
    if (opt_.viscous_exchange == ViscousExchange::flux_projection) {
      // face fluxes oriented along the mortar normal (inner -> outer), scaled by |N|
      FaceField flux(nf, std::vector<double>(static_cast<size_t>(n_) * nvar));
      for (int q = 0; q < nf; ++q) {
        const double sgn = q < c.nfl ? 1.0 : -1.0;
        for (int j = 0; j < n_; ++j) {
          const size_t a = fp(it.cell[q], it.face[q], slot_point(it, q, j));
          const FaceNormal nn = face_normal(fpm_[a], it.face[q]);
          const State h = viscous_normal_flux(qc_[a], gf_[a], fm, nn.unit);
          for (int v = 0; v < nvar; ++v) flux[q][j * nvar + v] = sgn * h[v] * nn.mag;
        }
      }
      FaceField ml, mr, common;
      faces_to_mortars(c, it.cache, flux, true, nvar, ml);
      faces_to_mortars(c, it.cache, flux, false, nvar, mr);
      for (int k = 0; k < c.nm; ++k) {
        const double sl = it.cache.left[k].s, sr = it.cache.right[k].s;
        for (size_t i = 0; i < ml[k].size(); ++i) {
          const double vb = 0.5 * (sl * ml[k][i] + sr * mr[k][i]);
          it.mortar_flux[k][i] += vb;
        }
        // keep the breve viscous part alone for the back projection
        for (size_t i = 0; i < ml[k].size(); ++i) ml[k][i] = 0.5 * (sl * ml[k][i] + sr * mr[k][i]);
      }
      FaceField left, right;
      mortars_to_faces(c, it.cache, ml, true, nvar, false, left);
      mortars_to_faces(c, it.cache, ml, false, nvar, false, right);
      for (int q = 0; q < nf; ++q) {
        const bool inner = q < c.nfl;
        const std::vector<double>& src = inner ? left[q] : right[q];
        const double sgn = inner ? 1.0 : -1.0;
        for (int j = 0; j < n_; ++j) {
          const size_t a = fp(it.cell[q], it.face[q], slot_point(it, q, j));
          for (int v = 0; v < nvar; ++v) {
            it.face_flux[q][j * nvar + v] += src[j * nvar + v];
            fc_[a][v] += sgn * src[j * nvar + v];
          }
        }
      }
      it.last_defect = check_interface_conservation(*b_, c, it.face_flux, it.mortar_flux, nvar);
    } else {
      constexpr int ng = 2 * nvar;
      FaceField grad(nf, std::vector<double>(static_cast<size_t>(n_) * ng)), common;
      for (int q = 0; q < nf; ++q)
        for (int j = 0; j < n_; ++j) {
          const StateGradient& g = gf_[fp(it.cell[q], it.face[q], slot_point(it, q, j))];
          for (int v = 0; v < nvar; ++v) {
            grad[q][j * ng + v] = g.gx[v];
            grad[q][j * ng + nvar + v] = g.gy[v];
          }
        }
      viscous_exchange_gradient(c, it.cache, grad, ng, common);
      for (int q = 0; q < nf; ++q)
        for (int j = 0; j < n_; ++j) {
          const size_t a = fp(it.cell[q], it.face[q], slot_point(it, q, j));
          StateGradient g;
          for (int v = 0; v < nvar; ++v) {
            g.gx[v] = common[q][j * ng + v];
            g.gy[v] = common[q][j * ng + nvar + v];
          }
          const FaceNormal nn = face_normal(fpm_[a], it.face[q]);
          const State h = viscous_normal_flux(qc_[a], g, fm, nn.unit);
          for (int v = 0; v < nvar; ++v) fc_[a][v] += h[v] * nn.mag;
        }
      it.last_defect = check_interface_conservation(*b_, c, it.face_flux, it.mortar_flux, nvar);
    }
  }

  void assemble_residual(std::vector<double>& r) {
    const BasisSet& b = *b_;
    const int n = n_;
    const FluidModel& fm = opt_.fluid;
    const bool visc = fm.viscous();
    double worst_trace = 0.0;
#pragma omp parallel num_threads(opt_.threads) reduction(max : worst_trace)
    {
      std::vector<State> ft(np_), gt(np_);
#pragma omp for schedule(static)
      for (int e = 0; e < ne_; ++e) {
        for (int p = 0; p < np_; ++p) {
          const MetricState& m = spm_[sp(e, p)];
          const State& q = qsp_[sp(e, p)];
          State fx, gy;
          inviscid_flux(q, fm, fx, gy);
          if (visc) {
            State vx, vy;
            viscous_flux(q, gsp_[sp(e, p)], fm, vx, vy);
            for (int v = 0; v < nvar; ++v) {
              fx[v] += vx[v];
              gy[v] += vy[v];
            }
          }
          const double xt = -m.x_t * m.y_eta + m.y_t * m.x_eta;  // |J| xi_t
          const double et = m.x_t * m.y_xi - m.y_t * m.x_xi;     // |J| eta_t
          for (int v = 0; v < nvar; ++v) {
            ft[p][v] = xt * q[v] + m.y_eta * fx[v] - m.x_eta * gy[v];
            gt[p][v] = et * q[v] - m.y_xi * fx[v] + m.x_xi * gy[v];
          }
        }
        // jumps between common and interior outward flux on each face
        State d0[16], d1[16], d2[16], d3[16];
        for (int k = 0; k < n; ++k) {
          const State& g0 = gt[k];
          const State& f0 = ft[k * n];
          State t0 = g0, t1 = f0, t2 = g0, t3 = f0;
          for (int m = 0; m < n; ++m)
            for (int v = 0; v < nvar; ++v) {
              t0[v] += b.h0[m] * (gt[m * n + k][v] - g0[v]);
              t2[v] += b.h1[m] * (gt[m * n + k][v] - g0[v]);
              t1[v] += b.h1[m] * (ft[k * n + m][v] - f0[v]);
              t3[v] += b.h0[m] * (ft[k * n + m][v] - f0[v]);
            }
          for (int v = 0; v < nvar; ++v) {
            d0[k][v] = fc_[fp(e, 0, k)][v] + t0[v];
            d1[k][v] = fc_[fp(e, 1, k)][v] - t1[v];
            d2[k][v] = fc_[fp(e, 2, k)][v] - t2[v];
            d3[k][v] = fc_[fp(e, 3, k)][v] + t3[v];
          }
        }
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            double* out = &r[sp(e, j * n + i) * state_stride];
            for (int v = 0; v < nvar; ++v) {
              double div = 0.0;
              const double fi = ft[j * n + i][v], gi = gt[j * n + i][v];
              for (int m = 0; m < n; ++m)
                div += b.deriv(i, m) * (ft[j * n + m][v] - fi) + b.deriv(j, m) * (gt[m * n + i][v] - gi);
              div += -d3[j][v] * b.gl[i] + d1[j][v] * b.gr[i] - d0[i][v] * b.gl[j] + d2[i][v] * b.gr[j];
              out[v] = -div;
            }
          }
        // corrected flux traces equal the common flux: g_L(0) = 1, g_R(0) = 0
        for (int k = 0; k < n; ++k)
          for (int v = 0; v < nvar; ++v) {
            double tr = ft[k * n][v];
            for (int m = 0; m < n; ++m) tr += b.h1[m] * (ft[k * n + m][v] - ft[k * n][v]);
            worst_trace = std::max(worst_trace, std::abs(tr + d1[k][v] - fc_[fp(e, 1, k)][v]));
          }
      }
    }
    trace_defect_ = worst_trace;
  }

  // d|J|_num/dt = -(d(|J| xi_t)/dxi + d(|J| eta_t)/deta) with common values -v_g . N.
  void gcl_residual(std::vector<double>& r) {
    const BasisSet& b = *b_;
    const int n = n_;
    if (static_geometry_ || !opt_.numerical_jacobian) return;  // zero grid velocity, or |J| not integrated
#pragma omp parallel num_threads(opt_.threads)
    {
      std::vector<double> ft(np_), gt(np_);
#pragma omp for schedule(static)
      for (int e = 0; e < ne_; ++e) {
        for (int p = 0; p < np_; ++p) {
          const MetricState& m = spm_[sp(e, p)];
          ft[p] = -m.x_t * m.y_eta + m.y_t * m.x_eta;
          gt[p] = m.x_t * m.y_xi - m.y_t * m.x_xi;
        }
        double d[4][16];
        for (int f = 0; f < 4; ++f)
          for (int k = 0; k < n; ++k) {
            const MetricState& m = fpm_[fp(e, f, k)];
            const FaceNormal nn = face_normal(m, f);
            const double common = -(m.x_t * nn.big.x + m.y_t * nn.big.y);
            double tr = 0.0;
            const double g0 = gt[k], f0 = ft[k * n];
            switch (f) {
              case 0: tr = -g0; break;
              case 1: tr = f0; break;
              case 2: tr = g0; break;
              default: tr = -f0; break;
            }
            for (int q = 0; q < n; ++q) {
              switch (f) {
                case 0: tr -= b.h0[q] * (gt[q * n + k] - g0); break;
                case 1: tr += b.h1[q] * (ft[k * n + q] - f0); break;
                case 2: tr += b.h1[q] * (gt[q * n + k] - g0); break;
                default: tr -= b.h0[q] * (ft[k * n + q] - f0); break;
              }
            }
            d[f][k] = common - tr;
          }
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            double div = 0.0;
            const double fi = ft[j * n + i], gi = gt[j * n + i];
            for (int m = 0; m < n; ++m) div += b.deriv(i, m) * (ft[j * n + m] - fi) + b.deriv(j, m) * (gt[m * n + i] - gi);
            div += -d[3][j] * b.gl[i] + d[1][j] * b.gr[i] - d[0][i] * b.gl[j] + d[2][i] * b.gr[j];
            r[sp(e, j * n + i) * state_stride + nvar] = -div;
          }
      }
    }
  }

  SolverOptions opt_;
  AssembledMesh mesh_;
  const BasisSet* b_ = nullptr;
  int n_ = 0, np_ = 0, ne_ = 0;
  std::vector<ElementMap> maps_;
  std::vector<MapSample> sp0_, fp0_;
  std::vector<MetricState> spm_, fpm_;
  bool static_geometry_ = false, geometry_valid_ = false;
  double geometry_time_ = 0.0, last_time_ = 0.0;
  std::vector<FaceLink> links_;
  std::vector<const BoundaryCondition*> bface_bc_;
  std::vector<InterfaceRuntime> ifaces_;
  std::vector<State> qsp_, qf_, qc_, fc_;
  std::vector<StateGradient> gsp_, gf_;
  double trace_defect_ = 0.0;
};

}  // namespace sfr
