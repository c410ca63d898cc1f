#pragma once

// Dynamic mortars on a circular sliding interface: connectivity walk,
// scaling/offset, L2 projection operators and conservation checks.
//
// Faces are numbered 0..nfl-1 on the left (inner) side and nfl..nf-1 on the
// right (outer) side, each side counterclockwise. Mortar normals point from
// left to right, i.e. radially outward.

#include <ostream>
#include <string>
#include <vector>

#include "sfr/basis/basis.hpp"
#include "sfr/core/types.hpp"
#include "sfr/mesh/mesh.hpp"
#include "sfr/solver/physics.hpp"

namespace sfr {

inline constexpr double angle_tolerance = 1e-12;

// One side of the interface at a given time: face i runs from vertex[i] to
// vertex[(i+1) % n]; angle[i] is the polar angle of vertex[i].
struct InterfaceSideState {
  std::vector<int> vertex;
  std::vector<double> angle;
};

struct MortarConnectivity {
  int nfl = 0, nfr = 0, nf = 0, nm = 0;
  std::vector<std::array<int, 2>> vof;  // face -> (start vertex, end vertex)
  std::vector<std::array<int, 2>> mof;  // face -> (first mortar, mortar count)
  std::vector<std::array<int, 2>> fom;  // mortar -> (left face, right face)
  std::vector<std::array<int, 2>> vom;  // mortar -> (start vertex, end vertex)
  std::vector<double> face_theta1, face_theta2;      // unwrapped, theta2 > theta1
  std::vector<double> mortar_theta1, mortar_theta2;  // unwrapped, nondecreasing along the walk
  // scaling/offset of each mortar against its left and right face
  std::vector<double> s_left, o_left, s_right, o_right;

  double face_span(int f) const { return face_theta2[f] - face_theta1[f]; }
  double mortar_span(int k) const { return mortar_theta2[k] - mortar_theta1[k]; }
};

namespace detail {

// Is angle a within the counterclockwise span [b1, b1 + span] (tolerant, inclusive)?
inline bool lies_between(double a, double b1, double span) {
  const double d = wrap_angle(a - b1);
  return d <= span + angle_tolerance || d >= two_pi - angle_tolerance;
}

}  // namespace detail

// Algorithm 1: walk counterclockwise from the start of left face 0, emitting a
// mortar at every vertex of either side. Coincident vertices yield zero-length
// mortars so that nm = nf always.
inline MortarConnectivity update_connectivity(const InterfaceSideState& left, const InterfaceSideState& right) {
  MortarConnectivity c;
  c.nfl = static_cast<int>(left.vertex.size());
  c.nfr = static_cast<int>(right.vertex.size());
  if (c.nfl < 1 || c.nfr < 1) throw TopologyError("mortar update: empty interface side");
  c.nf = c.nfl + c.nfr;
  c.nm = c.nf;
  c.vof.resize(c.nf);
  c.mof.assign(c.nf, {-1, 0});
  c.fom.assign(c.nm, {-1, -1});
  c.vom.assign(c.nm, {-1, -1});

  std::vector<double> raw(c.nf), span(c.nf);
  auto fill = [&](const InterfaceSideState& s, int off) {
    const int n = static_cast<int>(s.vertex.size());
    for (int i = 0; i < n; ++i) {
      c.vof[off + i] = {s.vertex[i], s.vertex[(i + 1) % n]};
      raw[off + i] = s.angle[i];
      span[off + i] = n == 1 ? two_pi : wrap_angle(s.angle[(i + 1) % n] - s.angle[i]);
      if (!(span[off + i] > 0.0)) throw GeometryError("mortar update: zero-length interface face " + std::to_string(off + i));
    }
  };
  fill(left, 0);
  fill(right, c.nfl);
  auto start_angle = [&](int f) { return raw[f]; };
  auto end_angle = [&](int f) { return raw[f] + span[f]; };

  int ifl = 0, ifr = -1;
  for (int f = c.nfl; f < c.nf; ++f)
    if (detail::lies_between(start_angle(0), raw[f], span[f])) {
      ifr = f;
      break;
    }
  if (ifr < 0) throw GeometryError("mortar update: interface misalignment, no right face contains the first left vertex");

  const double seam = raw[0];
  std::vector<double> a(c.nm + 1);
  a[0] = seam;
  c.mof[ifl][0] = 0;
  c.mof[ifl][1] = 1;
  c.mof[ifr][1] = 1;
  c.fom[0] = {ifl, ifr};
  c.vom[0][0] = c.vof[ifl][0];
  for (int im = 1; im < c.nm; ++im) {
    int ifa;
    // the last left face closes the loop, so only right faces advance after it
    if (ifl < c.nfl - 1 && detail::lies_between(end_angle(ifl), raw[ifr], span[ifr])) {
      ++ifl;
      ifa = ifl;
    } else {
      ++ifr;
      if (ifr >= c.nf) ifr -= c.nfr;
      ifa = ifr;
    }
    if (ifl >= c.nfl) throw TopologyError("mortar update: left face index out of range");
    c.mof[ifa][0] = im;
    c.mof[ifl][1] += 1;
    c.mof[ifr][1] += 1;
    c.fom[im] = {ifl, ifr};
    c.vom[im][0] = c.vof[ifa][0];
    c.vom[im - 1][1] = c.vof[ifa][0];
    const double prev = a[im - 1];
    double next = prev + wrap_angle(raw[ifa] - prev + angle_tolerance) - angle_tolerance;
    if (next < prev) next = prev;
    a[im] = std::min(next, seam + two_pi);
  }
  c.vom[c.nm - 1][1] = c.vom[0][0];
  a[c.nm] = seam + two_pi;

  c.mortar_theta1.assign(a.begin(), a.end() - 1);
  c.mortar_theta2.assign(a.begin() + 1, a.end());

  // face angles unwrapped onto the branch holding their first mortar
  c.face_theta1.resize(c.nf);
  c.face_theta2.resize(c.nf);
  for (int f = 0; f < c.nf; ++f) {
    if (c.mof[f][0] < 0) throw TopologyError("mortar update: face " + std::to_string(f) + " received no mortar");
    const double m1 = c.mortar_theta1[c.mof[f][0]];
    double t1 = m1 - wrap_angle(m1 - raw[f] + angle_tolerance) + angle_tolerance;
    if (t1 > m1) t1 = m1;
    c.face_theta1[f] = t1;
    c.face_theta2[f] = t1 + span[f];
  }

  // scaling and offsets: walk each face's mortars cyclically from its first
  c.s_left.assign(c.nm, 0.0);
  c.o_left.assign(c.nm, 0.0);
  c.s_right.assign(c.nm, 0.0);
  c.o_right.assign(c.nm, 0.0);
  for (int f = 0; f < c.nf; ++f) {
    const bool is_left = f < c.nfl;
    double o = 0.0;
    for (int j = 0; j < c.mof[f][1]; ++j) {
      const int k = (c.mof[f][0] + j) % c.nm;
      if (c.fom[k][is_left ? 0 : 1] != f) throw TopologyError("mortar update: face mortars are not contiguous");
      const double s = c.mortar_span(k) / span[f];
      (is_left ? c.s_left : c.s_right)[k] = s;
      (is_left ? c.o_left : c.o_right)[k] = o;
      o += s;
    }
  }
  return c;
}

// (s_k, o_k) of mortar k against face f.
inline std::pair<double, double> scaling_offset(const MortarConnectivity& c, int f, int k) {
  if (c.fom[k][0] == f) return {c.s_left[k], c.o_left[k]};
  if (c.fom[k][1] == f) return {c.s_right[k], c.o_right[k]};
  throw TopologyError("scaling_offset: mortar " + std::to_string(k) + " does not belong to face " + std::to_string(f));
}

// ----------------------------------------------------------------- projections

// Dense row-major n x n matrix.
struct SmallMatrix {
  int n = 0;
  std::vector<double> a;
  SmallMatrix() = default;
  explicit SmallMatrix(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}
  double& operator()(int r, int c) { return a[static_cast<size_t>(r) * n + c]; }
  double operator()(int r, int c) const { return a[static_cast<size_t>(r) * n + c]; }
};

// S_ij = int_0^1 h_i(o + s z) h_j(z) dz by the N-point Gauss rule.
inline SmallMatrix s_matrix(const BasisSet& b, double s, double o) {
  SmallMatrix m(b.n);
  std::vector<double> hi(b.n);
  for (int q = 0; q < b.n; ++q) {
    lagrange_row(b, o + s * b.x[q], hi.data());
    for (int i = 0; i < b.n; ++i)
      for (int j = 0; j < b.n; ++j) m(i, j) += b.w[q] * hi[i] * (j == q ? 1.0 : 0.0);
  }
  return m;
}

// Projectors between one face and one of its mortars.
struct MortarProjector {
  double s = 0.0, o = 0.0;
  SmallMatrix forward;  // mortar[j] = sum_i forward(j,i) face[i]          (M^-1 S)
  SmallMatrix back;     // face[i] += sum_j back(i,j) mortar[j], no s factor (M^-1 S^T)
};

inline MortarProjector make_projector(const BasisSet& b, double s, double o) {
  MortarProjector p;
  p.s = s;
  p.o = o;
  const SmallMatrix sm = s_matrix(b, s, o);
  p.forward = SmallMatrix(b.n);
  p.back = SmallMatrix(b.n);
  for (int i = 0; i < b.n; ++i)
    for (int j = 0; j < b.n; ++j) {
      p.forward(j, i) = sm(i, j) / b.w[j];
      p.back(i, j) = sm(i, j) / b.w[i];
    }
  return p;
}

// Per-update cache: diagonal mass matrix and one projector per (mortar, side).
struct ProjectionCache {
  std::vector<double> mass;  // M_ii = w_i
  std::vector<MortarProjector> left, right;
};

inline ProjectionCache build_projection_cache(const BasisSet& b, const MortarConnectivity& c) {
  ProjectionCache pc;
  pc.mass = b.w;
  pc.left.reserve(c.nm);
  pc.right.reserve(c.nm);
  for (int k = 0; k < c.nm; ++k) {
    pc.left.push_back(make_projector(b, c.s_left[k], c.o_left[k]));
    pc.right.push_back(make_projector(b, c.s_right[k], c.o_right[k]));
  }
  return pc;
}

// Values are stored point-major with nc components per point.
inline void project_to_mortar(const SmallMatrix& forward, const double* face, double* mortar, int nc, double scale = 1.0) {
  const int n = forward.n;
  for (int j = 0; j < n; ++j)
    for (int c = 0; c < nc; ++c) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) v += forward(j, i) * face[i * nc + c];
      mortar[j * nc + c] = scale * v;
    }
}

// face += scale * back * mortar. Method 1 uses scale = s_k; method 2 (breve
// fluxes already carrying the mortar length) uses scale = 1.
inline void project_back_add(const SmallMatrix& back, const double* mortar, double* face, int nc, double scale) {
  const int n = back.n;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < nc; ++c) {
      double v = 0.0;
      for (int j = 0; j < n; ++j) v += back(i, j) * mortar[j * nc + c];
      face[i * nc + c] += scale * v;
    }
}

inline void mortar_common_solution(const double* l, const double* r, double* out, int count) {
  for (int i = 0; i < count; ++i) out[i] = 0.5 * (l[i] + r[i]);
}

inline State mortar_common_inviscid_flux(const State& ql, const State& qr, Vec2 n, double vgn, const FluidModel& f,
                                         int mortar, SoundSpeedPolicy policy = SoundSpeedPolicy::average_state) {
  require_admissible(ql, f, "mortar " + std::to_string(mortar) + " (left)");
  require_admissible(qr, f, "mortar " + std::to_string(mortar) + " (right)");
  return rusanov(ql, qr, n, vgn, f, policy);
}

// max |sum_k back_k forward_k - I| over the faces of one side.
inline double outflow_residual(const MortarConnectivity& c, const ProjectionCache& pc) {
  const int n = pc.mass.empty() ? 0 : static_cast<int>(pc.mass.size());
  double worst = 0.0;
  for (int f = 0; f < c.nf; ++f) {
    const bool is_left = f < c.nfl;
    SmallMatrix sum(n);
    for (int j = 0; j < c.mof[f][1]; ++j) {
      const int k = (c.mof[f][0] + j) % c.nm;
      const MortarProjector& p = is_left ? pc.left[k] : pc.right[k];
      for (int r = 0; r < n; ++r)
        for (int q = 0; q < n; ++q) {
          double v = 0.0;
          for (int m = 0; m < n; ++m) v += p.back(r, m) * p.forward(m, q);
          sum(r, q) += p.s * v;
        }
    }
    for (int r = 0; r < n; ++r)
      for (int q = 0; q < n; ++q) worst = std::max(worst, std::abs(sum(r, q) - (r == q ? 1.0 : 0.0)));
  }
  return worst;
}

// |int F_face dxi - sum_k int F_breve_k dz| for one face and one component.
inline double face_conservation_defect(const BasisSet& b, const double* face_flux, const std::vector<const double*>& mortar_flux,
                                       int nc, int comp) {
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < b.n; ++i) lhs += b.w[i] * face_flux[i * nc + comp];
  for (const double* m : mortar_flux)
    for (int i = 0; i < b.n; ++i) rhs += b.w[i] * m[i * nc + comp];
  return std::abs(lhs - rhs);
}

// ------------------------------------------------------------- interface exchange
//
// Face data are stored per interface face (left faces 0..nfl-1, right faces
// nfl..nf-1) with N points ordered counterclockwise about the interface center
// and nc components per point.

using FaceField = std::vector<std::vector<double>>;

// Project every face of one side onto its mortars: out[k] = P^{face->k} face.
inline void faces_to_mortars(const MortarConnectivity& c, const ProjectionCache& pc, const FaceField& faces, bool left_side,
                             int nc, FaceField& out) {
  const int n = static_cast<int>(pc.mass.size());
  out.resize(c.nm);
  for (int k = 0; k < c.nm; ++k) {
    const int f = c.fom[k][left_side ? 0 : 1];
    out[k].assign(static_cast<size_t>(n) * nc, 0.0);
    project_to_mortar((left_side ? pc.left : pc.right)[k].forward, faces[f].data(), out[k].data(), nc);
  }
}

// Rebuild face data of one side from mortar data. with_scaling applies s_k
// (method 1, mortar values per unit mortar length); without it the mortar data
// must already carry the mortar length (method 2, breve quantities).
inline void mortars_to_faces(const MortarConnectivity& c, const ProjectionCache& pc, const FaceField& mortars, bool left_side,
                             int nc, bool with_scaling, FaceField& faces) {
  const int n = static_cast<int>(pc.mass.size());
  faces.resize(c.nf);
  const int f0 = left_side ? 0 : c.nfl, f1 = left_side ? c.nfl : c.nf;
  for (int f = f0; f < f1; ++f) {
    faces[f].assign(static_cast<size_t>(n) * nc, 0.0);
    for (int j = 0; j < c.mof[f][1]; ++j) {
      const int k = (c.mof[f][0] + j) % c.nm;
      const MortarProjector& p = (left_side ? pc.left : pc.right)[k];
      if (p.s == 0.0) continue;  // degenerate mortars carry no weight
      project_back_add(p.back, mortars[k].data(), faces[f].data(), nc, with_scaling ? p.s : 1.0);
    }
  }
}

// Common solution on the faces of both sides: project, average, project back.
inline void exchange_common_solution(const MortarConnectivity& c, const ProjectionCache& pc, const FaceField& faces, int nc,
                                     FaceField& common) {
  FaceField ml, mr;
  faces_to_mortars(c, pc, faces, true, nc, ml);
  faces_to_mortars(c, pc, faces, false, nc, mr);
  for (int k = 0; k < c.nm; ++k) mortar_common_solution(ml[k].data(), mr[k].data(), ml[k].data(), static_cast<int>(ml[k].size()));
  FaceField a, b;
  mortars_to_faces(c, pc, ml, true, nc, true, a);
  mortars_to_faces(c, pc, ml, false, nc, true, b);
  common.resize(c.nf);
  for (int f = 0; f < c.nf; ++f) common[f] = f < c.nfl ? std::move(a[f]) : std::move(b[f]);
}

enum class ViscousExchange { gradient_projection, flux_projection };

inline ViscousExchange parse_viscous_exchange(const std::string& s) {
  if (s == "gradient" || s == "method1") return ViscousExchange::gradient_projection;
  if (s == "flux" || s == "method2") return ViscousExchange::flux_projection;
  throw ConfigError("unknown viscous exchange method '" + s + "'");
}

// Method 2: face viscous fluxes, already scaled by the face normal magnitude
// and oriented along the mortar normal (left to right) on both sides, are
// projected with s_k, averaged and projected back. Returns the common oriented
// flux on every face.
inline void viscous_exchange_flux(const MortarConnectivity& c, const ProjectionCache& pc, const FaceField& face_flux, int nc,
                                  FaceField& common) {
  FaceField ml, mr;
  faces_to_mortars(c, pc, face_flux, true, nc, ml);
  faces_to_mortars(c, pc, face_flux, false, nc, mr);
  for (int k = 0; k < c.nm; ++k) {
    const double sl = pc.left[k].s, sr = pc.right[k].s;
    for (size_t i = 0; i < ml[k].size(); ++i) ml[k][i] = 0.5 * (sl * ml[k][i] + sr * mr[k][i]);
  }
  FaceField a, b;
  mortars_to_faces(c, pc, ml, true, nc, false, a);
  mortars_to_faces(c, pc, ml, false, nc, false, b);
  common.resize(c.nf);
  for (int f = 0; f < c.nf; ++f) {
    // breve fluxes carry L^Xi = s L^Omega; back on the face this is per L^Omega
    common[f] = f < c.nfl ? std::move(a[f]) : std::move(b[f]);
  }
}

// Method 1: face gradients are projected, averaged and projected back; the
// caller evaluates the viscous flux with the common gradient on each face.
inline void viscous_exchange_gradient(const MortarConnectivity& c, const ProjectionCache& pc, const FaceField& face_grad,
                                      int nc, FaceField& common) {
  exchange_common_solution(c, pc, face_grad, nc, common);
}

// max over faces and components of |int F^Omega dxi - sum_k int F_breve^k dz|.
inline double check_interface_conservation(const BasisSet& b, const MortarConnectivity& c, const FaceField& face_flux,
                                           const FaceField& mortar_flux, int nc) {
  double worst = 0.0;
  for (int f = 0; f < c.nf; ++f) {
    std::vector<const double*> ms;
    for (int j = 0; j < c.mof[f][1]; ++j) ms.push_back(mortar_flux[(c.mof[f][0] + j) % c.nm].data());
    for (int comp = 0; comp < nc; ++comp)
      worst = std::max(worst, face_conservation_defect(b, face_flux[f].data(), ms, nc, comp));
  }
  return worst;
}

// Per-mortar diagnostic table.
inline void write_mortar_csv(std::ostream& os, const MortarConnectivity& c, double t, int stage, double defect, double outflow,
                             bool header = true) {
  if (header) os << "time,stage,nm,mortar,left_face,right_face,s_left,o_left,s_right,o_right,theta1,theta2,defect,outflow\n";
  for (int k = 0; k < c.nm; ++k) {
    os << format_double(t) << ',' << stage << ',' << c.nm << ',' << k << ',' << c.fom[k][0] << ',' << c.fom[k][1] << ','
       << format_double(c.s_left[k]) << ',' << format_double(c.o_left[k]) << ',' << format_double(c.s_right[k]) << ','
       << format_double(c.o_right[k]) << ',' << format_double(c.mortar_theta1[k]) << ','
       << format_double(c.mortar_theta2[k]) << ',' << format_double(defect) << ',' << format_double(outflow) << '\n';
  }
}

}  // namespace sfr
