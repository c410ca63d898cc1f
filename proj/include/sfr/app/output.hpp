#pragma once

// Field snapshots (columnar text and legacy VTK) and restart files.

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sfr/app/simulation.hpp"

namespace sfr {

struct IoError : Error {
  using Error::Error;
};

// %.17g round-trips every double through strtod.
inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {
inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path + "'");
  return os;
}
inline void close_checked(std::ofstream& os, const std::string& path) {
  os.close();
  if (!os) throw IoError("write failed for '" + path + "'");
}
}  // namespace detail

struct Snapshot {
  double time = 0.0;
  long step = 0;
  std::vector<std::array<double, 6>> rows;  // x y rho u v p
};

// One row per solution point, ordered by element id then point index.
inline Snapshot take_snapshot(Simulation& sim) {
  Solver& s = sim.solver();
  s.update_geometry(sim.time());
  Snapshot snap;
  snap.time = sim.time();
  snap.step = sim.step();
  const FluidModel& f = s.options().fluid;
  const auto states = sim.physical_states();
  for (int e = 0; e < s.elements(); ++e)
    for (int p = 0; p < s.points_per_element(); ++p) {
      const Vec2 x = s.sp_metric(e, p).x;
      const Primitive w = to_primitive(states[s.sp(e, p)], f);
      snap.rows.push_back({x.x, x.y, w.rho, w.u, w.v, w.p});
    }
  return snap;
}

inline void write_snapshot(const std::string& path, const Snapshot& snap) {
  auto os = detail::open_out(path);
  os << "# t " << fmt17(snap.time) << "\n# step " << snap.step << "\n# x y rho u v p\n";
  for (const auto& r : snap.rows) {
    for (int k = 0; k < 6; ++k) os << fmt17(r[k]) << (k < 5 ? ' ' : '\n');
  }
  detail::close_checked(os, path);
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read '" + path + "'");
  Snapshot snap;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "t") ls >> snap.time;
      else if (key == "step") ls >> snap.step;
      continue;
    }
    std::array<double, 6> r{};
    for (double& v : r) {
      std::string tok;
      if (!(ls >> tok)) throw ParseError(path + ":" + std::to_string(lineno) + ": expected 6 columns");
      v = std::strtod(tok.c_str(), nullptr);
    }
    snap.rows.push_back(r);
  }
  return snap;
}

// Legacy VTK unstructured grid: every element split into (N-1)^2 quads
// through its solution points (vertex cells when N = 1).
inline void write_vtk(const std::string& path, Simulation& sim) {
  Solver& s = sim.solver();
  const Snapshot snap = take_snapshot(sim);
  const int n = s.n(), np = s.points_per_element(), ne = s.elements();
  auto os = detail::open_out(path);
  os << "# vtk DataFile Version 3.0\nsfr t=" << fmt17(sim.time()) << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << snap.rows.size() << " double\n";
  for (const auto& r : snap.rows) os << fmt17(r[0]) << ' ' << fmt17(r[1]) << " 0\n";
  const int sub = n > 1 ? (n - 1) * (n - 1) : 1;
  const int per = n > 1 ? 5 : 2;
  os << "CELLS " << ne * sub << ' ' << ne * sub * per << '\n';
  for (int e = 0; e < ne; ++e) {
    const long base = static_cast<long>(e) * np;
    if (n == 1) {
      os << "1 " << base << '\n';
      continue;
    }
    for (int j = 0; j + 1 < n; ++j)
      for (int i = 0; i + 1 < n; ++i)
        os << "4 " << base + j * n + i << ' ' << base + j * n + i + 1 << ' ' << base + (j + 1) * n + i + 1 << ' '
           << base + (j + 1) * n + i << '\n';
  }
  os << "CELL_TYPES " << ne * sub << '\n';
  for (int c = 0; c < ne * sub; ++c) os << (n > 1 ? 9 : 1) << '\n';
  os << "POINT_DATA " << snap.rows.size() << '\n';
  for (auto [name, k] : {std::pair{"rho", 2}, std::pair{"p", 5}}) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (const auto& r : snap.rows) os << fmt17(r[k]) << '\n';
  }
  os << "VECTORS velocity double\n";
  for (const auto& r : snap.rows) os << fmt17(r[3]) << ' ' << fmt17(r[4]) << " 0\n";
  detail::close_checked(os, path);
}

// Restart carries Q~, |J|_num and t; interface connectivity is rebuilt from t.
struct RestartData {
  double time = 0.0;
  long step = 0;
  int p = 0, elements = 0;
  std::vector<double> state;
};

inline void write_restart(const std::string& path, const Simulation& sim) {
  auto os = detail::open_out(path);
  const Solver& s = sim.solver();
  os << "sfr-restart 1\n"
     << "t " << fmt17(sim.time()) << "\nstep " << sim.step() << "\np " << s.options().p << "\nelements "
     << s.elements() << "\nvalues " << sim.state().size() << '\n';
  for (double v : sim.state()) os << fmt17(v) << '\n';
  detail::close_checked(os, path);
}

inline RestartData read_restart(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read restart file '" + path + "'");
  RestartData r;
  std::string magic, key, tok;
  int version = 0;
  size_t count = 0;
  is >> magic >> version;
  if (magic != "sfr-restart" || version != 1) throw ParseError(path + ": not a restart file");
  auto expect = [&](const char* name) {
    if (!(is >> key) || key != name) throw ParseError(path + ": expected '" + std::string(name) + "'");
  };
  expect("t");
  is >> tok;
  r.time = std::strtod(tok.c_str(), nullptr);
  expect("step");
  is >> r.step;
  expect("p");
  is >> r.p;
  expect("elements");
  is >> r.elements;
  expect("values");
  is >> count;
  r.state.resize(count);
  for (size_t i = 0; i < count; ++i) {
    if (!(is >> tok)) throw ParseError(path + ": truncated after " + std::to_string(i) + " values");
    r.state[i] = std::strtod(tok.c_str(), nullptr);
  }
  return r;
}

}  // namespace sfr
