#pragma once

// Run configuration: a flat key = value file grouped in [sections].
//
//   # comment lines start with '#' or ';'
//   [case]         name, p, omega, viscous_exchange
//   [mesh]         files (comma separated), omega.<i> (per-subdomain angular speed)
//   [time]         scheme, dt (0 = from cfl), cfl, t_end
//   [fluid]        mach, reynolds, prandtl, gamma
//   [boundary]     <tag> = dirichlet | noslip_isothermal | noslip_adiabatic | characteristic_farfield
//   [output]       dir, snapshot_every, restart_every, vtk, forces
//   [diagnostics]  conservation, conservation_every, mortar_dump, gcl
//   [run]          threads, restart
//
// Unknown sections or keys are rejected so typos never pass silently.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sfr/verify/cases.hpp"

namespace sfr {

struct RunConfig {
  std::string case_name;
  CaseOptions options;
  std::vector<std::string> mesh_files;
  std::map<int, double> subdomain_omega;
  std::map<std::string, BcKind> boundary;

  std::string out_dir = "out";
  int snapshot_every = 0;  // steps; 0: initial and final only
  int restart_every = 0;   // steps; 0: final only
  bool vtk = true;
  bool forces = true;  // when the case has wall tags

  bool conservation = false;
  int conservation_every = 1;
  bool mortar_dump = false;
  bool gcl = true;

  std::string restart_file;

  boost::property_tree::ptree tree;  // everything as read, for the manifest
};

namespace detail {

inline const std::map<std::string, std::vector<std::string>>& config_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"case", {"name", "p", "omega", "viscous_exchange"}},
      {"mesh", {"files"}},
      {"time", {"scheme", "dt", "cfl", "t_end"}},
      {"fluid", {"mach", "reynolds", "prandtl", "gamma"}},
      {"boundary", {}},
      {"output", {"dir", "snapshot_every", "restart_every", "vtk", "forces"}},
      {"diagnostics", {"conservation", "conservation_every", "mortar_dump", "gcl"}},
      {"run", {"threads", "restart"}},
  };
  return keys;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (...) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

inline int to_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long i = std::stol(v, &used);
    if (trim(v.substr(used)).empty()) return static_cast<int>(i);
  } catch (...) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError(key + ": expected true/false (or on/off), got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

}  // namespace detail

// Applies "section.key=value".
inline void apply_override(boost::property_tree::ptree& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("override must look like section.key=value: '" + assignment + "'");
  const std::string section = detail::trim(assignment.substr(0, dot));
  const std::string key = detail::trim(assignment.substr(dot + 1, eq - dot - 1));
  tree.put_child(boost::property_tree::ptree::path_type(section + "|" + key, '|'),
                 boost::property_tree::ptree(detail::trim(assignment.substr(eq + 1))));
}

// Validates the tree and fills a RunConfig; nothing touches the file system.
inline RunConfig config_from_tree(const boost::property_tree::ptree& tree) {
  RunConfig c;
  c.tree = tree;
  const auto& keys = detail::config_keys();
  for (const auto& [section, body] : tree) {
    auto it = keys.find(section);
    if (it == keys.end()) throw ConfigError("unknown config section [" + section + "]");
    if (!body.data().empty() && body.empty()) throw ConfigError("key '" + section + "' must live in a section");
    for (const auto& [key, val] : body) {
      const std::string full = section + "." + key;
      const std::string v = detail::trim(val.data());
      const auto& allowed = it->second;
      if (section == "boundary") {
        c.boundary[key] = parse_bc_kind(v);
        continue;
      }
      if (section == "mesh" && key.rfind("omega.", 0) == 0) {
        c.subdomain_omega[detail::to_int(full, key.substr(6))] = detail::to_double(full, v);
        continue;
      }
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw ConfigError("unknown config key '" + full + "'");
      CaseOptions& o = c.options;
      if (full == "case.name") c.case_name = v;
      else if (full == "case.p") o.p = detail::to_int(full, v);
      else if (full == "case.omega") o.omega = detail::to_double(full, v);
      else if (full == "case.viscous_exchange") o.viscous_exchange = parse_viscous_exchange(v);
      else if (full == "mesh.files") c.mesh_files = detail::split_list(v);
      else if (full == "time.scheme") o.scheme = v;
      else if (full == "time.dt") o.dt = detail::to_double(full, v);
      else if (full == "time.cfl") o.cfl = detail::to_double(full, v);
      else if (full == "time.t_end") o.t_end = detail::to_double(full, v);
      else if (full == "fluid.mach") o.mach = detail::to_double(full, v);
      else if (full == "fluid.reynolds") o.reynolds = detail::to_double(full, v);
      else if (full == "fluid.prandtl") o.prandtl = detail::to_double(full, v);
      else if (full == "fluid.gamma") o.gamma = detail::to_double(full, v);
      else if (full == "output.dir") c.out_dir = v;
      else if (full == "output.snapshot_every") c.snapshot_every = detail::to_int(full, v);
      else if (full == "output.restart_every") c.restart_every = detail::to_int(full, v);
      else if (full == "output.vtk") c.vtk = detail::to_bool(full, v);
      else if (full == "output.forces") c.forces = detail::to_bool(full, v);
      else if (full == "diagnostics.conservation") c.conservation = detail::to_bool(full, v);
      else if (full == "diagnostics.conservation_every") c.conservation_every = detail::to_int(full, v);
      else if (full == "diagnostics.mortar_dump") c.mortar_dump = detail::to_bool(full, v);
      else if (full == "diagnostics.gcl") c.gcl = detail::to_bool(full, v);
      else if (full == "run.threads") o.threads = detail::to_int(full, v);
      else if (full == "run.restart") c.restart_file = v;
    }
  }
  if (c.case_name.empty()) throw ConfigError("case.name is required (one of the built-in cases)");
  if (std::find(case_names().begin(), case_names().end(), c.case_name) == case_names().end())
    throw ConfigError("unknown case '" + c.case_name + "'");
  const CaseOptions& o = c.options;
  if (o.p < 1) throw ConfigError("case.p must be >= 1");
  if (o.dt < 0.0) throw ConfigError("time.dt must be positive (0 selects it from time.cfl)");
  if (o.cfl < 0.0) throw ConfigError("time.cfl must be positive");
  if (tree.get_child_optional("time.t_end") && o.t_end < 0.0) throw ConfigError("time.t_end must be >= 0");
  if (o.threads < 1) throw ConfigError("run.threads must be >= 1");
  if (c.snapshot_every < 0 || c.restart_every < 0) throw ConfigError("output cadences must be >= 0");
  if (c.conservation_every < 1) throw ConfigError("diagnostics.conservation_every must be >= 1");
  if (!o.scheme.empty()) make_scheme(o.scheme);
  if (c.out_dir.empty()) throw ConfigError("output.dir must not be empty");
  return c;
}

inline boost::property_tree::ptree parse_config_tree(std::istream& is, const std::string& name = "<config>") {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(name + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return tree;
}

inline RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {}) {
  std::istringstream is(text);
  auto tree = parse_config_tree(is);
  for (const auto& o : overrides) apply_override(tree, o);
  return config_from_tree(tree);
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  auto tree = parse_config_tree(is, path);
  for (const auto& o : overrides) apply_override(tree, o);
  return config_from_tree(tree);
}

// Case setup with the mesh, rotation, boundary and GCL settings of the config applied.
inline CaseSetup build_case(const RunConfig& cfg) {
  CaseSetup c = make_case(cfg.case_name, cfg.options);
  bool rebuild = false;
  if (!cfg.mesh_files.empty()) {
    c.subdomains.clear();
    for (const auto& f : cfg.mesh_files) c.subdomains.push_back(read_subdomain(f));
    rebuild = true;
  }
  for (const auto& [i, w] : cfg.subdomain_omega) {
    if (i < 0 || i >= static_cast<int>(c.subdomains.size()))
      throw ConfigError("mesh.omega." + std::to_string(i) + ": no such subdomain (have " +
                        std::to_string(c.subdomains.size()) + ")");
    c.subdomains[i].rotation.omega = w;
    rebuild = true;
  }
  if (rebuild) c.mesh = build_mesh(c.subdomains);
  for (const auto& [tag, kind] : cfg.boundary) {
    BoundaryCondition& bc = c.solver.boundary[tag];
    bc.kind = kind;
    const bool needs_data = kind == BcKind::dirichlet || kind == BcKind::characteristic_farfield;
    if (needs_data && !bc.data) {
      if (c.exact) bc.data = c.exact->function();
      else throw ConfigError("boundary." + tag + ": this case has no data for a " + std::string(kind == BcKind::dirichlet ? "dirichlet" : "far-field") + " boundary");
    }
  }
  c.solver.numerical_jacobian = cfg.gcl;
  return c;
}

}  // namespace sfr
