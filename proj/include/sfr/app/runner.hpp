#pragma once

// Run orchestration: case -> simulation -> time loop with snapshots, restarts,
// per-step forces and diagnostics, and a JSON manifest.
//
// Output directory layout (all names relative to output.dir):
//   manifest.json                 config echo, discretisation, outcome
//   snapshot_<step>.dat / .vtk    fields at the cadence, step 0 and the end
//   restart_<step>.dat            Q~, |J|_num and t
//   forces.csv                    every step, when the case has walls
//   conservation.csv              when diagnostics.conservation is on
//   mortar_<id>.csv               when diagnostics.mortar_dump is on
//   snapshot_last_good.dat        only after a numerical failure (with restart_last_good.dat)

#include <filesystem>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>

#include "sfr/app/config.hpp"
#include "sfr/app/output.hpp"

namespace sfr {

inline constexpr const char* sfr_version = "1.0.0";

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 numerical failure
  std::string message;
  double time = 0.0;
  long steps = 0;
  double dt = 0.0;
  std::vector<std::string> files;
};

namespace detail {

inline nlohmann::ordered_json tree_to_json(const boost::property_tree::ptree& t) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [section, body] : t) {
    if (section == "output") continue;  // paths differ between otherwise identical runs
    nlohmann::ordered_json s = nlohmann::ordered_json::object();
    for (const auto& [key, val] : body) s[key] = val.data();
    j[section] = s;
  }
  return j;
}

inline std::string step_name(const std::string& stem, long step, const std::string& ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(6) << std::setfill('0') << step << ext;
  return os.str();
}

}  // namespace detail

class Runner {
 public:
  // Everything that can be rejected is rejected here, before any file exists.
  explicit Runner(RunConfig cfg)
      : cfg_(std::move(cfg)), setup_(build_case(cfg_)), sim_(start_case(setup_)), dir_(cfg_.out_dir) {
    if (!cfg_.restart_file.empty()) {
      RestartData r = read_restart(cfg_.restart_file);
      if (r.p != setup_.solver.p || r.elements != sim_.solver().elements())
        throw ConfigError("restart file '" + cfg_.restart_file + "' was written for P=" + std::to_string(r.p) + " with " +
                          std::to_string(r.elements) + " elements");
      if (r.time > setup_.t_end) throw ConfigError("restart time lies beyond time.t_end");
      sim_.restore(std::move(r.state), r.time, r.step);
    }
    walls_ = cfg_.forces && !setup_.wall_tags.empty();
  }

  const CaseSetup& setup() const { return setup_; }
  Simulation& simulation() { return sim_; }

  RunResult run(std::ostream& log) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    RunResult res;
    res.dt = setup_.dt;
    write_manifest(res, "running");
    open_streams();
    log << "case " << setup_.name << ": P=" << setup_.solver.p << ", " << sim_.solver().elements() << " elements, "
        << setup_.scheme << ", dt=" << fmt17(setup_.dt) << ", t_end=" << fmt17(setup_.t_end) << '\n';

    dump_fields(res);
    diagnostics();
    std::vector<double> good = sim_.state();
    double good_t = sim_.time();
    long good_step = sim_.step();
    try {
      sim_.run_to(setup_.t_end, setup_.dt, [&](Simulation& s) {
        diagnostics();
        if (cfg_.snapshot_every > 0 && s.step() % cfg_.snapshot_every == 0 && s.time() < setup_.t_end) dump_fields(res);
        if (cfg_.restart_every > 0 && s.step() % cfg_.restart_every == 0 && s.time() < setup_.t_end) dump_restart(res);
        good = s.state();
        good_t = s.time();
        good_step = s.step();
      });
    } catch (const NumericalError& e) {
      flush_streams();
      sim_.restore(good, good_t, good_step);
      write_snapshot(file("snapshot_last_good.dat", res), take_snapshot(sim_));
      write_restart(file("restart_last_good.dat", res), sim_);
      res.exit_code = 1;
      res.message = e.what();
      res.time = good_t;
      res.steps = good_step;
      write_manifest(res, "diverged");
      log << "numerical failure: " << e.what() << "\nlast good state at t=" << fmt17(good_t) << " (step " << good_step
          << ") written to " << dir_.string() << '\n';
      return res;
    }
    if (sim_.step() > 0) dump_fields(res);
    dump_restart(res);
    flush_streams();
    res.time = sim_.time();
    res.steps = sim_.step();
    write_manifest(res, "completed");
    log << "completed t=" << fmt17(res.time) << " in " << res.steps << " steps; output in " << dir_.string() << '\n';
    return res;
  }

 private:
  std::string file(const std::string& name, RunResult& res) {
    if (std::find(res.files.begin(), res.files.end(), name) == res.files.end()) res.files.push_back(name);
    return (dir_ / name).string();
  }

  void dump_fields(RunResult& res) {
    write_snapshot(file(detail::step_name("snapshot", sim_.step(), ".dat"), res), take_snapshot(sim_));
    if (cfg_.vtk) write_vtk(file(detail::step_name("snapshot", sim_.step(), ".vtk"), res), sim_);
  }
  void dump_restart(RunResult& res) { write_restart(file(detail::step_name("restart", sim_.step(), ".dat"), res), sim_); }

  void open_streams() {
    auto open = [&](std::ofstream& os, const std::string& name, const std::string& header) {
      const std::string path = (dir_ / name).string();
      os.open(path, std::ios::binary);
      if (!os) throw IoError("cannot write '" + path + "'");
      os << header;
      stream_files_.push_back(name);
    };
    if (walls_) open(forces_, "forces.csv", "step,t,fx_pressure,fy_pressure,fx_viscous,fy_viscous,cd,cl\n");
    if (cfg_.conservation) open(cons_, "conservation.csv", "step,t,e_rho,e_rhou,e_rhov,e_energy,interface_defect\n");
    if (cfg_.mortar_dump)
      for (const auto& it : sim_.solver().interfaces()) {
        mortar_.emplace_back();
        open(mortar_.back(), "mortar_" + std::to_string(it.id) + ".csv", "");
      }
  }
  void flush_streams() {
    for (auto* os : {&forces_, &cons_}) if (os->is_open()) os->flush();
    for (auto& os : mortar_) os.flush();
  }

  // One residual at the step end serves forces, conservation and mortar data.
  void diagnostics() {
    const bool cons_now = cfg_.conservation && sim_.step() % cfg_.conservation_every == 0;
    if (!walls_ && !cons_now && !cfg_.mortar_dump) return;
    Solver& s = sim_.solver();
    s.residual(sim_.time(), sim_.state(), r_);
    const std::string t = fmt17(sim_.time());
    if (walls_) {
      const ForceResult f = s.forces_from_last(setup_.wall_tags);
      const Vec2 tot = f.total();
      forces_ << sim_.step() << ',' << t << ',' << fmt17(f.pressure.x) << ',' << fmt17(f.pressure.y) << ','
              << fmt17(f.viscous.x) << ',' << fmt17(f.viscous.y) << ',' << fmt17(tot.x * setup_.force_scale) << ','
              << fmt17(tot.y * setup_.force_scale) << '\n';
    }
    if (cons_now) {
      const State e = s.conservation_error_from(r_);
      cons_ << sim_.step() << ',' << t;
      for (double v : e) cons_ << ',' << fmt17(v);
      cons_ << ',' << fmt17(s.interface_defect()) << '\n';
    }
    if (cfg_.mortar_dump) {
      const auto& ifs = s.interfaces();
      for (size_t i = 0; i < ifs.size(); ++i)
        write_mortar_csv(mortar_[i], ifs[i].conn, sim_.time(), static_cast<int>(sim_.step()), ifs[i].last_defect,
                         outflow_residual(ifs[i].conn, ifs[i].cache), mortar_header_);
      mortar_header_ = false;
    }
  }

  void write_manifest(const RunResult& res, const std::string& status) {
    nlohmann::ordered_json j;
    j["program"] = "sfr";
    j["version"] = sfr_version;
    j["compiler"] = __VERSION__;
    j["config"] = detail::tree_to_json(cfg_.tree);
    const Solver& s = sim_.solver();
    j["case"] = setup_.name;
    j["degree"] = setup_.solver.p;
    j["elements"] = s.elements();
    j["solution_points"] = s.elements() * s.points_per_element();
    j["interfaces"] = s.interfaces().size();
    j["scheme"] = setup_.scheme;
    j["dt"] = setup_.dt;
    j["t_end"] = setup_.t_end;
    j["threads"] = setup_.solver.threads;
    j["gcl"] = setup_.solver.numerical_jacobian;
    j["restart_from"] = cfg_.restart_file;
    j["status"] = status;
    j["final_time"] = res.time;
    j["steps"] = res.steps;
    if (!res.message.empty()) j["message"] = res.message;
    std::vector<std::string> files = stream_files_;
    files.insert(files.end(), res.files.begin(), res.files.end());
    j["files"] = files;
    const std::string path = (dir_ / "manifest.json").string();
    auto os = detail::open_out(path);
    os << std::setw(2) << j << '\n';
    detail::close_checked(os, path);
  }

  RunConfig cfg_;
  CaseSetup setup_;
  Simulation sim_;
  std::filesystem::path dir_;
  bool walls_ = false;
  std::ofstream forces_, cons_;
  std::vector<std::ofstream> mortar_;
  bool mortar_header_ = true;
  std::vector<std::string> stream_files_;
  std::vector<double> r_;
};

}  // namespace sfr
