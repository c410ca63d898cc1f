// sfr: command-line front end.
//
//   sfr run [CONFIG] [--case NAME] [--set section.key=value]... [--threads N] [--out DIR]
//   sfr generate-mesh --case NAME [--omega W] [--out DIR]
//   sfr verify [--criterion N]...
//   sfr study spatial|temporal|conservation|freestream|mapping [options]
//
// Exit codes: 0 ok, 1 numerical failure (or a failed acceptance criterion), 2 configuration error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "sfr/app/acceptance.hpp"

using namespace sfr;

namespace {

constexpr int exit_ok = 0, exit_numerical = 1, exit_config = 2;

// CSV sink: --out FILE or stdout.
struct Csv {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Csv(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw IoError("cannot write '" + path + "'");
    os = &file;
  }
  std::ostream& operator*() { return *os; }
};

int cmd_run(const std::string& config, const std::string& case_name, const std::vector<std::string>& sets, int threads,
            const std::string& out) {
  std::vector<std::string> overrides = sets;
  if (!case_name.empty()) overrides.insert(overrides.begin(), "case.name=" + case_name);
  if (threads > 0) overrides.push_back("run.threads=" + std::to_string(threads));
  if (!out.empty()) overrides.push_back("output.dir=" + out);
  const RunConfig cfg = config.empty() ? parse_config("", overrides) : load_config(config, overrides);
  Runner runner(cfg);
  return runner.run(std::cout).exit_code;
}

int cmd_generate_mesh(const std::string& case_name, double omega, const std::string& out) {
  CaseOptions o;
  o.omega = omega;
  const CaseSetup c = make_case(case_name, o);
  std::filesystem::create_directories(out);
  for (size_t i = 0; i < c.subdomains.size(); ++i) {
    const std::string path = (std::filesystem::path(out) / (case_name + "_" + std::to_string(i) + ".mesh")).string();
    write_subdomain(path, c.subdomains[i]);
    std::cout << path << ": " << c.subdomains[i].cells.size() << " cells, " << c.subdomains[i].vertices.size()
              << " vertices, omega " << c.subdomains[i].rotation.omega << '\n';
  }
  std::cout << c.mesh.cells.size() << " cells in total, " << c.mesh.interfaces.size() << " sliding interface(s)\n";
  return exit_ok;
}

int cmd_verify(std::vector<int> ids) {
  if (ids.empty())
    for (int i = 1; i <= 10; ++i) ids.push_back(i);
  bool all = true;
  std::vector<std::string> lines;
  for (int id : ids) {
    std::cout << "criterion " << id << " ...\n" << std::flush;
    const CriterionOutcome o = run_criterion(id, std::cout);
    lines.push_back(outcome_line(o));
    std::cout << lines.back() << '\n' << std::flush;
    all = all && o.pass;
  }
  std::cout << "\nsummary\n";
  for (const auto& l : lines) std::cout << l << '\n';
  return all ? exit_ok : exit_numerical;
}

struct StudyArgs {
  std::string kind, case_name = "euler_vortex", scheme = "ssp(10,4)", out;
  std::vector<double> omegas{0.0};
  std::vector<double> dts;
  int p_min = 2, p_max = 5, p = 8;
  double t_end = -1.0;
  bool deforming = false;
};

int cmd_study(const StudyArgs& a) {
  Csv csv(a.out);
  if (a.kind == "spatial") {
    if (a.case_name != "euler_vortex" && a.case_name != "taylor_couette")
      throw ConfigError("spatial study supports euler_vortex and taylor_couette");
    *csv << "case,omega,p,dt,l2_error\n";
    for (double w : a.omegas) {
      std::vector<double> ps, errs;
      for (int p = a.p_min; p <= a.p_max; ++p) {
        const StudyPoint r = a.case_name == "euler_vortex" ? vortex_error(p, w) : taylor_couette_error(p, w).point;
        *csv << a.case_name << ',' << w << ',' << p << ',' << fmt17(r.dt) << ',' << fmt17(r.error) << '\n' << std::flush;
        ps.push_back(p);
        errs.push_back(r.error);
      }
      if (ps.size() >= 2) {
        const LineFit f = fit_semilog(ps, errs);
        std::cerr << "omega " << w << ": log(error) slope per degree " << f.slope << ", R^2 " << f.r2 << '\n';
      }
    }
  } else if (a.kind == "temporal") {
    if (a.dts.size() < 2) throw ConfigError("temporal study needs at least two --dt values");
    const double t_end = a.t_end > 0.0 ? a.t_end : 0.5;
    const TemporalStudy st = vortex_temporal_study(a.scheme, a.dts, a.p, a.omegas.front(), t_end);
    *csv << "scheme,p,dt,error\n";
    for (size_t i = 0; i < st.dts.size(); ++i)
      *csv << a.scheme << ',' << a.p << ',' << fmt17(st.dts[i]) << ',' << fmt17(st.errors[i]) << '\n';
    std::cerr << "observed order " << st.fit.slope << " (R^2 " << st.fit.r2 << "), spatial error " << st.spatial_error
              << '\n';
  } else if (a.kind == "conservation") {
    const double t_end = a.t_end > 0.0 ? a.t_end : 2.0;
    *csv << "omega,p,e_rho,e_rhou,e_rhov,e_energy,worst,interface_defect\n";
    for (double w : a.omegas)
      for (int p = a.p_min; p <= a.p_max; ++p) {
        CaseOptions o;
        o.cfl = 6.0;
        const ConservationResult r = couette_conservation(p, w, t_end, o, 100);
        *csv << w << ',' << p;
        for (double v : r.final_error) *csv << ',' << fmt17(v);
        *csv << ',' << fmt17(r.worst) << ',' << fmt17(r.worst_interface_defect) << '\n' << std::flush;
      }
  } else if (a.kind == "freestream") {
    *csv << "omega,p,deforming,pressure_error\n";
    for (double w : a.omegas)
      for (int p = a.p_min; p <= a.p_max; ++p) {
        const StudyPoint r = freestream_error(p, w, a.deforming);
        *csv << w << ',' << p << ',' << (a.deforming ? 1 : 0) << ',' << fmt17(r.error) << '\n' << std::flush;
      }
  } else if (a.kind == "mapping") {
    const MappingStudy m = mapping_error_study();
    *csv << "quantity,order,value\n";
    *csv << "transfinite_dr,0," << fmt17(m.transfinite_dr) << "\ntransfinite_dr_2d,0," << fmt17(m.transfinite_dr_2d) << '\n';
    for (size_t i = 0; i < m.orders.size(); ++i)
      *csv << "iso_dr," << m.orders[i] << ',' << fmt17(m.iso_dr[i]) << "\niso_nodal_dr," << m.orders[i] << ','
           << fmt17(m.iso_nodal_dr[i]) << "\ncoord_diff_2d," << m.orders[i] << ',' << fmt17(m.coord_diff_2d[i]) << '\n';
  } else {
    throw ConfigError("unknown study '" + a.kind + "'");
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sfr: high-order flux reconstruction solver for compressible flow on sliding and deforming meshes"};
  app.require_subcommand(1);

  std::string config, case_name, out;
  std::vector<std::string> sets;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Run a case from a config file (or a built-in case with --case)");
  run->add_option("config", config, "Config file ([case] [mesh] [time] [fluid] [boundary] [output] [diagnostics] [run])");
  run->add_option("--case", case_name, "Built-in case name (sets case.name)");
  run->add_option("--set", sets, "Override a config entry: section.key=value (repeatable)");
  run->add_option("--threads", threads, "Worker count (sets run.threads)");
  run->add_option("--out", out, "Output directory (sets output.dir)");

  std::string mesh_case, mesh_out = "meshes";
  double mesh_omega = 0.0;
  auto* gen = app.add_subcommand("generate-mesh", "Write the subdomain meshes of a built-in case");
  gen->add_option("--case", mesh_case, "Case name")->required();
  gen->add_option("--omega", mesh_omega, "Angular speed of the rotating subdomain");
  gen->add_option("--out", mesh_out, "Output directory");

  std::vector<int> criteria;
  auto* ver = app.add_subcommand("verify", "Run the acceptance criteria (all by default)");
  ver->add_option("--criterion", criteria, "Criterion number 1..10 (repeatable)")->check(CLI::Range(1, 10));

  StudyArgs study;
  auto* st = app.add_subcommand("study", "Convergence and conservation studies, written as CSV");
  st->add_option("kind", study.kind, "spatial | temporal | conservation | freestream | mapping")->required();
  st->add_option("--case", study.case_name, "spatial: euler_vortex or taylor_couette");
  st->add_option("--omega", study.omegas, "Rotation speeds (repeatable)");
  st->add_option("--p-min", study.p_min, "Lowest degree");
  st->add_option("--p-max", study.p_max, "Highest degree");
  st->add_option("--p", study.p, "temporal: degree");
  st->add_option("--scheme", study.scheme, "temporal: ssp(4,2) | ssp(8,3) | ssp(5,4) | ssp(10,4)");
  st->add_option("--dt", study.dts, "temporal: step sizes (repeatable)");
  st->add_option("--t-end", study.t_end, "End time (temporal, conservation)");
  st->add_flag("--deforming", study.deforming, "freestream: conforming deforming mesh instead of sliding");
  st->add_option("--out", study.out, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }

  try {
    if (*run) return cmd_run(config, case_name, sets, threads, out);
    if (*gen) return cmd_generate_mesh(mesh_case, mesh_omega, mesh_out);
    if (*ver) return cmd_verify(criteria);
    if (*st) return cmd_study(study);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  }
  return exit_ok;
}
