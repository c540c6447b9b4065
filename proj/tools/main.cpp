#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "maglap/scenario.hpp"

namespace {

struct Flags {
  std::string config;
  std::string outDir = "out";
  std::uint64_t seed = 0;
  double tol = 0.0;
  int k = 0;
  bool corrupt = false;
};

void add_common(CLI::App* cmd, Flags& f, bool needsConfig) {
  CLI::Option* cfg =
      cmd->add_option("--config", f.config, "scenario config file (JSON)");
  if (needsConfig) cfg->required();
  cmd->add_option("--out-dir", f.outDir, "output directory");
  cmd->add_option("--seed", f.seed, "override every scenario's solver seed");
  cmd->add_option("--tol", f.tol,
                  "override every scenario's solver tolerance");
  cmd->add_option("--k", f.k,
                  "override every scenario's requested eigenvalue count");
}

maglap::Config load_with_overrides(const CLI::App* cmd, const Flags& f) {
  maglap::Config config = maglap::load_config(f.config);
  maglap::SolverOverrides o;
  o.k = f.k;
  o.tol = f.tol;
  if (cmd->count("--seed")) {
    o.seed = f.seed;
    o.hasSeed = true;
  }
  maglap::apply_solver_overrides(config, o);
  return config;
}

void print_results(const std::vector<maglap::ScenarioResult>& results) {
  for (const maglap::ScenarioResult& r : results) {
    std::cout << r.name;
    if (!r.eigenvalues.empty())
      std::cout << ": lambda1 = " << maglap::format_number(r.eigenvalues[0]);
    if (!r.reports.empty()) {
      int held = 0;
      for (const maglap::BoundReport& b : r.reports)
        if (b.holds) ++held;
      std::cout << ", " << held << "/" << r.reports.size() << " checks hold";
    }
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magnetic Schroedinger spectra and eigenvalue bound checks"};
  app.require_subcommand(1);

  Flags exactF, solveF, verifyF, sweepF, selftestF;
  CLI::App* exact =
      app.add_subcommand("exact", "closed-form flat-torus spectra");
  add_common(exact, exactF, true);
  CLI::App* solve = app.add_subcommand("solve", "compute spectra only");
  add_common(solve, solveF, true);
  CLI::App* verify =
      app.add_subcommand("verify", "compute spectra and run all checks");
  add_common(verify, verifyF, true);
  verify->add_flag("--selftest-corrupt", verifyF.corrupt,
                   "falsify one report per scenario (failure-path exercise)");
  CLI::App* sweep =
      app.add_subcommand("sweep", "rerun one scenario over a parameter range");
  add_common(sweep, sweepF, true);
  CLI::App* selftest =
      app.add_subcommand("selftest", "run the built-in scenario battery");
  selftestF.outDir = "selftest_out";
  selftest->add_option("--out-dir", selftestF.outDir, "output directory");
  selftest->add_flag("--selftest-corrupt", selftestF.corrupt,
                     "falsify one report per scenario (failure-path exercise)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (exact->parsed())
      return maglap::exact_config(load_with_overrides(exact, exactF),
                                  exactF.outDir);
    if (solve->parsed())
      return maglap::solve_config(load_with_overrides(solve, solveF),
                                  solveF.outDir);
    if (verify->parsed()) {
      maglap::RunOutcome out = maglap::run_config(
          load_with_overrides(verify, verifyF), verifyF.outDir,
          verifyF.corrupt);
      print_results(out.results);
      return out.exitCode;
    }
    if (sweep->parsed())
      return maglap::sweep_config(load_with_overrides(sweep, sweepF),
                                  sweepF.outDir);
    return maglap::run_selftest(selftestF.outDir, selftestF.corrupt);
  } catch (const maglap::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
