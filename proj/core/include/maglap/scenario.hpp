#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "maglap/bounds.hpp"
#include "maglap/fields.hpp"

namespace maglap {

// Configuration problem (syntax, schema, or an unsupported request). The
// message carries an origin:line anchor whenever the offending construct can
// be located in the source text.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GeometryKind { FlatTorus, Rectangle, Sphere, RevolutionTorus };

struct GeometrySpec {
  GeometryKind kind = GeometryKind::FlatTorus;

  // flat torus: lattice basis columns and grid resolution
  Eigen::Matrix2d basis = Eigen::Matrix2d::Identity();
  int n1 = 64;
  int n2 = 64;

  // rectangle: side lengths (shares n1, n2)
  double L1 = 1.0;
  double L2 = 1.0;

  // sphere
  double radius = 1.0;
  int subdivisions = 3;

  // revolution torus
  double majorRadius = 2.0;
  double minorRadius = 0.5;
  int meshResolution = 48;

  bool is_mesh() const {
    return kind == GeometryKind::Sphere || kind == GeometryKind::RevolutionTorus;
  }
  int genus() const {
    return (kind == GeometryKind::FlatTorus ||
            kind == GeometryKind::RevolutionTorus)
               ? 1
               : 0;
  }
};

struct SolverSpec {
  int k = 6;
  double tol = 1e-10;
  std::uint64_t seed = 2026;
};

// Parameter lists for the checks that take one: Riesz thresholds z, partial
// sum and single-eigenvalue orders k, heat times t. One report per entry.
struct CheckParams {
  std::vector<double> rieszZ;
  std::vector<int> sumK;
  std::vector<int> kthK;
  std::vector<double> heatT;
};

struct Scenario {
  std::string name;
  GeometrySpec geometry;

  // flat geometries (torus, rectangle)
  OneForm potential;
  ScalarField electric;
  ScalarField conformal;  // flat torus only
  ScalarField gauge;

  // embedded meshes (sphere, revolution torus)
  AmbientForm meshPotential;
  AmbientScalar meshElectric;
  AmbientScalar meshGauge;

  bool hasGauge = false;
  SolverSpec solver;
  std::vector<std::string> checks;
  CheckParams params;

  // Optional relative cushion added to inequality tolerances, for geometries
  // whose discretization error dominates the solver tolerance.
  double checkRtol = 0.0;
};

// One-parameter family: rebuilds the named scenario at each value.
// flux_alpha_1 / flux_alpha_2 set the constant potential part to alpha times
// the corresponding integral flux generator; q_const sets the constant
// electric potential.
struct SweepSpec {
  bool present = false;
  std::string scenario;
  std::string parameter;
  std::vector<double> values;
};

struct Config {
  std::vector<Scenario> scenarios;
  SweepSpec sweep;
};

const std::vector<std::string>& known_check_names();

// Parses and validates a JSON config. origin names the source in
// diagnostics (a file path, or a tag like "<builtin>").
Config parse_config(const std::string& text, const std::string& origin);
Config load_config(const std::string& path);

struct SolverOverrides {
  int k = 0;            // > 0 overrides every scenario
  double tol = 0.0;     // > 0 overrides
  std::uint64_t seed = 0;
  bool hasSeed = false;
};

void apply_solver_overrides(Config& config, const SolverOverrides& o);

struct ScenarioResult {
  std::string name;
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  Quantities quantities;
  bool hasQuantities = false;
  std::vector<BoundReport> reports;
  bool allHold = true;
};

// Solves one scenario and, when withChecks is set, evaluates its requested
// checks. Throws ConfigError for unsupported combinations and runtime_error
// when the eigensolver fails to converge.
ScenarioResult run_scenario(const Scenario& s, bool withChecks = true);

struct RunOutcome {
  int exitCode = 0;  // 0: all checks hold, 2: at least one failed
  std::vector<ScenarioResult> results;
};

// Runs every scenario (in parallel), writing <name>_spectrum.csv and
// <name>_reports.json per scenario and summary.csv last. corruptRhs
// falsifies the first report of each scenario to exercise the failure path.
RunOutcome run_config(const Config& config, const std::string& outDir,
                      bool corruptRhs = false);

// Spectrum-only run; no checks, exit 0.
int solve_config(const Config& config, const std::string& outDir);

// Closed-form spectra for flat-torus scenarios with constant-plus-gradient
// potential and constant electric potential; writes <name>_exact.csv.
int exact_config(const Config& config, const std::string& outDir);

// Writes sweep.csv with one row per parameter value; exit 2 if any check
// fails along the sweep.
int sweep_config(const Config& config, const std::string& outDir);

std::string builtin_selftest_config();

// Runs the built-in config through the full pipeline; corruptRhs must drive
// the exit code to 2.
int run_selftest(const std::string& outDir, bool corruptRhs);

// 17 significant digits, '.' decimal separator, locale independent.
std::string format_number(double x);

std::string spectrum_csv(const ScenarioResult& r);
std::string reports_json(const ScenarioResult& r);
std::string summary_csv(const std::vector<ScenarioResult>& results);

}  // namespace maglap
