#include "maglap/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "maglap/eigensolver.hpp"
#include "maglap/exact_torus.hpp"
#include "maglap/grid_operator.hpp"
#include "maglap/lattice.hpp"
#include "maglap/mesh_operator.hpp"

namespace maglap {
namespace {

using nlohmann::json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

// ---- diagnostics anchored to the config source text ----

struct SourceText {
  const std::string* text = nullptr;
  std::string origin;
};

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  std::size_t lineStart = 0;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      lineStart = i + 1;
    }
  }
  std::size_t col = (byte < lineStart ? 0 : byte - lineStart) + 1;
  return {line, static_cast<int>(col)};
}

// Context for semantic errors: locates the enclosing scenario (or any other
// needle) in the raw text so messages carry origin:line.
struct Ctx {
  const SourceText* src = nullptr;
  std::string needle;

  [[noreturn]] void fail(const std::string& message) const {
    std::string where = src ? src->origin : std::string("<config>");
    if (src && !needle.empty()) {
      std::size_t pos = src->text->find(needle);
      if (pos != std::string::npos)
        where += ":" + std::to_string(line_column(*src->text, pos).first);
    }
    throw ConfigError(where + ": " + message);
  }
};

// ---- low-level json accessors ----

void require_object(const json& j, const char* what, const Ctx& c) {
  if (!j.is_object()) c.fail(std::string(what) + " must be an object");
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& what, const Ctx& c) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      std::string keys;
      for (const std::string& k : allowed) {
        if (!keys.empty()) keys += ", ";
        keys += k;
      }
      c.fail("unknown key \"" + item.key() + "\" in " + what +
             " (allowed: " + keys + ")");
    }
  }
}

double num_field(const json& j, const char* name, double fallback,
                 const Ctx& c) {
  if (!j.contains(name)) return fallback;
  if (!j.at(name).is_number())
    c.fail(std::string(name) + " must be a number");
  double v = j.at(name).get<double>();
  if (!std::isfinite(v)) c.fail(std::string(name) + " must be finite");
  return v;
}

int int_field(const json& j, const char* name, int fallback, const Ctx& c) {
  if (!j.contains(name)) return fallback;
  if (!j.at(name).is_number_integer())
    c.fail(std::string(name) + " must be an integer");
  return j.at(name).get<int>();
}

Eigen::Vector2d vec2_field(const json& j, const char* what, const Ctx& c) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number())
    c.fail(std::string(what) + " must be an array of two numbers");
  Eigen::Vector2d v(j[0].get<double>(), j[1].get<double>());
  if (!v.allFinite()) c.fail(std::string(what) + " must be finite");
  return v;
}

Eigen::Vector3d vec3_field(const json& j, const char* what, const Ctx& c) {
  if (!j.is_array() || j.size() != 3)
    c.fail(std::string(what) + " must be an array of three numbers");
  for (int i = 0; i < 3; ++i)
    if (!j[i].is_number())
      c.fail(std::string(what) + " must be an array of three numbers");
  Eigen::Vector3d v(j[0].get<double>(), j[1].get<double>(),
                    j[2].get<double>());
  if (!v.allFinite()) c.fail(std::string(what) + " must be finite");
  return v;
}

Trig trig_field(const json& j, const Ctx& c) {
  if (!j.contains("trig")) return Trig::Cos;
  if (!j.at("trig").is_string())
    c.fail("trig must be \"sin\" or \"cos\"");
  std::string t = j.at("trig").get<std::string>();
  if (t == "sin") return Trig::Sin;
  if (t == "cos") return Trig::Cos;
  c.fail("trig must be \"sin\" or \"cos\"");
}

// ---- analytic field catalog parsing ----

ScalarField parse_scalar(const json& j, const char* what, const Ctx& c) {
  require_object(j, what, c);
  check_keys(j, {"constant", "waves"}, what, c);
  ScalarField f;
  f.constant = num_field(j, "constant", 0.0, c);
  if (j.contains("waves")) {
    if (!j.at("waves").is_array()) c.fail("waves must be an array");
    for (const json& w : j.at("waves")) {
      require_object(w, "wave entry", c);
      check_keys(w, {"amp", "trig", "wave", "phase"}, "wave entry", c);
      if (!w.contains("amp") || !w.contains("wave"))
        c.fail(std::string(what) + " wave entries need amp and wave");
      Wave wave;
      wave.amp = num_field(w, "amp", 0.0, c);
      wave.trig = trig_field(w, c);
      wave.wave = vec2_field(w.at("wave"), "wave", c);
      wave.phase = num_field(w, "phase", 0.0, c);
      f.waves.push_back(wave);
    }
  }
  return f;
}

OneForm parse_oneform(const json& j, const char* what, const Ctx& c) {
  require_object(j, what, c);
  check_keys(j, {"constant", "waves", "gradient"}, what, c);
  OneForm f;
  if (j.contains("constant"))
    f.constant = vec2_field(j.at("constant"), "constant", c);
  if (j.contains("waves")) {
    if (!j.at("waves").is_array()) c.fail("waves must be an array");
    for (const json& w : j.at("waves")) {
      require_object(w, "wave entry", c);
      check_keys(w, {"amp", "trig", "wave", "phase", "dir"}, "wave entry", c);
      if (!w.contains("amp") || !w.contains("wave") || !w.contains("dir"))
        c.fail(std::string(what) + " wave entries need amp, wave, and dir");
      DirWave wave;
      wave.amp = num_field(w, "amp", 0.0, c);
      wave.trig = trig_field(w, c);
      wave.wave = vec2_field(w.at("wave"), "wave", c);
      wave.phase = num_field(w, "phase", 0.0, c);
      wave.dir = vec2_field(w.at("dir"), "dir", c);
      f.waves.push_back(wave);
    }
  }
  if (j.contains("gradient"))
    f.gradient = parse_scalar(j.at("gradient"), "gradient", c);
  return f;
}

AmbientScalar parse_ambient_scalar(const json& j, const char* what,
                                   const Ctx& c) {
  require_object(j, what, c);
  check_keys(j, {"constant", "linear", "waves"}, what, c);
  AmbientScalar f;
  f.constant = num_field(j, "constant", 0.0, c);
  if (j.contains("linear"))
    f.linear = vec3_field(j.at("linear"), "linear", c);
  if (j.contains("waves")) {
    if (!j.at("waves").is_array()) c.fail("waves must be an array");
    for (const json& w : j.at("waves")) {
      require_object(w, "wave entry", c);
      check_keys(w, {"amp", "trig", "axis", "freq", "phase"}, "wave entry",
                 c);
      if (!w.contains("amp") || !w.contains("axis"))
        c.fail(std::string(what) + " wave entries need amp and axis");
      Wave3 wave;
      wave.amp = num_field(w, "amp", 0.0, c);
      wave.trig = trig_field(w, c);
      wave.axis = int_field(w, "axis", 0, c);
      if (wave.axis < 0 || wave.axis > 2)
        c.fail("axis must be 0, 1, or 2");
      wave.freq = num_field(w, "freq", 1.0, c);
      wave.phase = num_field(w, "phase", 0.0, c);
      f.waves.push_back(wave);
    }
  }
  return f;
}

AmbientForm parse_ambient_form(const json& j, const char* what,
                               const Ctx& c) {
  require_object(j, what, c);
  check_keys(j, {"rotation", "gradient"}, what, c);
  AmbientForm f;
  f.rotation = num_field(j, "rotation", 0.0, c);
  if (j.contains("gradient"))
    f.gradient = parse_ambient_scalar(j.at("gradient"), "gradient", c);
  return f;
}

// ---- geometry parsing ----

void parse_resolution_pair(const json& j, int& n1, int& n2, const Ctx& c) {
  if (j.is_number_integer()) {
    n1 = n2 = j.get<int>();
  } else if (j.is_array() && j.size() == 2 && j[0].is_number_integer() &&
             j[1].is_number_integer()) {
    n1 = j[0].get<int>();
    n2 = j[1].get<int>();
  } else {
    c.fail("resolution must be an integer or a pair of integers");
  }
}

GeometrySpec parse_geometry(const json& j, const Ctx& c) {
  require_object(j, "geometry", c);
  if (!j.contains("type") || !j.at("type").is_string())
    c.fail("geometry needs a string \"type\"");
  const std::string type = j.at("type").get<std::string>();

  GeometrySpec g;
  if (type == "flat_torus" || type == "torus") {
    g.kind = GeometryKind::FlatTorus;
    check_keys(j, {"type", "genus", "basis", "resolution"}, "geometry", c);
    if (j.contains("basis")) {
      const json& b = j.at("basis");
      if (!b.is_array() || b.size() != 2)
        c.fail("basis must be an array of two vectors");
      g.basis.col(0) = vec2_field(b[0], "basis vector", c);
      g.basis.col(1) = vec2_field(b[1], "basis vector", c);
    }
    if (std::abs(g.basis.determinant()) < 1e-12)
      c.fail("basis is degenerate");
    if (j.contains("resolution"))
      parse_resolution_pair(j.at("resolution"), g.n1, g.n2, c);
    if (g.n1 < 8 || g.n2 < 8) c.fail("resolution must be at least 8");
  } else if (type == "rectangle") {
    g.kind = GeometryKind::Rectangle;
    check_keys(j, {"type", "genus", "lengths", "resolution"}, "geometry", c);
    if (j.contains("lengths")) {
      Eigen::Vector2d L = vec2_field(j.at("lengths"), "lengths", c);
      g.L1 = L.x();
      g.L2 = L.y();
    }
    if (g.L1 <= 0.0 || g.L2 <= 0.0) c.fail("lengths must be positive");
    g.n1 = g.n2 = 32;
    if (j.contains("resolution"))
      parse_resolution_pair(j.at("resolution"), g.n1, g.n2, c);
    if (g.n1 < 8 || g.n2 < 8) c.fail("resolution must be at least 8");
  } else if (type == "sphere") {
    g.kind = GeometryKind::Sphere;
    check_keys(j, {"type", "genus", "radius", "subdivisions"}, "geometry", c);
    g.radius = num_field(j, "radius", 1.0, c);
    if (g.radius <= 0.0) c.fail("radius must be positive");
    g.subdivisions = int_field(j, "subdivisions", 3, c);
    if (g.subdivisions < 0 || g.subdivisions > 6)
      c.fail("subdivisions must lie in [0, 6]");
  } else if (type == "revolution_torus") {
    g.kind = GeometryKind::RevolutionTorus;
    check_keys(j, {"type", "genus", "major_radius", "minor_radius",
                   "resolution"},
               "geometry", c);
    g.majorRadius = num_field(j, "major_radius", 2.0, c);
    g.minorRadius = num_field(j, "minor_radius", 0.5, c);
    if (!(g.minorRadius > 0.0 && g.minorRadius < g.majorRadius))
      c.fail("radii must satisfy 0 < minor_radius < major_radius");
    g.meshResolution = int_field(j, "resolution", 48, c);
    if (g.meshResolution < 8) c.fail("resolution must be at least 8");
  } else {
    c.fail("unsupported geometry type \"" + type + "\"");
  }

  if (j.contains("genus")) {
    int genus = int_field(j, "genus", 0, c);
    if (genus >= 2)
      c.fail("unsupported: genus " + std::to_string(genus) +
             " surfaces are not implemented (available geometries have "
             "genus 0 or 1)");
    if (genus != g.genus())
      c.fail("geometry type \"" + type + "\" has genus " +
             std::to_string(g.genus()) + ", not " + std::to_string(genus));
  }
  return g;
}

// ---- scenario-level validation ----

bool integer_vector(const Eigen::Vector2d& w) {
  return std::abs(w.x() - std::round(w.x())) <= 1e-12 &&
         std::abs(w.y() - std::round(w.y())) <= 1e-12;
}

void require_torus_periodic(const ScalarField& f, const char* what,
                            const Ctx& c) {
  for (const Wave& w : f.waves)
    if (!integer_vector(w.wave))
      c.fail(std::string(what) +
             " wave vectors must have integer components on a torus");
}

void validate_scenario(const Scenario& s, const Ctx& c) {
  if (s.name.empty()) c.fail("scenario name must not be empty");
  for (char ch : s.name)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' &&
        ch != '-')
      c.fail("scenario name may only contain letters, digits, '_', '-'");
  if (s.solver.k < 1) c.fail("solver k must be at least 1");
  if (s.solver.tol <= 0.0) c.fail("solver tol must be positive");
  if (s.checkRtol < 0.0) c.fail("check_rtol must be nonnegative");

  const GeometryKind kind = s.geometry.kind;
  if (kind == GeometryKind::FlatTorus) {
    require_torus_periodic(s.electric, "electric", c);
    require_torus_periodic(s.conformal, "conformal", c);
    require_torus_periodic(s.gauge, "gauge", c);
    require_torus_periodic(s.potential.gradient, "potential gradient", c);
    for (const DirWave& w : s.potential.waves)
      if (!integer_vector(w.wave))
        c.fail("potential wave vectors must have integer components on a "
               "torus");
  }

  std::set<std::string> seen;
  for (const std::string& name : s.checks) {
    const auto& known = known_check_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      std::string list;
      for (const std::string& k : known) {
        if (!list.empty()) list += ", ";
        list += k;
      }
      c.fail("unknown check \"" + name + "\" (known: " + list + ")");
    }
    if (!seen.insert(name).second)
      c.fail("check \"" + name + "\" is listed twice");

    const bool isRect = kind == GeometryKind::Rectangle;
    const bool isFlatTorus = kind == GeometryKind::FlatTorus;
    const bool isRevolution = kind == GeometryKind::RevolutionTorus;
    const bool rotationPresent =
        s.geometry.is_mesh() && s.meshPotential.rotation != 0.0;

    if ((name == "riesz_mean" || name == "eigenvalue_sum" ||
         name == "kth_eigenvalue" || name == "heat_trace") &&
        !isRect)
      c.fail("check \"" + name + "\" needs a rectangle geometry");
    if (name == "riesz_mean" && s.params.rieszZ.empty())
      c.fail("riesz_mean needs check_parameters.riesz_z");
    if (name == "eigenvalue_sum") {
      if (s.params.sumK.empty())
        c.fail("eigenvalue_sum needs check_parameters.sum_k");
      for (int kk : s.params.sumK)
        if (kk < 1 || kk > s.solver.k)
          c.fail("sum_k entries must lie in [1, solver k]");
    }
    if (name == "kth_eigenvalue") {
      if (s.params.kthK.empty())
        c.fail("kth_eigenvalue needs check_parameters.kth_k");
      for (int kk : s.params.kthK)
        if (kk < 1 || kk > s.solver.k)
          c.fail("kth_k entries must lie in [1, solver k]");
    }
    if (name == "heat_trace") {
      if (s.params.heatT.empty())
        c.fail("heat_trace needs check_parameters.heat_t");
      for (double t : s.params.heatT)
        if (!(t > 0.0)) c.fail("heat_t entries must be positive");
    }
    if (name == "lambda2_surface") {
      if (isRect)
        c.fail("lambda2_surface needs a closed surface, not a rectangle");
      if (s.solver.k < 2) c.fail("lambda2_surface needs solver k >= 2");
    }
    if ((name == "lambda1_general" || name == "lambda1_closed" ||
         name == "lambda2_surface") &&
        isRevolution && rotationPresent)
      c.fail("unsupported: the harmonic part of a rotation form on a "
             "revolution torus is not computed; use gradient potentials "
             "for bound checks on this geometry");
    if (name == "lambda1_closed") {
      if (!s.geometry.is_mesh() && !s.potential.waves.empty())
        c.fail("lambda1_closed needs a closed potential (no wave part)");
      if (kind == GeometryKind::Sphere && rotationPresent)
        c.fail("lambda1_closed needs a closed potential (no rotation part "
               "on a sphere)");
    }
    if (name == "flux_quantization") {
      if (!isFlatTorus)
        c.fail("flux_quantization needs a flat torus geometry");
      if (!s.conformal.is_zero())
        c.fail("flux_quantization needs a flat metric (no conformal "
               "factor)");
      if (!s.electric.is_zero())
        c.fail("flux_quantization needs a vanishing electric potential");
      if (!s.potential.waves.empty())
        c.fail("flux_quantization needs a closed potential (no wave part)");
    }
    if (name == "genusone_equality") {
      if (!isFlatTorus)
        c.fail("genusone_equality needs a flat torus geometry");
      if (!s.conformal.is_zero())
        c.fail("genusone_equality needs a flat metric (no conformal "
               "factor)");
      if (!s.electric.is_constant())
        c.fail("genusone_equality needs a constant electric potential");
      if (!s.potential.waves.empty())
        c.fail("genusone_equality needs a closed potential (no wave part)");
      if (s.geometry.n1 < 16 || s.geometry.n2 < 16 ||
          s.geometry.n1 % 2 != 0 || s.geometry.n2 % 2 != 0)
        c.fail("genusone_equality needs even resolutions of at least 16 "
               "(a half-resolution companion grid estimates the "
               "discretization error)");
    }
    if (name == "gauge_invariance" && !s.hasGauge)
      c.fail("gauge_invariance needs a \"gauge\" field in the scenario");
  }
}

Scenario parse_scenario(const json& j, const SourceText& src) {
  Ctx c{&src, ""};
  require_object(j, "scenario", c);
  if (!j.contains("name") || !j.at("name").is_string())
    c.fail("every scenario needs a string \"name\"");
  Scenario s;
  s.name = j.at("name").get<std::string>();
  c.needle = "\"" + s.name + "\"";

  check_keys(j,
             {"name", "geometry", "potential", "electric", "conformal",
              "gauge", "solver", "checks", "check_parameters", "check_rtol"},
             "scenario \"" + s.name + "\"", c);

  if (!j.contains("geometry")) c.fail("scenario needs a geometry");
  s.geometry = parse_geometry(j.at("geometry"), c);
  const bool mesh = s.geometry.is_mesh();

  if (j.contains("potential")) {
    if (mesh)
      s.meshPotential = parse_ambient_form(j.at("potential"), "potential", c);
    else
      s.potential = parse_oneform(j.at("potential"), "potential", c);
  }
  if (j.contains("electric")) {
    if (mesh)
      s.meshElectric =
          parse_ambient_scalar(j.at("electric"), "electric", c);
    else
      s.electric = parse_scalar(j.at("electric"), "electric", c);
  }
  if (j.contains("conformal")) {
    if (s.geometry.kind != GeometryKind::FlatTorus)
      c.fail("a conformal factor is only supported on a flat torus");
    s.conformal = parse_scalar(j.at("conformal"), "conformal", c);
  }
  if (j.contains("gauge")) {
    s.hasGauge = true;
    if (mesh)
      s.meshGauge = parse_ambient_scalar(j.at("gauge"), "gauge", c);
    else
      s.gauge = parse_scalar(j.at("gauge"), "gauge", c);
  }
  if (j.contains("solver")) {
    const json& sv = j.at("solver");
    require_object(sv, "solver", c);
    check_keys(sv, {"k", "tol", "seed"}, "solver", c);
    s.solver.k = int_field(sv, "k", s.solver.k, c);
    s.solver.tol = num_field(sv, "tol", s.solver.tol, c);
    if (sv.contains("seed")) {
      if (!sv.at("seed").is_number_unsigned())
        c.fail("seed must be a nonnegative integer");
      s.solver.seed = sv.at("seed").get<std::uint64_t>();
    }
  }
  if (j.contains("checks")) {
    if (!j.at("checks").is_array()) c.fail("checks must be an array");
    for (const json& e : j.at("checks")) {
      if (!e.is_string()) c.fail("checks entries must be strings");
      s.checks.push_back(e.get<std::string>());
    }
  }
  if (j.contains("check_parameters")) {
    const json& p = j.at("check_parameters");
    require_object(p, "check_parameters", c);
    check_keys(p, {"riesz_z", "sum_k", "kth_k", "heat_t"},
               "check_parameters", c);
    auto num_list = [&](const char* key, std::vector<double>& out) {
      if (!p.contains(key)) return;
      if (!p.at(key).is_array())
        c.fail(std::string(key) + " must be an array of numbers");
      for (const json& e : p.at(key)) {
        if (!e.is_number()) c.fail(std::string(key) + " entries must be numbers");
        double v = e.get<double>();
        if (!std::isfinite(v)) c.fail(std::string(key) + " entries must be finite");
        out.push_back(v);
      }
    };
    auto int_list = [&](const char* key, std::vector<int>& out) {
      if (!p.contains(key)) return;
      if (!p.at(key).is_array())
        c.fail(std::string(key) + " must be an array of integers");
      for (const json& e : p.at(key)) {
        if (!e.is_number_integer())
          c.fail(std::string(key) + " entries must be integers");
        out.push_back(e.get<int>());
      }
    };
    num_list("riesz_z", s.params.rieszZ);
    int_list("sum_k", s.params.sumK);
    int_list("kth_k", s.params.kthK);
    num_list("heat_t", s.params.heatT);
  }
  s.checkRtol = num_field(j, "check_rtol", 0.0, c);

  validate_scenario(s, c);
  return s;
}

SweepSpec parse_sweep(const json& j, const Config& config,
                      const SourceText& src) {
  Ctx c{&src, "\"sweep\""};
  require_object(j, "sweep", c);
  check_keys(j, {"scenario", "parameter", "start", "stop", "step", "values"},
             "sweep", c);
  SweepSpec sw;
  sw.present = true;
  if (!j.contains("scenario") || !j.at("scenario").is_string())
    c.fail("sweep needs a string \"scenario\"");
  sw.scenario = j.at("scenario").get<std::string>();
  const Scenario* target = nullptr;
  for (const Scenario& s : config.scenarios)
    if (s.name == sw.scenario) target = &s;
  if (!target)
    c.fail("sweep references unknown scenario \"" + sw.scenario + "\"");

  if (!j.contains("parameter") || !j.at("parameter").is_string())
    c.fail("sweep needs a string \"parameter\"");
  sw.parameter = j.at("parameter").get<std::string>();
  if (sw.parameter != "flux_alpha_1" && sw.parameter != "flux_alpha_2" &&
      sw.parameter != "q_const")
    c.fail("sweep parameter must be flux_alpha_1, flux_alpha_2, or q_const");
  if (sw.parameter != "q_const" &&
      target->geometry.kind != GeometryKind::FlatTorus)
    c.fail("flux sweeps need a flat torus scenario");

  if (j.contains("values")) {
    if (j.contains("start") || j.contains("stop") || j.contains("step"))
      c.fail("sweep takes either values or start/stop/step, not both");
    if (!j.at("values").is_array())
      c.fail("values must be an array of numbers");
    for (const json& e : j.at("values")) {
      if (!e.is_number()) c.fail("values entries must be numbers");
      double v = e.get<double>();
      if (!std::isfinite(v)) c.fail("values entries must be finite");
      sw.values.push_back(v);
    }
  } else {
    if (!j.contains("start") || !j.contains("stop") || !j.contains("step"))
      c.fail("sweep needs values or all of start/stop/step");
    double start = num_field(j, "start", 0.0, c);
    double stop = num_field(j, "stop", 0.0, c);
    double step = num_field(j, "step", 0.0, c);
    if (!(step > 0.0)) c.fail("sweep step must be positive");
    if (stop >= start) {
      int n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
      for (int i = 0; i <= n; ++i) sw.values.push_back(start + i * step);
    }
  }
  return sw;
}

// ---- scenario execution ----

SpectralResult solve_or_throw(const HermitianOperator& H, int k, double tol,
                              std::uint64_t seed, const std::string& name,
                              const char* stage) {
  SpectralResult r = lowest_eigenpairs(H, k, tol, seed);
  if (!r.converged)
    throw std::runtime_error("scenario " + name +
                             ": eigensolver did not converge during " +
                             stage);
  return r;
}

// Per-geometry callbacks used by the shared check dispatcher. All heavier
// quantities (companion spectra, Hodge distance, scalar quantities) are
// produced lazily so spectrum-only scenarios pay nothing extra.
struct CheckHooks {
  bool potentialZero = false;
  double fieldNorm2 = 0.0;
  double flatVolume = 0.0;
  double qConstant = 0.0;
  double h2 = 0.0;  // squared longest edge, for discretization slack
  std::function<double()> dist2;
  std::function<ScalarQuantities(std::uint64_t)> scalars;
  std::function<std::vector<double>(int, std::uint64_t)> plainEigs;
  std::function<std::vector<double>(int, std::uint64_t)> comparisonEigs;
  std::function<std::vector<double>(int, std::uint64_t)> gaugedEigs;
  std::function<double(std::uint64_t)> coarseLambda1;
};

void evaluate_checks(const Scenario& s, const CheckHooks& hk,
                     ScenarioResult& out) {
  const std::vector<double>& ev = out.eigenvalues;
  const int k = s.solver.k;
  const std::uint64_t seed = s.solver.seed;

  std::optional<Quantities> cachedQ;
  auto quantities = [&]() -> const Quantities& {
    if (!cachedQ) {
      ScalarQuantities sq = hk.scalars(seed + 5);
      Quantities q;
      q.volume = sq.volume;
      q.qIntegral = sq.qIntegral;
      q.mu = sq.mu;
      q.dist2 = hk.dist2();
      q.fieldNorm2 = hk.fieldNorm2;
      q.genus = s.geometry.genus();
      cachedQ = q;
      out.quantities = q;
      out.hasQuantities = true;
    }
    return *cachedQ;
  };

  std::optional<std::vector<double>> cachedPlain;
  auto plain = [&]() -> const std::vector<double>& {
    if (!cachedPlain)
      cachedPlain = hk.potentialZero ? ev : hk.plainEigs(k, seed + 1);
    return *cachedPlain;
  };

  auto tol_for = [&](double rhs) {
    return std::max(default_tol(s.solver.tol, rhs),
                    s.checkRtol * std::abs(rhs));
  };
  // Probe with zero tolerance to learn the right-hand side, then rebuild the
  // report with the tolerance scaled to it.
  auto tuned = [&](const std::function<BoundReport(double)>& make) {
    return make(tol_for(make(0.0).rhs));
  };

  for (const std::string& name : s.checks) {
    if (name == "lambda1_general") {
      out.reports.push_back(tuned([&](double t) {
        return check_lambda1_general(ev[0], quantities(), t);
      }));
    } else if (name == "lambda1_closed") {
      out.reports.push_back(tuned([&](double t) {
        return check_lambda1_closed(ev[0], quantities(), t);
      }));
    } else if (name == "lambda2_surface") {
      out.reports.push_back(tuned([&](double t) {
        return check_lambda2_surface(ev[1], quantities(), t);
      }));
    } else if (name == "riesz_mean") {
      for (double z : s.params.rieszZ)
        out.reports.push_back(tuned([&](double t) {
          return check_riesz_mean(ev, z, quantities(), t);
        }));
    } else if (name == "eigenvalue_sum") {
      for (int kk : s.params.sumK)
        out.reports.push_back(tuned([&](double t) {
          return check_eigenvalue_sum(ev, kk, quantities(), t);
        }));
    } else if (name == "kth_eigenvalue") {
      for (int kk : s.params.kthK) {
        double freeSum = std::accumulate(plain().begin(),
                                         plain().begin() + kk, 0.0);
        out.reports.push_back(tuned([&](double t) {
          return check_kth_eigenvalue(ev, kk, quantities(), freeSum, t);
        }));
      }
    } else if (name == "heat_trace") {
      for (double t : s.params.heatT)
        out.reports.push_back(tuned([&](double tol) {
          return check_heat_trace(ev, t, quantities(), tol);
        }));
    } else if (name == "comparison") {
      std::vector<double> schro = hk.comparisonEigs(k, seed + 2);
      std::vector<double> slack(schro.size());
      for (std::size_t j = 0; j < schro.size(); ++j)
        slack[j] = std::max(1e-6, 5.0 * hk.h2 * std::abs(schro[j]));
      out.reports.push_back(check_comparison(ev, schro, slack));
    } else if (name == "diamagnetic") {
      out.reports.push_back(check_diamagnetic(ev[0], plain()[0], 1e-12));
    } else if (name == "flux_quantization") {
      out.reports.push_back(
          check_flux_quantization(ev[0], hk.dist2(), hk.flatVolume, 1e-9));
    } else if (name == "gauge_invariance") {
      out.reports.push_back(
          check_gauge_invariance(ev, hk.gaugedEigs(k, seed + 3), 1e-9));
    } else if (name == "genusone_equality") {
      double d2 = hk.dist2();
      double reference = d2 / hk.flatVolume + hk.qConstant;
      double coarse = hk.coarseLambda1(seed + 4);
      double est = richardson_error(coarse, ev[0], 2);
      double allowance =
          5.0 * std::max(est, 1e-12 * std::max(1.0, std::abs(reference)));
      out.reports.push_back(make_report(
          "genusone_equality",
          "|lambda1 - (d2/vol + q)| within five Richardson error estimates",
          std::abs(ev[0] - reference), allowance, 0.0,
          {{"lambda1", ev[0]},
           {"dist2", d2},
           {"volume", hk.flatVolume},
           {"q", hk.qConstant},
           {"coarse_lambda1", coarse}}));
    }
  }
  out.allHold = std::all_of(out.reports.begin(), out.reports.end(),
                            [](const BoundReport& r) { return r.holds; });
}

ScenarioResult run_torus(const Scenario& s, bool withChecks) {
  const GeometrySpec& g = s.geometry;
  FlatTorus torus{Lattice(g.basis)};
  TorusGrid grid =
      make_torus_grid(torus, g.n1, g.n2, s.potential, s.electric, s.conformal);
  HermitianOperator H = build_torus_operator(grid);
  SpectralResult main = solve_or_throw(H, s.solver.k, s.solver.tol,
                                       s.solver.seed, s.name, "the main solve");

  ScenarioResult out;
  out.name = s.name;
  out.eigenvalues = main.eigenvalues;
  out.residuals = main.residuals;
  if (!withChecks || s.checks.empty()) return out;

  CheckHooks hk;
  hk.potentialZero = s.potential.is_zero();
  hk.fieldNorm2 = plaquette_field(grid).norm2;
  hk.flatVolume = torus.volume();
  hk.qConstant = s.electric.constant;
  {
    Eigen::Vector2d a = g.basis.col(0) / g.n1;
    Eigen::Vector2d b = g.basis.col(1) / g.n2;
    Eigen::Vector2d d = grid.diagUp ? Eigen::Vector2d(a + b)
                                    : Eigen::Vector2d(b - a);
    double flat = std::max({a.squaredNorm(), b.squaredNorm(), d.squaredNorm()});
    hk.h2 = flat * std::exp(2.0 * grid.phi.maxCoeff());
  }
  hk.dist2 = [&]() {
    HodgeParts parts = hodge_decompose(grid, grid.potential);
    return distance_to_flux_lattice(torus.lattice,
                                    parts.harmonic.components,
                                    torus.volume());
  };
  hk.scalars = [&](std::uint64_t sd) {
    return scalar_quantities(grid, s.solver.tol, sd);
  };
  hk.plainEigs = [&](int k, std::uint64_t sd) {
    TorusGrid g2 = grid;
    g2.potential = zero_sampled_form(g.n1, g.n2);
    g2.thetaDiag.setZero();
    return solve_or_throw(build_torus_operator(g2), k, s.solver.tol, sd,
                          s.name, "the potential-free solve")
        .eigenvalues;
  };
  hk.comparisonEigs = [&](int k, std::uint64_t sd) {
    TorusGrid g2 = grid;
    g2.potential = zero_sampled_form(g.n1, g.n2);
    g2.thetaDiag.setZero();
    // |A|^2 in the conformal metric: the flat pointwise norm scaled by
    // exp(-2 phi).
    g2.q += sample_form_norm2(grid, s.potential) * (-2.0 * grid.phi).exp();
    return solve_or_throw(build_torus_operator(g2), k, s.solver.tol, sd,
                          s.name, "the comparison solve")
        .eigenvalues;
  };
  hk.gaugedEigs = [&](int k, std::uint64_t sd) {
    TorusGrid g2 = grid;
    apply_gauge(g2, s.gauge);
    return solve_or_throw(build_torus_operator(g2), k, s.solver.tol, sd,
                          s.name, "the gauged solve")
        .eigenvalues;
  };
  hk.coarseLambda1 = [&](std::uint64_t sd) {
    TorusGrid cg = make_torus_grid(torus, g.n1 / 2, g.n2 / 2, s.potential,
                                   s.electric, s.conformal);
    return solve_or_throw(build_torus_operator(cg), 1, s.solver.tol, sd,
                          s.name, "the half-resolution solve")
        .eigenvalues[0];
  };

  evaluate_checks(s, hk, out);
  return out;
}

ScenarioResult run_rectangle(const Scenario& s, bool withChecks) {
  const GeometrySpec& g = s.geometry;
  RectangleGrid grid =
      make_rectangle_grid(g.L1, g.L2, g.n1, g.n2, s.potential, s.electric);
  HermitianOperator H = build_rectangle_operator(grid);
  SpectralResult main = solve_or_throw(H, s.solver.k, s.solver.tol,
                                       s.solver.seed, s.name, "the main solve");

  ScenarioResult out;
  out.name = s.name;
  out.eigenvalues = main.eigenvalues;
  out.residuals = main.residuals;
  if (!withChecks || s.checks.empty()) return out;

  CheckHooks hk;
  hk.potentialZero = s.potential.is_zero();
  hk.fieldNorm2 = plaquette_field(grid).norm2;
  hk.flatVolume = g.L1 * g.L2;
  hk.qConstant = s.electric.constant;
  {
    double h1 = g.L1 / g.n1;
    double h2 = g.L2 / g.n2;
    hk.h2 = std::max(h1, h2) * std::max(h1, h2);
  }
  hk.dist2 = []() { return 0.0; };  // simply connected
  hk.scalars = [&](std::uint64_t sd) {
    return scalar_quantities(grid, s.solver.tol, sd);
  };
  hk.plainEigs = [&](int k, std::uint64_t sd) {
    RectangleGrid g2 = grid;
    g2.theta1.setZero();
    g2.theta2.setZero();
    return solve_or_throw(build_rectangle_operator(g2), k, s.solver.tol, sd,
                          s.name, "the potential-free solve")
        .eigenvalues;
  };
  hk.comparisonEigs = [&](int k, std::uint64_t sd) {
    RectangleGrid g2 = grid;
    g2.theta1.setZero();
    g2.theta2.setZero();
    g2.q += sample_form_norm2(grid, s.potential);
    return solve_or_throw(build_rectangle_operator(g2), k, s.solver.tol, sd,
                          s.name, "the comparison solve")
        .eigenvalues;
  };
  hk.gaugedEigs = [&](int k, std::uint64_t sd) {
    RectangleGrid g2 = grid;
    apply_gauge(g2, s.gauge);
    return solve_or_throw(build_rectangle_operator(g2), k, s.solver.tol, sd,
                          s.name, "the gauged solve")
        .eigenvalues;
  };

  evaluate_checks(s, hk, out);
  return out;
}

ScenarioResult run_mesh(const Scenario& s, bool withChecks) {
  const GeometrySpec& g = s.geometry;
  SurfaceMesh mesh =
      g.kind == GeometryKind::Sphere
          ? make_icosphere(g.subdivisions, g.radius)
          : make_revolution_torus(g.majorRadius, g.minorRadius,
                                  g.meshResolution);
  HermitianOperator H =
      build_cotan_magnetic(mesh, s.meshPotential, s.meshElectric);
  SpectralResult main = solve_or_throw(H, s.solver.k, s.solver.tol,
                                       s.solver.seed, s.name, "the main solve");

  ScenarioResult out;
  out.name = s.name;
  out.eigenvalues = main.eigenvalues;
  out.residuals = main.residuals;
  if (!withChecks || s.checks.empty()) return out;

  CheckHooks hk;
  hk.potentialZero = s.meshPotential.is_zero();
  hk.fieldNorm2 = mesh_plaquette_field(mesh, s.meshPotential).norm2;
  hk.flatVolume = mesh.total_area();
  hk.qConstant = s.meshElectric.constant;
  for (int f = 0; f < mesh.face_count(); ++f)
    for (int e = 0; e < 3; ++e) {
      Eigen::Vector3d d = mesh.vertices.row(mesh.faces(f, (e + 1) % 3)) -
                          mesh.vertices.row(mesh.faces(f, e));
      hk.h2 = std::max(hk.h2, d.squaredNorm());
    }
  // Validation admits only potentials with vanishing harmonic part here.
  hk.dist2 = []() { return 0.0; };
  hk.scalars = [&](std::uint64_t sd) {
    MeshQuantities mq = mesh_quantities(mesh, s.meshElectric, s.solver.tol, sd);
    return ScalarQuantities{mq.area, mq.qIntegral, mq.mu};
  };
  hk.plainEigs = [&](int k, std::uint64_t sd) {
    return solve_or_throw(
               build_cotan_magnetic(mesh, AmbientForm{}, s.meshElectric), k,
               s.solver.tol, sd, s.name, "the potential-free solve")
        .eigenvalues;
  };
  hk.comparisonEigs = [&](int k, std::uint64_t sd) {
    HermitianOperator P =
        build_cotan_magnetic(mesh, AmbientForm{}, s.meshElectric);
    Eigen::MatrixXd normals = mesh.vertex_normals();
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      Eigen::Vector3d a = s.meshPotential.value(mesh.vertices.row(v));
      Eigen::Vector3d n = normals.row(v);
      Eigen::Vector3d tangential = a - a.dot(n) * n;
      P.matrix.coeffRef(v, v) +=
          Complex(P.mass(v) * tangential.squaredNorm(), 0.0);
    }
    return solve_or_throw(P, k, s.solver.tol, sd, s.name,
                          "the comparison solve")
        .eigenvalues;
  };
  hk.gaugedEigs = [&](int k, std::uint64_t sd) {
    AmbientForm gauged = s.meshPotential;
    gauged.gradient.constant += s.meshGauge.constant;
    gauged.gradient.linear += s.meshGauge.linear;
    gauged.gradient.waves.insert(gauged.gradient.waves.end(),
                                 s.meshGauge.waves.begin(),
                                 s.meshGauge.waves.end());
    return solve_or_throw(build_cotan_magnetic(mesh, gauged, s.meshElectric),
                          k, s.solver.tol, sd, s.name, "the gauged solve")
        .eigenvalues;
  };

  evaluate_checks(s, hk, out);
  return out;
}

// ---- artifact helpers ----

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string inputs_cell(const std::map<std::string, double>& inputs) {
  std::string out;
  for (const auto& [key, value] : inputs) {
    if (!out.empty()) out += ";";
    out += key + "=" + format_number(value);
  }
  return out;
}

void write_atomic(const std::filesystem::path& path,
                  const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void corrupt_first_report(ScenarioResult& r) {
  if (r.reports.empty()) return;
  BoundReport& b = r.reports.front();
  b.rhs = b.lhs - 1.0 - std::abs(b.lhs);
  b.margin = b.rhs - b.lhs;
  b.holds = b.margin >= -b.tol;
  r.allHold = false;
}

void write_scenario_artifacts(const ScenarioResult& r,
                              const std::filesystem::path& dir,
                              bool withReports) {
  write_atomic(dir / (r.name + "_spectrum.csv"), spectrum_csv(r));
  if (withReports)
    write_atomic(dir / (r.name + "_reports.json"), reports_json(r));
}

std::vector<ScenarioResult> run_all(const Config& config,
                                    const std::filesystem::path& dir,
                                    bool withChecks, bool corruptRhs) {
  std::vector<std::future<ScenarioResult>> futures;
  futures.reserve(config.scenarios.size());
  for (const Scenario& s : config.scenarios) {
    futures.push_back(std::async(std::launch::async, [&s, &dir, withChecks,
                                                      corruptRhs]() {
      ScenarioResult r = run_scenario(s, withChecks);
      if (corruptRhs) corrupt_first_report(r);
      write_scenario_artifacts(r, dir, withChecks);
      return r;
    }));
  }
  std::vector<ScenarioResult> results;
  results.reserve(futures.size());
  for (auto& f : futures) results.push_back(f.get());
  return results;
}

// Number of reports a check contributes, known without running.
int report_count(const Scenario& s, const std::string& check) {
  if (check == "riesz_mean") return static_cast<int>(s.params.rieszZ.size());
  if (check == "eigenvalue_sum") return static_cast<int>(s.params.sumK.size());
  if (check == "kth_eigenvalue") return static_cast<int>(s.params.kthK.size());
  if (check == "heat_trace") return static_cast<int>(s.params.heatT.size());
  return 1;
}

std::vector<std::string> sweep_tags(const Scenario& s) {
  std::vector<std::string> tags;
  for (const std::string& check : s.checks) {
    int count = report_count(s, check);
    if (count == 1) {
      tags.push_back(check);
    } else {
      for (int i = 1; i <= count; ++i)
        tags.push_back(check + "_" + std::to_string(i));
    }
  }
  return tags;
}

void apply_sweep_value(Scenario& s, const std::string& parameter,
                       double value) {
  if (parameter == "q_const") {
    if (s.geometry.is_mesh())
      s.meshElectric.constant = value;
    else
      s.electric.constant = value;
    return;
  }
  // flux_alpha_i: constant part set to value times the integral flux
  // generator dual to basis vector i.
  Eigen::Matrix2d dual = s.geometry.basis.inverse().transpose();
  int index = parameter == "flux_alpha_1" ? 0 : 1;
  s.potential.constant = kTwoPi * value * dual.col(index);
}

}  // namespace

const std::vector<std::string>& known_check_names() {
  static const std::vector<std::string> names = {
      "lambda1_general", "lambda1_closed",    "lambda2_surface",
      "riesz_mean",      "eigenvalue_sum",    "kth_eigenvalue",
      "heat_trace",      "comparison",        "diamagnetic",
      "flux_quantization", "gauge_invariance", "genusone_equality"};
  return names;
}

Config parse_config(const std::string& text, const std::string& origin) {
  SourceText src{&text, origin};
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    auto [line, column] = line_column(text, byte);
    throw ConfigError(origin + ":" + std::to_string(line) + ":" +
                      std::to_string(column) + ": " + e.what());
  }

  Ctx top{&src, ""};
  require_object(root, "config", top);
  check_keys(root, {"scenarios", "sweep"}, "config", top);
  if (!root.contains("scenarios") || !root.at("scenarios").is_array() ||
      root.at("scenarios").empty())
    top.fail("config needs a nonempty \"scenarios\" array");

  Config config;
  std::set<std::string> names;
  for (const json& j : root.at("scenarios")) {
    Scenario s = parse_scenario(j, src);
    if (!names.insert(s.name).second) {
      Ctx c{&src, "\"" + s.name + "\""};
      c.fail("duplicate scenario name \"" + s.name + "\"");
    }
    config.scenarios.push_back(std::move(s));
  }
  if (root.contains("sweep"))
    config.sweep = parse_sweep(root.at("sweep"), config, src);
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), path);
}

void apply_solver_overrides(Config& config, const SolverOverrides& o) {
  for (Scenario& s : config.scenarios) {
    if (o.k > 0) s.solver.k = o.k;
    if (o.tol > 0.0) s.solver.tol = o.tol;
    if (o.hasSeed) s.solver.seed = o.seed;
  }
}

ScenarioResult run_scenario(const Scenario& s, bool withChecks) {
  try {
    switch (s.geometry.kind) {
      case GeometryKind::FlatTorus:
        return run_torus(s, withChecks);
      case GeometryKind::Rectangle:
        return run_rectangle(s, withChecks);
      default:
        return run_mesh(s, withChecks);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scenario " + s.name + ": " + e.what());
  }
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string spectrum_csv(const ScenarioResult& r) {
  std::string out = "index,lambda,residual\n";
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    double residual = i < r.residuals.size() ? r.residuals[i] : 0.0;
    out += std::to_string(i) + "," + format_number(r.eigenvalues[i]) + "," +
           format_number(residual) + "\n";
  }
  return out;
}

std::string reports_json(const ScenarioResult& r) {
  json arr = json::array();
  for (const BoundReport& b : r.reports) {
    json o;
    o["name"] = b.name;
    o["eq"] = b.eq;
    o["lhs"] = b.lhs;
    o["rhs"] = b.rhs;
    o["margin"] = b.margin;
    o["holds"] = b.holds;
    o["tol"] = b.tol;
    o["inputs"] = json(b.inputs);
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

std::string summary_csv(const std::vector<ScenarioResult>& results) {
  std::string out = "scenario,name,eq,lhs,rhs,margin,holds,tol,inputs\n";
  for (const ScenarioResult& r : results) {
    for (const BoundReport& b : r.reports) {
      out += r.name + "," + b.name + "," + csv_quote(b.eq) + "," +
             format_number(b.lhs) + "," + format_number(b.rhs) + "," +
             format_number(b.margin) + "," + (b.holds ? "true" : "false") +
             "," + format_number(b.tol) + "," +
             csv_quote(inputs_cell(b.inputs)) + "\n";
    }
  }
  return out;
}

RunOutcome run_config(const Config& config, const std::string& outDir,
                      bool corruptRhs) {
  std::filesystem::path dir(outDir);
  std::filesystem::create_directories(dir);
  RunOutcome outcome;
  outcome.results = run_all(config, dir, true, corruptRhs);
  write_atomic(dir / "summary.csv", summary_csv(outcome.results));
  bool all = std::all_of(outcome.results.begin(), outcome.results.end(),
                         [](const ScenarioResult& r) { return r.allHold; });
  outcome.exitCode = all ? 0 : 2;
  return outcome;
}

int solve_config(const Config& config, const std::string& outDir) {
  std::filesystem::path dir(outDir);
  std::filesystem::create_directories(dir);
  run_all(config, dir, false, false);
  return 0;
}

int exact_config(const Config& config, const std::string& outDir) {
  std::filesystem::path dir(outDir);
  std::filesystem::create_directories(dir);
  for (const Scenario& s : config.scenarios) {
    if (s.geometry.kind != GeometryKind::FlatTorus ||
        !s.conformal.is_zero() || !s.potential.waves.empty() ||
        !s.electric.is_constant())
      throw ConfigError(
          "scenario " + s.name +
          ": closed-form spectra need a flat torus with a "
          "constant-plus-gradient potential and constant electric potential");
    FlatTorus torus{Lattice(s.geometry.basis)};
    ConstantForm A{s.potential.constant};
    std::vector<double> eigs =
        exact_spectrum(torus, A, s.electric.constant, s.solver.k);
    std::string csv = "index,lambda\n";
    for (std::size_t i = 0; i < eigs.size(); ++i)
      csv += std::to_string(i) + "," + format_number(eigs[i]) + "\n";
    write_atomic(dir / (s.name + "_exact.csv"), csv);
  }
  return 0;
}

int sweep_config(const Config& config, const std::string& outDir) {
  if (!config.sweep.present)
    throw ConfigError("config has no sweep section");
  const Scenario* base = nullptr;
  for (const Scenario& s : config.scenarios)
    if (s.name == config.sweep.scenario) base = &s;
  if (!base) throw ConfigError("sweep scenario not found");

  std::string csv = "parameter";
  for (int j = 1; j <= base->solver.k; ++j)
    csv += ",lambda_" + std::to_string(j);
  for (const std::string& tag : sweep_tags(*base))
    csv += "," + tag + "_lhs," + tag + "_rhs," + tag + "_margin," + tag +
           "_holds";
  csv += "\n";

  bool all = true;
  for (double value : config.sweep.values) {
    Scenario s = *base;
    apply_sweep_value(s, config.sweep.parameter, value);
    ScenarioResult r = run_scenario(s, true);
    csv += format_number(value);
    for (double lambda : r.eigenvalues) csv += "," + format_number(lambda);
    for (const BoundReport& b : r.reports) {
      csv += "," + format_number(b.lhs) + "," + format_number(b.rhs) + "," +
             format_number(b.margin) + "," + (b.holds ? "true" : "false");
      all = all && b.holds;
    }
    csv += "\n";
  }

  std::filesystem::path dir(outDir);
  std::filesystem::create_directories(dir);
  write_atomic(dir / "sweep.csv", csv);
  return all ? 0 : 2;
}

std::string builtin_selftest_config() {
  return R"({
  "scenarios": [
    {
      "name": "torus_equality",
      "geometry": {"type": "flat_torus", "basis": [[1, 0], [0, 1]], "resolution": [32, 32]},
      "potential": {"constant": [1.5707963267948966, 0.0]},
      "electric": {"constant": 1.0},
      "solver": {"k": 2, "tol": 1e-10, "seed": 7001},
      "checks": ["genusone_equality", "lambda1_closed", "diamagnetic"]
    },
    {
      "name": "square_modes",
      "geometry": {"type": "rectangle", "lengths": [1.0, 1.0], "resolution": [20, 20]},
      "solver": {"k": 16, "tol": 1e-9, "seed": 7002},
      "checks": ["riesz_mean", "eigenvalue_sum", "kth_eigenvalue", "heat_trace", "gauge_invariance"],
      "check_parameters": {"riesz_z": [30.0], "sum_k": [1, 4], "kth_k": [4], "heat_t": [1.0]},
      "gauge": {"waves": [{"amp": 0.8, "trig": "sin", "wave": [1.0, 0.0]}]}
    },
    {
      "name": "sphere_rotation",
      "geometry": {"type": "sphere", "radius": 1.0, "subdivisions": 3},
      "potential": {"rotation": 1.0},
      "solver": {"k": 2, "tol": 1e-9, "seed": 7003},
      "check_rtol": 0.02,
      "checks": ["lambda1_general", "diamagnetic", "gauge_invariance"],
      "gauge": {"linear": [0.3, 0.0, 0.2], "waves": [{"amp": 0.5, "trig": "sin", "axis": 2, "freq": 1.0}]}
    }
  ]
})";
}

int run_selftest(const std::string& outDir, bool corruptRhs) {
  Config config = parse_config(builtin_selftest_config(), "<selftest>");
  RunOutcome outcome = run_config(config, outDir, corruptRhs);

  int audited = 0;
  int tampered = 0;
  for (const ScenarioResult& r : outcome.results) {
    int held = 0;
    for (const BoundReport& b : r.reports) {
      if (b.holds) ++held;
      ++audited;
      if (!audit_report(b)) ++tampered;
    }
    std::cout << "[selftest] " << r.name << ": " << held << "/"
              << r.reports.size() << " checks hold\n";
  }
  std::cout << "[selftest] audit flagged " << tampered << " of " << audited
            << " reports\n";

  if (corruptRhs) {
    // Every scenario had its first report falsified; the audit must catch
    // each one and the run must fail.
    if (tampered != static_cast<int>(outcome.results.size()) ||
        outcome.exitCode != 2) {
      std::cout << "[selftest] FAIL: corruption was not detected\n";
      return 2;
    }
    std::cout << "[selftest] corrupted run rejected as expected\n";
    return 2;
  }
  if (tampered != 0) {
    std::cout << "[selftest] FAIL: honest reports failed their audit\n";
    return 2;
  }
  std::cout << (outcome.exitCode == 0 ? "[selftest] PASS\n"
                                      : "[selftest] FAIL\n");
  return outcome.exitCode;
}

}  // namespace maglap
