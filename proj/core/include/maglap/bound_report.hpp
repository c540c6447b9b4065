#pragma once

#include <map>
#include <string>

namespace maglap {

// Outcome of one inequality check, lhs <= rhs + tol. margin = rhs - lhs and
// holds = (margin >= -tol) always; equality assertions are encoded as the
// inequality |gap| <= allowance with tol = 0.
struct BoundReport {
  std::string name;  // check identifier, stable across runs
  std::string eq;    // human-readable statement of the inequality
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool holds = false;
  double tol = 0.0;
  std::map<std::string, double> inputs;
};

inline BoundReport make_report(std::string name, std::string eq, double lhs,
                               double rhs, double tol,
                               std::map<std::string, double> inputs) {
  BoundReport r;
  r.name = std::move(name);
  r.eq = std::move(eq);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.tol = tol;
  r.holds = r.margin >= -tol;
  r.inputs = std::move(inputs);
  return r;
}

}  // namespace maglap
