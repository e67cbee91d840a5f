#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sqfold/convexify.hpp"
#include "sqfold/formulation.hpp"
#include "sqfold/instance.hpp"

namespace sqfold {

struct RefineParams {
  int T = 20;               // refinement batch size per iteration
  double eps_viol = 1e-5;   // score threshold for refining a variable
  double eps_gap = 1e-4;    // relative-gap termination
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  long node_limit = 100000000;                                  // per solve
  std::optional<BlockMode> mode;  // override the automatic D/Dplus choice
  PerturbOptions perturb;
  int max_nu = 24;
  int max_iterations = 500;
  std::ostream* log_json = nullptr;  // JSON-lines, one object per iteration
};

enum class SolveStatus { Optimal, Stalled, TimeLimit, NodeLimit, Infeasible };

struct IterationRecord {
  int k = 0;
  double tau_k = 0.0;    // relaxation optimum of this iteration
  double tau_f_k = 0.0;  // local-search value (NaN when none found)
  double tau_lower = 0.0;
  double tau_upper = 0.0;
  double gap = 0.0;
  std::vector<int> refined;
  long nodes = 0;
  double seconds = 0.0;
};

struct SolveState {
  SolveStatus status = SolveStatus::Stalled;
  double tau_lower = -std::numeric_limits<double>::infinity();
  double tau_upper = std::numeric_limits<double>::infinity();
  std::vector<int> nu;  // reduced-space refinement levels
  std::optional<std::vector<double>> incumbent;  // full-length feasible point
  std::vector<IterationRecord> iterations;
  long total_nodes = 0;
  double seconds = 0.0;
};

// Component-wise |y_j - x_j^2|.
std::vector<double> violation_scores(const std::vector<double>& x,
                                     const std::vector<double>& y);

// Projected-gradient descent on the exact penalty with doubling weight.
// Returns a point only when the worst constraint violation is <= 1e-6;
// the value is the true objective there.
struct LocalPoint {
  std::vector<double> x;
  double value = 0.0;
};
std::optional<LocalPoint> local_search(const QcpInstance& inst,
                                       std::vector<double> x0);

// The adaptive refinement loop: convexify, relax at the current levels,
// bound from below by branch and bound, from above by local search, then
// refine the worst offenders until the relative gap closes.
SolveState solve(const QcpInstance& inst, const RefineParams& params = {});

const char* to_string(SolveStatus s);

}  // namespace sqfold
