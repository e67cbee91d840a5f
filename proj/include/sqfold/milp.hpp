#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "sqfold/formulation.hpp"
#include "sqfold/lp.hpp"

namespace sqfold {

struct MilpParams {
  double gap_tol = 1e-7;
  long node_limit = 100000000;
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  std::ostream* node_log = nullptr;  // one line per node: id, depth, bound, status
  // Test hook: called after each processed node with (node_count, global lower bound).
  std::function<void(long, double)> on_node;
};

enum class MilpStatus { Optimal, Infeasible, NodeLimit, TimeLimit };

struct MilpResult {
  MilpStatus status = MilpStatus::Infeasible;
  double lower_bound = -std::numeric_limits<double>::infinity();
  bool has_incumbent = false;
  std::vector<double> incumbent;  // continuous columns then binaries
  double incumbent_value = std::numeric_limits<double>::infinity();
  long node_count = 0;
  long cut_count = 0;
};

// Gradient linearization of x^T A x + lin^T v <= rhs at xhat (the x block
// of the model). Valid for every point of the convex region; tight at xhat.
LpRow oa_cut(const QuadRow& row, const std::vector<double>& xhat);

// Best-bound branch and bound over the block binaries with depth-first
// dives every 8 nodes. The convex quadratic objective is handled through an
// epigraph column with lazy cuts; quadratic rows get the same treatment.
MilpResult branch_and_bound(const RelaxModel& model, const MilpParams& params = {});

}  // namespace sqfold
