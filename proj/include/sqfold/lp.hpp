#pragma once

#include <vector>

#include "sqfold/geometry.hpp"  // Sense

namespace sqfold {

struct LpRow {
  std::vector<std::pair<int, double>> coefs;
  Sense sense = Sense::LE;
  double rhs = 0.0;
};

// min c^T x  s.t. rows, l <= x <= u. Every structural column must carry
// finite bounds; validation throws std::invalid_argument otherwise.
struct LpProblem {
  int num_cols = 0;
  std::vector<double> lower, upper;
  std::vector<double> objective;
  std::vector<LpRow> rows;
};

enum class LpStatus { Optimal, Infeasible, Breakdown };

struct LpResult {
  LpStatus status = LpStatus::Breakdown;
  double value = 0.0;
  std::vector<double> x;      // structural solution
  std::vector<double> duals;  // one multiplier per row
  int iterations = 0;
};

// Basic column set (structural and slack indices), reusable across related
// solves for warm starts.
struct LpBasis {
  std::vector<int> basic;
};

// Bounded-variable revised simplex. Dense LU of the basis with product-form
// updates, refactorized every 100 pivots or on an accumulated-error trigger;
// Dantzig pricing with Bland's rule after 2*(rows+cols) degenerate steps.
LpResult solve_lp(const LpProblem& p, const LpBasis* warm = nullptr,
                  LpBasis* basis_out = nullptr);

}  // namespace sqfold
