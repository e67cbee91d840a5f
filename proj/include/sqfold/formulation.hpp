#pragma once

#include <optional>
#include <vector>

#include "sqfold/convexify.hpp"
#include "sqfold/geometry.hpp"
#include "sqfold/instance.hpp"

namespace sqfold {

enum class BlockMode { D, Dplus };

// Sparse linear row over a block's local variables. Continuous variables
// are indexed 0 = x, 1 = y, then 2 + 4*(j-1) + {0:xi_j, 1:eta_j,
// 2:lambda_{j,1}, 3:lambda_{j,2}} for level j = 1..nu. Binaries z_1..z_nu
// use their own local index space 0..nu-1.
struct BlockRow {
  std::vector<std::pair<int, double>> cont;
  std::vector<std::pair<int, double>> bin;
  Sense sense = Sense::LE;
  double rhs = 0.0;
};

// The nu-level mixed-binary encoding of one (x, y) pair. For nu = 0 the
// lifted machinery is absent and only the initial convex relaxation rows
// remain.
struct LiftedBlock {
  double l = 0.0;
  double u = 0.0;
  int nu = 0;
  BlockMode mode = BlockMode::D;
  AngleSpan span;
  double C = 0.0;                   // max(l^2,u^2)/2 + 1/2
  std::vector<double> C_list;      // C * sin(theta_d / 2^{j+1}), j = 1..nu-1
  std::vector<double> cont_lower;  // per local continuous variable
  std::vector<double> cont_upper;
  std::vector<BlockRow> rows;
  bool has_square_row = false;  // y >= x^2 (Dplus only)

  int num_continuous() const { return static_cast<int>(cont_lower.size()); }
  int num_binary() const { return nu; }

  static int xi_index(int j) { return 2 + 4 * (j - 1); }
  static int eta_index(int j) { return 2 + 4 * (j - 1) + 1; }
  static int lambda1_index(int j) { return 2 + 4 * (j - 1) + 2; }
  static int lambda2_index(int j) { return 2 + 4 * (j - 1) + 3; }
};

// Constants of the absolute-value big-M rows: C and C_j = C*sin(theta_d/2^{j+1}).
struct BlockConstants {
  double C = 0.0;
  std::vector<double> C_list;
};
BlockConstants constants(double l, double u, int nu);

// Builds the block at level nu. nu = 0 yields the initial convex
// relaxation; nu >= 1 yields the lifted rows plus the secant cut and either
// the two tangent cuts (D) or the convex row y >= x^2 (Dplus).
LiftedBlock build_block(double l, double u, int nu, BlockMode mode);

// Same, with externally supplied constants (used by verification code to
// probe corrupted variants).
LiftedBlock build_block_with_constants(double l, double u, int nu,
                                       BlockMode mode,
                                       const BlockConstants& k);

// The constructive lift of a curve point: y = x^2 plus the forward
// rotation/folding recursion, with z_j recording the fold sign (omega = 0
// breaks toward z = 1) and lambda split from omega.
struct WitnessAssignment {
  double x = 0.0;
  double y = 0.0;
  std::vector<double> xi, eta, lambda1, lambda2;
  std::vector<int> z;

  // Dense local continuous vector in block ordering.
  std::vector<double> continuous() const;
};
WitnessAssignment lift_witness(double x, double l, double u, int nu);

// Largest violation of the block's rows (and bounds) by a local assignment;
// binaries passed separately. The square row is included when present.
double block_violation(const LiftedBlock& block,
                       const std::vector<double>& cont,
                       const std::vector<double>& z);

// Worst-case |sum_j delta_j (y_j - x_j^2)| over the level-nu relaxation.
double violation_bound(const std::vector<double>& delta,
                       const std::vector<std::pair<double, double>>& bounds,
                       int nu);

// A convex quadratic row: x^T A x + lin^T v <= rhs, A PSD over the model's
// continuous variables (A only touches the x block).
struct QuadRow {
  SymMatrix A;                       // n x n over the instance's x variables
  std::vector<std::pair<int, double>> lin;  // model variable index -> coef
  double rhs = 0.0;
};

struct ModelRow {
  std::vector<std::pair<int, double>> coefs;  // model variable index -> coef
  Sense sense = Sense::LE;
  double rhs = 0.0;
};

// Assembled relaxation. Variable layout: x_0..x_{n-1}, y_0..y_{n-1}, then
// each block's lifted variables; binaries z live in their own index space
// (columns n_cont..n_cont+n_bin-1 when flattened by the solver).
struct RelaxModel {
  int n = 0;  // instance variables
  BlockMode mode = BlockMode::D;
  int num_cont = 0;
  int num_bin = 0;
  std::vector<double> lower, upper;  // continuous bounds
  std::vector<ModelRow> rows;
  std::vector<QuadRow> quad_rows;       // constraint rows with PSD matrices
  SymMatrix objective_quad;             // over x variables (PSD)
  std::vector<std::pair<int, double>> objective_lin;
  double objective_offset = 0.0;
  std::vector<int> block_cont_base;  // per variable j
  std::vector<int> block_bin_base;
  std::vector<int> nu;
  std::vector<LiftedBlock> blocks;

  int x_index(int j) const { return j; }
  int y_index(int j) const { return n + j; }

  // Objective value at a full continuous assignment.
  double objective_value(const std::vector<double>& v) const;
};

// Builds relaxation at per-variable levels nu_j. Mode: std::nullopt picks
// automatically (D when every constraint matrix is zero or diagonal).
RelaxModel assemble_relaxation(const ConvexifiedInstance& ci,
                               const std::vector<int>& nu,
                               std::optional<BlockMode> mode = std::nullopt);

}  // namespace sqfold
