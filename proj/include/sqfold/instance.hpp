#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqfold {

// Dense symmetric matrix, row-major. Small problems only; no sparsity games.
struct SymMatrix {
  int n = 0;
  std::vector<double> a;  // n*n entries

  SymMatrix() = default;
  explicit SymMatrix(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  bool is_zero(double tol = 0.0) const;
  bool is_diagonal(double tol = 1e-12) const;
  bool is_symmetric(double tol = 1e-12) const;
  // x^T A x
  double quad_form(const std::vector<double>& x) const;
  // (2 A x)_i, the gradient of the quadratic form
  std::vector<double> grad(const std::vector<double>& x) const;
};

// One quadratic expression x^T Q x + c^T x.
struct Quadratic {
  SymMatrix Q;
  std::vector<double> c;

  double value(const std::vector<double>& x) const;
  std::vector<double> gradient(const std::vector<double>& x) const;
};

// min f0(x) s.t. fi(x) <= rhs_i, l <= x <= u.
struct QcpInstance {
  std::string name;
  int n = 0;
  int m = 0;
  Quadratic objective;
  std::vector<Quadratic> constraints;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  void validate() const;  // throws ParseError on structural problems
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON instance schema:
//   {name, n, m, bounds: [[l,u],...],
//    objective: {Q: [[i,j,v],...], c: [...]},
//    constraints: [{Q, c, rhs}, ...]}
// An off-diagonal triplet (i,j,v) contributes the bilinear term v*x_i*x_j
// in total (stored half/half on the two symmetric entries); duplicate
// triplets are summed.
QcpInstance parse_json(const std::string& text);
QcpInstance load_json_file(const std::string& path);
std::string serialize(const QcpInstance& inst);

// boxqp text format: n, then n objective-linear entries, then n rows of Q.
// Encodes min 1/2 x^T Q x + c^T x over [0,1]^n; negate=true flips the
// objective for max-form files.
QcpInstance parse_boxqp(const std::string& text, bool negate = false);
QcpInstance load_boxqp_file(const std::string& path, bool negate = false);

// Substitutes variables with u_j - l_j <= 1e-12 by their fixed value.
struct Reduction {
  std::vector<int> kept;           // reduced index -> original index
  std::vector<double> fixed_value; // original index -> value (kept vars: unused)
  std::vector<bool> is_fixed;      // original index -> fixed?
  double objective_offset = 0.0;

  std::vector<double> back_map(const std::vector<double>& reduced_x) const;
};
struct ReducedInstance {
  QcpInstance instance;
  Reduction reduction;
};
ReducedInstance eliminate_fixed(const QcpInstance& inst);

}  // namespace sqfold
