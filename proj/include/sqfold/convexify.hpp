#pragma once

#include <vector>

#include "sqfold/instance.hpp"

namespace sqfold {

// All eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
std::vector<double> eigenvalues(const SymMatrix& Q);

// Smallest eigenvalue. Throws std::invalid_argument on asymmetric input.
double min_eigenvalue(const SymMatrix& Q);

struct PerturbOptions {
  // Use delta = -diag(Q) for nonconvex diagonal matrices (zeroing the whole
  // quadratic) instead of clipping only the negative entries.
  bool paper_exact_diagonal = false;
};

// Diagonal shift delta so that Q + diag(delta) is positive semidefinite.
// Diagonal Q: per-entry rule (see options). PSD Q: zero. Otherwise a
// uniform |lambda_min| shift with a 1e-9 safety margin.
std::vector<double> perturbation(const SymMatrix& Q,
                                 const PerturbOptions& opts = {});

struct ConvexifiedInstance {
  QcpInstance original;
  std::vector<std::vector<double>> delta;  // index 0 = objective, 1..m = constraints
  std::vector<SymMatrix> perturbed;        // Q^(i) + diag(delta^(i))
  std::vector<bool> has_delta;             // any nonzero entry in delta^(i)

  const SymMatrix& perturbed_objective() const { return perturbed[0]; }
  const SymMatrix& perturbed_constraint(int i) const { return perturbed[i + 1]; }
};

ConvexifiedInstance convexify_instance(const QcpInstance& inst,
                                       const PerturbOptions& opts = {});

}  // namespace sqfold
