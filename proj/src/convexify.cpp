#include "sqfold/convexify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqfold {

namespace {

double off_diagonal_norm(const SymMatrix& A) {
  double s = 0.0;
  for (int i = 0; i < A.n; ++i)
    for (int j = i + 1; j < A.n; ++j) s += 2.0 * A.at(i, j) * A.at(i, j);
  return std::sqrt(s);
}

double frobenius(const SymMatrix& A) {
  double s = 0.0;
  for (double v : A.a) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> eigenvalues(const SymMatrix& Q) {
  if (!Q.is_symmetric())
    throw std::invalid_argument("eigenvalues: matrix is not symmetric");
  const int n = Q.n;
  if (n == 0) return {};
  SymMatrix A = Q;
  const double stop = 1e-12 * std::max(1.0, frobenius(A));
  for (int sweep = 0; sweep < 100 && off_diagonal_norm(A) > stop; ++sweep) {
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A.at(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        const double theta = (A.at(q, q) - A.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A.at(k, p);
          const double akq = A.at(k, q);
          A.at(k, p) = c * akp - s * akq;
          A.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A.at(p, k);
          const double aqk = A.at(q, k);
          A.at(p, k) = c * apk - s * aqk;
          A.at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = A.at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double min_eigenvalue(const SymMatrix& Q) {
  const auto ev = eigenvalues(Q);
  if (ev.empty()) throw std::invalid_argument("min_eigenvalue: empty matrix");
  return ev.front();
}

std::vector<double> perturbation(const SymMatrix& Q,
                                 const PerturbOptions& opts) {
  const int n = Q.n;
  std::vector<double> delta(n, 0.0);
  if (n == 0) return delta;
  if (Q.is_diagonal()) {
    bool nonconvex = false;
    for (int j = 0; j < n; ++j) nonconvex = nonconvex || Q.at(j, j) < 0.0;
    if (!nonconvex) return delta;
    for (int j = 0; j < n; ++j)
      delta[j] = opts.paper_exact_diagonal ? -Q.at(j, j)
                                           : std::max(-Q.at(j, j), 0.0);
    return delta;
  }
  const double lam = min_eigenvalue(Q);
  if (lam >= -1e-10) return delta;
  std::fill(delta.begin(), delta.end(), std::fabs(lam) + 1e-9);
  return delta;
}

ConvexifiedInstance convexify_instance(const QcpInstance& inst,
                                       const PerturbOptions& opts) {
  inst.validate();
  ConvexifiedInstance out;
  out.original = inst;
  out.delta.resize(inst.m + 1);
  out.perturbed.resize(inst.m + 1);
  out.has_delta.resize(inst.m + 1);
  for (int i = 0; i <= inst.m; ++i) {
    const SymMatrix& Q = (i == 0) ? inst.objective.Q : inst.constraints[i - 1].Q;
    out.delta[i] = perturbation(Q, opts);
    SymMatrix P = Q;
    bool any = false;
    for (int j = 0; j < inst.n; ++j) {
      P.at(j, j) += out.delta[i][j];
      any = any || out.delta[i][j] != 0.0;
    }
    out.perturbed[i] = std::move(P);
    out.has_delta[i] = any;
  }
  return out;
}

}  // namespace sqfold
