#pragma once

#include <random>

#include "sqfold/instance.hpp"

namespace fixtures {

// min x1 + x2  s.t. x1^2 + x2^2 >= 0.5 on [0,1]^2; optimum sqrt(0.5).
inline sqfold::QcpInstance circle() {
  using namespace sqfold;
  QcpInstance inst;
  inst.name = "circle";
  inst.n = 2;
  inst.m = 1;
  inst.lower = {0, 0};
  inst.upper = {1, 1};
  inst.objective.Q = SymMatrix(2);
  inst.objective.c = {1, 1};
  Quadratic con;
  con.Q = SymMatrix(2);
  con.Q.at(0, 0) = -1;
  con.Q.at(1, 1) = -1;
  con.c = {0, 0};
  inst.constraints.push_back(con);
  inst.rhs.push_back(-0.5);
  return inst;
}

// min -x^2 + 0.8 x on [0,1]; optimum -0.2 at x = 1.
inline sqfold::QcpInstance boxqp1d() {
  return sqfold::parse_boxqp("1\n0.8\n-2.0\n");
}

// Random bounded QCP with a guaranteed feasible midpoint.
inline sqfold::QcpInstance random_qcp(std::mt19937& rng, int n, int m,
                                      double box_halfwidth = 1.25) {
  using namespace sqfold;
  std::uniform_real_distribution<double> coef(-2, 2);
  std::uniform_real_distribution<double> width(0.5, box_halfwidth * 2.0);
  std::uniform_real_distribution<double> slack(0.1, 1.0);
  QcpInstance inst;
  inst.n = n;
  inst.m = m;
  inst.objective.Q = SymMatrix(n);
  inst.objective.c.resize(n);
  for (int i = 0; i < n; ++i) {
    inst.objective.c[i] = coef(rng);
    for (int j = i; j < n; ++j) {
      const double v = coef(rng);
      inst.objective.Q.at(i, j) = v;
      inst.objective.Q.at(j, i) = v;
    }
  }
  inst.lower.resize(n);
  inst.upper.resize(n);
  for (int j = 0; j < n; ++j) {
    const double lo = -2.0 + slack(rng);
    inst.lower[j] = lo;
    inst.upper[j] = std::min(2.0, lo + width(rng));
  }
  std::vector<double> mid(n);
  for (int j = 0; j < n; ++j) mid[j] = 0.5 * (inst.lower[j] + inst.upper[j]);
  for (int i = 0; i < m; ++i) {
    Quadratic con;
    con.Q = SymMatrix(n);
    con.c.resize(n);
    for (int a = 0; a < n; ++a) {
      con.c[a] = coef(rng);
      for (int b = a; b < n; ++b) {
        const double v = coef(rng);
        con.Q.at(a, b) = v;
        con.Q.at(b, a) = v;
      }
    }
    inst.constraints.push_back(con);
    inst.rhs.push_back(inst.constraints[i].value(mid) + slack(rng));
  }
  inst.name = "random";
  return inst;
}

}  // namespace fixtures
