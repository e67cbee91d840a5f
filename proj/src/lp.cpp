#include "sqfold/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sqfold {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-8;
constexpr double kOptTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kRefactorInterval = 100;

// Dense LU with partial pivoting for the basis matrix.
struct LuFactors {
  int m = 0;
  std::vector<double> lu;   // row-major, L below diagonal (unit), U upper
  std::vector<int> perm;    // row permutation applied to inputs

  double& at(int i, int j) { return lu[static_cast<size_t>(i) * m + j]; }
  double at(int i, int j) const { return lu[static_cast<size_t>(i) * m + j]; }

  // cols[k] is a dense column of length m. Returns false when singular.
  bool factorize(const std::vector<std::vector<double>>& cols) {
    m = static_cast<int>(cols.size());
    lu.assign(static_cast<size_t>(m) * m, 0.0);
    perm.resize(m);
    for (int i = 0; i < m; ++i) {
      perm[i] = i;
      for (int j = 0; j < m; ++j) at(i, j) = cols[j][i];
    }
    for (int k = 0; k < m; ++k) {
      int piv = k;
      double best = std::fabs(at(k, k));
      for (int i = k + 1; i < m; ++i) {
        const double v = std::fabs(at(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best < 1e-12) return false;
      if (piv != k) {
        for (int j = 0; j < m; ++j) std::swap(at(k, j), at(piv, j));
        std::swap(perm[k], perm[piv]);
      }
      const double d = at(k, k);
      for (int i = k + 1; i < m; ++i) {
        const double f = at(i, k) / d;
        at(i, k) = f;
        if (f == 0.0) continue;
        for (int j = k + 1; j < m; ++j) at(i, j) -= f * at(k, j);
      }
    }
    return true;
  }

  // v <- B^{-1} v
  void ftran(std::vector<double>& v) const {
    std::vector<double> w(m);
    for (int i = 0; i < m; ++i) w[i] = v[perm[i]];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < i; ++j) w[i] -= at(i, j) * w[j];
    for (int i = m - 1; i >= 0; --i) {
      for (int j = i + 1; j < m; ++j) w[i] -= at(i, j) * w[j];
      w[i] /= at(i, i);
    }
    v = std::move(w);
  }

  // v <- B^{-T} v
  void btran(std::vector<double>& v) const {
    std::vector<double> w = v;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < i; ++j) w[i] -= at(j, i) * w[j];
      w[i] /= at(i, i);
    }
    for (int i = m - 1; i >= 0; --i)
      for (int j = i + 1; j < m; ++j) w[i] -= at(j, i) * w[j];
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[perm[i]] = w[i];
    v = std::move(out);
  }
};

struct Eta {
  int r = 0;
  std::vector<double> d;
};

enum class VarState : unsigned char { Basic, AtLower, AtUpper };

}  // namespace

LpResult solve_lp(const LpProblem& p, const LpBasis* warm, LpBasis* basis_out) {
  const int n = p.num_cols;
  const int m = static_cast<int>(p.rows.size());
  if (static_cast<int>(p.lower.size()) != n ||
      static_cast<int>(p.upper.size()) != n ||
      static_cast<int>(p.objective.size()) != n)
    throw std::invalid_argument("solve_lp: inconsistent problem dimensions");
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(p.lower[j]) || !std::isfinite(p.upper[j]))
      throw std::invalid_argument(
          "solve_lp: structural column without finite bounds");
    if (p.lower[j] > p.upper[j] + 1e-14) {
      LpResult r;
      r.status = LpStatus::Infeasible;
      return r;
    }
  }

  const int ncols = n + m;
  std::vector<double> lo(ncols), hi(ncols), cost(ncols, 0.0), b(m);
  for (int j = 0; j < n; ++j) {
    lo[j] = p.lower[j];
    hi[j] = p.upper[j];
    cost[j] = p.objective[j];
  }
  // columns (sparse) for structural variables
  std::vector<std::vector<std::pair<int, double>>> col(ncols);
  for (int i = 0; i < m; ++i) {
    b[i] = p.rows[i].rhs;
    for (auto [j, v] : p.rows[i].coefs) {
      if (j < 0 || j >= n)
        throw std::invalid_argument("solve_lp: row references unknown column");
      if (v != 0.0) col[j].push_back({i, v});
    }
    const int s = n + i;
    col[s].push_back({i, 1.0});
    switch (p.rows[i].sense) {
      case Sense::LE: lo[s] = 0.0; hi[s] = kInf; break;
      case Sense::GE: lo[s] = -kInf; hi[s] = 0.0; break;
      case Sense::EQ: lo[s] = 0.0; hi[s] = 0.0; break;
    }
  }

  std::vector<VarState> state(ncols);
  std::vector<int> basic(m);
  auto set_slack_basis = [&]() {
    for (int j = 0; j < n; ++j)
      state[j] = (std::fabs(lo[j]) <= std::fabs(hi[j])) ? VarState::AtLower
                                                        : VarState::AtUpper;
    for (int i = 0; i < m; ++i) {
      basic[i] = n + i;
      state[n + i] = VarState::Basic;
    }
  };
  bool warm_ok = false;
  if (warm && static_cast<int>(warm->basic.size()) == m) {
    std::vector<bool> seen(ncols, false);
    warm_ok = true;
    for (int c : warm->basic) {
      if (c < 0 || c >= ncols || seen[c]) {
        warm_ok = false;
        break;
      }
      seen[c] = true;
    }
    if (warm_ok) {
      basic = warm->basic;
      for (int j = 0; j < ncols; ++j) state[j] = VarState::AtLower;
      for (int j = 0; j < ncols; ++j) {
        if (seen[j]) {
          state[j] = VarState::Basic;
        } else if (hi[j] == kInf) {
          state[j] = VarState::AtLower;
        } else if (lo[j] == -kInf) {
          state[j] = VarState::AtUpper;
        } else {
          state[j] = (std::fabs(lo[j]) <= std::fabs(hi[j]))
                         ? VarState::AtLower
                         : VarState::AtUpper;
        }
      }
    }
  }
  if (!warm_ok) set_slack_basis();

  LuFactors lu;
  std::vector<Eta> etas;
  auto refactorize = [&]() {
    std::vector<std::vector<double>> cols(m, std::vector<double>(m, 0.0));
    for (int k = 0; k < m; ++k)
      for (auto [i, v] : col[basic[k]]) cols[k][i] = v;
    etas.clear();
    return lu.factorize(cols);
  };
  if (!refactorize()) {
    if (warm_ok) {
      set_slack_basis();
      if (!refactorize()) {
        LpResult r;
        r.status = LpStatus::Breakdown;
        return r;
      }
    } else {
      LpResult r;
      r.status = LpStatus::Breakdown;
      return r;
    }
  }

  auto ftran = [&](std::vector<double>& v) {
    lu.ftran(v);
    for (const Eta& e : etas) {
      const double pivot = v[e.r] / e.d[e.r];
      v[e.r] = pivot;
      if (pivot == 0.0) continue;
      for (int i = 0; i < m; ++i)
        if (i != e.r) v[i] -= e.d[i] * pivot;
    }
  };
  auto btran = [&](std::vector<double>& v) {
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      const Eta& e = *it;
      double s = v[e.r];
      for (int i = 0; i < m; ++i)
        if (i != e.r) s -= e.d[i] * v[i];
      v[e.r] = s / e.d[e.r];
    }
    lu.btran(v);
  };

  std::vector<double> nb_value(ncols, 0.0);
  auto nonbasic_value = [&](int j) {
    return state[j] == VarState::AtUpper ? hi[j] : lo[j];
  };
  std::vector<double> xb(m);
  auto compute_basics = [&]() {
    std::vector<double> rhs = b;
    for (int j = 0; j < ncols; ++j) {
      if (state[j] == VarState::Basic) continue;
      const double v = nonbasic_value(j);
      nb_value[j] = v;
      if (v == 0.0) continue;
      for (auto [i, a] : col[j]) rhs[i] -= a * v;
    }
    std::vector<double> target = rhs;
    ftran(rhs);
    xb = std::move(rhs);
    if (etas.empty()) return true;
    // Accumulated-error trigger: refactorize when B x_B drifts from the rhs.
    std::vector<double> resid = std::move(target);
    for (int k = 0; k < m; ++k) {
      if (xb[k] == 0.0) continue;
      for (auto [i, a] : col[basic[k]]) resid[i] -= a * xb[k];
    }
    double err = 0.0;
    for (double v : resid) err = std::max(err, std::fabs(v));
    if (err <= 1e-9) return true;
    if (!refactorize()) return false;
    std::vector<double> rhs2 = b;
    for (int j = 0; j < ncols; ++j) {
      if (state[j] == VarState::Basic) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (auto [i, a] : col[j]) rhs2[i] -= a * v;
    }
    ftran(rhs2);
    xb = std::move(rhs2);
    return true;
  };

  LpResult res;
  res.x.assign(n, 0.0);
  res.duals.assign(m, 0.0);

  const int max_iter = 20000 + 200 * (m + n);
  const long degen_limit = 2L * (m + ncols);
  long degen_count = 0;
  int since_refactor = 0;
  bool bland = false;

  std::vector<double> cb(m), pi(m), dir(m);

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter;
    if (!compute_basics()) {
      res.status = LpStatus::Breakdown;
      if (basis_out) basis_out->basic = basic;
      return res;
    }

    // Phase selection: any basic outside bounds => phase 1 costs.
    double infeas = 0.0;
    for (int k = 0; k < m; ++k) {
      const int j = basic[k];
      if (xb[k] < lo[j] - kFeasTol) infeas += lo[j] - xb[k];
      else if (xb[k] > hi[j] + kFeasTol) infeas += xb[k] - hi[j];
    }
    const bool phase1 = infeas > kFeasTol;

    for (int k = 0; k < m; ++k) {
      const int j = basic[k];
      if (phase1) {
        cb[k] = xb[k] < lo[j] - kFeasTol ? -1.0
                : xb[k] > hi[j] + kFeasTol ? 1.0
                                           : 0.0;
      } else {
        cb[k] = cost[j];
      }
    }
    pi = cb;
    btran(pi);

    // Pricing.
    int enter = -1;
    double best_score = bland ? 0.0 : kOptTol;
    for (int j = 0; j < ncols; ++j) {
      if (state[j] == VarState::Basic) continue;
      if (hi[j] - lo[j] < 1e-14) continue;  // fixed
      double dj = (phase1 ? 0.0 : cost[j]);
      for (auto [i, a] : col[j]) dj -= pi[i] * a;
      const bool attractive = (state[j] == VarState::AtLower && dj < -kOptTol) ||
                              (state[j] == VarState::AtUpper && dj > kOptTol);
      if (!attractive) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (std::fabs(dj) > best_score) {
        best_score = std::fabs(dj);
        enter = j;
      }
    }

    if (enter < 0) {
      if (phase1) {
        res.status = LpStatus::Infeasible;
        if (basis_out) basis_out->basic = basic;
        return res;
      }
      // Optimal.
      for (int j = 0; j < n; ++j)
        res.x[j] = state[j] == VarState::Basic ? 0.0 : nonbasic_value(j);
      for (int k = 0; k < m; ++k)
        if (basic[k] < n) res.x[basic[k]] = xb[k];
      res.value = 0.0;
      for (int j = 0; j < n; ++j) res.value += cost[j] * res.x[j];
      res.duals = pi;
      res.status = LpStatus::Optimal;
      if (basis_out) basis_out->basic = basic;
      return res;
    }

    const double sigma = state[enter] == VarState::AtLower ? 1.0 : -1.0;
    dir.assign(m, 0.0);
    for (auto [i, a] : col[enter]) dir[i] = a;
    ftran(dir);

    // Ratio test. Basic k moves at rate -sigma * dir[k].
    double t_best = hi[enter] - lo[enter];  // entering hits its other bound
    int leave = -1;                          // -1 => bound flip
    bool leave_to_upper = false;
    for (int k = 0; k < m; ++k) {
      const double rate = -sigma * dir[k];
      if (std::fabs(rate) < kPivotTol) continue;
      const int j = basic[k];
      double t = kInf;
      bool to_upper = false;
      if (phase1 && xb[k] < lo[j] - kFeasTol) {
        if (rate > 0.0) {  // rising toward its violated lower bound
          t = (lo[j] - xb[k]) / rate;
          to_upper = false;
        }
      } else if (phase1 && xb[k] > hi[j] + kFeasTol) {
        if (rate < 0.0) {
          t = (hi[j] - xb[k]) / rate;
          to_upper = true;
        }
      } else if (rate > 0.0) {
        if (hi[j] < kInf) {
          t = (hi[j] - xb[k]) / rate;
          to_upper = true;
        }
      } else {
        if (lo[j] > -kInf) {
          t = (lo[j] - xb[k]) / rate;
          to_upper = false;
        }
      }
      if (t < -1e-12) t = 0.0;
      if (t < t_best - 1e-12 ||
          (t < t_best + 1e-12 && leave >= 0 && bland && basic[k] < basic[leave])) {
        t_best = std::max(t, 0.0);
        leave = k;
        leave_to_upper = to_upper;
      }
    }

    if (!(t_best < kInf)) {
      res.status = LpStatus::Breakdown;  // nothing blocked a priced column
      if (basis_out) basis_out->basic = basic;
      return res;
    }

    if (t_best <= 1e-12) {
      if (++degen_count > degen_limit) bland = true;
    }

    if (leave < 0) {
      // Bound flip of the entering column.
      state[enter] = state[enter] == VarState::AtLower ? VarState::AtUpper
                                                       : VarState::AtLower;
      continue;
    }

    // Pivot: entering becomes basic, leaving goes to the bound it hit.
    const int out_col = basic[leave];
    state[out_col] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
    basic[leave] = enter;
    state[enter] = VarState::Basic;

    if (std::fabs(dir[leave]) < kPivotTol || ++since_refactor >= kRefactorInterval) {
      since_refactor = 0;
      if (!refactorize()) {
        res.status = LpStatus::Breakdown;
        if (basis_out) basis_out->basic = basic;
        return res;
      }
    } else {
      etas.push_back({leave, dir});
    }
  }

  res.status = LpStatus::Breakdown;  // iteration limit; treated as numerical failure
  if (basis_out) basis_out->basic = basic;
  return res;
}

}  // namespace sqfold
