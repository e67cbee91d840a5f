#include "sqfold/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace sqfold {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-7;
constexpr double kIntTol = 1e-6;

struct Node {
  long id = 0;
  int depth = 0;
  double bound = -kInf;
  std::vector<signed char> fix;  // per binary: -1 free, 0, 1
  LpBasis basis;
  bool alive = true;
};

double quad_row_value(const QuadRow& q, const std::vector<double>& v, int n) {
  std::vector<double> x(v.begin(), v.begin() + n);
  double s = q.A.quad_form(x);
  for (auto [idx, coef] : q.lin) s += coef * v[idx];
  return s;
}

}  // namespace

LpRow oa_cut(const QuadRow& row, const std::vector<double>& xhat) {
  LpRow cut;
  cut.sense = Sense::LE;
  const std::vector<double> g = row.A.grad(xhat);
  for (int j = 0; j < row.A.n; ++j)
    if (g[j] != 0.0) cut.coefs.push_back({j, g[j]});
  for (auto [idx, coef] : row.lin) cut.coefs.push_back({idx, coef});
  cut.rhs = row.rhs + row.A.quad_form(xhat);
  return cut;
}

MilpResult branch_and_bound(const RelaxModel& model, const MilpParams& params) {
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  const int n = model.n;
  const int nc = model.num_cont;
  const int nb = model.num_bin;
  const bool has_quad_obj = n > 0 && !model.objective_quad.is_zero();
  const int t_col = has_quad_obj ? nc + nb : -1;
  const int lp_cols = nc + nb + (has_quad_obj ? 1 : 0);

  // Base LP shared by all nodes; binary bounds are overwritten per node.
  LpProblem base;
  base.num_cols = lp_cols;
  base.lower = model.lower;
  base.upper = model.upper;
  base.lower.insert(base.lower.end(), nb, 0.0);
  base.upper.insert(base.upper.end(), nb, 1.0);
  if (has_quad_obj) {
    // t >= x^T A0 x >= 0 (PSD); crude interval upper bound for the column.
    double thi = 0.0;
    for (int i = 0; i < n; ++i) {
      const double mi = std::max(std::fabs(model.lower[i]), std::fabs(model.upper[i]));
      for (int j = 0; j < n; ++j) {
        const double mj =
            std::max(std::fabs(model.lower[j]), std::fabs(model.upper[j]));
        thi += std::fabs(model.objective_quad.at(i, j)) * mi * mj;
      }
    }
    base.lower.push_back(0.0);
    base.upper.push_back(thi);
  }
  base.objective.assign(lp_cols, 0.0);
  for (auto [idx, coef] : model.objective_lin) base.objective[idx] += coef;
  if (has_quad_obj) base.objective[t_col] = 1.0;
  for (const ModelRow& r : model.rows) {
    LpRow row;
    row.sense = r.sense;
    row.rhs = r.rhs;
    row.coefs = r.coefs;
    base.rows.push_back(std::move(row));
  }
  // Quadratic rows enter relaxed to their linear part (the PSD term is >= 0).
  for (const QuadRow& q : model.quad_rows) {
    LpRow row;
    row.sense = Sense::LE;
    row.rhs = q.rhs;
    row.coefs = q.lin;
    base.rows.push_back(std::move(row));
  }

  std::vector<LpRow> cuts;  // globally valid OA cuts
  long cut_count = 0;

  MilpResult res;

  std::deque<Node> pool;
  auto cmp = [&](long a, long b) {
    if (pool[a].bound != pool[b].bound) return pool[a].bound > pool[b].bound;
    return pool[a].id > pool[b].id;
  };
  std::priority_queue<long, std::vector<long>, decltype(cmp)> heap(cmp);
  std::vector<long> dive_stack;

  pool.push_back(Node{0, 0, -kInf, std::vector<signed char>(nb, -1), {}, true});
  heap.push(0);

  double pruned_min = kInf;   // min LP bound among bound-fathomed nodes
  double integral_min = kInf; // min value among integral leaves
  long next_id = 1;
  long processed = 0;

  auto cutoff = [&]() {
    if (!res.has_incumbent) return kInf;
    return res.incumbent_value -
           params.gap_tol * std::max(1.0, std::fabs(res.incumbent_value));
  };
  auto open_min = [&]() {
    while (!heap.empty() && !pool[heap.top()].alive) heap.pop();
    return heap.empty() ? kInf : pool[heap.top()].bound;
  };
  auto global_lb = [&]() {
    double lb = std::min(open_min(), std::min(pruned_min, integral_min));
    return lb;
  };

  auto log_node = [&](const Node& nd, const char* status) {
    if (params.node_log)
      *params.node_log << nd.id << ' ' << nd.depth << ' ' << nd.bound << ' '
                       << status << '\n';
  };

  MilpStatus final_status = MilpStatus::Optimal;
  while (true) {
    while (!heap.empty() && !pool[heap.top()].alive) heap.pop();
    while (!dive_stack.empty() && !pool[dive_stack.back()].alive)
      dive_stack.pop_back();
    if (heap.empty() && dive_stack.empty()) break;
    if (processed >= params.node_limit) {
      final_status = MilpStatus::NodeLimit;
      break;
    }
    if (elapsed() > params.time_limit) {
      final_status = MilpStatus::TimeLimit;
      break;
    }

    long nid;
    if (processed % 8 == 7 && !dive_stack.empty()) {
      nid = dive_stack.back();
      dive_stack.pop_back();
    } else {
      nid = heap.top();
      heap.pop();
    }
    Node node = pool[nid];
    pool[nid].alive = false;
    ++processed;

    // Prune against the incumbent before paying for an LP.
    if (node.bound >= cutoff()) {
      pruned_min = std::min(pruned_min, node.bound);
      log_node(node, "pruned");
      if (params.on_node) params.on_node(processed, global_lb());
      continue;
    }

    // Node LP with current cut pool and branching fixes.
    LpProblem lp = base;
    for (const LpRow& c : cuts) lp.rows.push_back(c);
    for (int k = 0; k < nb; ++k) {
      if (node.fix[k] >= 0) {
        lp.lower[nc + k] = node.fix[k];
        lp.upper[nc + k] = node.fix[k];
      }
    }

    LpBasis basis = node.basis;
    bool node_infeasible = false;
    bool node_pruned = false;
    LpResult sol;
    for (int round = 0; round < 200; ++round) {
      // Extend a shorter warm basis with the slacks of newly added rows.
      const int mrows = static_cast<int>(lp.rows.size());
      if (!basis.basic.empty() &&
          static_cast<int>(basis.basic.size()) < mrows) {
        for (int i = static_cast<int>(basis.basic.size()); i < mrows; ++i)
          basis.basic.push_back(lp.num_cols + i);
      }
      sol = solve_lp(lp, basis.basic.empty() ? nullptr : &basis, &basis);
      if (sol.status == LpStatus::Breakdown) {
        sol = solve_lp(lp, nullptr, &basis);  // cold restart
      }
      if (sol.status == LpStatus::Breakdown)
        throw std::runtime_error("branch_and_bound: LP numerical breakdown");
      if (sol.status == LpStatus::Infeasible) {
        node_infeasible = true;
        break;
      }
      node.bound = sol.value;
      if (sol.value >= cutoff()) {
        node_pruned = true;
        break;
      }
      // Lazy outer approximation: objective epigraph and quadratic rows.
      bool added = false;
      if (has_quad_obj) {
        std::vector<double> x(sol.x.begin(), sol.x.begin() + n);
        const double qv = model.objective_quad.quad_form(x);
        if (qv - sol.x[t_col] > kQuadTol) {
          QuadRow epi;
          epi.A = model.objective_quad;
          epi.lin.push_back({t_col, -1.0});
          epi.rhs = 0.0;
          LpRow cut = oa_cut(epi, x);
          lp.rows.push_back(cut);
          cuts.push_back(std::move(cut));
          ++cut_count;
          added = true;
        }
      }
      for (const QuadRow& q : model.quad_rows) {
        if (quad_row_value(q, sol.x, n) - q.rhs > kQuadTol) {
          std::vector<double> x(sol.x.begin(), sol.x.begin() + n);
          LpRow cut = oa_cut(q, x);
          lp.rows.push_back(cut);
          cuts.push_back(std::move(cut));
          ++cut_count;
          added = true;
        }
      }
      if (!added) break;
    }

    if (node_infeasible) {
      log_node(node, "infeasible");
      if (params.on_node) params.on_node(processed, global_lb());
      continue;
    }
    if (node_pruned || node.bound >= cutoff()) {
      pruned_min = std::min(pruned_min, node.bound);
      log_node(node, "pruned");
      if (params.on_node) params.on_node(processed, global_lb());
      continue;
    }

    // Integral? Most fractional binary otherwise (ties: lowest index).
    int branch_var = -1;
    double best_frac = kIntTol;
    for (int k = 0; k < nb; ++k) {
      const double v = sol.x[nc + k];
      const double dist = std::min(std::fabs(v), std::fabs(1.0 - v));
      if (dist > best_frac) {
        best_frac = dist;
        branch_var = k;
      }
    }

    if (branch_var < 0) {
      // Integral assignment. Refuse the incumbent if the lazy cuts did not
      // converge (bound stays valid either way).
      bool quad_ok = true;
      if (has_quad_obj) {
        std::vector<double> x(sol.x.begin(), sol.x.begin() + n);
        quad_ok = model.objective_quad.quad_form(x) - sol.x[t_col] <= 10 * kQuadTol;
      }
      for (const QuadRow& q : model.quad_rows)
        quad_ok = quad_ok && quad_row_value(q, sol.x, n) - q.rhs <= 10 * kQuadTol;
      if (!quad_ok) {
        pruned_min = std::min(pruned_min, node.bound);
        log_node(node, "oa-limit");
        if (params.on_node) params.on_node(processed, global_lb());
        continue;
      }
      const double value = model.objective_value(sol.x);
      integral_min = std::min(integral_min, node.bound);
      if (!res.has_incumbent || value < res.incumbent_value) {
        res.has_incumbent = true;
        res.incumbent_value = value;
        res.incumbent = sol.x;
      }
      log_node(node, "integral");
      if (params.on_node) params.on_node(processed, global_lb());
      continue;
    }

    for (int branch_val = 0; branch_val <= 1; ++branch_val) {
      Node child;
      child.id = next_id++;
      child.depth = node.depth + 1;
      child.bound = node.bound;
      child.fix = node.fix;
      child.fix[branch_var] = static_cast<signed char>(branch_val);
      child.basis = basis;
      pool.push_back(std::move(child));
      heap.push(pool.size() - 1);
      dive_stack.push_back(pool.size() - 1);
    }
    log_node(node, "branched");
    if (params.on_node) params.on_node(processed, global_lb());
  }

  res.node_count = processed;
  res.cut_count = cut_count;
  res.status = final_status;
  const double lb = global_lb();
  if (final_status == MilpStatus::Optimal) {
    if (!res.has_incumbent) {
      res.status = MilpStatus::Infeasible;
      res.lower_bound = kInf;
    } else {
      res.lower_bound = std::min(lb, res.incumbent_value);
    }
  } else {
    res.lower_bound = res.has_incumbent ? std::min(lb, res.incumbent_value) : lb;
  }
  return res;
}

}  // namespace sqfold
