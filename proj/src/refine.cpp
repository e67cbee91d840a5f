#include "sqfold/refine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "sqfold/milp.hpp"

namespace sqfold {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_violation(const QcpInstance& inst, const std::vector<double>& x) {
  double worst = 0.0;
  for (int i = 0; i < inst.m; ++i)
    worst = std::max(worst, inst.constraints[i].value(x) - inst.rhs[i]);
  return worst;
}

double penalty(const QcpInstance& inst, const std::vector<double>& x, double rho) {
  double p = inst.objective.value(x);
  for (int i = 0; i < inst.m; ++i)
    p += rho * std::max(0.0, inst.constraints[i].value(x) - inst.rhs[i]);
  return p;
}

}  // namespace

std::vector<double> violation_scores(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("violation_scores: length mismatch");
  std::vector<double> s(x.size());
  for (size_t j = 0; j < x.size(); ++j) s[j] = std::fabs(y[j] - x[j] * x[j]);
  return s;
}

std::optional<LocalPoint> local_search(const QcpInstance& inst,
                                       std::vector<double> x0) {
  const int n = inst.n;
  auto clamp = [&](std::vector<double>& x) {
    for (int j = 0; j < n; ++j)
      x[j] = std::min(inst.upper[j], std::max(inst.lower[j], x[j]));
  };
  clamp(x0);
  std::vector<double> x = x0;

  int total_iters = 0;
  for (double rho = 10.0; rho <= 1.1e6 && total_iters < 500; rho *= 2.0) {
    while (total_iters < 500) {
      ++total_iters;
      const double fx = penalty(inst, x, rho);
      std::vector<double> g = inst.objective.gradient(x);
      for (int i = 0; i < inst.m; ++i) {
        if (inst.constraints[i].value(x) - inst.rhs[i] > 0.0) {
          const std::vector<double> gi = inst.constraints[i].gradient(x);
          for (int j = 0; j < n; ++j) g[j] += rho * gi[j];
        }
      }
      double gnorm = 0.0;
      for (double v : g) gnorm = std::max(gnorm, std::fabs(v));
      if (gnorm < 1e-14) break;

      bool moved = false;
      double t = 1.0 / std::max(1.0, gnorm);
      for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
        std::vector<double> xn(n);
        for (int j = 0; j < n; ++j) xn[j] = x[j] - t * g[j];
        clamp(xn);
        double step2 = 0.0;
        for (int j = 0; j < n; ++j)
          step2 += (x[j] - xn[j]) * (x[j] - xn[j]);
        if (step2 < 1e-24) break;
        if (penalty(inst, xn, rho) <= fx - 1e-4 / t * step2) {
          x = std::move(xn);
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  if (max_violation(inst, x) > 1e-6) return std::nullopt;
  return LocalPoint{x, inst.objective.value(x)};
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

void emit_json_line(std::ostream* out, const IterationRecord& rec) {
  if (!out) return;
  *out << "{\"k\":" << rec.k << ",\"tau_lower\":" << rec.tau_lower
       << ",\"tau_upper\":" << rec.tau_upper << ",\"gap\":" << rec.gap
       << ",\"refined_indices\":[";
  for (size_t i = 0; i < rec.refined.size(); ++i)
    *out << (i ? "," : "") << rec.refined[i];
  *out << "],\"nodes\":" << rec.nodes << ",\"seconds\":" << rec.seconds
       << "}\n";
}

}  // namespace

SolveState solve(const QcpInstance& inst, const RefineParams& params) {
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  inst.validate();
  SolveState state;

  ReducedInstance red = eliminate_fixed(inst);
  const QcpInstance& rinst = red.instance;
  const double offset = red.reduction.objective_offset;

  if (rinst.n == 0) {
    // Everything fixed; the constraints are constants.
    for (int i = 0; i < rinst.m; ++i) {
      if (rinst.rhs[i] < -1e-9) {
        state.status = SolveStatus::Infeasible;
        return state;
      }
    }
    state.status = SolveStatus::Optimal;
    state.tau_lower = state.tau_upper = offset;
    state.incumbent = red.reduction.back_map({});
    state.seconds = elapsed();
    return state;
  }

  const ConvexifiedInstance ci = convexify_instance(rinst, params.perturb);
  state.nu.assign(rinst.n, 0);

  // Preprocessing: seed the upper bound from the box midpoint.
  {
    std::vector<double> mid(rinst.n);
    for (int j = 0; j < rinst.n; ++j)
      mid[j] = 0.5 * (rinst.lower[j] + rinst.upper[j]);
    if (auto p = local_search(rinst, mid)) {
      state.tau_upper = p->value + offset;
      state.incumbent = red.reduction.back_map(p->x);
    }
  }

  for (int k = 1; k <= params.max_iterations; ++k) {
    RelaxModel model = assemble_relaxation(ci, state.nu, params.mode);
    MilpParams mp;
    mp.gap_tol = 1e-7;
    mp.node_limit = params.node_limit;
    mp.time_limit = params.time_limit - elapsed();
    const MilpResult r = branch_and_bound(model, mp);
    state.total_nodes += r.node_count;

    if (r.status == MilpStatus::Infeasible) {
      state.status = SolveStatus::Infeasible;
      state.seconds = elapsed();
      return state;
    }

    IterationRecord rec;
    rec.k = k;
    rec.tau_k = r.lower_bound + offset;
    rec.nodes = r.node_count;
    state.tau_lower = std::max(state.tau_lower, r.lower_bound + offset);

    rec.tau_f_k = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> relax_x, relax_y;
    if (r.has_incumbent) {
      relax_x.assign(r.incumbent.begin(), r.incumbent.begin() + rinst.n);
      relax_y.assign(r.incumbent.begin() + rinst.n,
                     r.incumbent.begin() + 2 * rinst.n);
      if (auto p = local_search(rinst, relax_x)) {
        rec.tau_f_k = p->value + offset;
        if (p->value + offset < state.tau_upper) {
          state.tau_upper = p->value + offset;
          state.incumbent = red.reduction.back_map(p->x);
        }
      }
    }

    const double gap =
        std::isfinite(state.tau_upper)
            ? std::fabs(state.tau_upper - state.tau_lower) /
                  std::max(1.0, std::fabs(state.tau_upper))
            : kInf;
    rec.tau_lower = state.tau_lower;
    rec.tau_upper = state.tau_upper;
    rec.gap = gap;

    bool done = false;
    SolveStatus done_status = SolveStatus::Optimal;
    if (gap <= params.eps_gap) {
      done = true;
    } else if (r.status == MilpStatus::TimeLimit || elapsed() > params.time_limit) {
      done = true;
      done_status = SolveStatus::TimeLimit;
    } else if (r.status == MilpStatus::NodeLimit) {
      done = true;
      done_status = SolveStatus::NodeLimit;
    } else if (!r.has_incumbent) {
      done = true;
      done_status = SolveStatus::NodeLimit;
    }

    if (!done) {
      // Refine the T worst violations above the threshold.
      std::vector<double> scores = violation_scores(relax_x, relax_y);
      std::vector<int> order(rinst.n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[a] > scores[b];  // ties keep the lower index first
      });
      for (int pick = 0; pick < params.T && pick < rinst.n; ++pick) {
        const int j = order[pick];
        if (scores[j] > params.eps_viol && state.nu[j] < params.max_nu) {
          state.nu[j] += 1;
          rec.refined.push_back(j);
        }
      }
      if (rec.refined.empty()) {
        done = true;
        done_status = SolveStatus::Stalled;
      }
    }

    rec.seconds = elapsed();
    emit_json_line(params.log_json, rec);
    state.iterations.push_back(rec);

    if (done) {
      state.status = done_status;
      state.seconds = elapsed();
      return state;
    }
  }
  state.status = SolveStatus::Stalled;
  state.seconds = elapsed();
  return state;
}

}  // namespace sqfold
