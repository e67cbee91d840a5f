#pragma once

#include <string>
#include <vector>

#include "sqfold/refine.hpp"

namespace sqfold {

// Relative gap in percent: (upper - lower) / |upper| * 100. A zero upper
// bound falls back to a unit denominator and sets *flagged.
double gap_percent(double upper, double lower, bool* flagged = nullptr);

// (better - worse) / (best_ub - worse) * 100. Requires better >= worse and
// best_ub > worse.
double additional_gap_closed(double better_lb, double worse_lb, double best_ub);

struct BenchOptions {
  RefineParams params;
  bool negate_boxqp = false;
  std::string baseline_csv;  // optional: name,lower[,upper] per line
};

struct BenchRow {
  std::string name;
  int n = 0, m = 0;
  std::string status;
  double tau_lower = 0.0, tau_upper = 0.0, gap_pct = 0.0;
  int iterations = 0;
  long nodes = 0;
  double seconds = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::string csv;        // report table
  std::string plot_data;  // per-iteration gap/time series per instance
};

// Solves every *.json / *.boxqp / *.bq file under `dir` (sorted by name).
// Per-instance failures become status rows instead of aborting the batch.
BenchReport run_bench(const std::string& dir, const BenchOptions& opts);

}  // namespace sqfold
