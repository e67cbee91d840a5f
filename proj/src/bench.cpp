#include "sqfold/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sqfold {

double gap_percent(double upper, double lower, bool* flagged) {
  if (!std::isfinite(upper))
    throw std::invalid_argument("gap_percent: upper bound must be finite");
  double denom = std::fabs(upper);
  if (denom == 0.0) {
    denom = 1.0;
    if (flagged) *flagged = true;
  } else if (flagged) {
    *flagged = false;
  }
  return (upper - lower) / denom * 100.0;
}

double additional_gap_closed(double better_lb, double worse_lb,
                             double best_ub) {
  if (better_lb < worse_lb)
    throw std::invalid_argument("additional_gap_closed: better < worse");
  if (!(best_ub > worse_lb))
    throw std::invalid_argument("additional_gap_closed: best_ub <= worse_lb");
  return (better_lb - worse_lb) / (best_ub - worse_lb) * 100.0;
}

namespace {

struct BaselineEntry {
  double lower = 0.0;
  bool has_upper = false;
  double upper = 0.0;
};

std::map<std::string, BaselineEntry> read_baseline(const std::string& path) {
  std::map<std::string, BaselineEntry> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw ParseError("bench: cannot open baseline csv: " + path);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string name, lo, up;
    std::getline(ss, name, ',');
    std::getline(ss, lo, ',');
    std::getline(ss, up, ',');
    if (first && (name == "name" || lo == "lower" || lo == "lower_bound")) {
      first = false;
      continue;
    }
    first = false;
    BaselineEntry e;
    try {
      e.lower = std::stod(lo);
      if (!up.empty()) {
        e.upper = std::stod(up);
        e.has_upper = true;
      }
    } catch (const std::exception&) {
      throw ParseError("bench: bad baseline row: " + line);
    }
    out[name] = e;
  }
  return out;
}

}  // namespace

BenchReport run_bench(const std::string& dir, const BenchOptions& opts) {
  namespace fs = std::filesystem;
  const auto baseline = read_baseline(opts.baseline_csv);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".json" || ext == ".boxqp" || ext == ".bq")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  BenchReport report;
  std::ostringstream csv, plot;
  csv << "name,n,m,status,tau_lower,tau_upper,gap_pct,iterations,nodes,seconds";
  if (!baseline.empty()) csv << ",additional_gap_closed_pct";
  csv << "\n";
  plot << "name,k,seconds,gap_pct\n";

  for (const auto& path : files) {
    BenchRow row;
    row.name = path.stem().string();
    try {
      QcpInstance inst = path.extension() == ".json"
                             ? load_json_file(path.string())
                             : load_boxqp_file(path.string(), opts.negate_boxqp);
      if (inst.name == "unnamed" || inst.name == "boxqp") inst.name = row.name;
      row.name = inst.name;
      row.n = inst.n;
      row.m = inst.m;
      const SolveState st = solve(inst, opts.params);
      row.status = to_string(st.status);
      row.tau_lower = st.tau_lower;
      row.tau_upper = st.tau_upper;
      row.gap_pct = std::isfinite(st.tau_upper)
                        ? gap_percent(st.tau_upper, st.tau_lower)
                        : std::numeric_limits<double>::infinity();
      row.iterations = static_cast<int>(st.iterations.size());
      row.nodes = st.total_nodes;
      row.seconds = st.seconds;
      for (const auto& it : st.iterations)
        plot << row.name << ',' << it.k << ',' << it.seconds << ','
             << it.gap * 100.0 << "\n";
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    csv << row.name << ',' << row.n << ',' << row.m << ',' << row.status << ','
        << row.tau_lower << ',' << row.tau_upper << ',' << row.gap_pct << ','
        << row.iterations << ',' << row.nodes << ',' << row.seconds;
    if (!baseline.empty()) {
      csv << ',';
      auto it = baseline.find(row.name);
      if (it != baseline.end() && row.status.rfind("error", 0) != 0) {
        // Signed: positive when our bound is the better one.
        const double ours = row.tau_lower;
        const double theirs = it->second.lower;
        const double best_ub = it->second.has_upper
                                   ? std::min(row.tau_upper, it->second.upper)
                                   : row.tau_upper;
        const double better = std::max(ours, theirs);
        const double worse = std::min(ours, theirs);
        if (best_ub > worse) {
          const double agc = additional_gap_closed(better, worse, best_ub);
          csv << (ours >= theirs ? agc : -agc);
        }
      }
    }
    csv << "\n";
    report.rows.push_back(std::move(row));
  }
  report.csv = csv.str();
  report.plot_data = plot.str();
  return report;
}

}  // namespace sqfold
