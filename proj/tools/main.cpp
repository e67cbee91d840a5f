#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqfold/bench.hpp"
#include "sqfold/convexify.hpp"
#include "sqfold/formulation.hpp"
#include "sqfold/milp.hpp"
#include "sqfold/oracle.hpp"
#include "sqfold/refine.hpp"

using namespace sqfold;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitLimit = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

struct SolveFlags {
  std::string mode = "auto";
  int T = 20;
  double eps_viol = 1e-5;
  double eps_gap = 1e-4;
  double time_limit = 3600;
  long node_limit = 100000000;
  bool negate = false;
  bool paper_exact_diagonal = false;
  std::string log_json;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--mode", f.mode, "relaxation family: d, dplus or auto")
      ->check(CLI::IsMember({"d", "dplus", "auto"}));
  cmd->add_option("--T", f.T, "refinement batch size");
  cmd->add_option("--eps-viol", f.eps_viol, "violation threshold");
  cmd->add_option("--eps-gap", f.eps_gap, "relative gap tolerance");
  cmd->add_option("--time-limit", f.time_limit, "seconds");
  cmd->add_option("--node-limit", f.node_limit, "branch-and-bound nodes");
  cmd->add_flag("--negate", f.negate, "negate boxqp objectives (max-form files)");
  cmd->add_flag("--paper-exact-diagonal", f.paper_exact_diagonal,
                "zero the full diagonal of nonconvex diagonal matrices");
  cmd->add_option("--log-json", f.log_json, "JSON-lines iteration log path");
}

RefineParams to_params(const SolveFlags& f, std::ofstream* log_stream) {
  RefineParams p;
  p.T = f.T;
  p.eps_viol = f.eps_viol;
  p.eps_gap = f.eps_gap;
  p.time_limit = f.time_limit;
  p.node_limit = f.node_limit;
  if (f.mode == "d") p.mode = BlockMode::D;
  if (f.mode == "dplus") p.mode = BlockMode::Dplus;
  p.perturb.paper_exact_diagonal = f.paper_exact_diagonal;
  if (log_stream && log_stream->is_open()) p.log_json = log_stream;
  return p;
}

QcpInstance load_instance(const std::string& path, bool negate) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".json") return load_json_file(path);
  return load_boxqp_file(path, negate);
}

int cmd_solve(const std::string& file, const SolveFlags& flags) {
  std::ofstream log_stream;
  if (!flags.log_json.empty()) log_stream.open(flags.log_json);
  QcpInstance inst;
  try {
    inst = load_instance(file, flags.negate);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  const SolveState st = solve(inst, to_params(flags, &log_stream));

  json out;
  out["name"] = inst.name;
  out["status"] = to_string(st.status);
  out["tau_lower"] = st.tau_lower;
  out["tau_upper"] = std::isfinite(st.tau_upper) ? json(st.tau_upper) : json();
  if (st.incumbent) out["x"] = *st.incumbent;
  json iters = json::array();
  for (const auto& it : st.iterations) {
    iters.push_back({{"k", it.k},
                     {"tau_lower", it.tau_lower},
                     {"tau_upper", std::isfinite(it.tau_upper)
                                       ? json(it.tau_upper)
                                       : json()},
                     {"gap", it.gap},
                     {"refined_indices", it.refined},
                     {"nodes", it.nodes},
                     {"seconds", it.seconds}});
  }
  out["iterations"] = iters;
  out["nodes"] = st.total_nodes;
  out["seconds"] = st.seconds;
  std::cout << out.dump(2) << "\n";

  switch (st.status) {
    case SolveStatus::Optimal:
    case SolveStatus::Stalled: return kExitOk;
    case SolveStatus::TimeLimit:
    case SolveStatus::NodeLimit: return kExitLimit;
    case SolveStatus::Infeasible: return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_oracle(const std::string& file, double step, bool negate) {
  QcpInstance inst;
  try {
    inst = load_instance(file, negate);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  try {
    const GridResult r = grid_optimum(inst, step);
    json out;
    out["name"] = inst.name;
    out["step"] = step;
    out["feasible"] = r.feasible;
    if (r.feasible) {
      out["value"] = r.value;
      out["point"] = r.point;
    }
    std::cout << out.dump(2) << "\n";
    return r.feasible ? kExitOk : kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_enumerate(double l, double u, int nu) {
  try {
    const auto sectors = enumerate_disjunction(l, u, nu);
    const AngleSpan span = angle_span(l, u);
    json out;
    out["l"] = l;
    out["u"] = u;
    out["nu"] = nu;
    out["theta_min"] = span.theta_min;
    out["theta_max"] = span.theta_max;
    json tris = json::array();
    json polylines = json::array();
    auto lift_plane = [](double x, double y) {  // (x, (y-1)/2) picture
      return std::pair<double, double>(x, 0.5 * (y - 1.0));
    };
    for (const auto& d : sectors) {
      const double ka = knot(d.angles.phi), kb = knot(d.angles.beta);
      json rows = json::array();
      for (const auto& h : d.tri.halfplanes)
        rows.push_back({{"ax", h.ax},
                        {"ay", h.ay},
                        {"rhs", h.rhs},
                        {"sense", h.sense == Sense::GE ? ">=" : "<="}});
      tris.push_back({{"z", d.z},
                      {"phi", d.angles.phi},
                      {"beta", d.angles.beta},
                      {"knots", {ka, kb}},
                      {"halfplanes", rows}});
      // closed triangle polyline in the shifted picture
      std::ostringstream pts;
      const double apex_y = ka * kb;  // tangent intersection
      for (auto [px, py] : {lift_plane(ka, ka * ka),
                            lift_plane(kb, kb * kb),
                            lift_plane(0.5 * (ka + kb), apex_y),
                            lift_plane(ka, ka * ka)})
        pts << px << ',' << py << ' ';
      polylines.push_back(pts.str());
    }
    // the curve itself, sampled
    std::ostringstream curve;
    for (int i = 0; i <= 200; ++i) {
      const double x = l + (u - l) * i / 200.0;
      curve << x << ',' << 0.5 * (x * x - 1.0) << ' ';
    }
    polylines.push_back(curve.str());
    out["triangles"] = tris;
    out["svg_polylines"] = polylines;
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_bench(const std::string& dir, const SolveFlags& flags,
              const std::string& out_dir, const std::string& baseline) {
  BenchOptions opts;
  std::ofstream none;
  opts.params = to_params(flags, &none);
  opts.negate_boxqp = flags.negate;
  opts.baseline_csv = baseline;
  try {
    const BenchReport rep = run_bench(dir, opts);
    std::filesystem::create_directories(out_dir);
    {
      std::ofstream csv(std::filesystem::path(out_dir) / "report.csv");
      csv << rep.csv;
    }
    {
      std::ofstream plot(std::filesystem::path(out_dir) / "plot_gap_time.csv");
      plot << rep.plot_data;
    }
    int solved = 0;
    for (const auto& row : rep.rows) solved += row.status == "optimal";
    std::cout << rep.rows.size() << " instance(s), " << solved
              << " solved to tolerance; report written to " << out_dir << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_verify() {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& info) {
    std::printf("%s  %-36s %s\n", ok ? "PASS" : "FAIL", name.c_str(),
                info.c_str());
    if (!ok) ++failures;
  };

  {  // containment sweep
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> d(-3, 3);
    std::uniform_real_distribution<double> unit(0, 1);
    bool ok = true;
    for (int t = 0; t < 40 && ok; ++t) {
      double l = d(rng), u = d(rng);
      if (l > u) std::swap(l, u);
      if (u - l < 1e-9) u = l + 1e-3;
      for (int nu = 1; nu <= 6 && ok; ++nu) {
        const LiftedBlock bd = build_block(l, u, nu, BlockMode::D);
        const LiftedBlock bp = build_block(l, u, nu, BlockMode::Dplus);
        for (int s = 0; s < 40; ++s) {
          const double x = l + unit(rng) * (u - l);
          const WitnessAssignment w = lift_witness(x, l, u, nu);
          const auto cont = w.continuous();
          const std::vector<double> z(w.z.begin(), w.z.end());
          ok = ok && block_violation(bd, cont, z) <= 1e-8 &&
               block_violation(bp, cont, z) <= 1e-8;
        }
      }
    }
    report("containment of curve lifts", ok, "S within Dplus within D");
  }

  {  // error bounds
    bool ok = true;
    for (auto [l, u] : std::vector<std::pair<double, double>>{{-1, 1}, {0, 3}})
      for (int nu = 2; nu <= 6 && ok; ++nu) {
        const ErrorBounds eb = error_bounds(l, u, nu);
        for (auto [x, y] :
             sample_relaxation_points(l, u, nu, BlockMode::D, 2000))
          ok = ok && std::fabs(y - x * x) <= eb.square_gap + 1e-8 &&
               std::fabs(std::sqrt(y) - std::fabs(x)) <= eb.sqrt_gap + 1e-8;
      }
    report("approximation error bounds", ok, "square and sqrt gaps");
  }

  {  // projection equivalence plus the negative control
    bool ok = true;
    std::string info = "zero disagreements";
    for (auto [l, u] : std::vector<std::pair<double, double>>{
             {-1, 1}, {0, 3}, {-2, -0.5}}) {
      for (int nu = 1; nu <= 4; ++nu) {
        for (BlockMode mode : {BlockMode::D, BlockMode::Dplus}) {
          const EquivalenceReport rep =
              check_projection_equivalence(l, u, nu, mode);
          if (!rep.pass()) {
            ok = false;
            info = rep.to_json();
          }
        }
      }
    }
    BlockConstants bad = constants(-1, 1, 2);
    bad.C *= 0.3;
    for (double& c : bad.C_list) c *= 0.3;
    if (check_projection_equivalence(-1, 1, 2, BlockMode::D, &bad).pass()) {
      ok = false;
      info = "mutated constants went undetected";
    }
    report("disjunctive projection equivalence", ok, info);
  }

  {  // trig identities
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> d(-4.71238898038469,
                                             1.5707963267948966);
    bool ok = true;
    for (int i = 0; i < 1000; ++i) {
      const double a = d(rng), b = d(rng);
      const double mid = 0.5 * (a + b), half = 0.5 * (a - b);
      const double factor = 0.5 * (std::cos(half) - std::sin(mid));
      ok = ok &&
           std::fabs(((std::sin(a) + 1) / std::cos(a) +
                      (std::sin(b) + 1) / std::cos(b)) *
                         factor -
                     std::cos(mid)) <= 1e-10 &&
           std::fabs((std::sin(a) + 1) * (std::sin(b) + 1) /
                         (std::cos(a) * std::cos(b)) * factor -
                     0.5 * (std::sin(mid) + std::cos(half))) <= 1e-10;
    }
    report("tangent/secant identities", ok, "1000 random angle pairs");
  }

  return failures == 0 ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"global bounds for box-constrained nonconvex QCPs via lifted "
               "disjunctive relaxations of y = x^2"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  std::string solve_file;
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
  solve_cmd->add_option("file", solve_file, "instance (.json or boxqp text)")
      ->required();
  add_solve_flags(solve_cmd, solve_flags);

  auto* verify_cmd =
      app.add_subcommand("verify", "run the invariant and oracle suites");

  std::string oracle_file;
  double oracle_step = 0.01;
  bool oracle_negate = false;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "brute-force grid optimum (n <= 4)");
  oracle_cmd->add_option("file", oracle_file, "instance file")->required();
  oracle_cmd->add_option("--step", oracle_step, "lattice spacing");
  oracle_cmd->add_flag("--negate", oracle_negate, "negate boxqp objectives");

  double en_l = 0, en_u = 0;
  int en_nu = 1;
  auto* enum_cmd =
      app.add_subcommand("enumerate", "emit the sector triangles of a bound "
                                      "interval (SVG-ready polylines)");
  enum_cmd->add_option("l", en_l, "lower bound")->required();
  enum_cmd->add_option("u", en_u, "upper bound")->required();
  enum_cmd->add_option("nu", en_nu, "refinement level (1..8)")->required();

  SolveFlags bench_flags;
  std::string bench_dir, bench_out = ".", bench_baseline;
  auto* bench_cmd = app.add_subcommand("bench", "solve a directory of instances");
  bench_cmd->add_option("dir", bench_dir, "instance directory")->required();
  bench_cmd->add_option("--out", bench_out, "output directory");
  bench_cmd->add_option("--baseline", bench_baseline,
                        "baseline csv (name,lower[,upper]) to compare against");
  add_solve_flags(bench_cmd, bench_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (solve_cmd->parsed()) return cmd_solve(solve_file, solve_flags);
  if (verify_cmd->parsed()) return cmd_verify();
  if (oracle_cmd->parsed())
    return cmd_oracle(oracle_file, oracle_step, oracle_negate);
  if (enum_cmd->parsed()) return cmd_enumerate(en_l, en_u, en_nu);
  if (bench_cmd->parsed())
    return cmd_bench(bench_dir, bench_flags, bench_out, bench_baseline);
  return kExitUsage;
}
