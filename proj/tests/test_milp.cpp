#include <stdexcept>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "sqfold/milp.hpp"
#include "sqfold/oracle.hpp"

using namespace sqfold;

namespace {

RelaxModel circle_model(const std::vector<int>& nu,
                        std::optional<BlockMode> mode = std::nullopt) {
  return assemble_relaxation(convexify_instance(fixtures::circle()), nu, mode);
}

// Exact optimum of: min x1 + x2 over one sector pair of the circle
// relaxation. Per variable the upper envelope is the sub-chord through the
// sector knots, so the subproblem is min x1 + x2 s.t. chord1 + chord2 >= 0.5
// over the knot boxes: a two-variable LP solved by vertex enumeration.
struct SectorChord {
  double lo, hi, c1, c0;  // chord y = c1 x + c0 on [lo, hi]
};

SectorChord sector_chord(const Disjunct& d) {
  const double a = knot(d.angles.phi), b = knot(d.angles.beta);
  return {std::min(a, b), std::max(a, b), a + b, -a * b};
}

double pair_optimum(const SectorChord& s1, const SectorChord& s2,
                    bool* feasible) {
  auto g = [&](double x1, double x2) {
    return s1.c1 * x1 + s1.c0 + s2.c1 * x2 + s2.c0;
  };
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double x1, double x2) {
    if (x1 < s1.lo - 1e-12 || x1 > s1.hi + 1e-12) return;
    if (x2 < s2.lo - 1e-12 || x2 > s2.hi + 1e-12) return;
    if (g(x1, x2) < 0.5 - 1e-12) return;
    best = std::min(best, x1 + x2);
  };
  for (double x1 : {s1.lo, s1.hi})
    for (double x2 : {s2.lo, s2.hi}) consider(x1, x2);
  // constraint boundary against each box edge
  for (double x1 : {s1.lo, s1.hi})
    if (s2.c1 != 0.0) consider(x1, (0.5 - s1.c1 * x1 - s1.c0 - s2.c0) / s2.c1);
  for (double x2 : {s2.lo, s2.hi})
    if (s1.c1 != 0.0) consider((0.5 - s2.c1 * x2 - s2.c0 - s1.c0) / s1.c1, x2);
  *feasible = std::isfinite(best);
  return best;
}

double enumeration_optimum(int nu) {
  const auto sectors = enumerate_disjunction(0, 1, nu);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& d1 : sectors) {
    for (const auto& d2 : sectors) {
      bool ok = false;
      const double v = pair_optimum(sector_chord(d1), sector_chord(d2), &ok);
      if (ok) best = std::min(best, v);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("oa_cut") {
  QuadRow q;  // x^2 <= 1
  q.A = SymMatrix(1);
  q.A.at(0, 0) = 1.0;
  q.rhs = 1.0;
  LpRow cut = oa_cut(q, {1.0});
  REQUIRE(cut.coefs.size() == 1);
  CHECK(cut.coefs[0].second == doctest::Approx(2.0));
  CHECK(cut.rhs == doctest::Approx(2.0));  // same as 2x - 1 <= 1

  cut = oa_cut(q, {0.0});
  CHECK(cut.coefs.empty());  // 0 <= 1, vacuous
  CHECK(cut.rhs == doctest::Approx(1.0));

  QuadRow q2;  // x^2 + y^2 <= 0.5
  q2.A = SymMatrix(2);
  q2.A.at(0, 0) = 1.0;
  q2.A.at(1, 1) = 1.0;
  q2.rhs = 0.5;
  cut = oa_cut(q2, {0.5, 0.5});
  REQUIRE(cut.coefs.size() == 2);
  CHECK(cut.coefs[0].second == doctest::Approx(1.0));
  CHECK(cut.coefs[1].second == doctest::Approx(1.0));
  CHECK(cut.rhs == doctest::Approx(1.0));  // x + y <= 1
}

TEST_CASE("OA cuts never cut the convex region") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    SymMatrix B(2);
    for (auto& v : B.a) v = d(rng);
    QuadRow q;
    q.A = SymMatrix(2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          q.A.at(i, j) += B.at(k, i) * B.at(k, j);  // PSD
    q.rhs = 0.5 + std::fabs(d(rng));
    const LpRow cut = oa_cut(q, {d(rng), d(rng)});
    int kept = 0;
    for (int s = 0; s < 1000; ++s) {
      const std::vector<double> x{2 * d(rng), 2 * d(rng)};
      if (q.A.quad_form(x) > q.rhs) continue;
      ++kept;
      double lhs = 0.0;
      for (auto [idx, coef] : cut.coefs) lhs += coef * x[idx];
      CHECK(lhs <= cut.rhs + 1e-9);
    }
    CHECK(kept > 0);
  }
}

TEST_CASE("nu = 0 circle model solves as a single LP") {
  const MilpResult r = branch_and_bound(circle_model({0, 0}));
  REQUIRE(r.status == MilpStatus::Optimal);
  CHECK(r.node_count == 1);
  CHECK(r.incumbent_value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.lower_bound == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("epigraph outer approximation on min x^2") {
  QcpInstance inst;
  inst.n = 1;
  inst.m = 0;
  inst.lower = {-1};
  inst.upper = {1};
  inst.objective.Q = SymMatrix(1);
  inst.objective.Q.at(0, 0) = 1.0;
  inst.objective.c = {0};
  const auto ci = convexify_instance(inst);
  const RelaxModel m = assemble_relaxation(ci, {0});
  const MilpResult r = branch_and_bound(m);
  REQUIRE(r.status == MilpStatus::Optimal);
  CHECK(std::fabs(r.incumbent_value) <= 1e-7);
  CHECK(r.cut_count >= 1);
}

TEST_CASE("circle relaxation against the disjunction-enumeration oracle") {
  const MilpResult r0 = branch_and_bound(circle_model({0, 0}, BlockMode::Dplus));
  const MilpResult r = branch_and_bound(circle_model({2, 2}, BlockMode::Dplus));
  REQUIRE(r.status == MilpStatus::Optimal);
  CHECK(r.lower_bound >= 0.5);
  CHECK(r.lower_bound <= 0.70711);
  CHECK(r.lower_bound > r0.lower_bound + 1e-4);
  const double oracle = enumeration_optimum(2);
  CHECK(r.incumbent_value == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("monotone refinement of the lower bound") {
  double prev = -std::numeric_limits<double>::infinity();
  for (int nu = 0; nu <= 4; ++nu) {
    const MilpResult r = branch_and_bound(circle_model({nu, nu}));
    REQUIRE(r.status == MilpStatus::Optimal);
    CHECK(r.lower_bound >= prev - 1e-8);
    prev = r.lower_bound;
  }
  CHECK(prev <= std::sqrt(0.5) + 1e-6);
}

TEST_CASE("bound validity at every node") {
  const double tau_star = std::sqrt(0.5);
  MilpParams params;
  params.on_node = [&](long, double lb) { CHECK(lb <= tau_star + 1e-6); };
  const MilpResult r = branch_and_bound(circle_model({3, 3}), params);
  REQUIRE(r.status == MilpStatus::Optimal);
  CHECK(r.lower_bound <= tau_star + 1e-6);
}

TEST_CASE("determinism in single-worker mode") {
  const MilpResult a = branch_and_bound(circle_model({3, 2}));
  const MilpResult b = branch_and_bound(circle_model({3, 2}));
  CHECK(a.node_count == b.node_count);
  CHECK(a.lower_bound == b.lower_bound);
  CHECK(a.incumbent_value == b.incumbent_value);
  CHECK(a.cut_count == b.cut_count);
}

TEST_CASE("fixing the binaries reduces to single-triangle optimization") {
  for (int nu = 1; nu <= 3; ++nu) {
    const auto sectors = enumerate_disjunction(0, 1, nu);
    for (size_t i1 = 0; i1 < sectors.size(); ++i1) {
      for (size_t i2 = 0; i2 < sectors.size(); ++i2) {
        RelaxModel m = circle_model({nu, nu}, BlockMode::Dplus);
        // pin z for both blocks
        for (int k = 0; k < nu; ++k) {
          m.rows.push_back({{{m.num_cont + k, 1.0}},
                            Sense::EQ,
                            static_cast<double>(sectors[i1].z[k])});
          m.rows.push_back({{{m.num_cont + nu + k, 1.0}},
                            Sense::EQ,
                            static_cast<double>(sectors[i2].z[k])});
        }
        bool ok = false;
        const double direct =
            pair_optimum(sector_chord(sectors[i1]), sector_chord(sectors[i2]), &ok);
        const MilpResult r = branch_and_bound(m);
        if (!ok) {
          CHECK(r.status == MilpStatus::Infeasible);
        } else {
          REQUIRE(r.status == MilpStatus::Optimal);
          CHECK(r.incumbent_value == doctest::Approx(direct).epsilon(0).scale(1));
          CHECK(std::fabs(r.incumbent_value - direct) <= 1e-7);
        }
      }
    }
  }
}

TEST_CASE("node and time limits return bounds") {
  MilpParams params;
  params.node_limit = 1;
  const MilpResult r = branch_and_bound(circle_model({4, 4}), params);
  CHECK(r.status == MilpStatus::NodeLimit);
  CHECK(r.lower_bound <= std::sqrt(0.5) + 1e-6);
}
