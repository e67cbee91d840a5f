#include <stdexcept>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "sqfold/formulation.hpp"
#include "sqfold/oracle.hpp"

using namespace sqfold;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("constants") {
  const BlockConstants k = constants(-1, 1, 2);
  CHECK(k.C == doctest::Approx(1.0));
  REQUIRE(k.C_list.size() == 1);
  CHECK(k.C_list[0] == doctest::Approx(std::sin(kPi / 4)));

  const BlockConstants k2 = constants(0, 2, 1);
  CHECK(k2.C == doctest::Approx(2.5));
  CHECK(k2.C_list.empty());

  const BlockConstants k3 = constants(-1, 1, 3);
  REQUIRE(k3.C_list.size() == 2);
  CHECK(k3.C_list[1] == doctest::Approx(std::sin(kPi / 8)));
}

TEST_CASE("variable budget is exact for nu in 0..10") {
  for (int nu = 0; nu <= 10; ++nu) {
    for (BlockMode mode : {BlockMode::D, BlockMode::Dplus}) {
      const LiftedBlock b = build_block(-1, 1, nu, mode);
      CHECK(b.num_continuous() == (nu == 0 ? 2 : 2 + 4 * nu));
      CHECK(b.num_binary() == nu);
    }
  }
  const LiftedBlock b = build_block(-1, 1, 2, BlockMode::D);
  CHECK(b.num_continuous() == 10);
  CHECK(b.num_binary() == 2);
}

TEST_CASE("nu = 0 blocks are the initial relaxations") {
  const LiftedBlock d0 = build_block(0, 1, 0, BlockMode::D);
  CHECK(d0.rows.size() == 3);
  CHECK_FALSE(d0.has_square_row);
  // polyhedron {x in [0,1], 0 <= y <= x, y >= 2x - 1}: probe points
  auto feas = [&](double x, double y) {
    return block_violation(d0, {x, y}, {}) <= 1e-9;
  };
  CHECK(feas(0.5, 0.3));
  CHECK(feas(1.0, 1.0));
  CHECK(feas(0.0, 0.0));
  CHECK_FALSE(feas(0.5, 0.6));   // above the chord
  CHECK_FALSE(feas(1.0, 0.5));   // below the tangent at u
  CHECK_FALSE(feas(0.5, -0.1));  // below zero

  const LiftedBlock dp0 = build_block(0, 1, 0, BlockMode::Dplus);
  CHECK(dp0.rows.size() == 1);
  CHECK(dp0.has_square_row);
  auto feasp = [&](double x, double y) {
    return block_violation(dp0, {x, y}, {}) <= 1e-9;
  };
  CHECK(feasp(0.5, 0.25));
  CHECK(feasp(0.5, 0.5));
  CHECK_FALSE(feasp(0.5, 0.2));  // below the curve
  CHECK_FALSE(feasp(0.5, 0.6));

  CHECK_THROWS_AS(build_block(1, 0, 0, BlockMode::D), std::invalid_argument);
}

TEST_CASE("nu >= 1 row structure") {
  for (int nu = 1; nu <= 4; ++nu) {
    const LiftedBlock d = build_block(-1, 1, nu, BlockMode::D);
    CHECK(static_cast<int>(d.rows.size()) == 5 * nu + 4);
    const LiftedBlock dp = build_block(-1, 1, nu, BlockMode::Dplus);
    CHECK(static_cast<int>(dp.rows.size()) == 5 * nu + 2);
    CHECK(dp.has_square_row);
  }
}

TEST_CASE("lift_witness hand examples on [-1,1]") {
  WitnessAssignment w = lift_witness(1.0, -1, 1, 1);
  CHECK(w.y == 1.0);
  CHECK(w.xi[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w.eta[0] == doctest::Approx(1.0));
  CHECK(w.z[0] == 1);

  w = lift_witness(-1.0, -1, 1, 1);
  CHECK(w.xi[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w.eta[0] == doctest::Approx(1.0));
  CHECK(w.z[0] == 0);
  CHECK(w.lambda1[0] == doctest::Approx(1.0));
  CHECK(w.lambda2[0] == 0.0);

  w = lift_witness(0.0, -1, 1, 1);
  CHECK(w.xi[0] == doctest::Approx(0.5));
  CHECK(w.eta[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w.z[0] == 1);  // omega = 0 ties toward z = 1

  CHECK_THROWS_AS(lift_witness(1.5, -1, 1, 1), std::invalid_argument);
}

TEST_CASE("containment: witnesses satisfy both block modes") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> d(-3, 3);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int trial = 0; trial < 25; ++trial) {
    double l = d(rng), u = d(rng);
    if (l > u) std::swap(l, u);
    if (u - l < 1e-6) u = l + 0.5;
    for (int nu = 1; nu <= 6; ++nu) {
      const LiftedBlock bd = build_block(l, u, nu, BlockMode::D);
      const LiftedBlock bp = build_block(l, u, nu, BlockMode::Dplus);
      for (int s = 0; s < 25; ++s) {
        const double x = l + unit(rng) * (u - l);
        const WitnessAssignment w = lift_witness(x, l, u, nu);
        const std::vector<double> cont = w.continuous();
        std::vector<double> z(w.z.begin(), w.z.end());
        CHECK(block_violation(bd, cont, z) <= 1e-8);
        CHECK(block_violation(bp, cont, z) <= 1e-8);
      }
    }
  }
}

TEST_CASE("witness lambda split respects the fold sign") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int s = 0; s < 200; ++s) {
    const double x = -2 + 3.5 * unit(rng);
    const WitnessAssignment w = lift_witness(x, -2, 1.5, 4);
    for (int j = 0; j < 4; ++j) {
      CHECK(w.lambda1[j] * w.lambda2[j] == 0.0);
      CHECK(w.lambda1[j] >= 0.0);
      CHECK(w.lambda2[j] >= 0.0);
      CHECK(w.lambda1[j] <= 1.0 + 1e-12);
      CHECK(w.lambda2[j] <= 1.0 + 1e-12);
      if (w.lambda1[j] > 0) CHECK(w.z[j] == 0);  // omega < 0 side
      if (w.lambda2[j] > 0) CHECK(w.z[j] == 1);  // omega >= 0 side
    }
  }
}

TEST_CASE("Dplus samples satisfy the D rows once the square row is dropped") {
  for (auto [l, u] : std::vector<std::pair<double, double>>{{-1, 1}, {0, 3}}) {
    for (int nu = 1; nu <= 3; ++nu) {
      const LiftedBlock bd = build_block(l, u, nu, BlockMode::D);
      const auto sectors = enumerate_disjunction(l, u, nu);
      const auto pts = sample_relaxation_points(l, u, nu, BlockMode::Dplus, 200);
      for (size_t i = 0; i < pts.size(); ++i) {
        const auto& d = sectors[i % sectors.size()];
        const auto cont = reconstruct_lifted(bd, pts[i].first, pts[i].second, d.z);
        CHECK(lifted_violation(bd, cont, d.z) <= 1e-8);
      }
    }
  }
}

TEST_CASE("error bounds hold on sampled relaxation points") {
  for (auto [l, u] : std::vector<std::pair<double, double>>{{-1, 1}, {0, 3}}) {
    for (int nu = 2; nu <= 5; ++nu) {
      const ErrorBounds eb = error_bounds(l, u, nu);
      for (auto [x, y] : sample_relaxation_points(l, u, nu, BlockMode::D, 500)) {
        CHECK(std::fabs(y - x * x) <= eb.square_gap + 1e-8);
        CHECK(std::fabs(std::sqrt(y) - std::fabs(x)) <= eb.sqrt_gap + 1e-8);
      }
    }
  }
}

TEST_CASE("violation_bound") {
  CHECK(violation_bound({1, 1}, {{0, 1}, {0, 1}}, 3) == doctest::Approx(0.5));
  CHECK(violation_bound({0, 0}, {{0, 1}, {0, 1}}, 5) == 0.0);
  CHECK(violation_bound({2}, {{-2, 2}}, 4) == doctest::Approx(0.78125));
  CHECK_THROWS_AS(violation_bound({1}, {{0, 1}}, 1), std::invalid_argument);
}

TEST_CASE("assemble_relaxation on the circle instance") {
  const auto ci = convexify_instance(fixtures::circle());
  const RelaxModel m = assemble_relaxation(ci, {0, 0});
  CHECK(m.mode == BlockMode::D);  // diagonal constraint matrix
  CHECK(m.num_bin == 0);
  CHECK(m.num_cont == 4);
  CHECK(m.quad_rows.empty());
  CHECK(m.objective_quad.is_zero());
  // constraint row: -y1 - y2 <= -0.5
  bool found = false;
  for (const auto& row : m.rows) {
    if (row.coefs.size() == 2 && row.coefs[0].first == m.y_index(0) &&
        row.coefs[0].second == -1.0 && row.coefs[1].second == -1.0) {
      CHECK(row.rhs == -0.5);
      found = true;
    }
  }
  CHECK(found);

  // mode auto: dense constraint matrix switches to Dplus
  QcpInstance dense = fixtures::circle();
  dense.constraints[0].Q.at(0, 1) = -0.1;
  dense.constraints[0].Q.at(1, 0) = -0.1;
  const auto ci2 = convexify_instance(dense);
  const RelaxModel m2 = assemble_relaxation(ci2, {1, 1});
  CHECK(m2.mode == BlockMode::Dplus);
  CHECK(m2.num_bin == 2);
  // one square row per variable plus the perturbed constraint
  CHECK(m2.quad_rows.size() == 3);

  // explicit override wins
  const RelaxModel m3 = assemble_relaxation(ci, {1, 1}, BlockMode::Dplus);
  CHECK(m3.mode == BlockMode::Dplus);
}

TEST_CASE("convex instances keep their blocks but no y coupling") {
  QcpInstance inst = fixtures::circle();
  inst.constraints[0].Q.at(0, 0) = 1.0;  // make it PSD
  inst.constraints[0].Q.at(1, 1) = 1.0;
  inst.rhs[0] = 3.0;
  const auto ci = convexify_instance(inst);
  const RelaxModel m = assemble_relaxation(ci, {0, 0});
  for (const auto& row : m.rows)
    for (auto [idx, coef] : row.coefs) CHECK(idx < m.num_cont);
  for (const auto& q : m.quad_rows)
    for (auto [idx, coef] : q.lin)
      CHECK(idx < 2 * m.n);  // only x and y columns, no delta coupling on y
  // blocks still present
  CHECK(m.blocks.size() == 2);

  // dense indefinite objective with no constraints picks D
  QcpInstance box;
  box.n = 2;
  box.m = 0;
  box.lower = {0, 0};
  box.upper = {1, 1};
  box.objective.Q = SymMatrix(2);
  box.objective.Q.at(0, 1) = -0.5;
  box.objective.Q.at(1, 0) = -0.5;
  box.objective.c = {0, 0};
  const auto cb = convexify_instance(box);
  const RelaxModel mb = assemble_relaxation(cb, {0, 0});
  CHECK(mb.mode == BlockMode::D);
}
