#include "sqfold/formulation.hpp"

#include <cmath>
#include <stdexcept>

namespace sqfold {

BlockConstants constants(double l, double u, int nu) {
  if (!(l <= u)) throw std::invalid_argument("constants: requires l <= u");
  if (nu < 1) throw std::invalid_argument("constants: requires nu >= 1");
  BlockConstants k;
  k.C = std::max(l * l, u * u) / 2.0 + 0.5;
  const AngleSpan span = angle_span(l, u);
  double step = span.theta_d / 2.0;
  for (int j = 1; j <= nu - 1; ++j) {
    step *= 0.5;  // theta_d / 2^{j+1}
    k.C_list.push_back(k.C * std::sin(step));
  }
  return k;
}

LiftedBlock build_block(double l, double u, int nu, BlockMode mode) {
  BlockConstants k;
  if (nu >= 1) k = constants(l, u, nu);
  return build_block_with_constants(l, u, nu, mode, k);
}

LiftedBlock build_block_with_constants(double l, double u, int nu,
                                       BlockMode mode,
                                       const BlockConstants& k) {
  if (!(l <= u)) throw std::invalid_argument("build_block: requires l <= u");
  if (nu < 0) throw std::invalid_argument("build_block: requires nu >= 0");

  LiftedBlock b;
  b.l = l;
  b.u = u;
  b.nu = nu;
  b.mode = mode;
  b.span = angle_span(l, u);
  b.C = k.C;
  b.C_list = k.C_list;

  const double ymax = std::max(l * l, u * u);
  b.cont_lower = {l, 0.0};
  b.cont_upper = {u, ymax};

  if (nu == 0) {
    // Initial relaxation: the McCormick chord plus, in D mode, the two
    // endpoint tangents.
    b.rows.push_back({{{0, -(l + u)}, {1, 1.0}}, {}, Sense::LE, -l * u});
    if (mode == BlockMode::D) {
      b.rows.push_back({{{0, 2.0 * l}, {1, -1.0}}, {}, Sense::LE, l * l});
      b.rows.push_back({{{0, 2.0 * u}, {1, -1.0}}, {}, Sense::LE, u * u});
    } else {
      b.has_square_row = true;
    }
    return b;
  }

  for (int j = 1; j <= nu; ++j) {
    b.cont_lower.insert(b.cont_lower.end(), {-b.C, 0.0, 0.0, 0.0});
    b.cont_upper.insert(b.cont_upper.end(), {b.C, b.C, 1.0, 1.0});
  }

  // B rows: chord only; the lower envelope comes from the cuts below.
  b.rows.push_back({{{0, -(l + u)}, {1, 1.0}}, {}, Sense::LE, -l * u});

  const double cm = std::cos(b.span.theta_mid);
  const double sm = std::sin(b.span.theta_mid);
  const int xi1 = LiftedBlock::xi_index(1);
  const int eta1 = LiftedBlock::eta_index(1);
  const int la11 = LiftedBlock::lambda1_index(1);
  const int la12 = LiftedBlock::lambda2_index(1);

  // xi_1 = x cos + (y/2 - 1/2) sin
  b.rows.push_back(
      {{{xi1, 1.0}, {0, -cm}, {1, -0.5 * sm}}, {}, Sense::EQ, -0.5 * sm});
  // (lambda_{1,2} - lambda_{1,1}) C = -x sin + (y/2 - 1/2) cos
  b.rows.push_back({{{la12, b.C}, {la11, -b.C}, {0, sm}, {1, -0.5 * cm}},
                    {},
                    Sense::EQ,
                    -0.5 * cm});
  // eta_1 = (lambda_{1,1} + lambda_{1,2}) C
  b.rows.push_back(
      {{{eta1, 1.0}, {la11, -b.C}, {la12, -b.C}}, {}, Sense::EQ, 0.0});
  // lambda_{1,1} <= 1 - z_1 ; lambda_{1,2} <= z_1
  b.rows.push_back({{{la11, 1.0}}, {{0, 1.0}}, Sense::LE, 1.0});
  b.rows.push_back({{{la12, 1.0}}, {{0, -1.0}}, Sense::LE, 0.0});

  double step = b.span.theta_d / 2.0;
  for (int j = 1; j <= nu - 1; ++j) {
    step *= 0.5;  // theta_d / 2^{j+1}
    const double c = std::cos(step);
    const double s = std::sin(step);
    const double Cj = b.C_list[j - 1];
    const int xij = LiftedBlock::xi_index(j);
    const int etaj = LiftedBlock::eta_index(j);
    const int xin = LiftedBlock::xi_index(j + 1);
    const int etan = LiftedBlock::eta_index(j + 1);
    const int la1 = LiftedBlock::lambda1_index(j + 1);
    const int la2 = LiftedBlock::lambda2_index(j + 1);

    b.rows.push_back(
        {{{xin, 1.0}, {xij, -c}, {etaj, -s}}, {}, Sense::EQ, 0.0});
    b.rows.push_back(
        {{{la2, Cj}, {la1, -Cj}, {xij, s}, {etaj, -c}}, {}, Sense::EQ, 0.0});
    b.rows.push_back(
        {{{etan, 1.0}, {la1, -Cj}, {la2, -Cj}}, {}, Sense::EQ, 0.0});
    b.rows.push_back({{{la1, 1.0}}, {{j, 1.0}}, Sense::LE, 1.0});
    b.rows.push_back({{{la2, 1.0}}, {{j, -1.0}}, Sense::LE, 0.0});
  }

  // Cuts on the last lifted pair. psi = theta_d / 2^{nu+1}.
  const double psi = b.span.theta_d / std::ldexp(1.0, nu + 1);
  const int xin = LiftedBlock::xi_index(nu);
  const int etan = LiftedBlock::eta_index(nu);
  const double cp = std::cos(psi);
  const double sp = std::sin(psi);
  // secant: xi cos(psi) + eta sin(psi) >= (y+1)/2 cos(psi)
  b.rows.push_back({{{xin, -cp}, {etan, -sp}, {1, 0.5 * cp}},
                    {},
                    Sense::LE,
                    -0.5 * cp});
  if (mode == BlockMode::D) {
    const double c2 = std::cos(2.0 * psi);
    const double s2 = std::sin(2.0 * psi);
    // tangents: xi cos(2psi) + eta sin(2psi) <= (y+1)/2 and xi <= (y+1)/2
    b.rows.push_back(
        {{{xin, c2}, {etan, s2}, {1, -0.5}}, {}, Sense::LE, 0.5});
    b.rows.push_back({{{xin, 1.0}, {1, -0.5}}, {}, Sense::LE, 0.5});
  } else {
    b.has_square_row = true;
  }
  return b;
}

std::vector<double> WitnessAssignment::continuous() const {
  std::vector<double> v;
  v.reserve(2 + 4 * xi.size());
  v.push_back(x);
  v.push_back(y);
  for (size_t j = 0; j < xi.size(); ++j) {
    v.push_back(xi[j]);
    v.push_back(eta[j]);
    v.push_back(lambda1[j]);
    v.push_back(lambda2[j]);
  }
  return v;
}

WitnessAssignment lift_witness(double x, double l, double u, int nu) {
  if (!(l <= u)) throw std::invalid_argument("lift_witness: requires l <= u");
  if (nu < 1) throw std::invalid_argument("lift_witness: requires nu >= 1");
  if (x < l - 1e-12 || x > u + 1e-12)
    throw std::invalid_argument("lift_witness: x outside [l, u]");

  const AngleSpan span = angle_span(l, u);
  const BlockConstants k = constants(l, u, nu);

  WitnessAssignment w;
  w.x = x;
  w.y = x * x;
  w.xi.resize(nu);
  w.eta.resize(nu);
  w.lambda1.assign(nu, 0.0);
  w.lambda2.assign(nu, 0.0);
  w.z.resize(nu);

  Vec2 p{x, 0.5 * (w.y - 1.0)};
  double step = span.theta_mid;
  for (int j = 0; j < nu; ++j) {
    const Vec2 r = rot(p, step);
    const double omega = r.w;
    const double big = (j == 0) ? k.C : k.C_list[j - 1];
    w.z[j] = omega >= 0.0 ? 1 : 0;  // tie omega = 0 -> z = 1
    const double share = big > 0.0 ? std::fabs(omega) / big : 0.0;
    if (w.z[j] == 1)
      w.lambda2[j] = share;
    else
      w.lambda1[j] = share;
    p = fold(r);
    w.xi[j] = p.v;
    w.eta[j] = p.w;
    step = span.theta_d / std::ldexp(1.0, j + 2);  // theta_d / 2^{j+2}
  }
  return w;
}

double block_violation(const LiftedBlock& block,
                       const std::vector<double>& cont,
                       const std::vector<double>& z) {
  double worst = 0.0;
  for (int i = 0; i < block.num_continuous(); ++i) {
    worst = std::max(worst, block.cont_lower[i] - cont[i]);
    worst = std::max(worst, cont[i] - block.cont_upper[i]);
  }
  for (const auto& row : block.rows) {
    double lhs = 0.0;
    for (auto [idx, coef] : row.cont) lhs += coef * cont[idx];
    for (auto [idx, coef] : row.bin) lhs += coef * z[idx];
    switch (row.sense) {
      case Sense::LE: worst = std::max(worst, lhs - row.rhs); break;
      case Sense::GE: worst = std::max(worst, row.rhs - lhs); break;
      case Sense::EQ: worst = std::max(worst, std::fabs(lhs - row.rhs)); break;
    }
  }
  if (block.has_square_row)
    worst = std::max(worst, cont[0] * cont[0] - cont[1]);
  return worst;
}

double violation_bound(const std::vector<double>& delta,
                       const std::vector<std::pair<double, double>>& bounds,
                       int nu) {
  if (nu < 2) throw std::invalid_argument("violation_bound: requires nu >= 2");
  double norm1 = 0.0;
  for (double d : delta) norm1 += std::fabs(d);
  double worst = 0.0;
  for (auto [l, u] : bounds) worst = std::max(worst, std::max(l * l, u * u));
  const double num = worst + 1.0;
  return norm1 * num * num / std::ldexp(1.0, 2 * nu - 2);
}

double RelaxModel::objective_value(const std::vector<double>& v) const {
  std::vector<double> x(v.begin(), v.begin() + n);
  double s = objective_quad.quad_form(x) + objective_offset;
  for (auto [idx, coef] : objective_lin) s += coef * v[idx];
  return s;
}

RelaxModel assemble_relaxation(const ConvexifiedInstance& ci,
                               const std::vector<int>& nu,
                               std::optional<BlockMode> mode) {
  const QcpInstance& inst = ci.original;
  if (static_cast<int>(nu.size()) != inst.n)
    throw std::invalid_argument("assemble_relaxation: nu length mismatch");
  for (int v : nu)
    if (v < 0) throw std::invalid_argument("assemble_relaxation: nu_j < 0");

  BlockMode m = BlockMode::Dplus;
  if (mode.has_value()) {
    m = *mode;
  } else {
    bool all_simple = true;
    for (int i = 0; i < inst.m; ++i)
      all_simple = all_simple && inst.constraints[i].Q.is_diagonal();
    m = all_simple ? BlockMode::D : BlockMode::Dplus;
  }

  RelaxModel model;
  model.n = inst.n;
  model.mode = m;
  model.nu = nu;

  // x variables then y variables
  model.lower = inst.lower;
  model.upper = inst.upper;
  for (int j = 0; j < inst.n; ++j) {
    model.lower.push_back(0.0);
    model.upper.push_back(
        std::max(inst.lower[j] * inst.lower[j], inst.upper[j] * inst.upper[j]));
  }
  model.num_cont = 2 * inst.n;
  model.num_bin = 0;

  model.block_cont_base.resize(inst.n);
  model.block_bin_base.resize(inst.n);
  for (int j = 0; j < inst.n; ++j) {
    LiftedBlock b = build_block(inst.lower[j], inst.upper[j], nu[j], m);
    model.block_cont_base[j] = model.num_cont - 2;  // local 0/1 remap below
    model.block_bin_base[j] = model.num_bin;
    // Local continuous 0 -> x_j, 1 -> y_j, k >= 2 -> fresh columns.
    for (int k = 2; k < b.num_continuous(); ++k) {
      model.lower.push_back(b.cont_lower[k]);
      model.upper.push_back(b.cont_upper[k]);
    }
    auto map_cont = [&](int local) {
      if (local == 0) return model.x_index(j);
      if (local == 1) return model.y_index(j);
      return model.block_cont_base[j] + local;
    };
    for (const auto& row : b.rows) {
      ModelRow mr;
      mr.sense = row.sense;
      mr.rhs = row.rhs;
      for (auto [idx, coef] : row.cont) mr.coefs.push_back({map_cont(idx), coef});
      for (auto [idx, coef] : row.bin)
        mr.coefs.push_back({-1 - (model.block_bin_base[j] + idx), coef});
      model.rows.push_back(std::move(mr));
    }
    if (b.has_square_row) {
      QuadRow qr;
      qr.A = SymMatrix(inst.n);
      qr.A.at(j, j) = 1.0;
      qr.lin.push_back({model.y_index(j), -1.0});
      qr.rhs = 0.0;
      model.quad_rows.push_back(std::move(qr));
    }
    // Tighten the x/y bounds from the block (x in [l,u] already).
    model.num_cont += b.num_continuous() - 2;
    model.num_bin += b.num_binary();
    model.blocks.push_back(std::move(b));
  }

  // Binary columns get final indices after all continuous ones; rewrite the
  // placeholder negative ids.
  for (auto& row : model.rows)
    for (auto& [idx, coef] : row.coefs)
      if (idx < 0) idx = model.num_cont + (-idx - 1);

  // Objective: x^T (Q0 + diag d0) x + c0^T x - d0^T y.
  model.objective_quad = ci.perturbed_objective();
  if (inst.n > 0 && min_eigenvalue(model.objective_quad) < -1e-8)
    throw std::invalid_argument(
        "assemble_relaxation: perturbed objective is not PSD");
  for (int j = 0; j < inst.n; ++j) {
    if (inst.objective.c[j] != 0.0)
      model.objective_lin.push_back({model.x_index(j), inst.objective.c[j]});
    if (ci.delta[0][j] != 0.0)
      model.objective_lin.push_back({model.y_index(j), -ci.delta[0][j]});
  }

  // Constraints: x^T (Qi + diag di) x + ci^T x - di^T y <= fi.
  for (int i = 0; i < inst.m; ++i) {
    const SymMatrix& A = ci.perturbed_constraint(i);
    if (inst.n > 0 && min_eigenvalue(A) < -1e-8)
      throw std::invalid_argument(
          "assemble_relaxation: perturbed constraint is not PSD");
    std::vector<std::pair<int, double>> lin;
    for (int j = 0; j < inst.n; ++j) {
      if (inst.constraints[i].c[j] != 0.0)
        lin.push_back({model.x_index(j), inst.constraints[i].c[j]});
      if (ci.delta[i + 1][j] != 0.0)
        lin.push_back({model.y_index(j), -ci.delta[i + 1][j]});
    }
    if (A.is_zero()) {
      ModelRow mr;
      mr.coefs = std::move(lin);
      mr.sense = Sense::LE;
      mr.rhs = inst.rhs[i];
      model.rows.push_back(std::move(mr));
    } else {
      QuadRow qr;
      qr.A = A;
      qr.lin = std::move(lin);
      qr.rhs = inst.rhs[i];
      model.quad_rows.push_back(std::move(qr));
    }
  }
  return model;
}

}  // namespace sqfold
