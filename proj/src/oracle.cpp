#include "sqfold/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sqfold {

GridResult grid_optimum(const QcpInstance& inst, double step) {
  inst.validate();
  if (inst.n > 4)
    throw std::invalid_argument("grid_optimum: n > 4 is not supported");
  if (!(step > 0.0)) throw std::invalid_argument("grid_optimum: step <= 0");

  std::vector<std::vector<double>> axes(inst.n);
  double total = 1.0;
  for (int j = 0; j < inst.n; ++j) {
    const double l = inst.lower[j];
    const double u = inst.upper[j];
    const int count = static_cast<int>(std::floor((u - l) / step + 1e-9)) + 1;
    axes[j].reserve(count + 1);
    for (int i = 0; i < count; ++i) axes[j].push_back(l + i * step);
    if (axes[j].back() < u - 1e-12 * std::max(1.0, std::fabs(u)))
      axes[j].push_back(u);
    total *= static_cast<double>(axes[j].size());
  }
  if (total > 1e8)
    throw std::invalid_argument("grid_optimum: lattice larger than 1e8 points");

  GridResult best;
  if (inst.n == 0) {
    bool ok = true;
    for (int i = 0; i < inst.m; ++i) ok = ok && inst.rhs[i] >= -1e-9;
    best.feasible = ok;
    best.value = 0.0;
    return best;
  }

  std::vector<int> idx(inst.n, 0);
  std::vector<double> x(inst.n);
  while (true) {
    for (int j = 0; j < inst.n; ++j) x[j] = axes[j][idx[j]];
    bool ok = true;
    for (int i = 0; i < inst.m && ok; ++i)
      ok = inst.constraints[i].value(x) <= inst.rhs[i] + 1e-9;
    if (ok) {
      const double v = inst.objective.value(x);
      if (!best.feasible || v < best.value) {
        best.feasible = true;
        best.value = v;
        best.point = x;
      }
    }
    int j = 0;
    for (; j < inst.n; ++j) {
      if (++idx[j] < static_cast<int>(axes[j].size())) break;
      idx[j] = 0;
    }
    if (j == inst.n) break;
  }
  return best;
}

std::vector<Disjunct> enumerate_disjunction(double l, double u, int nu) {
  if (nu < 1 || nu > 8)
    throw std::invalid_argument("enumerate_disjunction: nu outside [1, 8]");
  const AngleSpan span = angle_span(l, u);
  std::vector<Disjunct> out;
  out.reserve(1u << nu);
  for (int k = 0; k < (1 << nu); ++k) {
    Disjunct d;
    d.z.resize(nu);
    for (int j = 0; j < nu; ++j) d.z[j] = (k >> j) & 1;
    d.angles = sector_angles(SectorIndex{d.z}, span);
    d.tri = triangle(d.angles.phi, d.angles.beta);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<double> reconstruct_lifted(const LiftedBlock& block, double x,
                                       double y, const std::vector<int>& z) {
  const int nu = block.nu;
  if (static_cast<int>(z.size()) != nu)
    throw std::invalid_argument("reconstruct_lifted: z length mismatch");
  std::vector<double> cont(block.num_continuous(), 0.0);
  cont[0] = x;
  cont[1] = y;
  if (nu == 0) return cont;

  const AngleSpan& span = block.span;
  const double w0 = 0.5 * (y - 1.0);

  // phi_k = theta_min + sum_{i<k} sign_i * theta_d / 2^{i+1}; s_k counts zeros.
  double phi = span.theta_min;
  int zeros = 0;
  double step = span.theta_d;
  double omega_prev = -std::sin(span.theta_mid) * x + std::cos(span.theta_mid) * w0;
  double xi_prev = 0.0, eta_prev = 0.0;
  for (int k = 1; k <= nu; ++k) {
    step *= 0.5;
    const double sign = (zeros % 2 == 0) ? 1.0 : -1.0;
    phi += sign * step;
    zeros += 1 - z[k - 1];
    const double sign_s = (zeros % 2 == 0) ? 1.0 : -1.0;

    const double xi = std::cos(phi) * x + std::sin(phi) * w0;
    const double eta = sign_s * (std::cos(phi) * w0 - std::sin(phi) * x);
    cont[LiftedBlock::xi_index(k)] = xi;
    cont[LiftedBlock::eta_index(k)] = eta;

    const double big = (k == 1) ? block.C : block.C_list[k - 2];
    const double omega = (k == 1)
                             ? omega_prev
                             : -std::sin(step) * xi_prev + std::cos(step) * eta_prev;
    double l1 = 0.0, l2 = 0.0;
    if (big > 0.0) {
      if (z[k - 1] == 1)
        l2 = omega / big;
      else
        l1 = -omega / big;
    }
    cont[LiftedBlock::lambda1_index(k)] = l1;
    cont[LiftedBlock::lambda2_index(k)] = l2;
    xi_prev = xi;
    eta_prev = eta;
  }
  return cont;
}

double lifted_violation(const LiftedBlock& block,
                        const std::vector<double>& cont,
                        const std::vector<int>& z) {
  double worst = 0.0;
  for (int i = 2; i < block.num_continuous(); ++i) {
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

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

namespace {

struct SectorFrame {
  double ka = 0.0, kb = 0.0;       // knot x-coordinates (unordered angles)
  double apex_x = 0.0, apex_y = 0.0;
};

SectorFrame sector_frame(const SectorAngles& a) {
  SectorFrame f;
  f.ka = knot(a.phi);
  f.kb = knot(a.beta);
  f.apex_x = 0.5 * (f.ka + f.kb);
  f.apex_y = f.ka * f.kb;
  return f;
}

double chord_at(const SectorFrame& f, double x) {
  return (f.ka + f.kb) * x - f.ka * f.kb;
}

}  // namespace

EquivalenceReport check_projection_equivalence(double l, double u, int nu,
                                               BlockMode mode,
                                               const BlockConstants* corrupt) {
  if (nu < 1 || nu > 4)
    throw std::invalid_argument("check_projection_equivalence: nu outside [1, 4]");
  EquivalenceReport rep;
  rep.l = l;
  rep.u = u;
  rep.nu = nu;
  rep.mode = mode;

  const LiftedBlock block =
      corrupt ? build_block_with_constants(l, u, nu, mode, *corrupt)
              : build_block(l, u, nu, mode);
  const double tol = 1e-7;
  const double margin = 1e-6;

  auto is_member = [&](const Disjunct& d, double x, double y, double eps) {
    if (mode == BlockMode::D) return d.tri.contains(x, y, eps);
    return member_plus(x, y, d.angles.phi, d.angles.beta, eps);
  };
  auto is_lifted = [&](const std::vector<int>& z, double x, double y) {
    const std::vector<double> cont = reconstruct_lifted(block, x, y, z);
    return lifted_violation(block, cont, z) <= tol;
  };
  auto record = [&](const Disjunct& d, double x, double y, bool member,
                    bool lifted) {
    ++rep.points_checked;
    if (member != lifted)
      rep.disagreements.push_back({d.z, x, y, member, lifted});
  };

  int halton_id = 1;
  for (const Disjunct& d : enumerate_disjunction(l, u, nu)) {
    const SectorFrame f = sector_frame(d.angles);

    // (a) vertices extend to feasible lifted assignments
    std::vector<std::pair<double, double>> vertices = {
        {f.ka, f.ka * f.ka}, {f.kb, f.kb * f.kb}};
    if (mode == BlockMode::D)
      vertices.push_back({f.apex_x, f.apex_y});
    else
      vertices.push_back({f.apex_x, 0.5 * (f.ka * f.ka + f.kb * f.kb)});
    for (auto [vx, vy] : vertices) record(d, vx, vy, true, is_lifted(d.z, vx, vy));

    // (b) interior samples are members by construction
    const int interior = 120;
    for (int i = 0; i < interior; ++i, ++halton_id) {
      const double h1 = halton(halton_id, 2);
      const double h2 = halton(halton_id, 3);
      double x, y;
      if (mode == BlockMode::D) {
        double b1 = h1, b2 = h2;
        if (b1 + b2 > 1.0) {
          b1 = 1.0 - b1;
          b2 = 1.0 - b2;
        }
        x = f.ka + b1 * (f.kb - f.ka) + b2 * (f.apex_x - f.ka);
        y = f.ka * f.ka + b1 * (f.kb * f.kb - f.ka * f.ka) +
            b2 * (f.apex_y - f.ka * f.ka);
      } else {
        const double xl = std::min(f.ka, f.kb), xr = std::max(f.ka, f.kb);
        x = xl + h1 * (xr - xl);
        y = x * x + h2 * (chord_at(f, x) - x * x);
      }
      record(d, x, y, true, is_lifted(d.z, x, y));
    }

    // clear non-members over an inflated box must be lifted-infeasible
    const double xl = std::min({f.ka, f.kb, f.apex_x});
    const double xr = std::max({f.ka, f.kb, f.apex_x});
    const double yl = std::min({f.ka * f.ka, f.kb * f.kb, f.apex_y});
    const double yr = std::max({f.ka * f.ka, f.kb * f.kb, f.apex_y});
    const double wx = std::max(xr - xl, 1e-3), wy = std::max(yr - yl, 1e-3);
    const int box = 80;
    for (int i = 0; i < box; ++i, ++halton_id) {
      const double x = xl - 0.5 * wx + halton(halton_id, 5) * 2.0 * wx;
      const double y = yl - 0.5 * wy + halton(halton_id, 7) * 2.0 * wy;
      const bool inside = is_member(d, x, y, -margin);   // strictly inside
      const bool outside = !is_member(d, x, y, margin);  // clearly outside
      if (!inside && !outside) continue;  // boundary band: skip
      record(d, x, y, inside, is_lifted(d.z, x, y));
    }
  }
  return rep;
}

std::vector<std::pair<double, double>> sample_relaxation_points(
    double l, double u, int nu, BlockMode mode, int count) {
  const auto sectors = enumerate_disjunction(l, u, nu);
  std::vector<std::pair<double, double>> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const Disjunct& d = sectors[i % sectors.size()];
    const SectorFrame f = sector_frame(d.angles);
    const double h1 = halton(i + 1, 2);
    const double h2 = halton(i + 1, 3);
    double x, y;
    if (mode == BlockMode::D) {
      double b1 = h1, b2 = h2;
      if (b1 + b2 > 1.0) {
        b1 = 1.0 - b1;
        b2 = 1.0 - b2;
      }
      x = f.ka + b1 * (f.kb - f.ka) + b2 * (f.apex_x - f.ka);
      y = f.ka * f.ka + b1 * (f.kb * f.kb - f.ka * f.ka) +
          b2 * (f.apex_y - f.ka * f.ka);
      y = std::max(y, 0.0);  // stay inside B (the triangle tip may dip below)
    } else {
      const double xl = std::min(f.ka, f.kb), xr = std::max(f.ka, f.kb);
      x = xl + h1 * (xr - xl);
      y = x * x + h2 * (chord_at(f, x) - x * x);
    }
    pts.push_back({x, y});
  }
  return pts;
}

std::string EquivalenceReport::to_json() const {
  std::ostringstream os;
  os << "{\"l\":" << l << ",\"u\":" << u << ",\"nu\":" << nu << ",\"mode\":\""
     << (mode == BlockMode::D ? "D" : "Dplus") << "\",\"points_checked\":"
     << points_checked << ",\"disagreements\":[";
  for (size_t i = 0; i < disagreements.size(); ++i) {
    const auto& w = disagreements[i];
    os << (i ? "," : "") << "{\"x\":" << w.x << ",\"y\":" << w.y
       << ",\"member\":" << (w.member ? "true" : "false")
       << ",\"lifted\":" << (w.lifted ? "true" : "false") << ",\"z\":[";
    for (size_t j = 0; j < w.z.size(); ++j) os << (j ? "," : "") << w.z[j];
    os << "]}";
  }
  os << "],\"pass\":" << (pass() ? "true" : "false") << "}";
  return os.str();
}

}  // namespace sqfold
