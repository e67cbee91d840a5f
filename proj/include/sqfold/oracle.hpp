#pragma once

#include <string>
#include <vector>

#include "sqfold/formulation.hpp"
#include "sqfold/geometry.hpp"
#include "sqfold/instance.hpp"

namespace sqfold {

// Exhaustive box-lattice scan; the reference optimum for small instances.
// Requires n <= 4, step > 0, and at most 1e8 lattice points.
struct GridResult {
  bool feasible = false;  // some lattice point satisfied every constraint
  double value = 0.0;
  std::vector<double> point;
};
GridResult grid_optimum(const QcpInstance& inst, double step);

// All 2^nu sector triangles of the level-nu disjunction; z in counting
// order, bit j of the index giving z_{j+1}. Requires 1 <= nu <= 8.
struct Disjunct {
  std::vector<int> z;
  SectorAngles angles;
  Triangle tri;
};
std::vector<Disjunct> enumerate_disjunction(double l, double u, int nu);

// Closed-form reconstruction of every lifted variable from (x, y) and a
// fixed binary vector; the converse direction of the disjunctive proof.
// Layout matches LiftedBlock local indices.
std::vector<double> reconstruct_lifted(const LiftedBlock& block, double x,
                                       double y, const std::vector<int>& z);

// Violation of the block's lifted machinery by a reconstructed assignment:
// every row plus the lifted-variable bounds, excluding the (x, y) box rows.
double lifted_violation(const LiftedBlock& block,
                        const std::vector<double>& cont,
                        const std::vector<int>& z);

struct DisagreementWitness {
  std::vector<int> z;
  double x = 0.0, y = 0.0;
  bool member = false, lifted = false;
};

struct EquivalenceReport {
  double l = 0.0, u = 0.0;
  int nu = 0;
  BlockMode mode = BlockMode::D;
  int points_checked = 0;
  std::vector<DisagreementWitness> disagreements;

  bool pass() const { return disagreements.empty(); }
  std::string to_json() const;
};

// Verifies, for every z, that fixing the binaries reduces the block to the
// sector triangle (or its Dplus companion): vertices extend to feasible
// lifted assignments, interior samples are lifted-feasible, and clear
// non-members are lifted-infeasible. `corrupt` swaps in broken constants
// (negative-control fixture).
EquivalenceReport check_projection_equivalence(
    double l, double u, int nu, BlockMode mode,
    const BlockConstants* corrupt = nullptr);

// Low-discrepancy samples of the level-nu relaxation region in the original
// (x, y) plane, cycling through the 2^nu sectors.
std::vector<std::pair<double, double>> sample_relaxation_points(
    double l, double u, int nu, BlockMode mode, int count);

// Halton low-discrepancy sequence (1-based index).
double halton(int index, int base);

}  // namespace sqfold
