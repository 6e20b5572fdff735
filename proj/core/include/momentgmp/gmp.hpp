#pragma once

#include <map>
#include <optional>
#include <vector>

#include "momentgmp/conic.hpp"
#include "momentgmp/poly.hpp"

namespace momentgmp::gmp {

/// One measure slot: the semialgebraic support S_i = {x : g(x) >= 0 for all
/// g in generators}. The ball constraint 1 - ||x||^2 must be present
/// (Archimedean surrogate); includes_ball records that it is.
struct MeasureSlot {
  int n = 0;
  std::vector<poly::Polynomial> generators;
  bool includes_ball = false;
};

/// 1 - ||x||^2 in n variables.
poly::Polynomial unit_ball_generator(int n);

/// Slot whose support is the unit ball.
MeasureSlot unit_ball_slot(int n);

enum class RowKind { Equality, InequalityLE };

/// One moment constraint: sum_i <lambda_i, h_i> (=|<=) t.
struct ConstraintRow {
  std::vector<poly::Polynomial> h;  // one polynomial per slot
  double t = 0.0;
  RowKind kind = RowKind::Equality;

  int degree() const;
};

/// Generalized moment problem on a vector of measures: minimize
/// sum_i <lambda_i, f_i> subject to the rows and lambda_i supported on S_i.
/// K is a product of {0} (equality) and R+ (t - <lambda,h> >= 0) coordinates.
struct GMPInstance {
  std::vector<MeasureSlot> slots;
  std::vector<poly::Polynomial> objective;  // f_i per slot
  std::vector<ConstraintRow> rows;
  /// Sparse S-fullness witness w over row indices; w_j >= 0 required on
  /// inequality rows. Empty map = witness absent.
  std::map<int, double> witness;

  int num_slots() const { return static_cast<int>(slots.size()); }
  int objective_degree() const;
  void validate() const;
};

/// Moment relaxation of a GMPInstance at order ell together with the maps
/// back from conic solutions to pseudo-moments and dual row values.
struct AssembledProblem {
  conic::ConicProblem problem;
  int ell = 0;
  std::vector<int> slot_n;
  std::vector<int> slot_offset;        // start of each slot's moments in x
  std::vector<int> kept_rows;          // instance row index per linear conic row
  std::vector<double> row_scale;       // Euclidean normalization per linear row
  bool empty_constraint_warning = false;

  std::vector<poly::PseudoMoments> moments_from(
      const conic::ConicSolution& sol) const;
  /// Dual value v_j per kept row, in original (unnormalized) units.
  std::map<int, double> dual_rows_from(const conic::ConicSolution& sol) const;
};

/// Order-ell primal moment relaxation as a standard-form conic problem:
/// pseudo-moment variables per slot, one PSD block for the order-floor(ell/2)
/// moment matrix plus one localizing block per generator, and the linear rows
/// with deg(h_j) <= ell. Rows are normalized to unit Euclidean coefficient
/// norm. Requires ell >= max(deg f, 2).
AssembledProblem assemble_primal(const GMPInstance& instance, int ell);

/// Conic dual of assemble_primal(instance, ell): variables are the dual row
/// multipliers and the SoS Gram blocks, data identical to the primal's up to
/// transposition. The SoS optimum d*_ell equals minus the returned problem's
/// optimal value.
conic::ConicProblem assemble_dual(const GMPInstance& instance, int ell);

/// <t, w> / b_min with b_i = sum_j w_j h_{i,j} sampled on a fixed-seed
/// rejection grid of 4096 points per slot. Any feasible lambda satisfies
/// sum_i lambda_i(1) <= mass_bound. Throws when the witness is absent or the
/// sampled minimum is nonpositive.
double mass_bound(const GMPInstance& instance);

}  // namespace momentgmp::gmp
