#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "momentgmp/conic.hpp"
#include "momentgmp/gmp.hpp"
#include "momentgmp/poly.hpp"

namespace momentgmp::experiments {

struct SweepRow {
  int ell = 0;
  double primal = 0.0;  // p*_ell
  double dual = 0.0;    // d*_ell
  double primal_res = 0.0, dual_res = 0.0, gap = 0.0;
  conic::SolveStatus status = conic::SolveStatus::MaxIter;
  double wall_ms = 0.0;
  std::string error;  // nonempty when the solve threw; sweep continues
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> reference;  // p*_ref when supplied
};

/// Upper bound on the true optimum: weights on a deterministic rejection
/// lattice of each S_i ([-1,1] grid with grid_points_per_dim nodes per axis,
/// filtered by the generators), solved as a finite LP over nonnegative atom
/// weights with the instance rows.  Requires n_i <= 2. Throws when the grid
/// LP is infeasible (moment data not representable on the grid).
double reference_optimum(const gmp::GMPInstance& instance,
                         int grid_points_per_dim);

/// Solves the hierarchy at each ell; per-row failures are recorded and the
/// sweep continues. ell values must be ascending.
SweepResult gap_sweep(const gmp::GMPInstance& instance,
                      const std::vector<int>& ells,
                      std::optional<double> reference,
                      const conic::SolveSettings& settings = {});

/// Fixed-seed Gaussian coefficients over |alpha| <= k, rescaled so that
/// a_norm(f) = 1 exactly.
poly::Polynomial sample_unit_anorm(int n, int k, std::uint64_t seed);

/// Sampled lower estimate of the Hausdorff distance rho_H(F^(k), L_ell^(k)):
/// max over `samples` unit-A-norm objectives of max(0, reference - p*_ell),
/// with the grid LP as reference. The instance objective is ignored.
/// Requires ell >= k.
double empirical_hausdorff(const gmp::GMPInstance& family, int k, int ell,
                           int samples, int grid, std::uint64_t seed,
                           const conic::SolveSettings& settings = {});

/// For each ell, the weighted-norm distance between the degree-k truncation
/// of that order's canonical optimizer and the degree-k truncation of the
/// largest-ell optimizer.
std::vector<double> optimizer_convergence(const gmp::GMPInstance& instance,
                                          const std::vector<int>& ells, int k,
                                          const conic::SolveSettings& settings = {});

/// CSV writers. Sweep columns: ell,p_ell,d_ell,gap,time_ms. Hausdorff
/// columns: ell,estimate,samples,grid.
void write_sweep_csv(const SweepResult& result, const std::string& path);
void write_hausdorff_csv(const std::vector<std::pair<int, double>>& rows,
                         int samples, int grid, const std::string& path);

/// Worker-pool width: hardware concurrency capped by MOMENTGMP_THREADS.
int worker_count();

/// Runs fn(i) for i in [0, count) on the bounded pool; results must be
/// written by index so aggregation is deterministic.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace momentgmp::experiments
