#pragma once

#include <optional>
#include <vector>

#include "momentgmp/conic.hpp"
#include "momentgmp/extract.hpp"
#include "momentgmp/gmp.hpp"
#include "momentgmp/poly.hpp"

namespace momentgmp::tensor {

enum class Mode { Positive, Signed };

/// Pipeline parameters. Zero-valued ell / psi_half_degree / total_variation
/// are materialized by resolve_config: d' is the smallest integer with
/// 2d' > d and ell = 2(d' + 2); when only the order is given, d' = ell / 2
/// (so --order 12 with d = 4 reproduces the reference setups); default
/// L = 10 (apolar_norm(F, d) + 1).
struct DecompositionConfig {
  int ell = 0;
  int psi_half_degree = 0;      // d', must satisfy 2d' > d
  double scale = 1.0;
  double total_variation = 0.0;  // L, signed mode only
  bool use_kernel = false;
  double rank_tol = 1e-6;
  double merge_tol = 1e-6;
  conic::SolveSettings solver;
};

DecompositionConfig resolve_config(const DecompositionConfig& base, int d,
                                   Mode mode,
                                   const poly::Polynomial& f_rescaled);

/// Psi = sum_{|alpha| <= d'} x^{2 alpha}; <lambda, Psi> is the trace of the
/// order-d' moment matrix of lambda (nuclear norm of the PSD matrix).
poly::Polynomial default_psi(int n, int d_prime);

/// One unit-ball slot, equality rows <lambda, x^alpha> = binom(d,alpha)^{-1}
/// F_alpha for |alpha| <= d, objective Psi, S-fullness witness on the
/// alpha = 0 row. F is the dehomogenized, rescaled polynomial.
gmp::GMPInstance build_positive_gmp(const poly::Polynomial& F, int d,
                                    const DecompositionConfig& cfg);

/// Two unit-ball slots lambda+/lambda-, equality rows <lambda+ - lambda-,
/// x^alpha> = binom(d,alpha)^{-1} F_alpha, total-variation cap
/// <lambda+,1> + <lambda-,1> <= L carrying the witness, objective
/// <lambda+,Psi> + <lambda-,Psi>, and per-slot rows <lambda+-, q x^beta> = 0
/// for each kernel polynomial q and |beta| <= ell - 2 when a kernel is given.
gmp::GMPInstance build_signed_gmp(
    const poly::Polynomial& F, int d, const DecompositionConfig& cfg,
    const std::vector<poly::Polynomial>* kernel = nullptr);

struct Diagnostics {
  conic::SolveStatus solver_status = conic::SolveStatus::MaxIter;
  double primal_res = 0.0, dual_res = 0.0, gap = 0.0;
  double primal_obj = 0.0, dual_obj = 0.0;
  int iterations = 0;
  std::vector<int> rank_trajectory;  // numeric rank of M_k, k = 1, 2, ...
  double extraction_residual = 0.0;
  /// Rank tolerance the extraction actually used; equals the configured
  /// rank_tol unless the scan had to widen it to clear solver noise.
  double effective_rank_tol = 0.0;
  /// Moment-constraint misfit of the returned atoms (infinity norm over
  /// |alpha| <= d, rescaled frame) after the local refinement step.
  double fit_residual = 0.0;
  /// Apolar-norm distance between the input (dehomogenized, original
  /// coordinates) and the reconstruction from the returned atoms.
  double reconstruction_error = 0.0;
  double mass_bound = 0.0;
  bool not_certified = false;
  int kernel_dim = 0;
  DecompositionConfig resolved;
};

struct DecomposeResult {
  extract::AtomSet atoms;  // original coordinates
  Diagnostics diagnostics;
};

/// Full pipeline: dehomogenize_rescale, optional catalecticant kernel,
/// build the GMP, assemble and solve the order-ell relaxation, extract atoms
/// per slot, refine them locally against the moment constraints
/// (Levenberg-Marquardt on the exact row data) and map them back to original
/// coordinates. A final moment misfit above 1e-3 flags the result
/// NotCertified (still returned).
DecomposeResult decompose(const poly::Polynomial& f_hom, int d, Mode mode,
                          const DecompositionConfig& cfg);

/// apolar_norm(F - reconstruct_polynomial(a, d), d).
double reconstruction_error(const poly::Polynomial& F, const extract::AtomSet& a,
                            int d);

/// Points multiplied by scale, weights unchanged (inverse of the
/// dehomogenize_rescale coordinate change).
extract::AtomSet rescale_atoms(const extract::AtomSet& a, double scale);

}  // namespace momentgmp::tensor
