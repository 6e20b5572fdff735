#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "momentgmp/poly.hpp"

namespace momentgmp::extract {

struct Atom {
  double weight = 0.0;
  Eigen::VectorXd point;
};

/// Discrete measure sum_i omega_i delta_{xi_i}. Points are pairwise distinct
/// beyond the merge tolerance; for signed_weights == false all weights are
/// nonnegative (up to extraction noise).
struct AtomSet {
  std::vector<Atom> atoms;
  bool signed_weights = false;
  /// Moment-fit residual reported by extract_atoms (infinity norm over the
  /// monomials it matched); 0 for hand-built sets.
  double residual = 0.0;

  int size() const { return static_cast<int>(atoms.size()); }
  double total_mass() const;      // sum omega_i
  double total_variation() const; // sum |omega_i|
};

/// No degree k <= floor(ell/2) - 1 with rank(M_k) = rank(M_{k+1}); raising
/// ell usually helps.
struct NoFlatRankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExtractionUnstableError : std::runtime_error {
  ExtractionUnstableError(const std::string& msg, double cond)
      : std::runtime_error(msg), condition_estimate(cond) {}
  double condition_estimate;
};

/// Count of singular values > tol * sigma_max; 0 for the zero matrix.
int numeric_rank(const Eigen::MatrixXd& M, double tol);

struct ExtractOptions {
  double rank_tol = 1e-6;
  double merge_tol = 1e-6;
  /// Moments whose largest entry is below this are treated as the zero
  /// measure (relative rank scans are meaningless on pure noise).
  double zero_tol = 1e-7;
  std::uint64_t seed = 0x61746f6d;  // shift-combination draw
};

/// Multiplication-operator extraction: scan for the smallest k with stable
/// numeric rank r across M_k and M_{k+1}, factor the column space of M_k,
/// form the shift operators N_j, simultaneously diagonalize a random unit
/// combination, read points as Rayleigh quotients and solve the Vandermonde
/// least squares for the weights. The returned residual is
/// ||moments(atoms) - lambda||_inf over |alpha| <= 2k+1.
AtomSet extract_atoms(const poly::PseudoMoments& lambda,
                      const ExtractOptions& opts);
AtomSet extract_atoms(const poly::PseudoMoments& lambda, double tol);

/// lambda(x^alpha) = sum_i omega_i xi_i^alpha for |alpha| <= ell.
poly::PseudoMoments atoms_to_moments(const AtomSet& a, int n, int ell);

/// sum_i omega_i (1 + <xi_i, x>)^d.
poly::Polynomial reconstruct_polynomial(const AtomSet& a, int d);

/// Multiset comparison under optimal (min-cost) matching; exhaustive over
/// permutations, intended for small atom counts.
struct AtomMatch {
  bool same_size = false;
  double max_point_error = 0.0;   // infinity norm
  double max_weight_error = 0.0;
};
AtomMatch match_atoms(const AtomSet& a, const AtomSet& b);

}  // namespace momentgmp::extract
