#pragma once

#include <vector>

#include <Eigen/Core>

#include "momentgmp/poly.hpp"

namespace momentgmp::moment {

/// Symmetric (or rectangular, for catalecticants) matrix indexed by monomial
/// bases: values(i, j) pairs row monomial i with column monomial j.
struct MomentMatrix {
  std::vector<poly::MultiIndex> row_basis;
  std::vector<poly::MultiIndex> col_basis;
  Eigen::MatrixXd values;
};

/// Localizing matrix of a generator g: L[beta,gamma] = lambda(g x^{beta+gamma})
/// over monomials up to floor((ell - deg g)/2).
struct LocalizingMatrix {
  poly::Polynomial generator{0};
  std::vector<poly::MultiIndex> basis;
  Eigen::MatrixXd values;
};

/// M[beta,gamma] = lambda(x^{beta+gamma}) over monomials_upto(n, k).
/// Requires 2k <= order of lambda.
MomentMatrix moment_matrix(const poly::PseudoMoments& lambda, int k);

/// Requires deg g <= ell <= order of lambda. With g = 1 this reduces to
/// moment_matrix(lambda, floor(ell/2)).
LocalizingMatrix localizing_matrix(const poly::PseudoMoments& lambda,
                                   const poly::Polynomial& g, int ell);

/// Catalecticant H^{a,b} of a degree-<=d polynomial F:
/// H[beta,gamma] = binom(d, beta+gamma)^{-1} F_{beta+gamma}, the apolar
/// functional of F evaluated on x^{beta+gamma}. Requires a + b <= d.
MomentMatrix catalecticant(const poly::Polynomial& F, int a, int b, int d);

/// Polynomials spanning the numeric kernel of M: right singular vectors with
/// singular value <= tol * sigma_max, expressed over the column basis and
/// orthonormal in the coefficient Euclidean norm. Empty when M has full
/// numeric rank.
std::vector<poly::Polynomial> kernel_basis(const MomentMatrix& M, double tol);

}  // namespace momentgmp::moment
