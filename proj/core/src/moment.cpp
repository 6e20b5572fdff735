#include "momentgmp/moment.hpp"

#include <stdexcept>

#include <Eigen/SVD>

namespace momentgmp::moment {

using poly::MonomialBasis;
using poly::MultiIndex;
using poly::Polynomial;
using poly::PseudoMoments;

MomentMatrix moment_matrix(const PseudoMoments& lambda, int k) {
  if (k < 0) throw std::invalid_argument("moment_matrix: k must be >= 0");
  if (2 * k > lambda.order())
    throw std::domain_error("moment_matrix: order of lambda too small");
  MonomialBasis basis(lambda.n(), k);
  const int s = basis.size();
  MomentMatrix M;
  M.row_basis = basis.monomials();
  M.col_basis = basis.monomials();
  M.values.resize(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j) {
      const double v = lambda[basis[i] + basis[j]];
      M.values(i, j) = v;
      M.values(j, i) = v;
    }
  return M;
}

LocalizingMatrix localizing_matrix(const PseudoMoments& lambda,
                                   const Polynomial& g, int ell) {
  if (g.degree() > ell)
    throw std::domain_error("localizing_matrix: deg g exceeds ell");
  if (lambda.order() < ell)
    throw std::domain_error("localizing_matrix: order of lambda too small");
  const int k = (ell - g.degree()) / 2;
  MonomialBasis basis(lambda.n(), k);
  const int s = basis.size();
  LocalizingMatrix L;
  L.generator = g;
  L.basis = basis.monomials();
  L.values.resize(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j) {
      double v = 0.0;
      const MultiIndex bg = basis[i] + basis[j];
      for (const auto& [delta, c] : g.terms()) v += c * lambda[bg + delta];
      L.values(i, j) = v;
      L.values(j, i) = v;
    }
  return L;
}

MomentMatrix catalecticant(const Polynomial& F, int a, int b, int d) {
  if (a < 0 || b < 0 || a + b > d)
    throw std::domain_error("catalecticant: requires 0 <= a, b and a + b <= d");
  if (F.degree() > d)
    throw std::domain_error("catalecticant: deg F exceeds d");
  MonomialBasis rows(F.n(), a), cols(F.n(), b);
  MomentMatrix H;
  H.row_basis = rows.monomials();
  H.col_basis = cols.monomials();
  H.values.resize(rows.size(), cols.size());
  for (int i = 0; i < rows.size(); ++i)
    for (int j = 0; j < cols.size(); ++j) {
      const MultiIndex s = rows[i] + cols[j];
      H.values(i, j) = F.coefficient(s) / poly::multinomial(d, s);
    }
  return H;
}

std::vector<Polynomial> kernel_basis(const MomentMatrix& M, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("kernel_basis: tol must be > 0");
  const int n = M.col_basis.empty() ? 0 : M.col_basis.front().size();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M.values, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  std::vector<Polynomial> out;
  const int cols = static_cast<int>(M.col_basis.size());
  for (int i = 0; i < cols; ++i) {
    const double s = i < sv.size() ? sv(i) : 0.0;
    if (s <= tol * smax) {
      Polynomial q(n);
      for (int j = 0; j < cols; ++j)
        q.add_term(M.col_basis[static_cast<std::size_t>(j)], svd.matrixV()(j, i));
      out.push_back(std::move(q));
    }
  }
  return out;
}

}  // namespace momentgmp::moment
