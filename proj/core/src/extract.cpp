#include "momentgmp/extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rng.hpp"

namespace momentgmp::extract {

using poly::MonomialBasis;
using poly::MultiIndex;
using poly::Polynomial;
using poly::PseudoMoments;

double AtomSet::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

double AtomSet::total_variation() const {
  double s = 0.0;
  for (const auto& a : atoms) s += std::abs(a.weight);
  return s;
}

int numeric_rank(const Eigen::MatrixXd& M, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("numeric_rank: tol must be > 0");
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++r;
  return r;
}

namespace {

Eigen::MatrixXd shifted_moment_matrix(const PseudoMoments& lambda,
                                      const MonomialBasis& basis, int var) {
  const int s = basis.size();
  Eigen::MatrixXd S(s, s);
  std::vector<int> shift(static_cast<std::size_t>(lambda.n()), 0);
  shift[static_cast<std::size_t>(var)] = 1;
  const MultiIndex e(shift);
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j) {
      const double v = lambda[basis[i] + basis[j] + e];
      S(i, j) = v;
      S(j, i) = v;
    }
  return S;
}

Eigen::MatrixXd plain_moment_matrix(const PseudoMoments& lambda,
                                    const MonomialBasis& basis) {
  const int s = basis.size();
  Eigen::MatrixXd M(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j) {
      const double v = lambda[basis[i] + basis[j]];
      M(i, j) = v;
      M(j, i) = v;
    }
  return M;
}

std::vector<Eigen::VectorXd> cluster_points(
    const std::vector<Eigen::VectorXd>& pts, double merge_tol) {
  std::vector<Eigen::VectorXd> reps;
  std::vector<int> count;
  for (const auto& p : pts) {
    bool merged = false;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if ((reps[r] / count[r] - p).lpNorm<Eigen::Infinity>() <= merge_tol) {
        reps[r] += p;
        ++count[r];
        merged = true;
        break;
      }
    }
    if (!merged) {
      reps.push_back(p);
      count.push_back(1);
    }
  }
  for (std::size_t r = 0; r < reps.size(); ++r) reps[r] /= count[r];
  return reps;
}

}  // namespace

AtomSet extract_atoms(const PseudoMoments& lambda, const ExtractOptions& opts) {
  const int ell = lambda.order();
  const int n = lambda.n();
  if (ell < 4)
    throw std::domain_error("extract_atoms: order of lambda must be >= 4");

  const double peak = lambda.values().lpNorm<Eigen::Infinity>();
  if (peak <= opts.zero_tol) {
    AtomSet zero;
    zero.residual = peak;
    return zero;
  }

  // Flatness-like scan: smallest k with matching numeric rank at k and k+1.
  int k_flat = -1, rank = -1;
  std::vector<Eigen::MatrixXd> mats;  // mats[k] = M_k; index 0 unused
  mats.emplace_back();
  for (int k = 1; k + 1 <= ell / 2; ++k) {
    while (static_cast<int>(mats.size()) <= k + 1)
      mats.push_back(plain_moment_matrix(
          lambda, MonomialBasis(n, static_cast<int>(mats.size()))));
    const int rk = numeric_rank(mats[static_cast<std::size_t>(k)], opts.rank_tol);
    const int rk1 =
        numeric_rank(mats[static_cast<std::size_t>(k + 1)], opts.rank_tol);
    if (rk == rk1) {
      k_flat = k;
      rank = rk;
      break;
    }
  }
  if (k_flat < 0)
    throw NoFlatRankError("extract_atoms: no stable-rank degree found; raise ell");

  AtomSet out;
  out.signed_weights = false;
  const MonomialBasis basis_k(n, k_flat);
  const Eigen::MatrixXd& Mk = mats[static_cast<std::size_t>(k_flat)];

  if (rank == 0) {
    // Zero measure: residual is the largest stored low-order moment.
    double res = 0.0;
    for (const MultiIndex& a : poly::monomials_upto(n, std::min(2 * k_flat + 1, ell)))
      res = std::max(res, std::abs(lambda[a]));
    out.residual = res;
    return out;
  }

  // Column-space factor V = U_r D_r^{1/2} of M_k.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Mk);
  const int s = basis_k.size();
  Eigen::VectorXd evals = es.eigenvalues();  // ascending
  Eigen::MatrixXd evecs = es.eigenvectors();
  Eigen::MatrixXd V(s, rank), Vpinv(rank, s);
  const double emax = std::abs(evals[s - 1]);
  for (int r = 0; r < rank; ++r) {
    const double ev = evals[s - 1 - r];
    if (ev <= 0.0)
      throw ExtractionUnstableError(
          "extract_atoms: column-space factor not positive",
          ev <= 0.0 ? std::numeric_limits<double>::infinity() : emax / ev);
    const double sq = std::sqrt(ev);
    V.col(r) = evecs.col(s - 1 - r) * sq;
    Vpinv.row(r) = evecs.col(s - 1 - r).transpose() / sq;
  }
  const double cond = std::sqrt(emax / evals[s - rank]);
  if (!std::isfinite(cond) || cond > 1e12)
    throw ExtractionUnstableError("extract_atoms: ill-conditioned basis", cond);

  // Shift operators N_j = V^+ S_j V^+'; symmetric up to noise.
  std::vector<Eigen::MatrixXd> N(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXd Sj = shifted_moment_matrix(lambda, basis_k, j);
    Eigen::MatrixXd Nj = Vpinv * Sj * Vpinv.transpose();
    N[static_cast<std::size_t>(j)] = 0.5 * (Nj + Nj.transpose());
  }

  // Random unit combination; one redraw on an eigenvalue collision.
  detail::Rng rng(opts.seed);
  std::vector<Eigen::VectorXd> points;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Eigen::VectorXd cvec = rng.unit_sphere(n);
    Eigen::MatrixXd Ncomb = Eigen::MatrixXd::Zero(rank, rank);
    for (int j = 0; j < n; ++j) Ncomb += cvec[j] * N[static_cast<std::size_t>(j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> comb(Ncomb);
    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < rank; ++i)
      min_gap = std::min(min_gap,
                         std::abs(comb.eigenvalues()[i + 1] - comb.eigenvalues()[i]));
    points.clear();
    for (int i = 0; i < rank; ++i) {
      const Eigen::VectorXd q = comb.eigenvectors().col(i);
      Eigen::VectorXd xi(n);
      for (int j = 0; j < n; ++j)
        xi[j] = q.dot(N[static_cast<std::size_t>(j)] * q);
      points.push_back(std::move(xi));
    }
    if (rank < 2 || min_gap >= 1e-10) break;
  }

  const std::vector<Eigen::VectorXd> reps = cluster_points(points, opts.merge_tol);
  const int r_out = static_cast<int>(reps.size());

  // Vandermonde least squares for the weights over |alpha| <= 2k+1.
  const MonomialBasis fit_basis(n, std::min(2 * k_flat + 1, ell));
  Eigen::MatrixXd Vand(fit_basis.size(), r_out);
  Eigen::VectorXd rhs(fit_basis.size());
  for (int i = 0; i < fit_basis.size(); ++i) {
    const MultiIndex& a = fit_basis[i];
    rhs[i] = lambda[a];
    for (int p = 0; p < r_out; ++p) {
      double t = 1.0;
      for (int j = 0; j < n; ++j)
        for (int e = 0; e < a[j]; ++e) t *= reps[static_cast<std::size_t>(p)][j];
      Vand(i, p) = t;
    }
  }
  const Eigen::VectorXd w = Vand.colPivHouseholderQr().solve(rhs);
  out.residual = (Vand * w - rhs).lpNorm<Eigen::Infinity>();
  for (int p = 0; p < r_out; ++p)
    out.atoms.push_back({w[p], reps[static_cast<std::size_t>(p)]});
  return out;
}

AtomSet extract_atoms(const PseudoMoments& lambda, double tol) {
  ExtractOptions opts;
  opts.rank_tol = tol;
  return extract_atoms(lambda, opts);
}

PseudoMoments atoms_to_moments(const AtomSet& a, int n, int ell) {
  PseudoMoments out(n, ell);
  for (int i = 0; i < out.size(); ++i) {
    const MultiIndex& alpha = out.basis()[i];
    double v = 0.0;
    for (const auto& atom : a.atoms) {
      double t = atom.weight;
      for (int j = 0; j < n; ++j)
        for (int e = 0; e < alpha[j]; ++e) t *= atom.point[j];
      v += t;
    }
    out.at_index(i) = v;
  }
  return out;
}

Polynomial reconstruct_polynomial(const AtomSet& a, int d) {
  if (a.atoms.empty()) return Polynomial::zero(1);
  const int n = static_cast<int>(a.atoms.front().point.size());
  Polynomial out(n);
  for (const auto& atom : a.atoms)
    out += poly::power_of_affine(atom.point, d) * atom.weight;
  return out;
}

AtomMatch match_atoms(const AtomSet& a, const AtomSet& b) {
  AtomMatch m;
  if (a.size() != b.size()) return m;
  m.same_size = true;
  const int r = a.size();
  if (r == 0) return m;
  std::vector<int> perm(static_cast<std::size_t>(r));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  double best_w = 0.0;
  do {
    double pe = 0.0, we = 0.0;
    for (int i = 0; i < r; ++i) {
      const auto& ai = a.atoms[static_cast<std::size_t>(i)];
      const auto& bi = b.atoms[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
      pe = std::max(pe, (ai.point - bi.point).lpNorm<Eigen::Infinity>());
      we = std::max(we, std::abs(ai.weight - bi.weight));
    }
    if (std::max(pe, we) < best) {
      best = std::max(pe, we);
      m.max_point_error = pe;
      m.max_weight_error = we;
      best_w = we;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  (void)best_w;
  return m;
}

}  // namespace momentgmp::extract
