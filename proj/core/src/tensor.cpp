#include "momentgmp/tensor.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "momentgmp/moment.hpp"

namespace momentgmp::tensor {

using poly::MonomialBasis;
using poly::MultiIndex;
using poly::Polynomial;
using poly::PseudoMoments;

DecompositionConfig resolve_config(const DecompositionConfig& base, int d,
                                   Mode mode, const Polynomial& f_rescaled) {
  DecompositionConfig cfg = base;
  if (cfg.psi_half_degree <= 0) {
    cfg.psi_half_degree = cfg.ell > 0 ? cfg.ell / 2 : d / 2 + 1;
  }
  if (cfg.ell <= 0) cfg.ell = 2 * (cfg.psi_half_degree + 2);
  if (2 * cfg.psi_half_degree <= d)
    throw std::invalid_argument("DecompositionConfig: requires 2 d' > d");
  if (cfg.ell < 2 * cfg.psi_half_degree)
    throw std::invalid_argument("DecompositionConfig: requires ell >= 2 d'");
  if (!(cfg.scale > 0.0))
    throw std::invalid_argument("DecompositionConfig: scale must be > 0");
  if (mode == Mode::Signed && cfg.total_variation <= 0.0)
    cfg.total_variation = 10.0 * (poly::apolar_norm(f_rescaled, d) + 1.0);
  return cfg;
}

Polynomial default_psi(int n, int d_prime) {
  if (d_prime < 0)
    throw std::invalid_argument("default_psi: d' must be >= 0");
  Polynomial psi(n);
  for (const MultiIndex& a : poly::monomials_upto(n, d_prime)) {
    std::vector<int> e(a.exponents());
    for (int& x : e) x *= 2;
    psi.add_term(MultiIndex(std::move(e)), 1.0);
  }
  return psi;
}

gmp::GMPInstance build_positive_gmp(const Polynomial& F, int d,
                                    const DecompositionConfig& cfg) {
  if (F.degree() > d)
    throw std::domain_error("build_positive_gmp: deg F exceeds d");
  const int n = F.n();
  gmp::GMPInstance inst;
  inst.slots.push_back(gmp::unit_ball_slot(n));
  inst.objective.push_back(default_psi(n, cfg.psi_half_degree));
  for (const MultiIndex& a : poly::monomials_upto(n, d)) {
    gmp::ConstraintRow row;
    Polynomial h(n);
    h.set_coefficient(a, 1.0);
    row.h.push_back(std::move(h));
    row.t = F.coefficient(a) / poly::multinomial(d, a);
    row.kind = gmp::RowKind::Equality;
    inst.rows.push_back(std::move(row));
  }
  inst.witness[0] = 1.0;  // the alpha = 0 row: 1 > 0 on S
  return inst;
}

gmp::GMPInstance build_signed_gmp(const Polynomial& F, int d,
                                  const DecompositionConfig& cfg,
                                  const std::vector<Polynomial>* kernel) {
  if (!(cfg.total_variation > 0.0))
    throw std::invalid_argument("build_signed_gmp: requires L > 0");
  if (F.degree() > d)
    throw std::domain_error("build_signed_gmp: deg F exceeds d");
  const int n = F.n();
  gmp::GMPInstance inst;
  inst.slots.push_back(gmp::unit_ball_slot(n));
  inst.slots.push_back(gmp::unit_ball_slot(n));
  const Polynomial psi = default_psi(n, cfg.psi_half_degree);
  inst.objective.push_back(psi);
  inst.objective.push_back(psi);
  for (const MultiIndex& a : poly::monomials_upto(n, d)) {
    gmp::ConstraintRow row;
    Polynomial hp(n), hm(n);
    hp.set_coefficient(a, 1.0);
    hm.set_coefficient(a, -1.0);
    row.h.push_back(std::move(hp));
    row.h.push_back(std::move(hm));
    row.t = F.coefficient(a) / poly::multinomial(d, a);
    row.kind = gmp::RowKind::Equality;
    inst.rows.push_back(std::move(row));
  }
  if (kernel != nullptr) {
    for (const Polynomial& q : *kernel) {
      for (const MultiIndex& beta : poly::monomials_upto(n, cfg.ell - 2)) {
        if (beta.total() + q.degree() > cfg.ell) continue;
        const Polynomial qb = q.shifted(beta);
        for (int slot = 0; slot < 2; ++slot) {
          gmp::ConstraintRow row;
          row.h.push_back(slot == 0 ? qb : Polynomial::zero(n));
          row.h.push_back(slot == 1 ? qb : Polynomial::zero(n));
          row.t = 0.0;
          row.kind = gmp::RowKind::Equality;
          inst.rows.push_back(std::move(row));
        }
      }
    }
  }
  gmp::ConstraintRow tv;
  tv.h.push_back(Polynomial::constant(n, 1.0));
  tv.h.push_back(Polynomial::constant(n, 1.0));
  tv.t = cfg.total_variation;
  tv.kind = gmp::RowKind::InequalityLE;
  inst.rows.push_back(std::move(tv));
  inst.witness[static_cast<int>(inst.rows.size()) - 1] = 1.0;
  return inst;
}

double reconstruction_error(const Polynomial& F, const extract::AtomSet& a,
                            int d) {
  if (a.atoms.empty()) return poly::apolar_norm(F, d);
  return poly::apolar_norm(F - extract::reconstruct_polynomial(a, d), d);
}

namespace {

/// Levenberg-Marquardt refinement of (weights, points) against the exact
/// moment data y_alpha = binom(d,alpha)^{-1} F_alpha, |alpha| <= d. The
/// relaxation solves the global placement; this squares down the first-order
/// solver noise. Atoms are kept unchanged when the fit does not improve.
double polish_atoms(extract::AtomSet& atoms, const Polynomial& F, int d) {
  const int n = F.n();
  const int r = atoms.size();
  const MonomialBasis basis(n, d);
  const int meq = basis.size();
  Eigen::VectorXd y(meq);
  for (int i = 0; i < meq; ++i)
    y[i] = F.coefficient(basis[i]) / poly::multinomial(d, basis[i]);
  if (r == 0) return y.lpNorm<Eigen::Infinity>();

  const int p = r * (1 + n);
  Eigen::VectorXd theta(p);
  for (int i = 0; i < r; ++i) {
    theta[i * (1 + n)] = atoms.atoms[static_cast<std::size_t>(i)].weight;
    theta.segment(i * (1 + n) + 1, n) =
        atoms.atoms[static_cast<std::size_t>(i)].point;
  }

  auto residual = [&](const Eigen::VectorXd& th, Eigen::VectorXd& res) {
    res = -y;
    for (int i = 0; i < r; ++i) {
      const double w = th[i * (1 + n)];
      const auto xi = th.segment(i * (1 + n) + 1, n);
      for (int q = 0; q < meq; ++q) {
        double t = w;
        for (int j = 0; j < n; ++j)
          for (int e = 0; e < basis[q][j]; ++e) t *= xi[j];
        res[q] += t;
      }
    }
  };

  Eigen::VectorXd res(meq), trial_res(meq);
  residual(theta, res);
  double best = res.norm();
  double mu = 1e-8;
  Eigen::MatrixXd J(meq, p);
  for (int it = 0; it < 60 && best > 1e-14; ++it) {
    J.setZero();
    for (int i = 0; i < r; ++i) {
      const double w = theta[i * (1 + n)];
      const auto xi = theta.segment(i * (1 + n) + 1, n);
      for (int q = 0; q < meq; ++q) {
        const auto& a = basis[q];
        double mono = 1.0;
        for (int j = 0; j < n; ++j)
          for (int e = 0; e < a[j]; ++e) mono *= xi[j];
        J(q, i * (1 + n)) = mono;
        for (int j = 0; j < n; ++j) {
          if (a[j] == 0) continue;
          double dm = w * a[j];
          for (int t = 0; t < n; ++t) {
            const int e = t == j ? a[t] - 1 : a[t];
            for (int rep = 0; rep < e; ++rep) dm *= xi[t];
          }
          J(q, i * (1 + n) + 1 + j) = dm;
        }
      }
    }
    bool stepped = false;
    for (int tries = 0; tries < 8; ++tries) {
      Eigen::MatrixXd JtJ = J.transpose() * J;
      JtJ.diagonal().array() += mu * (1.0 + JtJ.diagonal().maxCoeff());
      const Eigen::VectorXd delta = JtJ.ldlt().solve(-J.transpose() * res);
      const Eigen::VectorXd trial = theta + delta;
      residual(trial, trial_res);
      if (trial_res.norm() < best) {
        theta = trial;
        res = trial_res;
        best = res.norm();
        mu = std::max(mu / 3.0, 1e-14);
        stepped = true;
        break;
      }
      mu *= 10.0;
    }
    if (!stepped) break;
  }

  for (int i = 0; i < r; ++i) {
    atoms.atoms[static_cast<std::size_t>(i)].weight = theta[i * (1 + n)];
    atoms.atoms[static_cast<std::size_t>(i)].point =
        theta.segment(i * (1 + n) + 1, n);
  }
  return res.lpNorm<Eigen::Infinity>();
}

}  // namespace

extract::AtomSet rescale_atoms(const extract::AtomSet& a, double scale) {
  extract::AtomSet out = a;
  for (auto& atom : out.atoms) atom.point *= scale;
  return out;
}

DecomposeResult decompose(const Polynomial& f_hom, int d, Mode mode,
                          const DecompositionConfig& base_cfg) {
  if (f_hom.degree() != d && !f_hom.is_zero())
    throw std::domain_error("decompose: input degree does not match d");
  const Polynomial f_scaled = poly::dehomogenize_rescale(f_hom, base_cfg.scale);
  const Polynomial f_plain = poly::dehomogenize_rescale(f_hom, 1.0);
  const int n = f_scaled.n();
  const DecompositionConfig cfg = resolve_config(base_cfg, d, mode, f_scaled);

  DecomposeResult result;
  result.diagnostics.resolved = cfg;

  std::vector<Polynomial> kernel;
  if (mode == Mode::Signed && cfg.use_kernel) {
    if (d < 4)
      throw std::domain_error("decompose: kernel augmentation needs d >= 4");
    const moment::MomentMatrix H = moment::catalecticant(f_scaled, 2, 2, d);
    kernel = moment::kernel_basis(H, cfg.rank_tol);
    result.diagnostics.kernel_dim = static_cast<int>(kernel.size());
  }

  gmp::GMPInstance inst =
      mode == Mode::Positive
          ? build_positive_gmp(f_scaled, d, cfg)
          : build_signed_gmp(f_scaled, d, cfg, kernel.empty() ? nullptr : &kernel);
  result.diagnostics.mass_bound = gmp::mass_bound(inst);

  const gmp::AssembledProblem assembled = gmp::assemble_primal(inst, cfg.ell);
  const conic::ConicSolution sol = conic::solve(assembled.problem, cfg.solver);
  result.diagnostics.solver_status = sol.status;
  result.diagnostics.primal_res = sol.primal_res;
  result.diagnostics.dual_res = sol.dual_res;
  result.diagnostics.gap = sol.gap;
  result.diagnostics.primal_obj = sol.primal_obj;
  result.diagnostics.dual_obj = sol.dual_obj;
  result.diagnostics.iterations = sol.iterations;
  if (sol.status == conic::SolveStatus::PrimalInfeasible ||
      sol.status == conic::SolveStatus::DualInfeasible)
    throw std::runtime_error("decompose: relaxation reported infeasibility");

  const std::vector<PseudoMoments> moments = assembled.moments_from(sol);

  // The flat-rank scan needs the tolerance to clear the solver noise floor;
  // widen it deterministically when the configured value is too tight.
  extract::AtomSet scaled_atoms;
  scaled_atoms.signed_weights = mode == Mode::Signed;
  double extraction_residual = 0.0;
  double effective_tol = cfg.rank_tol;
  for (std::size_t slot = 0; slot < moments.size(); ++slot) {
    extract::ExtractOptions opts;
    opts.merge_tol = cfg.merge_tol;
    extract::AtomSet part;
    bool done = false;
    for (double tol = cfg.rank_tol; tol <= 1.01e-2; tol *= 10.0) {
      opts.rank_tol = tol;
      try {
        part = extract::extract_atoms(moments[slot], opts);
        effective_tol = std::max(effective_tol, tol);
        done = true;
        break;
      } catch (const extract::NoFlatRankError&) {
        if (tol * 10.0 > 1.01e-2) throw;
      }
    }
    if (!done) continue;
    extraction_residual = std::max(extraction_residual, part.residual);
    const double sign = (mode == Mode::Signed && slot == 1) ? -1.0 : 1.0;
    for (const auto& atom : part.atoms)
      scaled_atoms.atoms.push_back({sign * atom.weight, atom.point});
  }
  result.diagnostics.extraction_residual = extraction_residual;
  result.diagnostics.effective_rank_tol = effective_tol;

  for (int k = 1; 2 * k <= cfg.ell; ++k) {
    const auto M = moment::moment_matrix(moments[0], k);
    result.diagnostics.rank_trajectory.push_back(
        extract::numeric_rank(M.values, effective_tol));
  }

  result.diagnostics.fit_residual = polish_atoms(scaled_atoms, f_scaled, d);
  scaled_atoms.residual = result.diagnostics.fit_residual;

  result.atoms = rescale_atoms(scaled_atoms, cfg.scale);
  result.diagnostics.reconstruction_error =
      reconstruction_error(f_plain, result.atoms, d);
  result.diagnostics.not_certified = result.diagnostics.fit_residual > 1e-3;
  return result;
}

}  // namespace momentgmp::tensor
