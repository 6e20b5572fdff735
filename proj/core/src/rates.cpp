#include "momentgmp/rates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "momentgmp/poly.hpp"

namespace momentgmp::rates {

PsatzConstants ball_constants(int n, int deg, double gamma) {
  return {Preset::Ball, gamma, 2.0,
          2.0 * n * std::pow(static_cast<double>(deg), 1.5)};
}

PsatzConstants box1_constants(int n, int deg, double gamma) {
  return {Preset::Box1, gamma, 1.0,
          M_PI * n * std::sqrt(2.0 * n) * static_cast<double>(deg)};
}

PsatzConstants box2_constants(int n, int deg, double gamma) {
  return {Preset::Box2, gamma, 2.0,
          M_PI * n * std::sqrt(2.0 * n) * static_cast<double>(deg)};
}

PsatzConstants generic_constants(double gamma, double theta) {
  if (!(theta > 0.0))
    throw std::invalid_argument("generic_constants: theta must be > 0");
  return {Preset::Generic, gamma, theta, 0.0};
}

KappaTheta kappa_theta(const RateInputs& inputs) {
  if (inputs.slots.empty())
    throw std::invalid_argument("kappa_theta: no slots");
  KappaTheta out;
  out.theta = inputs.slots.front().psatz.theta;
  out.kappa = 0.0;
  for (const auto& slot : inputs.slots) {
    if (!(slot.hw_min > 0.0))
      throw std::domain_error("kappa_theta: (h.w)_min must be > 0");
    const double term = inputs.t_dot_w / slot.hw_min *
                        std::pow(slot.psatz.gamma, slot.psatz.theta) *
                        (2.0 * slot.f_max + inputs.v_star_l1 * slot.h_star_max);
    out.kappa = std::max(out.kappa, term);
    out.theta = std::min(out.theta, slot.psatz.theta);
  }
  return out;
}

double gap_bound(double ell, double kappa, double theta) {
  if (!(ell > 0.0)) throw std::domain_error("gap_bound: ell must be > 0");
  return kappa * std::pow(ell, -theta);
}

double ell_threshold(const std::vector<double>& ell0,
                     const std::vector<int>& active_degrees) {
  double t = 0.0;
  for (double e : ell0) t = std::max(t, e);
  for (int d : active_degrees) t = std::max(t, static_cast<double>(d));
  return t;
}

double hausdorff_kappa(const RateInputs& inputs) {
  if (inputs.slots.empty())
    throw std::invalid_argument("hausdorff_kappa: no slots");
  double kappa = 0.0;
  for (const auto& slot : inputs.slots) {
    if (!(slot.hw_min > 0.0))
      throw std::domain_error("hausdorff_kappa: (h.w)_min must be > 0");
    const double term = inputs.t_dot_w / slot.hw_min *
                        std::pow(slot.psatz.gamma, slot.psatz.theta) *
                        (2.0 * slot.c_s + inputs.v_star_l1 * slot.h_star_max);
    kappa = std::max(kappa, term);
  }
  return kappa;
}

double c_s_ball() { return 1.0; }

double tensor_rate(TensorMode mode, double gamma, double psi_max, double v1,
                   double u, double L) {
  if (mode == TensorMode::Positive) return gamma * (2.0 * psi_max + v1);
  return gamma * L * (2.0 * psi_max + v1 + u);
}

namespace {

double eval_psi(const poly::Polynomial& psi, const Eigen::VectorXd& x) {
  return psi.evaluate(x);
}

Eigen::VectorXd psi_gradient(const poly::Polynomial& psi,
                             const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (const auto& [a, c] : psi.terms()) {
    for (int j = 0; j < n; ++j) {
      if (a[j] == 0) continue;
      double t = c * a[j];
      for (int i = 0; i < n; ++i) {
        const int e = i == j ? a[i] - 1 : a[i];
        for (int rep = 0; rep < e; ++rep) t *= x[i];
      }
      g[j] += t;
    }
  }
  return g;
}

}  // namespace

double psi_max_ball(int n, int d_prime) {
  poly::Polynomial psi(n);
  for (const poly::MultiIndex& a : poly::monomials_upto(n, d_prime)) {
    std::vector<int> e(a.exponents());
    for (int& v : e) v *= 2;
    psi.add_term(poly::MultiIndex(std::move(e)), 1.0);
  }

  // Deterministic candidate grid: origin, coordinate vertices, and a radial
  // lattice of sign-symmetric diagonal directions.
  std::vector<Eigen::VectorXd> candidates;
  candidates.push_back(Eigen::VectorXd::Zero(n));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = 1.0;
    candidates.push_back(e);
    candidates.push_back(-e);
  }
  const int dirs = 1 << n;
  for (int mask = 0; mask < dirs; ++mask) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? 1.0 : -1.0;
    v /= v.norm();
    for (int r = 1; r <= 8; ++r) candidates.push_back(v * (r / 8.0));
  }

  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  for (const auto& x : candidates) {
    const double v = eval_psi(psi, x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }

  // Projected gradient ascent polish.
  Eigen::VectorXd x = best_x;
  double step = 0.25;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd y = x + step * psi_gradient(psi, x);
    const double norm = y.norm();
    if (norm > 1.0) y /= norm;
    const double v = eval_psi(psi, y);
    if (v > best) {
      best = v;
      x = y;
    } else {
      step *= 0.5;
      if (step < 1e-12) break;
    }
  }
  return best;
}

}  // namespace momentgmp::rates
