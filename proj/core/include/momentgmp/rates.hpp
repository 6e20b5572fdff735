#pragma once

#include <vector>

namespace momentgmp::rates {

/// Effective Positivstellensatz parameterizations. gamma is always user
/// supplied (no closed form is available); bounds computed with the default
/// gamma = 1 are shapes up to that constant.
enum class Preset { Ball, Box1, Box2, Generic };

struct PsatzConstants {
  Preset preset = Preset::Ball;
  double gamma = 1.0;
  double theta = 2.0;
  double ell0 = 0.0;
};

/// Unit ball: theta = 2, ell0 = 2 n deg^{3/2}.
PsatzConstants ball_constants(int n, int deg, double gamma = 1.0);
/// Box with per-coordinate generators: theta = 1, ell0 = pi n sqrt(2n) deg.
PsatzConstants box1_constants(int n, int deg, double gamma = 1.0);
/// Box with product generators: theta = 2, ell0 = pi n sqrt(2n) deg.
PsatzConstants box2_constants(int n, int deg, double gamma = 1.0);
/// General S: the caller supplies theta = 1/(2.5 n L) for the Lojasiewicz
/// exponent L, and gamma; ell0 = 0.
PsatzConstants generic_constants(double gamma, double theta);

struct SlotRateInputs {
  double f_max = 0.0;       // max_{x in S_i} f_i
  double h_star_max = 0.0;  // max_{j in supp v*} max_{x in S_i} |h_{i,j}|
  double hw_min = 0.0;      // (h_i . w)_min, > 0 by S-fullness
  double c_s = 1.0;         // C_{S_i}; 1 for the unit ball
  PsatzConstants psatz;
};

struct RateInputs {
  std::vector<SlotRateInputs> slots;
  double t_dot_w = 0.0;   // > 0
  double v_star_l1 = 0.0; // ||v*||_1
};

struct KappaTheta {
  double kappa = 0.0;
  double theta = 0.0;
};

/// kappa = max_i (t.w)/(h_i.w)_min gamma_i^{theta_i}
///               (2 f_{i,max} + ||v*||_1 h*_{i,max}); theta = min_i theta_i.
KappaTheta kappa_theta(const RateInputs& inputs);

/// kappa * ell^{-theta}.
double gap_bound(double ell, double kappa, double theta);

/// max(max_i ell0_i, max active constraint degree).
double ell_threshold(const std::vector<double>& ell0,
                     const std::vector<int>& active_degrees);

/// Hausdorff-rate constant kappa' with C_{S_i} in place of f_{i,max}.
double hausdorff_kappa(const RateInputs& inputs);

/// sup_alpha (max_{x in ball} |x^alpha|) / alpha! = 1, attained at alpha = 0.
double c_s_ball();

enum class TensorMode { Positive, Signed };

/// Positive: gamma (2 Psi_max + ||V*||_1). Signed: gamma L (2 Psi_max +
/// ||V*||_1 + u*). theta = 2 in both cases (unit ball).
double tensor_rate(TensorMode mode, double gamma, double psi_max, double v1,
                   double u, double L);

/// Maximum of default_psi(n, d') over the unit ball, by deterministic grid
/// search plus projected-gradient polish; equals d' + 1 at a coordinate
/// vertex.
double psi_max_ball(int n, int d_prime);

}  // namespace momentgmp::rates
