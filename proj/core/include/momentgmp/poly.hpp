#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace momentgmp::poly {

/// Exponent vector of a monomial x^alpha. Exponents are nonnegative and the
/// length equals the number of variables.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);
  MultiIndex(std::initializer_list<int> exponents);

  int size() const { return static_cast<int>(exp_.size()); }
  int operator[](int i) const { return exp_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return exp_; }

  /// |alpha| = sum of exponents.
  int total() const { return total_; }

  /// alpha! = prod_i alpha_i!, exact integer arithmetic converted to double.
  double factorial() const;

  MultiIndex operator+(const MultiIndex& other) const;

  bool operator==(const MultiIndex& other) const { return exp_ == other.exp_; }

 private:
  std::vector<int> exp_;
  int total_ = 0;
};

/// Graded lexicographic order: first by total degree, then lexicographically
/// with earlier variables more significant (higher exponent first).
/// Fixed globally so matrix indexing is deterministic across modules.
struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& a) const;
};

/// All alpha with |alpha| <= k in graded lex order; length C(n+k, n).
std::vector<MultiIndex> monomials_upto(int n, int k);

/// Monomial basis with O(1) index lookup, shared by matrix builders.
class MonomialBasis {
 public:
  MonomialBasis(int n, int k);

  int n() const { return n_; }
  int max_degree() const { return k_; }
  int size() const { return static_cast<int>(mons_.size()); }
  const MultiIndex& operator[](int i) const {
    return mons_[static_cast<std::size_t>(i)];
  }
  const std::vector<MultiIndex>& monomials() const { return mons_; }

  /// Index in graded lex order; -1 if |alpha| > k.
  int index_of(const MultiIndex& alpha) const;

 private:
  int n_, k_;
  std::vector<MultiIndex> mons_;
  std::unordered_map<MultiIndex, int, MultiIndexHash> index_;
};

/// n!, exact for n <= 20.
std::uint64_t factorial_u64(int n);

/// Multinomial binom(d, alpha) = d! / ((d - |alpha|)! alpha_1! ... alpha_n!),
/// exact integer arithmetic; requires |alpha| <= d <= 20.
double multinomial(int d, const MultiIndex& alpha);

/// Sparse multivariate polynomial over a fixed variable count. Terms with a
/// zero coefficient are never stored; the map is graded-lex ordered so
/// iteration is deterministic.
class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, double, GradedLexLess>;

  explicit Polynomial(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("Polynomial: n must be >= 0");
  }
  Polynomial(int n, const TermMap& terms);

  static Polynomial zero(int n) { return Polynomial(n); }
  static Polynomial constant(int n, double c);
  /// x_i as a polynomial in n variables.
  static Polynomial variable(int n, int i);

  int n() const { return n_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Max |alpha| over stored terms; 0 for the zero polynomial.
  int degree() const;

  double coefficient(const MultiIndex& alpha) const;
  void set_coefficient(const MultiIndex& alpha, double c);
  void add_term(const MultiIndex& alpha, double c);

  double evaluate(std::span<const double> point) const;
  double evaluate(const Eigen::VectorXd& point) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(double s) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator-() const { return *this * -1.0; }

  /// this * x^alpha.
  Polynomial shifted(const MultiIndex& alpha) const;

  bool is_homogeneous() const;

 private:
  int n_;
  TermMap terms_;
};

/// Truncated linear functional lambda on polynomials of degree <= order,
/// stored densely over the graded lex basis. The entry at alpha = 0 is the
/// mass <lambda, 1>.
class PseudoMoments {
 public:
  PseudoMoments(int n, int order);
  PseudoMoments(int n, int order, Eigen::VectorXd values);

  int n() const { return basis_.n(); }
  int order() const { return basis_.max_degree(); }
  const MonomialBasis& basis() const { return basis_; }
  const Eigen::VectorXd& values() const { return values_; }
  int size() const { return basis_.size(); }

  double operator[](const MultiIndex& alpha) const;
  double& at_index(int i) { return values_[i]; }
  double at_index(int i) const { return values_[i]; }

  /// <lambda, f> = sum_alpha f_alpha lambda(x^alpha); deg f must be <= order.
  double pairing(const Polynomial& f) const;

  /// Canonical truncation: moments above degree k zeroed (order becomes k).
  PseudoMoments truncated(int k) const;

 private:
  MonomialBasis basis_;
  Eigen::VectorXd values_;
};

/// Apolar product <f, g>_d = sum_{|alpha|<=d} binom(d,alpha)^{-1} f_alpha
/// g_alpha. Both degrees must be <= d.
double apolar_product(const Polynomial& f, const Polynomial& g, int d);

/// sqrt(<f, f>_d).
double apolar_norm(const Polynomial& f, int d);

/// ||f||_A = sum_alpha alpha! |f_alpha|.
double a_norm(const Polynomial& f);

/// Coefficientwise l1 norm sum |f_alpha|, without factorials. Distinct from
/// a_norm; used for dual-certificate magnitudes.
double coefficient_l1_norm(const Polynomial& f);

/// max over stored |alpha| <= order of |lambda(x^alpha)| / alpha!. Truncated
/// surrogate of the sup over all alpha (a lower bound in general; exact for
/// measures on the unit ball, where the alpha = 0 term dominates).
double weighted_functional_norm(const PseudoMoments& lambda);

/// (1 + <xi, x>)^d expanded in the monomial basis.
Polynomial power_of_affine(const Eigen::VectorXd& xi, int d);

/// Substitute x_0 = 1 in a homogeneous degree-d polynomial in n+1 variables,
/// then move the decomposition points into the unit ball by x_i <- x_i/scale
/// (coefficient of x^alpha divided by scale^|alpha|). The inverse map on
/// extracted atoms multiplies points by scale and leaves weights unchanged.
Polynomial dehomogenize_rescale(const Polynomial& f_hom, double scale);

}  // namespace momentgmp::poly
