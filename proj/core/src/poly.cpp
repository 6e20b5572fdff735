#include "momentgmp/poly.hpp"

#include <algorithm>
#include <cmath>

namespace momentgmp::poly {

MultiIndex::MultiIndex(std::vector<int> exponents) : exp_(std::move(exponents)) {
  for (int e : exp_) {
    if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    total_ += e;
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::vector<int>(exponents)) {}

double MultiIndex::factorial() const {
  double r = 1.0;
  for (int e : exp_) r *= static_cast<double>(factorial_u64(e));
  return r;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (size() != other.size())
    throw std::invalid_argument("MultiIndex: size mismatch in +");
  std::vector<int> e(exp_.size());
  for (std::size_t i = 0; i < exp_.size(); ++i) e[i] = exp_[i] + other.exp_[i];
  return MultiIndex(std::move(e));
}

bool GradedLexLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
  if (a.total() != b.total()) return a.total() < b.total();
  // Within a degree level, a comes first when its leading exponents are
  // larger: (2,0) < (1,1) < (0,2).
  return std::lexicographical_compare(b.exponents().begin(),
                                      b.exponents().end(),
                                      a.exponents().begin(),
                                      a.exponents().end());
}

std::size_t MultiIndexHash::operator()(const MultiIndex& a) const {
  std::size_t h = 1469598103934665603ull;
  for (int e : a.exponents()) {
    h ^= static_cast<std::size_t>(e);
    h *= 1099511628211ull;
  }
  return h;
}

namespace {
void enumerate_level(int n, int degree, std::vector<int>& prefix,
                     std::vector<MultiIndex>& out) {
  if (static_cast<int>(prefix.size()) == n - 1) {
    prefix.push_back(degree);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int e = degree; e >= 0; --e) {
    prefix.push_back(e);
    enumerate_level(n, degree - e, prefix, out);
    prefix.pop_back();
  }
}
}  // namespace

std::vector<MultiIndex> monomials_upto(int n, int k) {
  if (n < 1) throw std::invalid_argument("monomials_upto: n must be >= 1");
  if (k < 0) throw std::invalid_argument("monomials_upto: k must be >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  for (int d = 0; d <= k; ++d) enumerate_level(n, d, prefix, out);
  return out;
}

MonomialBasis::MonomialBasis(int n, int k)
    : n_(n), k_(k), mons_(monomials_upto(n, k)) {
  index_.reserve(mons_.size());
  for (int i = 0; i < static_cast<int>(mons_.size()); ++i)
    index_.emplace(mons_[static_cast<std::size_t>(i)], i);
}

int MonomialBasis::index_of(const MultiIndex& alpha) const {
  auto it = index_.find(alpha);
  return it == index_.end() ? -1 : it->second;
}

std::uint64_t factorial_u64(int n) {
  if (n < 0 || n > 20)
    throw std::domain_error("factorial_u64: exact only for 0 <= n <= 20");
  std::uint64_t r = 1;
  for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
  return r;
}

double multinomial(int d, const MultiIndex& alpha) {
  if (d > 20) throw std::domain_error("multinomial: exact only for d <= 20");
  if (alpha.total() > d)
    throw std::domain_error("multinomial: |alpha| exceeds d");
  // Falling factorial d (d-1) ... (d - |alpha| + 1), then exact divisions.
  std::uint64_t r = 1;
  for (int i = 0; i < alpha.total(); ++i)
    r *= static_cast<std::uint64_t>(d - i);
  for (int i = 0; i < alpha.size(); ++i) r /= factorial_u64(alpha[i]);
  return static_cast<double>(r);
}

Polynomial::Polynomial(int n, const TermMap& terms) : n_(n) {
  for (const auto& [a, c] : terms) {
    if (a.size() != n) throw std::invalid_argument("Polynomial: arity mismatch");
    if (c != 0.0) terms_.emplace(a, c);
  }
}

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.set_coefficient(MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)), c);
  return p;
}

Polynomial Polynomial::variable(int n, int i) {
  if (i < 0 || i >= n) throw std::invalid_argument("Polynomial::variable: bad index");
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(i)] = 1;
  Polynomial p(n);
  p.set_coefficient(MultiIndex(std::move(e)), 1.0);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [a, c] : terms_) d = std::max(d, a.total());
  return d;
}

double Polynomial::coefficient(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::set_coefficient(const MultiIndex& alpha, double c) {
  if (alpha.size() != n_)
    throw std::invalid_argument("Polynomial: arity mismatch");
  if (c == 0.0)
    terms_.erase(alpha);
  else
    terms_[alpha] = c;
}

void Polynomial::add_term(const MultiIndex& alpha, double c) {
  set_coefficient(alpha, coefficient(alpha) + c);
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != n_)
    throw std::invalid_argument("Polynomial::evaluate: dimension mismatch");
  double r = 0.0;
  for (const auto& [a, c] : terms_) {
    double t = c;
    for (int i = 0; i < n_; ++i)
      for (int e = 0; e < a[i]; ++e) t *= point[static_cast<std::size_t>(i)];
    r += t;
  }
  return r;
}

double Polynomial::evaluate(const Eigen::VectorXd& point) const {
  return evaluate(std::span<const double>(point.data(),
                                          static_cast<std::size_t>(point.size())));
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (n_ != other.n_) throw std::invalid_argument("Polynomial: arity mismatch");
  for (const auto& [a, c] : other.terms_) add_term(a, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (n_ != other.n_) throw std::invalid_argument("Polynomial: arity mismatch");
  for (const auto& [a, c] : other.terms_) add_term(a, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [a, c] : terms_) c *= s;
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial r = *this;
  r += other;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  Polynomial r = *this;
  r -= other;
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r = *this;
  r *= s;
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (n_ != other.n_) throw std::invalid_argument("Polynomial: arity mismatch");
  Polynomial r(n_);
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : other.terms_) r.add_term(a + b, ca * cb);
  return r;
}

Polynomial Polynomial::shifted(const MultiIndex& alpha) const {
  Polynomial r(n_);
  for (const auto& [a, c] : terms_) r.set_coefficient(a + alpha, c);
  return r;
}

bool Polynomial::is_homogeneous() const {
  if (terms_.empty()) return true;
  const int d = degree();
  for (const auto& [a, c] : terms_)
    if (a.total() != d) return false;
  return true;
}

PseudoMoments::PseudoMoments(int n, int order)
    : basis_(n, order), values_(Eigen::VectorXd::Zero(basis_.size())) {}

PseudoMoments::PseudoMoments(int n, int order, Eigen::VectorXd values)
    : basis_(n, order), values_(std::move(values)) {
  if (values_.size() != basis_.size())
    throw std::invalid_argument("PseudoMoments: value count mismatch");
}

double PseudoMoments::operator[](const MultiIndex& alpha) const {
  const int i = basis_.index_of(alpha);
  if (i < 0) throw std::out_of_range("PseudoMoments: |alpha| exceeds order");
  return values_[i];
}

double PseudoMoments::pairing(const Polynomial& f) const {
  double r = 0.0;
  for (const auto& [a, c] : f.terms()) {
    const int i = basis_.index_of(a);
    if (i < 0)
      throw std::domain_error("PseudoMoments::pairing: deg f exceeds order");
    r += c * values_[i];
  }
  return r;
}

PseudoMoments PseudoMoments::truncated(int k) const {
  PseudoMoments out(n(), k);
  for (int i = 0; i < out.size(); ++i) {
    const int j = basis_.index_of(out.basis()[i]);
    out.at_index(i) = j < 0 ? 0.0 : values_[j];
  }
  return out;
}

double apolar_product(const Polynomial& f, const Polynomial& g, int d) {
  if (f.degree() > d || g.degree() > d)
    throw std::domain_error("apolar_product: degree exceeds d");
  if (f.n() != g.n())
    throw std::invalid_argument("apolar_product: arity mismatch");
  double r = 0.0;
  for (const auto& [a, fa] : f.terms()) {
    const double ga = g.coefficient(a);
    if (ga != 0.0) r += fa * ga / multinomial(d, a);
  }
  return r;
}

double apolar_norm(const Polynomial& f, int d) {
  return std::sqrt(std::max(0.0, apolar_product(f, f, d)));
}

double a_norm(const Polynomial& f) {
  double r = 0.0;
  for (const auto& [a, c] : f.terms()) r += a.factorial() * std::abs(c);
  return r;
}

double coefficient_l1_norm(const Polynomial& f) {
  double r = 0.0;
  for (const auto& [a, c] : f.terms()) r += std::abs(c);
  return r;
}

double weighted_functional_norm(const PseudoMoments& lambda) {
  double r = 0.0;
  for (int i = 0; i < lambda.size(); ++i) {
    const MultiIndex& a = lambda.basis()[i];
    r = std::max(r, std::abs(lambda.at_index(i)) / a.factorial());
  }
  return r;
}

Polynomial power_of_affine(const Eigen::VectorXd& xi, int d) {
  if (d < 0) throw std::invalid_argument("power_of_affine: d must be >= 0");
  const int n = static_cast<int>(xi.size());
  Polynomial p(n);
  for (const MultiIndex& a : monomials_upto(n, d)) {
    double c = multinomial(d, a);
    for (int i = 0; i < n && c != 0.0; ++i)
      for (int e = 0; e < a[i]; ++e) c *= xi[i];
    if (c != 0.0) p.add_term(a, c);
  }
  return p;
}

Polynomial dehomogenize_rescale(const Polynomial& f_hom, double scale) {
  if (!(scale > 0.0))
    throw std::invalid_argument("dehomogenize_rescale: scale must be > 0");
  if (f_hom.n() < 2)
    throw std::invalid_argument("dehomogenize_rescale: needs >= 2 variables");
  if (!f_hom.is_homogeneous())
    throw std::domain_error("dehomogenize_rescale: input not homogeneous");
  const int n = f_hom.n() - 1;
  Polynomial out(n);
  for (const auto& [a, c] : f_hom.terms()) {
    std::vector<int> e(a.exponents().begin() + 1, a.exponents().end());
    MultiIndex tail(std::move(e));
    out.add_term(tail, c / std::pow(scale, tail.total()));
  }
  return out;
}

}  // namespace momentgmp::poly
