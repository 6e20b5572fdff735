#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "momentgmp/extract.hpp"
#include "momentgmp/io.hpp"
#include "momentgmp/moment.hpp"
#include "test_util.hpp"

using namespace momentgmp;
using namespace momentgmp::poly;
using namespace momentgmp::moment;
using testutil::dirac_moments;
using testutil::make_poly;
using testutil::TestRng;

namespace {

Eigen::VectorXd monomial_vector(const Eigen::VectorXd& xi, int k) {
  MonomialBasis basis(static_cast<int>(xi.size()), k);
  Eigen::VectorXd v(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    double t = 1.0;
    for (int j = 0; j < xi.size(); ++j)
      for (int e = 0; e < basis[i][j]; ++e) t *= xi[j];
    v[i] = t;
  }
  return v;
}

}  // namespace

TEST_CASE("moment matrix of a Dirac at the origin") {
  const auto lam = dirac_moments({{1.0, {0.0, 0.0}}}, 2, 4);
  const auto M = moment_matrix(lam, 1);
  CHECK(M.values.rows() == 3);
  CHECK(M.values(0, 0) == doctest::Approx(1.0));
  CHECK(M.values.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("moment matrix of a Dirac is the monomial outer product") {
  TestRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(1, 3);
    const int k = rng.uniform_int(1, 3);
    std::vector<double> pt(static_cast<std::size_t>(n));
    for (auto& v : pt) v = rng.uniform(-1, 1);
    const auto lam = dirac_moments({{1.0, pt}}, n, 2 * k);
    const auto M = moment_matrix(lam, k);
    const Eigen::VectorXd v = monomial_vector(
        Eigen::Map<const Eigen::VectorXd>(pt.data(), n), k);
    CHECK((M.values - v * v.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("moment matrix rank equals atom count for separated atoms") {
  TestRng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.uniform_int(1, 3);
    const int r = rng.uniform_int(1, 3);
    std::vector<std::pair<double, std::vector<double>>> atoms;
    for (int i = 0; i < r; ++i) {
      std::vector<double> pt(static_cast<std::size_t>(n));
      for (auto& v : pt) v = rng.uniform(-1, 1);
      atoms.push_back({rng.uniform(0.5, 2.0), pt});
    }
    const int k = 3;
    const auto lam = dirac_moments(atoms, n, 2 * k);
    const auto M = moment_matrix(lam, k);
    CHECK(extract::numeric_rank(M.values, 1e-9) <= r);
  }
}

TEST_CASE("moment matrix requires enough order") {
  const auto lam = dirac_moments({{1.0, {0.5}}}, 1, 2);
  CHECK_THROWS_AS(moment_matrix(lam, 2), std::domain_error);
}

TEST_CASE("localizing matrix with g = 1 is the moment matrix") {
  const auto lam = dirac_moments({{2.0, {0.3, -0.4}}}, 2, 4);
  const auto L = localizing_matrix(lam, Polynomial::constant(2, 1.0), 4);
  const auto M = moment_matrix(lam, 2);
  CHECK((L.values - M.values).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("localizing matrix sign tracks membership in S") {
  const auto ball = make_poly(1, {{{0}, 1.0}, {{2}, -1.0}});

  const auto inside = dirac_moments({{1.0, {0.5}}}, 1, 4);
  const auto Lin = localizing_matrix(inside, ball, 4);
  const Eigen::VectorXd v = monomial_vector(Eigen::VectorXd::Constant(1, 0.5), 1);
  CHECK((Lin.values - 0.75 * v * v.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_in(Lin.values);
  CHECK(es_in.eigenvalues().minCoeff() >= -1e-12);

  const auto outside = dirac_moments({{1.0, {2.0}}}, 1, 4);
  const auto Lout = localizing_matrix(outside, ball, 4);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_out(Lout.values);
  CHECK(es_out.eigenvalues().minCoeff() < -1e-6);
}

TEST_CASE("atomic measures on the ball give PSD moment and localizing matrices") {
  TestRng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.uniform_int(1, 3);
    const int r = rng.uniform_int(1, 4);
    std::vector<std::pair<double, std::vector<double>>> atoms;
    for (int i = 0; i < r; ++i) {
      Eigen::VectorXd pt(n);
      for (int j = 0; j < n; ++j) pt[j] = rng.uniform(-1, 1);
      if (pt.norm() > 1.0) pt /= pt.norm() * 1.01;
      atoms.push_back({rng.uniform(0.1, 3.0),
                       std::vector<double>(pt.data(), pt.data() + n)});
    }
    const int ell = 6;
    const auto lam = dirac_moments(atoms, n, ell);
    const auto M = moment_matrix(lam, ell / 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esM(M.values);
    CHECK(esM.eigenvalues().minCoeff() >= -1e-10);
    Polynomial ball = Polynomial::constant(n, 1.0);
    for (int j = 0; j < n; ++j) {
      std::vector<int> e(static_cast<std::size_t>(n), 0);
      e[static_cast<std::size_t>(j)] = 2;
      ball.add_term(MultiIndex(std::move(e)), -1.0);
    }
    const auto L = localizing_matrix(lam, ball, ell);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esL(L.values);
    CHECK(esL.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("catalecticant basics") {
  // F = 1: only the (1,1) entry of H^{1,1} is nonzero.
  const auto one = Polynomial::constant(1, 1.0);
  const auto H11 = catalecticant(one, 1, 1, 4);
  CHECK(H11.values.rows() == 2);
  CHECK(H11.values(0, 0) == doctest::Approx(1.0));
  CHECK(H11.values.cwiseAbs().sum() == doctest::Approx(1.0));

  // F = 3 (1 + 0.5 x)^4: rank-1 catalecticant 3 v(0.5) v(0.5)'.
  Eigen::VectorXd xi(1);
  xi << 0.5;
  const auto F = power_of_affine(xi, 4) * 3.0;
  const auto H22 = catalecticant(F, 2, 2, 4);
  const Eigen::VectorXd v = monomial_vector(xi, 2);
  CHECK((H22.values - 3.0 * v * v.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(extract::numeric_rank(H22.values, 1e-8) == 1);

  CHECK_THROWS_AS(catalecticant(F, 3, 2, 4), std::domain_error);
}

TEST_CASE("catalecticant equals the moment matrix of the apolar moments") {
  TestRng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.uniform_int(1, 3);
    const int d = 4;
    Polynomial F(n);
    for (const auto& a : monomials_upto(n, d)) F.add_term(a, rng.uniform(-1, 1));
    PseudoMoments lam(n, d);
    for (int i = 0; i < lam.size(); ++i) {
      const auto& a = lam.basis()[i];
      lam.at_index(i) = F.coefficient(a) / multinomial(d, a);
    }
    const auto H = catalecticant(F, 2, 2, d);
    const auto M = moment_matrix(lam, 2);
    CHECK((H.values - M.values).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("reference tensor catalecticant matches the tabulated entries") {
  const auto Fhom = io::read_polynomial(std::string(MOMENTGMP_DATA_DIR) +
                                        "/example2.json");
  const auto F = dehomogenize_rescale(Fhom, 1.0);
  const auto H = catalecticant(F, 2, 2, 4);
  REQUIRE(H.values.rows() == 10);
  // Row basis is graded lex over (x1, x2, x3); entry (1, 1) pairs the
  // constant with itself, (1, x3) sits at column index 3.
  CHECK(H.values(0, 0) == doctest::Approx(0.614154).epsilon(1e-5));
  CHECK(H.values(0, 3) == doctest::Approx(0.313336).epsilon(1e-5));
  CHECK(extract::numeric_rank(H.values, 1e-6) == 7);
  CHECK(kernel_basis(H, 1e-6).size() == 3);
}

TEST_CASE("kernel basis spans the numeric kernel") {
  // Zero matrix: the whole space.
  MomentMatrix Z;
  Z.row_basis = monomials_upto(2, 1);
  Z.col_basis = Z.row_basis;
  Z.values = Eigen::MatrixXd::Zero(3, 3);
  CHECK(kernel_basis(Z, 1e-6).size() == 3);

  // Rank-1 over {1, x}: kernel proportional to x - 0.5.
  const auto lam = dirac_moments({{1.0, {0.5}}}, 1, 2);
  const auto M = moment_matrix(lam, 1);
  const auto ker = kernel_basis(M, 1e-8);
  REQUIRE(ker.size() == 1);
  Eigen::VectorXd half(1);
  half << 0.5;
  CHECK(std::abs(ker[0].evaluate(half)) <= 1e-12);
  CHECK(coefficient_l1_norm(ker[0]) > 0.0);

  // ||M q|| <= 2 tol sigma_max ||q|| for every returned q.
  TestRng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.uniform_int(1, 2);
    const auto atoms = dirac_moments(
        {{rng.uniform(0.5, 2.0), std::vector<double>(static_cast<std::size_t>(n), 0.25)}},
        n, 4);
    const auto Mm = moment_matrix(atoms, 2);
    const double tol = 1e-7;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Mm.values);
    const double smax = svd.singularValues()(0);
    for (const auto& q : kernel_basis(Mm, tol)) {
      Eigen::VectorXd qv(Mm.col_basis.size());
      MonomialBasis basis(n, 2);
      qv.setZero();
      for (const auto& [a, c] : q.terms()) qv[basis.index_of(a)] = c;
      CHECK((Mm.values * qv).norm() <= 2.0 * tol * smax * qv.norm());
    }
  }
}
