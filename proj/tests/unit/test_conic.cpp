#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "momentgmp/conic.hpp"
#include "test_util.hpp"

using namespace momentgmp::conic;
using testutil::TestRng;

namespace {

ConicProblem lp_min_x_nonneg() {
  // min x s.t. x >= 0, encoded as -x + s = 0, s in R+.
  ConicProblem p;
  p.c.resize(1);
  p.c << 1.0;
  p.A.resize(1, 1);
  p.A.insert(0, 0) = -1.0;
  p.b.resize(1);
  p.b << 0.0;
  p.cones.push_back({ConeBlock::Kind::NonNeg, 1});
  return p;
}

ConicProblem sdp_pinned_diagonal() {
  // min tr(X) s.t. X psd 2x2, X11 = 1. Variables are svec(X).
  ConicProblem p;
  p.c.resize(3);
  p.c << 1.0, 0.0, 1.0;  // diag entries of svec ordering (11, 21, 22)
  p.A.resize(4, 3);
  p.A.insert(0, 0) = 1.0;  // X11 = 1
  p.A.insert(1, 0) = -1.0;
  p.A.insert(2, 1) = -1.0;
  p.A.insert(3, 2) = -1.0;
  p.b.resize(4);
  p.b << 1.0, 0.0, 0.0, 0.0;
  p.cones.push_back({ConeBlock::Kind::Zero, 1});
  p.cones.push_back({ConeBlock::Kind::Psd, 2});
  return p;
}

}  // namespace

TEST_CASE("min x over the nonnegative ray") {
  const auto sol = solve(lp_min_x_nonneg());
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("trace minimization with a pinned diagonal entry") {
  const auto sol = solve(sdp_pinned_diagonal());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal_obj == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(std::abs(sol.x[1]) <= 1e-5);
  CHECK(std::abs(sol.x[2]) <= 1e-5);
}

TEST_CASE("psd projection on fixed matrices") {
  Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK((psd_project(svec(I2)) - svec(I2)).norm() <= 1e-14);
  CHECK(psd_project(svec(Eigen::MatrixXd(-I2))).norm() <= 1e-14);

  Eigen::MatrixXd D = Eigen::Vector2d(3.0, -2.0).asDiagonal();
  Eigen::MatrixXd Dplus = Eigen::Vector2d(3.0, 0.0).asDiagonal();
  CHECK((psd_project(svec(D)) - svec(Dplus)).norm() <= 1e-14);
}

TEST_CASE("psd projection is idempotent and nonexpansive") {
  TestRng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int s = rng.uniform_int(1, 6);
    Eigen::MatrixXd M(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j <= i; ++j) M(i, j) = M(j, i) = rng.uniform(-2, 2);
    const Eigen::VectorXd v = svec(M);
    const Eigen::VectorXd pv = psd_project(v);
    CHECK((psd_project(pv) - pv).lpNorm<Eigen::Infinity>() <= 1e-12);

    Eigen::MatrixXd N(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j <= i; ++j) N(i, j) = N(j, i) = rng.uniform(-2, 2);
    const Eigen::VectorXd w = svec(N);
    CHECK((psd_project(v) - psd_project(w)).norm() <= (v - w).norm() + 1e-12);
  }
}

TEST_CASE("svec round trip preserves inner products") {
  TestRng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int s = rng.uniform_int(1, 5);
    Eigen::MatrixXd M(s, s), N(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j <= i; ++j) {
        M(i, j) = M(j, i) = rng.uniform(-2, 2);
        N(i, j) = N(j, i) = rng.uniform(-2, 2);
      }
    CHECK(svec(M).dot(svec(N)) ==
          doctest::Approx((M * N).trace()).epsilon(1e-12));
    CHECK((unsvec(svec(M)) - M).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

namespace {

/// Random SDP with a constructed strictly complementary primal-dual optimum.
ConicProblem random_certified_sdp(TestRng& rng, double* expected_obj) {
  const int nvars = rng.uniform_int(2, 6);
  const int side = rng.uniform_int(2, 4);
  const int nln = rng.uniform_int(0, 3);  // extra nonnegative coordinates
  const int m = svec_size(side) + nln;

  Eigen::MatrixXd A(m, nvars);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < nvars; ++j) A(i, j) = rng.uniform(-1, 1);

  // Strictly complementary pair on the PSD block: split the spectrum.
  Eigen::MatrixXd B(side, side);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j <= i; ++j) B(i, j) = B(j, i) = rng.uniform(-1, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  const int rank_s = rng.uniform_int(0, side);
  Eigen::VectorXd sd = Eigen::VectorXd::Zero(side), yd = Eigen::VectorXd::Zero(side);
  for (int i = 0; i < side; ++i) {
    if (i < rank_s)
      sd[i] = rng.uniform(0.2, 2.0);
    else
      yd[i] = rng.uniform(0.2, 2.0);
  }
  const Eigen::MatrixXd Q = es.eigenvectors();
  const Eigen::MatrixXd S = Q * sd.asDiagonal() * Q.transpose();
  const Eigen::MatrixXd Y = Q * yd.asDiagonal() * Q.transpose();

  Eigen::VectorXd s_star(m), y_star(m);
  s_star.head(svec_size(side)) = svec(S);
  y_star.head(svec_size(side)) = svec(Y);
  for (int i = 0; i < nln; ++i) {
    // Complementary nonnegative pair.
    if (rng.uniform() < 0.5) {
      s_star[svec_size(side) + i] = rng.uniform(0.1, 1.0);
      y_star[svec_size(side) + i] = 0.0;
    } else {
      s_star[svec_size(side) + i] = 0.0;
      y_star[svec_size(side) + i] = rng.uniform(0.1, 1.0);
    }
  }

  Eigen::VectorXd x_star(nvars);
  for (int j = 0; j < nvars; ++j) x_star[j] = rng.uniform(-1, 1);

  ConicProblem p;
  p.A = A.sparseView();
  p.b = A * x_star + s_star;
  p.c = -A.transpose() * y_star;
  p.cones.push_back({ConeBlock::Kind::Psd, side});
  if (nln > 0) p.cones.push_back({ConeBlock::Kind::NonNeg, nln});
  *expected_obj = p.c.dot(x_star);
  return p;
}

}  // namespace

TEST_CASE("recovers constructed optima on random SDPs") {
  TestRng rng(2024);
  int solved = 0;
  for (int trial = 0; trial < 25; ++trial) {
    double expected = 0.0;
    const ConicProblem p = random_certified_sdp(rng, &expected);
    SolveSettings st;
    st.eps = 1e-9;
    const auto sol = solve(p, st);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(std::abs(sol.primal_obj - expected) <=
          1e-6 * (1.0 + std::abs(expected)));
    ++solved;
  }
  CHECK(solved == 25);
}

TEST_CASE("homogeneity in (b, c)") {
  TestRng rng(99);
  double expected = 0.0;
  const ConicProblem p = random_certified_sdp(rng, &expected);
  const auto sol = solve(p);
  ConicProblem q = p;
  const double gamma = 3.5;
  q.b *= gamma;
  q.c *= gamma;
  const auto sol2 = solve(q);
  CHECK(sol2.status == sol.status);
  CHECK(sol2.primal_obj ==
        doctest::Approx(gamma * gamma * sol.primal_obj).epsilon(1e-5));
}

TEST_CASE("detects primal infeasibility") {
  // x >= 1 and x <= 0.
  ConicProblem p;
  p.c.resize(1);
  p.c << 0.0;
  p.A.resize(2, 1);
  p.A.insert(0, 0) = -1.0;  // -x + s = -1, s >= 0  (x >= 1)
  p.A.insert(1, 0) = 1.0;   //  x + s = 0,  s >= 0  (x <= 0)
  p.b.resize(2);
  p.b << -1.0, 0.0;
  p.cones.push_back({ConeBlock::Kind::NonNeg, 2});
  const auto sol = solve(p);
  CHECK(sol.status == SolveStatus::PrimalInfeasible);
}

TEST_CASE("detects an unbounded direction") {
  // min x s.t. x <= 5.
  ConicProblem p;
  p.c.resize(1);
  p.c << 1.0;
  p.A.resize(1, 1);
  p.A.insert(0, 0) = 1.0;
  p.b.resize(1);
  p.b << 5.0;
  p.cones.push_back({ConeBlock::Kind::NonNeg, 1});
  const auto sol = solve(p);
  CHECK(sol.status == SolveStatus::DualInfeasible);
}

TEST_CASE("problem dump round trip") {
  const ConicProblem p = sdp_pinned_diagonal();
  const std::string path = "/tmp/momentgmp_dump_test.txt";
  write_problem(p, path);
  const ConicProblem q = read_problem(path);
  CHECK(q.num_vars() == p.num_vars());
  CHECK(q.num_rows() == p.num_rows());
  CHECK((Eigen::MatrixXd(q.A) - Eigen::MatrixXd(p.A)).cwiseAbs().maxCoeff() <=
        1e-15);
  CHECK((q.b - p.b).norm() <= 1e-15);
  CHECK((q.c - p.c).norm() <= 1e-15);
  REQUIRE(q.cones.size() == p.cones.size());
  CHECK(q.cones[1].size == 2);
  std::remove(path.c_str());
}

TEST_CASE("dimension mismatch is rejected") {
  ConicProblem p = lp_min_x_nonneg();
  p.cones.clear();
  p.cones.push_back({ConeBlock::Kind::NonNeg, 2});
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
}
