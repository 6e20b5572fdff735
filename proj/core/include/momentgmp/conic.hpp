#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace momentgmp::conic {

/// One block of the cone K. A problem's slack s lives in the product of its
/// blocks, ordered as listed. A Psd block of side s occupies s(s+1)/2 rows
/// (lower-triangular svec with sqrt(2) scaling of off-diagonal entries).
struct ConeBlock {
  enum class Kind { Zero, NonNeg, Psd };
  Kind kind;
  int size;  // coordinate count for Zero/NonNeg, matrix side for Psd

  int rows() const {
    return kind == Kind::Psd ? size * (size + 1) / 2 : size;
  }
};

/// Standard-form conic program
///     min c'x  s.t.  Ax + s = b,  s in K,
/// with K a product of Zero, NonNeg and Psd blocks. A has one row per scalar
/// cone coordinate.
struct ConicProblem {
  Eigen::VectorXd c;
  Eigen::SparseMatrix<double> A;  // m x n, column major
  Eigen::VectorXd b;
  std::vector<ConeBlock> cones;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }
  /// Throws std::invalid_argument on any dimension inconsistency.
  void validate() const;
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIter };

struct ConicSolution {
  Eigen::VectorXd x;  // primal
  Eigen::VectorXd y;  // dual, in K*
  Eigen::VectorXd s;  // slack, in K
  SolveStatus status = SolveStatus::MaxIter;
  double primal_res = 0.0;  // ||Ax + s - b|| / (1 + ||b||)
  double dual_res = 0.0;    // ||A'y + c|| / (1 + ||c||)
  double gap = 0.0;         // |c'x + b'y| / (1 + |c'x| + |b'y|)
  double primal_obj = 0.0;  // c'x
  double dual_obj = 0.0;    // -b'y
  int iterations = 0;
};

struct SolveSettings {
  double eps = 1e-8;
  int max_iter = 200000;
  bool scale = true;       // Ruiz-style diagonal equilibration
  double alpha = 1.5;      // over-relaxation in (0, 2)
  double scale_bc = 1.0;   // extra weight on (b, c) after normalization
  int check_every = 25;    // termination test cadence
  int ruiz_iters = 10;
  int aa_memory = 0;       // Anderson acceleration history; 0 disables
  bool verbose = false;
};

const char* status_name(SolveStatus s);

/// Operator-splitting solver on the homogeneous self-dual embedding.
/// Deterministic: fixed iteration order, no randomized restarts. On MaxIter
/// the solution carries the achieved residuals and the caller decides.
ConicSolution solve(const ConicProblem& p, const SolveSettings& settings = {});

/// Eigendecomposition-based projection of an svec-packed symmetric matrix
/// onto the PSD cone. Idempotent and nonexpansive.
Eigen::VectorXd psd_project(const Eigen::VectorXd& v);

int svec_size(int side);
int svec_side(int len);  // throws unless len is a triangular number
Eigen::VectorXd svec(const Eigen::MatrixXd& M);
Eigen::MatrixXd unsvec(const Eigen::VectorXd& v);

/// Plain-text dump (header with dims and cone spec, then A triplets, b, c)
/// for cross-checks against external solvers. Format documented in README.
void write_problem(const ConicProblem& p, const std::string& path);
ConicProblem read_problem(const std::string& path);

}  // namespace momentgmp::conic
