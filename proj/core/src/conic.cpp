#include "momentgmp/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace momentgmp::conic {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

void ConicProblem::validate() const {
  int rows = 0;
  for (const auto& blk : cones) {
    if (blk.size < 0) throw std::invalid_argument("ConicProblem: negative cone size");
    rows += blk.rows();
  }
  if (rows != b.size())
    throw std::invalid_argument("ConicProblem: cone rows do not match b");
  if (A.rows() != b.size() || A.cols() != c.size())
    throw std::invalid_argument("ConicProblem: A dimensions inconsistent");
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

int svec_size(int side) { return side * (side + 1) / 2; }

int svec_side(int len) {
  const int side = static_cast<int>((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0 + 0.5);
  if (svec_size(side) != len)
    throw std::invalid_argument("svec_side: length is not a triangular number");
  return side;
}

Eigen::VectorXd svec(const Eigen::MatrixXd& M) {
  const int s = static_cast<int>(M.rows());
  Eigen::VectorXd v(svec_size(s));
  int k = 0;
  for (int j = 0; j < s; ++j) {
    v[k++] = M(j, j);
    for (int i = j + 1; i < s; ++i) v[k++] = M(i, j) * kSqrt2;
  }
  return v;
}

Eigen::MatrixXd unsvec(const Eigen::VectorXd& v) {
  const int s = svec_side(static_cast<int>(v.size()));
  Eigen::MatrixXd M(s, s);
  int k = 0;
  for (int j = 0; j < s; ++j) {
    M(j, j) = v[k++];
    for (int i = j + 1; i < s; ++i) {
      M(i, j) = M(j, i) = v[k++] / kSqrt2;
    }
  }
  return M;
}

namespace {

/// Projects the svec-packed segment onto the PSD cone in place, reusing the
/// eigensolver workspace.
class PsdProjector {
 public:
  explicit PsdProjector(int side) : side_(side), M_(side, side), es_() {}

  void project(Eigen::Ref<Eigen::VectorXd> seg) {
    const int s = side_;
    int k = 0;
    for (int j = 0; j < s; ++j) {
      M_(j, j) = seg[k++];
      for (int i = j + 1; i < s; ++i) {
        M_(i, j) = seg[k++] / kSqrt2;
      }
    }
    es_.compute(M_.selfadjointView<Eigen::Lower>());
    const auto& w = es_.eigenvalues();
    const auto& Q = es_.eigenvectors();
    // Rebuild from the nonnegative part of the spectrum.
    M_.setZero();
    for (int e = 0; e < s; ++e) {
      if (w[e] > 0.0)
        M_.selfadjointView<Eigen::Lower>().rankUpdate(Q.col(e), w[e]);
    }
    k = 0;
    for (int j = 0; j < s; ++j) {
      seg[k++] = M_(j, j);
      for (int i = j + 1; i < s; ++i) seg[k++] = M_(i, j) * kSqrt2;
    }
  }

 private:
  int side_;
  Eigen::MatrixXd M_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_;
};

struct BlockSpan {
  int lo, len;
  ConeBlock::Kind kind;
  int side;
};

std::vector<BlockSpan> block_spans(const std::vector<ConeBlock>& cones) {
  std::vector<BlockSpan> spans;
  int off = 0;
  for (const auto& blk : cones) {
    spans.push_back({off, blk.rows(), blk.kind,
                     blk.kind == ConeBlock::Kind::Psd ? blk.size : 0});
    off += blk.rows();
  }
  return spans;
}

}  // namespace

Eigen::VectorXd psd_project(const Eigen::VectorXd& v) {
  Eigen::VectorXd out = v;
  PsdProjector proj(svec_side(static_cast<int>(v.size())));
  proj.project(out);
  return out;
}

namespace {

struct Scaling {
  Eigen::VectorXd D, E;  // row and column equilibration
  double sigma = 1.0, rho = 1.0;
};

Scaling equilibrate(Eigen::SparseMatrix<double>& A, Eigen::VectorXd& b,
                    Eigen::VectorXd& c, const std::vector<BlockSpan>& spans,
                    int iters, double scale_bc) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Scaling sc;
  sc.D = Eigen::VectorXd::Ones(m);
  sc.E = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd rmax(m), cmax(n), dr(m), de(n);
  for (int it = 0; it < iters; ++it) {
    rmax.setZero();
    cmax.setZero();
    for (int k = 0; k < A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator jt(A, k); jt; ++jt) {
        const double a = std::abs(jt.value());
        rmax[jt.row()] = std::max(rmax[jt.row()], a);
        cmax[jt.col()] = std::max(cmax[jt.col()], a);
      }
    // Rows of a PSD block share one scale so the cone geometry is preserved.
    for (const auto& sp : spans) {
      if (sp.kind == ConeBlock::Kind::Psd) {
        double v = 0.0;
        for (int i = 0; i < sp.len; ++i) v = std::max(v, rmax[sp.lo + i]);
        const double s = v > 0.0 ? 1.0 / std::sqrt(v) : 1.0;
        for (int i = 0; i < sp.len; ++i) dr[sp.lo + i] = s;
      } else {
        for (int i = 0; i < sp.len; ++i) {
          const double v = rmax[sp.lo + i];
          dr[sp.lo + i] = v > 0.0 ? 1.0 / std::sqrt(v) : 1.0;
        }
      }
    }
    for (int j = 0; j < n; ++j)
      de[j] = cmax[j] > 0.0 ? 1.0 / std::sqrt(cmax[j]) : 1.0;
    for (int k = 0; k < A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator jt(A, k); jt; ++jt)
        jt.valueRef() *= dr[jt.row()] * de[jt.col()];
    sc.D.array() *= dr.array();
    sc.E.array() *= de.array();
  }
  b.array() *= sc.D.array();
  c.array() *= sc.E.array();
  sc.sigma = scale_bc / std::max(b.norm(), 1e-6);
  sc.rho = scale_bc / std::max(c.norm(), 1e-6);
  b *= sc.sigma;
  c *= sc.rho;
  return sc;
}

class HsdeWorkspace {
 public:
  HsdeWorkspace(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                const Eigen::VectorXd& c)
      : A_(A), At_(A.transpose()), n_(static_cast<int>(A.cols())),
        m_(static_cast<int>(A.rows())) {
    Eigen::SparseMatrix<double> H = (At_ * A_).pruned();
    Eigen::SparseMatrix<double> I(n_, n_);
    I.setIdentity();
    H = H + I;
    ldlt_.compute(H);
    if (ldlt_.info() != Eigen::Success)
      throw std::runtime_error("conic::solve: KKT factorization failed");
    q_.resize(n_ + m_);
    q_ << c, b;
    p_ = msolve(q_);
    qmq_ = 1.0 + q_.dot(p_);
  }

  // Solves [I A'; -A I] z = w.
  Eigen::VectorXd msolve(const Eigen::VectorXd& w) const {
    Eigen::VectorXd zx = ldlt_.solve(w.head(n_) - At_ * w.tail(m_));
    Eigen::VectorXd z(n_ + m_);
    z.head(n_) = zx;
    z.tail(m_) = w.tail(m_) + A_ * zx;
    return z;
  }

  // Solves (I + Q) (z, tau) = (hz, htau) with Q the HSDE operator.
  void iq_solve(const Eigen::VectorXd& hz, double htau, Eigen::VectorXd& z,
                double& tau) const {
    Eigen::VectorXd z0 = msolve(hz);
    tau = (htau + q_.dot(z0)) / qmq_;
    z = z0 - tau * p_;
  }

 private:
  const Eigen::SparseMatrix<double>& A_;
  Eigen::SparseMatrix<double> At_;
  int n_, m_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  Eigen::VectorXd q_, p_;
  double qmq_ = 1.0;
};

/// Type-II Anderson acceleration with residual-based safeguarding.
class AndersonAccelerator {
 public:
  AndersonAccelerator(int dim, int memory) : dim_(dim), memory_(memory) {}

  bool enabled() const { return memory_ > 1; }

  // Given the pre-step state z and its plain successor Tz, proposes the next
  // state. Falls back to Tz (and resets) whenever the residual grew.
  Eigen::VectorXd propose(const Eigen::VectorXd& z, const Eigen::VectorXd& Tz) {
    Eigen::VectorXd f = Tz - z;
    const double fn = f.norm();
    if (fn > 1.02 * best_res_ && !hist_f_.empty()) {
      reset();
      best_res_ = fn;
      push(z, Tz, f);
      return Tz;
    }
    best_res_ = std::min(best_res_, fn);
    push(z, Tz, f);
    const int h = static_cast<int>(hist_f_.size());
    if (h < 2) return Tz;
    const int cols = h - 1;
    Eigen::MatrixXd dF(dim_, cols), dG(dim_, cols);
    for (int i = 0; i < cols; ++i) {
      dF.col(i) = hist_f_[i + 1] - hist_f_[i];
      dG.col(i) = hist_g_[i + 1] - hist_g_[i];
    }
    // Small regularized least squares keeps the mixing stable.
    Eigen::MatrixXd G = dF.transpose() * dF;
    G.diagonal().array() += 1e-12 * (1.0 + G.trace());
    Eigen::VectorXd gamma = G.ldlt().solve(dF.transpose() * f);
    if (!gamma.allFinite()) {
      reset();
      return Tz;
    }
    return Tz - dG * gamma;
  }

  void reset() {
    hist_f_.clear();
    hist_g_.clear();
    best_res_ = std::numeric_limits<double>::infinity();
  }

 private:
  void push(const Eigen::VectorXd& /*z*/, const Eigen::VectorXd& Tz,
            const Eigen::VectorXd& f) {
    hist_f_.push_back(f);
    hist_g_.push_back(Tz);
    if (static_cast<int>(hist_f_.size()) > memory_) {
      hist_f_.pop_front();
      hist_g_.pop_front();
    }
  }

  int dim_, memory_;
  std::deque<Eigen::VectorXd> hist_f_, hist_g_;
  double best_res_ = std::numeric_limits<double>::infinity();
};

}  // namespace

ConicSolution solve(const ConicProblem& p, const SolveSettings& settings) {
  p.validate();
  const int n = p.num_vars();
  const int m = p.num_rows();
  const auto spans = block_spans(p.cones);

  Eigen::SparseMatrix<double> As = p.A;
  Eigen::VectorXd bs = p.b, cs = p.c;
  Scaling sc;
  if (settings.scale) {
    sc = equilibrate(As, bs, cs, spans, settings.ruiz_iters, settings.scale_bc);
  } else {
    sc.D = Eigen::VectorXd::Ones(m);
    sc.E = Eigen::VectorXd::Ones(n);
  }

  HsdeWorkspace work(As, bs, cs);

  std::vector<PsdProjector> projectors;
  for (const auto& sp : spans)
    if (sp.kind == ConeBlock::Kind::Psd) projectors.emplace_back(sp.side);

  const int dim = n + m + 1;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  u[dim - 1] = 1.0;
  v[dim - 1] = 1.0;

  // Projection of the y-part onto K* and tau onto R+; the x-part is free.
  auto project_u = [&](Eigen::VectorXd& t) {
    int pi = 0;
    for (const auto& sp : spans) {
      auto seg = t.segment(n + sp.lo, sp.len);
      switch (sp.kind) {
        case ConeBlock::Kind::Zero:
          break;  // dual of {0} is free
        case ConeBlock::Kind::NonNeg:
          seg = seg.cwiseMax(0.0);
          break;
        case ConeBlock::Kind::Psd:
          projectors[pi++].project(seg);
          break;
      }
    }
    t[dim - 1] = std::max(t[dim - 1], 0.0);
  };

  const double bnorm = p.b.norm(), cnorm = p.c.norm();
  ConicSolution sol;
  sol.x.resize(n);
  sol.y.resize(m);
  sol.s.resize(m);

  auto evaluate = [&](const Eigen::VectorXd& uu, const Eigen::VectorXd& vv,
                      ConicSolution& out) -> bool {
    const double tau = uu[dim - 1];
    if (tau > 1e-10) {
      out.x = sc.E.cwiseProduct(uu.head(n)) / (sc.sigma * tau);
      out.y = sc.D.cwiseProduct(uu.segment(n, m)) / (sc.rho * tau);
      out.s = vv.segment(n, m).cwiseQuotient(sc.D) / (sc.sigma * tau);
      const double pobj = p.c.dot(out.x);
      const double dobj = -p.b.dot(out.y);
      out.primal_obj = pobj;
      out.dual_obj = dobj;
      out.primal_res = (p.A * out.x + out.s - p.b).norm() / (1.0 + bnorm);
      out.dual_res = (p.A.transpose() * out.y + p.c).norm() / (1.0 + cnorm);
      out.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      if (out.primal_res <= settings.eps && out.dual_res <= settings.eps &&
          out.gap <= settings.eps) {
        out.status = SolveStatus::Optimal;
        return true;
      }
      return false;
    }
    // tau ~ 0: look for a certificate ray.
    Eigen::VectorXd xr = sc.E.cwiseProduct(uu.head(n)) / sc.sigma;
    Eigen::VectorXd yr = sc.D.cwiseProduct(uu.segment(n, m)) / sc.rho;
    Eigen::VectorXd sr = vv.segment(n, m).cwiseQuotient(sc.D) / sc.sigma;
    const double bty = p.b.dot(yr);
    if (bty < -1e-12) {
      const double res = (p.A.transpose() * yr).norm() * bnorm / (-bty);
      if (res <= settings.eps) {
        out.x.setZero();
        out.y = yr / (-bty);
        out.s.setZero();
        out.status = SolveStatus::PrimalInfeasible;
        out.primal_res = res;
        return true;
      }
    }
    const double ctx = p.c.dot(xr);
    if (ctx < -1e-12) {
      const double res = (p.A * xr + sr).norm() * cnorm / (-ctx);
      if (res <= settings.eps) {
        out.x = xr / (-ctx);
        out.y.setZero();
        out.s = sr / (-ctx);
        out.status = SolveStatus::DualInfeasible;
        out.dual_res = res;
        return true;
      }
    }
    return false;
  };

  AndersonAccelerator aa(2 * dim, settings.aa_memory);
  Eigen::VectorXd zt(n + m), w(dim), t(dim), ut(dim), ubar(dim);
  Eigen::VectorXd z_cur(2 * dim), z_plain(2 * dim);

  for (int it = 0; it < settings.max_iter; ++it) {
    if (aa.enabled()) {
      z_cur.head(dim) = u;
      z_cur.tail(dim) = v;
    }
    w = u + v;
    double taut;
    work.iq_solve(w.head(n + m), w[dim - 1], zt, taut);
    ut.head(n + m) = zt;
    ut[dim - 1] = taut;
    ubar = settings.alpha * ut + (1.0 - settings.alpha) * u;
    t = ubar - v;
    project_u(t);
    // t now holds u+; v+ = v + u+ - ubar
    v += t - ubar;
    u = t;

    if (aa.enabled()) {
      z_plain.head(dim) = u;
      z_plain.tail(dim) = v;
      const Eigen::VectorXd z_next = aa.propose(z_cur, z_plain);
      u = z_next.head(dim);
      v = z_next.tail(dim);
    }

    if ((it + 1) % settings.check_every == 0 || it + 1 == settings.max_iter) {
      if (evaluate(u, v, sol)) {
        sol.iterations = it + 1;
        return sol;
      }
      if (settings.verbose && (it + 1) % (settings.check_every * 200) == 0) {
        std::fprintf(stderr,
                     "  iter %7d  pres %.3e  dres %.3e  gap %.3e  pobj %.9e\n",
                     it + 1, sol.primal_res, sol.dual_res, sol.gap,
                     sol.primal_obj);
      }
    }
  }
  evaluate(u, v, sol);
  if (sol.status != SolveStatus::PrimalInfeasible &&
      sol.status != SolveStatus::DualInfeasible)
    sol.status = SolveStatus::MaxIter;
  sol.iterations = settings.max_iter;
  return sol;
}

void write_problem(const ConicProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_problem: cannot open " + path);
  out.precision(17);
  out << "momentgmp-conic v1\n";
  out << "dims " << p.num_rows() << " " << p.num_vars() << "\n";
  out << "cones " << p.cones.size() << "\n";
  for (const auto& blk : p.cones) {
    const char k = blk.kind == ConeBlock::Kind::Zero    ? 'z'
                   : blk.kind == ConeBlock::Kind::NonNeg ? 'l'
                                                         : 's';
    out << k << " " << blk.size << "\n";
  }
  out << "A " << p.A.nonZeros() << "\n";
  for (int k = 0; k < p.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(p.A, k); it; ++it)
      out << it.row() << " " << it.col() << " " << it.value() << "\n";
  out << "b\n";
  for (int i = 0; i < p.b.size(); ++i) out << p.b[i] << "\n";
  out << "c\n";
  for (int i = 0; i < p.c.size(); ++i) out << p.c[i] << "\n";
}

ConicProblem read_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_problem: cannot open " + path);
  std::string line, tok;
  std::getline(in, line);
  if (line != "momentgmp-conic v1")
    throw std::runtime_error("read_problem: bad header");
  int m = 0, n = 0, ncones = 0;
  in >> tok >> m >> n >> tok >> ncones;
  ConicProblem p;
  for (int i = 0; i < ncones; ++i) {
    char k;
    int sz;
    in >> k >> sz;
    ConeBlock::Kind kind = k == 'z'   ? ConeBlock::Kind::Zero
                           : k == 'l' ? ConeBlock::Kind::NonNeg
                                      : ConeBlock::Kind::Psd;
    p.cones.push_back({kind, sz});
  }
  long nnz = 0;
  in >> tok >> nnz;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    int i, j;
    double val;
    in >> i >> j >> val;
    trips.emplace_back(i, j, val);
  }
  p.A.resize(m, n);
  p.A.setFromTriplets(trips.begin(), trips.end());
  in >> tok;  // "b"
  p.b.resize(m);
  for (int i = 0; i < m; ++i) in >> p.b[i];
  in >> tok;  // "c"
  p.c.resize(n);
  for (int i = 0; i < n; ++i) in >> p.c[i];
  p.validate();
  return p;
}

}  // namespace momentgmp::conic
