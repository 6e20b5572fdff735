#include "momentgmp/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "rng.hpp"

namespace momentgmp::experiments {

using poly::MonomialBasis;
using poly::MultiIndex;
using poly::Polynomial;
using poly::PseudoMoments;

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* cap = std::getenv("MOMENTGMP_THREADS")) {
    const int c = std::atoi(cap);
    if (c >= 1) hw = std::min(hw, c);
  }
  return hw;
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

// ----------------------------------------------------------------------
// Dense revised simplex with Bland's rule; min c'x s.t. Ax = b, x >= 0.
// Small row counts only (the grid LPs have a handful of rows and many
// columns), so refactoring the basis every iteration is fine.
// ----------------------------------------------------------------------
struct SimplexResult {
  bool feasible = false;
  double objective = 0.0;
};

SimplexResult simplex_min(Eigen::MatrixXd A, Eigen::VectorXd b,
                          Eigen::VectorXd c) {
  int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0) {
      A.row(i) = -A.row(i);
      b[i] = -b[i];
    }
  }
  // Phase 1 with artificial variables appended.
  Eigen::MatrixXd Aall(m, n + m);
  Aall.leftCols(n) = A;
  Aall.rightCols(m) = Eigen::MatrixXd::Identity(m, m);
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  auto run_phase = [&](const Eigen::VectorXd& cost, int ncols) -> double {
    const int max_pivots = 20000 + 40 * ncols;
    std::vector<char> in_basis(static_cast<std::size_t>(n + m), 0);
    for (int i = 0; i < m; ++i) in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] = 1;
    for (int pivot = 0; pivot < max_pivots; ++pivot) {
      Eigen::MatrixXd B(m, m);
      for (int i = 0; i < m; ++i) B.col(i) = Aall.col(basis[static_cast<std::size_t>(i)]);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
      Eigen::VectorXd xb = lu.solve(b);
      Eigen::VectorXd cb(m);
      for (int i = 0; i < m; ++i) cb[i] = cost[basis[static_cast<std::size_t>(i)]];
      Eigen::VectorXd y = lu.transpose().solve(cb);
      // Bland: first column with negative reduced cost enters.
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        const double rc = cost[j] - y.dot(Aall.col(j));
        if (rc < -1e-10) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return cb.dot(xb);
      Eigen::VectorXd dir = lu.solve(Aall.col(enter));
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        if (dir[i] > 1e-12) {
          const double ratio = std::max(xb[i], 0.0) / dir[i];
          if (leave < 0 || ratio < best_ratio - 1e-15 ||
              (std::abs(ratio - best_ratio) <= 1e-15 &&
               basis[static_cast<std::size_t>(i)] <
                   basis[static_cast<std::size_t>(leave)])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0)
        throw std::runtime_error("simplex: unbounded phase objective");
      in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = 0;
      in_basis[static_cast<std::size_t>(enter)] = 1;
      basis[static_cast<std::size_t>(leave)] = enter;
    }
    throw std::runtime_error("simplex: pivot limit exceeded");
  };

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  const double art = run_phase(phase1, n + m);
  SimplexResult out;
  if (art > 1e-7) return out;  // infeasible

  // Drive zero-level artificials out of the basis; rows whose artificial
  // cannot be replaced by a real column are redundant and get dropped.
  std::vector<int> drop_rows;
  {
    Eigen::MatrixXd B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = Aall.col(basis[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    std::vector<char> in_basis(static_cast<std::size_t>(n + m), 0);
    for (int i = 0; i < m; ++i) in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] = 1;
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] < n) continue;
      Eigen::VectorXd w = lu.transpose().solve(Eigen::VectorXd::Unit(m, i));
      int replacement = -1;
      for (int j = 0; j < n; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        if (std::abs(w.dot(Aall.col(j))) > 1e-9) {
          replacement = j;
          break;
        }
      }
      if (replacement >= 0) {
        in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] = 0;
        in_basis[static_cast<std::size_t>(replacement)] = 1;
        basis[static_cast<std::size_t>(i)] = replacement;
        for (int t = 0; t < m; ++t) B.col(t) = Aall.col(basis[static_cast<std::size_t>(t)]);
        lu.compute(B);
      } else {
        drop_rows.push_back(i);
      }
    }
  }
  if (!drop_rows.empty()) {
    std::vector<char> drop(static_cast<std::size_t>(m), 0);
    for (int i : drop_rows) drop[static_cast<std::size_t>(i)] = 1;
    const int m2 = m - static_cast<int>(drop_rows.size());
    Eigen::MatrixXd A2(m2, n + m2);
    Eigen::VectorXd b2(m2);
    std::vector<int> basis2;
    int r = 0;
    for (int i = 0; i < m; ++i) {
      if (drop[static_cast<std::size_t>(i)]) continue;
      A2.block(r, 0, 1, n) = Aall.block(i, 0, 1, n);
      b2[r] = b[i];
      basis2.push_back(basis[static_cast<std::size_t>(i)]);  // real column
      ++r;
    }
    A2.rightCols(m2) = Eigen::MatrixXd::Identity(m2, m2);
    Aall = A2;
    b = b2;
    basis = basis2;
    m = m2;
  }

  // Phase 2 over the real columns; all artificials are out of the basis.
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = c;
  out.feasible = true;
  out.objective = run_phase(phase2, n);
  return out;
}

struct GridLp {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

std::vector<Eigen::VectorXd> slot_grid(const gmp::MeasureSlot& slot, int g) {
  if (slot.n > 2)
    throw std::domain_error("reference_optimum: slots must have n <= 2");
  if (g < 2) throw std::invalid_argument("reference_optimum: grid too small");
  std::vector<Eigen::VectorXd> pts;
  auto keep = [&](const Eigen::VectorXd& x) {
    for (const auto& gen : slot.generators)
      if (gen.evaluate(x) < 0.0) return false;
    return true;
  };
  if (slot.n == 1) {
    for (int i = 0; i < g; ++i) {
      Eigen::VectorXd x(1);
      x[0] = -1.0 + 2.0 * i / (g - 1);
      if (keep(x)) pts.push_back(x);
    }
  } else {
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        Eigen::VectorXd x(2);
        x[0] = -1.0 + 2.0 * i / (g - 1);
        x[1] = -1.0 + 2.0 * j / (g - 1);
        if (keep(x)) pts.push_back(x);
      }
  }
  if (pts.empty())
    throw std::runtime_error("reference_optimum: empty grid after rejection");
  return pts;
}

GridLp build_grid_lp(const gmp::GMPInstance& inst,
                     const std::vector<poly::Polynomial>& objective, int grid) {
  std::vector<std::vector<Eigen::VectorXd>> grids;
  int nvars = 0;
  std::vector<int> offset;
  for (const auto& slot : inst.slots) {
    offset.push_back(nvars);
    grids.push_back(slot_grid(slot, grid));
    nvars += static_cast<int>(grids.back().size());
  }
  int nle = 0;
  for (const auto& row : inst.rows)
    if (row.kind == gmp::RowKind::InequalityLE) ++nle;
  const int m = static_cast<int>(inst.rows.size());
  GridLp lp;
  lp.A = Eigen::MatrixXd::Zero(m, nvars + nle);
  lp.b.resize(m);
  lp.c = Eigen::VectorXd::Zero(nvars + nle);
  int slack = nvars;
  for (int r = 0; r < m; ++r) {
    const auto& row = inst.rows[static_cast<std::size_t>(r)];
    for (std::size_t s = 0; s < grids.size(); ++s)
      for (std::size_t p = 0; p < grids[s].size(); ++p)
        lp.A(r, offset[s] + static_cast<int>(p)) =
            row.h[s].evaluate(grids[s][p]);
    lp.b[r] = row.t;
    if (row.kind == gmp::RowKind::InequalityLE) lp.A(r, slack++) = 1.0;
  }
  for (std::size_t s = 0; s < grids.size(); ++s)
    for (std::size_t p = 0; p < grids[s].size(); ++p)
      lp.c[offset[s] + static_cast<int>(p)] = objective[s].evaluate(grids[s][p]);
  return lp;
}

}  // namespace

double reference_optimum(const gmp::GMPInstance& instance,
                         int grid_points_per_dim) {
  instance.validate();
  const GridLp lp = build_grid_lp(instance, instance.objective, grid_points_per_dim);
  const SimplexResult res = simplex_min(lp.A, lp.b, lp.c);
  if (!res.feasible)
    throw std::runtime_error(
        "reference_optimum: grid LP infeasible (moment data not representable "
        "on the grid)");
  return res.objective;
}

SweepResult gap_sweep(const gmp::GMPInstance& instance,
                      const std::vector<int>& ells,
                      std::optional<double> reference,
                      const conic::SolveSettings& settings) {
  for (std::size_t i = 1; i < ells.size(); ++i)
    if (ells[i] <= ells[i - 1])
      throw std::invalid_argument("gap_sweep: ell list must be ascending");
  SweepResult result;
  result.reference = reference;
  result.rows.resize(ells.size());
  parallel_for(static_cast<int>(ells.size()), [&](int i) {
    SweepRow& row = result.rows[static_cast<std::size_t>(i)];
    row.ell = ells[static_cast<std::size_t>(i)];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const gmp::AssembledProblem ap = gmp::assemble_primal(instance, row.ell);
      const conic::ConicSolution sol = conic::solve(ap.problem, settings);
      row.primal = sol.primal_obj;
      row.dual = sol.dual_obj;
      row.primal_res = sol.primal_res;
      row.dual_res = sol.dual_res;
      row.gap = sol.gap;
      row.status = sol.status;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  });
  return result;
}

Polynomial sample_unit_anorm(int n, int k, std::uint64_t seed) {
  detail::Rng rng(seed);
  Polynomial f(n);
  for (const MultiIndex& a : poly::monomials_upto(n, k))
    f.add_term(a, rng.normal());
  double norm = poly::a_norm(f);
  while (norm == 0.0) {
    for (const MultiIndex& a : poly::monomials_upto(n, k))
      f.add_term(a, rng.normal());
    norm = poly::a_norm(f);
  }
  return f * (1.0 / norm);
}

double empirical_hausdorff(const gmp::GMPInstance& family, int k, int ell,
                           int samples, int grid, std::uint64_t seed,
                           const conic::SolveSettings& settings) {
  if (ell < k)
    throw std::invalid_argument("empirical_hausdorff: requires ell >= k");
  if (samples < 1)
    throw std::invalid_argument("empirical_hausdorff: samples must be >= 1");
  std::vector<double> gaps(static_cast<std::size_t>(samples), 0.0);
  parallel_for(samples, [&](int s) {
    gmp::GMPInstance inst = family;
    inst.objective.clear();
    double total = 0.0;
    std::vector<Polynomial> fs;
    for (int i = 0; i < inst.num_slots(); ++i) {
      fs.push_back(sample_unit_anorm(inst.slots[static_cast<std::size_t>(i)].n,
                                     k,
                                     seed + 1000003ULL * static_cast<std::uint64_t>(s) +
                                         static_cast<std::uint64_t>(i)));
      total += poly::a_norm(fs.back());
    }
    for (auto& f : fs) inst.objective.push_back(f * (1.0 / total));
    const double ref = reference_optimum(inst, grid);
    const gmp::AssembledProblem ap = gmp::assemble_primal(inst, ell);
    const conic::ConicSolution sol = conic::solve(ap.problem, settings);
    gaps[static_cast<std::size_t>(s)] = std::max(0.0, ref - sol.primal_obj);
  });
  double best = 0.0;
  for (double g : gaps) best = std::max(best, g);
  return best;
}

std::vector<double> optimizer_convergence(const gmp::GMPInstance& instance,
                                          const std::vector<int>& ells, int k,
                                          const conic::SolveSettings& settings) {
  if (ells.empty())
    throw std::invalid_argument("optimizer_convergence: empty ell list");
  std::vector<std::vector<PseudoMoments>> truncations(ells.size());
  parallel_for(static_cast<int>(ells.size()), [&](int i) {
    const gmp::AssembledProblem ap =
        gmp::assemble_primal(instance, ells[static_cast<std::size_t>(i)]);
    const conic::ConicSolution sol = conic::solve(ap.problem, settings);
    std::vector<PseudoMoments> mom = ap.moments_from(sol);
    std::vector<PseudoMoments> trunc;
    for (const auto& m : mom) trunc.push_back(m.truncated(k));
    truncations[static_cast<std::size_t>(i)] = std::move(trunc);
  });
  const auto& top = truncations.back();
  std::vector<double> distances;
  for (const auto& trunc : truncations) {
    double dist = 0.0;
    for (std::size_t s = 0; s < trunc.size(); ++s) {
      for (int j = 0; j < trunc[s].size(); ++j) {
        const double diff = std::abs(trunc[s].at_index(j) - top[s].at_index(j));
        dist = std::max(dist, diff / trunc[s].basis()[j].factorial());
      }
    }
    distances.push_back(dist);
  }
  return distances;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path);
  out.precision(12);
  out << "ell,p_ell,d_ell,gap,time_ms\n";
  for (const auto& row : result.rows) {
    const double gap = result.reference ? *result.reference - row.primal
                                        : row.primal - row.dual;
    out << row.ell << "," << row.primal << "," << row.dual << "," << gap << ","
        << row.wall_ms << "\n";
  }
}

void write_hausdorff_csv(const std::vector<std::pair<int, double>>& rows,
                         int samples, int grid, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_hausdorff_csv: cannot open " + path);
  out.precision(12);
  out << "ell,estimate,samples,grid\n";
  for (const auto& [ell, est] : rows)
    out << ell << "," << est << "," << samples << "," << grid << "\n";
}

}  // namespace momentgmp::experiments
