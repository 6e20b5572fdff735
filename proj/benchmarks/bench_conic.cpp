#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "momentgmp/conic.hpp"
#include "momentgmp/gmp.hpp"
#include "momentgmp/poly.hpp"

using namespace momentgmp;

static void bm_psd_project(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  Eigen::MatrixXd M(s, s);
  unsigned st = 7;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j <= i; ++j) {
      st = st * 1664525u + 1013904223u;
      M(i, j) = M(j, i) = static_cast<double>(st % 2000) / 1000.0 - 1.0;
    }
  const Eigen::VectorXd v = conic::svec(M);
  for (auto _ : state) benchmark::DoNotOptimize(conic::psd_project(v));
}
BENCHMARK(bm_psd_project)->Arg(14)->Arg(28)->Arg(56)->Arg(84);

static void bm_solve_pop(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  poly::Polynomial f(2);
  f.add_term(poly::MultiIndex{1, 0}, 1.0);
  f.add_term(poly::MultiIndex{1, 1}, -0.5);
  gmp::GMPInstance inst;
  inst.slots.push_back(gmp::unit_ball_slot(2));
  inst.objective.push_back(f);
  gmp::ConstraintRow row;
  row.h.push_back(poly::Polynomial::constant(2, 1.0));
  row.t = 1.0;
  row.kind = gmp::RowKind::Equality;
  inst.rows.push_back(row);
  inst.witness[0] = 1.0;
  const auto ap = gmp::assemble_primal(inst, ell);
  conic::SolveSettings settings;
  settings.eps = 1e-7;
  for (auto _ : state)
    benchmark::DoNotOptimize(conic::solve(ap.problem, settings));
}
BENCHMARK(bm_solve_pop)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
