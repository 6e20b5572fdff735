#include <benchmark/benchmark.h>

#include "momentgmp/extract.hpp"
#include "momentgmp/moment.hpp"

using namespace momentgmp;

namespace {

poly::PseudoMoments atomic_moments(int n, int ell) {
  extract::AtomSet atoms;
  for (int i = 0; i < 4; ++i) {
    extract::Atom a;
    a.weight = 1.0 + i;
    a.point = Eigen::VectorXd::Constant(n, 0.1 + 0.2 * i);
    atoms.atoms.push_back(a);
  }
  return extract::atoms_to_moments(atoms, n, ell);
}

}  // namespace

static void bm_moment_matrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int ell = 12;
  const auto lam = atomic_moments(n, ell);
  for (auto _ : state)
    benchmark::DoNotOptimize(moment::moment_matrix(lam, ell / 2));
}
BENCHMARK(bm_moment_matrix)->Arg(2)->Arg(3);

static void bm_extract_atoms(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto lam = atomic_moments(n, 10);
  for (auto _ : state)
    benchmark::DoNotOptimize(extract::extract_atoms(lam, 1e-8));
}
BENCHMARK(bm_extract_atoms)->Arg(2)->Arg(3);
