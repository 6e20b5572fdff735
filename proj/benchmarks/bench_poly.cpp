#include <benchmark/benchmark.h>

#include "momentgmp/poly.hpp"

using namespace momentgmp::poly;

namespace {

Polynomial dense_random(int n, int d, unsigned seed) {
  Polynomial p(n);
  unsigned state = seed;
  for (const auto& a : monomials_upto(n, d)) {
    state = state * 1664525u + 1013904223u;
    p.add_term(a, static_cast<double>(state % 2000) / 1000.0 - 1.0);
  }
  return p;
}

}  // namespace

static void bm_apolar_product(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int d = 6;
  const Polynomial f = dense_random(n, d, 1);
  const Polynomial g = dense_random(n, d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(apolar_product(f, g, d));
}
BENCHMARK(bm_apolar_product)->Arg(2)->Arg(3)->Arg(4);

static void bm_power_of_affine(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::VectorXd xi = Eigen::VectorXd::Constant(n, 0.37);
  for (auto _ : state) benchmark::DoNotOptimize(power_of_affine(xi, 6));
}
BENCHMARK(bm_power_of_affine)->Arg(2)->Arg(3);

static void bm_polynomial_multiply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Polynomial f = dense_random(n, 3, 5);
  const Polynomial g = dense_random(n, 3, 6);
  for (auto _ : state) benchmark::DoNotOptimize(f * g);
}
BENCHMARK(bm_polynomial_multiply)->Arg(2)->Arg(3);
