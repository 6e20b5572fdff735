#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "momentgmp/extract.hpp"
#include "momentgmp/poly.hpp"

namespace testutil {

inline momentgmp::poly::Polynomial make_poly(
    int n, std::initializer_list<std::pair<std::vector<int>, double>> terms) {
  momentgmp::poly::Polynomial p(n);
  for (const auto& [alpha, c] : terms)
    p.add_term(momentgmp::poly::MultiIndex(alpha), c);
  return p;
}

inline long binom_oracle(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

/// Moments of a discrete measure, computed directly from the atom data.
inline momentgmp::poly::PseudoMoments dirac_moments(
    const std::vector<std::pair<double, std::vector<double>>>& atoms, int n,
    int ell) {
  momentgmp::extract::AtomSet set;
  for (const auto& [w, pt] : atoms) {
    momentgmp::extract::Atom a;
    a.weight = w;
    a.point = Eigen::Map<const Eigen::VectorXd>(pt.data(),
                                                static_cast<long>(pt.size()));
    set.atoms.push_back(a);
  }
  return momentgmp::extract::atoms_to_moments(set, n, ell);
}

/// Deterministic uniform in [-1, 1] from a simple LCG, for test data.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed * 2862933555777941757ULL + 3037000493ULL) {}
  double uniform() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace testutil
