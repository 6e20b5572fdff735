#include "momentgmp/gmp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace momentgmp::gmp {

using poly::MonomialBasis;
using poly::MultiIndex;
using poly::Polynomial;
using poly::PseudoMoments;

namespace {
constexpr std::uint64_t kSampleSeed = 0x6d676d70u;  // mass_bound grid
constexpr int kSamplePoints = 4096;
constexpr double kSqrt2 = 1.4142135623730951;
}  // namespace

Polynomial unit_ball_generator(int n) {
  Polynomial g = Polynomial::constant(n, 1.0);
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[static_cast<std::size_t>(i)] = 2;
    g.add_term(MultiIndex(std::move(e)), -1.0);
  }
  return g;
}

MeasureSlot unit_ball_slot(int n) {
  MeasureSlot s;
  s.n = n;
  s.generators.push_back(unit_ball_generator(n));
  s.includes_ball = true;
  return s;
}

int ConstraintRow::degree() const {
  int d = 0;
  for (const auto& hi : h) d = std::max(d, hi.degree());
  return d;
}

int GMPInstance::objective_degree() const {
  int d = 0;
  for (const auto& fi : objective) d = std::max(d, fi.degree());
  return d;
}

void GMPInstance::validate() const {
  if (slots.empty()) throw std::invalid_argument("GMPInstance: no slots");
  if (objective.size() != slots.size())
    throw std::invalid_argument("GMPInstance: objective arity mismatch");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].includes_ball)
      throw std::invalid_argument(
          "GMPInstance: slot must include the ball constraint 1-||x||^2");
    if (objective[i].n() != slots[i].n)
      throw std::invalid_argument("GMPInstance: objective variable mismatch");
    for (const auto& g : slots[i].generators)
      if (g.n() != slots[i].n)
        throw std::invalid_argument("GMPInstance: generator variable mismatch");
  }
  for (const auto& row : rows) {
    if (row.h.size() != slots.size())
      throw std::invalid_argument("GMPInstance: row arity mismatch");
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (row.h[i].n() != slots[i].n)
        throw std::invalid_argument("GMPInstance: row variable mismatch");
  }
  for (const auto& [j, w] : witness) {
    if (j < 0 || j >= static_cast<int>(rows.size()))
      throw std::invalid_argument("GMPInstance: witness row out of range");
    if (rows[static_cast<std::size_t>(j)].kind == RowKind::InequalityLE &&
        w < 0.0)
      throw std::invalid_argument(
          "GMPInstance: witness must be nonnegative on inequality rows");
  }
}

namespace {

struct Layout {
  std::vector<int> slot_n, slot_offset;
  std::vector<MonomialBasis> bases;
  int total = 0;
};

Layout make_layout(const GMPInstance& inst, int ell) {
  Layout lay;
  for (const auto& slot : inst.slots) {
    lay.slot_n.push_back(slot.n);
    lay.slot_offset.push_back(lay.total);
    lay.bases.emplace_back(slot.n, ell);
    lay.total += lay.bases.back().size();
  }
  return lay;
}

}  // namespace

AssembledProblem assemble_primal(const GMPInstance& instance, int ell) {
  instance.validate();
  if (ell < 2 || ell < instance.objective_degree())
    throw std::domain_error("assemble_primal: requires ell >= max(deg f, 2)");

  const Layout lay = make_layout(instance, ell);
  AssembledProblem out;
  out.ell = ell;
  out.slot_n = lay.slot_n;
  out.slot_offset = lay.slot_offset;

  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> bvals;
  std::vector<conic::ConeBlock> cones;
  int row = 0;

  // Linear rows with j in J_ell, equalities first, then inequalities.
  auto add_linear = [&](RowKind kind) {
    int count = 0;
    for (int j = 0; j < static_cast<int>(instance.rows.size()); ++j) {
      const ConstraintRow& cr = instance.rows[static_cast<std::size_t>(j)];
      if (cr.kind != kind || cr.degree() > ell) continue;
      double sq = 0.0;
      for (std::size_t i = 0; i < cr.h.size(); ++i)
        for (const auto& [a, c] : cr.h[i].terms()) sq += c * c;
      const double scale = sq > 0.0 ? std::sqrt(sq) : 1.0;
      for (std::size_t i = 0; i < cr.h.size(); ++i)
        for (const auto& [a, c] : cr.h[i].terms())
          trips.emplace_back(row, lay.slot_offset[i] + lay.bases[i].index_of(a),
                             c / scale);
      bvals.push_back(cr.t / scale);
      out.kept_rows.push_back(j);
      out.row_scale.push_back(scale);
      ++row;
      ++count;
    }
    return count;
  };
  const int neq = add_linear(RowKind::Equality);
  if (neq > 0) cones.push_back({conic::ConeBlock::Kind::Zero, neq});
  const int nle = add_linear(RowKind::InequalityLE);
  if (nle > 0) cones.push_back({conic::ConeBlock::Kind::NonNeg, nle});
  if (neq + nle == 0) out.empty_constraint_warning = true;

  // PSD blocks: -svec(localizing matrix of g applied to lambda) + s = 0.
  auto add_psd = [&](int slot, const Polynomial& g) {
    const int k = (ell - g.degree()) / 2;
    if (k < 0) return;
    MonomialBasis basis(lay.slot_n[static_cast<std::size_t>(slot)], k);
    const int s = basis.size();
    const auto& full = lay.bases[static_cast<std::size_t>(slot)];
    const int off = lay.slot_offset[static_cast<std::size_t>(slot)];
    for (int jc = 0; jc < s; ++jc)
      for (int ic = jc; ic < s; ++ic) {
        const double f = ic == jc ? 1.0 : kSqrt2;
        const MultiIndex bg = basis[ic] + basis[jc];
        for (const auto& [delta, cg] : g.terms())
          trips.emplace_back(row, off + full.index_of(bg + delta), -cg * f);
        bvals.push_back(0.0);
        ++row;
      }
    cones.push_back({conic::ConeBlock::Kind::Psd, s});
  };
  for (int i = 0; i < instance.num_slots(); ++i) {
    const auto& slot = instance.slots[static_cast<std::size_t>(i)];
    add_psd(i, Polynomial::constant(slot.n, 1.0));  // moment matrix
    for (const auto& g : slot.generators) add_psd(i, g);
  }

  conic::ConicProblem& cp = out.problem;
  cp.A.resize(row, lay.total);
  cp.A.setFromTriplets(trips.begin(), trips.end());
  cp.b = Eigen::Map<Eigen::VectorXd>(bvals.data(), row);
  cp.c = Eigen::VectorXd::Zero(lay.total);
  for (int i = 0; i < instance.num_slots(); ++i)
    for (const auto& [a, c] : instance.objective[static_cast<std::size_t>(i)].terms())
      cp.c[lay.slot_offset[static_cast<std::size_t>(i)] +
           lay.bases[static_cast<std::size_t>(i)].index_of(a)] += c;
  cp.cones = std::move(cones);
  cp.validate();
  return out;
}

std::vector<PseudoMoments> AssembledProblem::moments_from(
    const conic::ConicSolution& sol) const {
  std::vector<PseudoMoments> out;
  for (std::size_t i = 0; i < slot_n.size(); ++i) {
    PseudoMoments pm(slot_n[i], ell);
    const int count = pm.size();
    pm = PseudoMoments(slot_n[i], ell, sol.x.segment(slot_offset[i], count));
    out.push_back(std::move(pm));
  }
  return out;
}

std::map<int, double> AssembledProblem::dual_rows_from(
    const conic::ConicSolution& sol) const {
  std::map<int, double> v;
  for (std::size_t r = 0; r < kept_rows.size(); ++r)
    v[kept_rows[r]] = -sol.y[static_cast<int>(r)] / row_scale[r];
  return v;
}

conic::ConicProblem assemble_dual(const GMPInstance& instance, int ell) {
  const AssembledProblem primal = assemble_primal(instance, ell);
  const conic::ConicProblem& pp = primal.problem;
  const int np = pp.num_vars();
  const int mp = pp.num_rows();

  conic::ConicProblem dual;
  std::vector<Eigen::Triplet<double>> trips;
  // Zero rows: A' y = -c.
  for (int k = 0; k < pp.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(pp.A, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.col()), static_cast<int>(it.row()),
                         it.value());
  dual.cones.push_back({conic::ConeBlock::Kind::Zero, np});
  int row = np;
  std::vector<double> bvals(static_cast<std::size_t>(np));
  for (int i = 0; i < np; ++i) bvals[static_cast<std::size_t>(i)] = -pp.c[i];
  // Cone membership of y mirrors the primal blocks.
  int off = 0;
  for (const auto& blk : pp.cones) {
    const int len = blk.rows();
    if (blk.kind != conic::ConeBlock::Kind::Zero) {
      for (int i = 0; i < len; ++i) {
        trips.emplace_back(row + i, off + i, -1.0);
        bvals.push_back(0.0);
      }
      dual.cones.push_back(blk);
      row += len;
    }
    off += len;
  }
  dual.A.resize(row, mp);
  dual.A.setFromTriplets(trips.begin(), trips.end());
  dual.b = Eigen::Map<Eigen::VectorXd>(bvals.data(), row);
  dual.c = pp.b;
  dual.validate();
  return dual;
}

double mass_bound(const GMPInstance& instance) {
  instance.validate();
  if (instance.witness.empty())
    throw std::domain_error("mass_bound: instance has no S-fullness witness");
  double tw = 0.0;
  for (const auto& [j, w] : instance.witness)
    tw += w * instance.rows[static_cast<std::size_t>(j)].t;

  double b_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < instance.num_slots(); ++i) {
    const MeasureSlot& slot = instance.slots[static_cast<std::size_t>(i)];
    Polynomial bi(slot.n);
    for (const auto& [j, w] : instance.witness)
      bi += instance.rows[static_cast<std::size_t>(j)].h[static_cast<std::size_t>(i)] * w;
    detail::Rng rng(kSampleSeed + static_cast<std::uint64_t>(i));
    int accepted = 0;
    long attempts = 0;
    const long max_attempts = 400L * kSamplePoints;
    Eigen::VectorXd x(slot.n);
    while (accepted < kSamplePoints && attempts < max_attempts) {
      ++attempts;
      for (int t = 0; t < slot.n; ++t) x[t] = rng.uniform(-1.0, 1.0);
      bool ok = true;
      for (const auto& g : slot.generators)
        if (g.evaluate(x) < 0.0) {
          ok = false;
          break;
        }
      if (!ok) continue;
      ++accepted;
      b_min = std::min(b_min, bi.evaluate(x));
    }
    if (accepted == 0)
      throw std::runtime_error("mass_bound: could not sample S_i");
  }
  if (!(b_min > 0.0))
    throw std::runtime_error(
        "mass_bound: witness invalid, sampled b_min <= 0");
  return tw / b_min;
}

}  // namespace momentgmp::gmp
