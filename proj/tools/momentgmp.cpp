// momentgmp: moment relaxations for generalized moment problems, symmetric
// tensor decomposition, convergence-rate tables and hierarchy experiments.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "momentgmp/experiments.hpp"
#include "momentgmp/extract.hpp"
#include "momentgmp/gmp.hpp"
#include "momentgmp/io.hpp"
#include "momentgmp/rates.hpp"
#include "momentgmp/tensor.hpp"
#include "momentgmp/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace momentgmp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotCertified = 2;

struct CommonOpts {
  double tol = 1e-8;
  int max_iter = 200000;
  std::uint64_t seed = 0;
  std::string out;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << text;
}

void write_manifest(const std::string& out_prefix, const std::string& command,
                    const std::vector<std::string>& inputs,
                    const json& config, std::uint64_t seed) {
  json m;
  m["command"] = command;
  m["inputs"] = inputs;
  m["config"] = config;
  m["seed"] = seed;
  m["version"] = kVersion;
  write_text(out_prefix + ".manifest.json", m.dump(2) + "\n");
}

std::string default_prefix(const std::string& input, const std::string& out) {
  if (!out.empty()) return out;
  fs::path p(input);
  p.replace_extension("");
  return p.string();
}

conic::SolveSettings solver_settings(const CommonOpts& o) {
  conic::SolveSettings st;
  st.eps = o.tol;
  st.max_iter = o.max_iter;
  return st;
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

int cmd_decompose(const std::string& input, const std::string& mode_name,
                  int order, int psi_halfdeg, double scale, double L,
                  bool use_kernel, double rank_tol, double merge_tol,
                  const CommonOpts& common) {
  const tensor::Mode mode = mode_name == "signed" ? tensor::Mode::Signed
                                                  : tensor::Mode::Positive;
  const poly::Polynomial f_hom = io::read_polynomial(input);
  const int d = f_hom.degree();

  tensor::DecompositionConfig cfg;
  cfg.ell = order;
  cfg.psi_half_degree = psi_halfdeg;
  cfg.scale = scale;
  cfg.total_variation = L;
  cfg.use_kernel = use_kernel;
  cfg.rank_tol = rank_tol;
  cfg.merge_tol = merge_tol;
  cfg.solver = solver_settings(common);

  const tensor::DecomposeResult res = tensor::decompose(f_hom, d, mode, cfg);

  const std::string prefix = default_prefix(input, common.out);
  io::write_atom_set(res.atoms, prefix + ".atoms.json");

  const auto& diag = res.diagnostics;
  json jd;
  jd["solver"] = {{"status", conic::status_name(diag.solver_status)},
                  {"primal_res", diag.primal_res},
                  {"dual_res", diag.dual_res},
                  {"gap", diag.gap},
                  {"primal_obj", diag.primal_obj},
                  {"dual_obj", diag.dual_obj},
                  {"iterations", diag.iterations}};
  jd["rank_trajectory"] = diag.rank_trajectory;
  jd["extraction_residual"] = diag.extraction_residual;
  jd["effective_rank_tol"] = diag.effective_rank_tol;
  jd["fit_residual"] = diag.fit_residual;
  jd["reconstruction_error"] = diag.reconstruction_error;
  jd["mass_bound"] = diag.mass_bound;
  jd["not_certified"] = diag.not_certified;
  jd["kernel_dim"] = diag.kernel_dim;
  jd["atom_count"] = res.atoms.size();
  write_text(prefix + ".diagnostics.json", jd.dump(2) + "\n");

  json cfgj = {{"mode", mode_name},
               {"order", diag.resolved.ell},
               {"psi_halfdeg", diag.resolved.psi_half_degree},
               {"scale", diag.resolved.scale},
               {"L", diag.resolved.total_variation},
               {"use_kernel", diag.resolved.use_kernel},
               {"rank_tol", diag.resolved.rank_tol},
               {"merge_tol", diag.resolved.merge_tol},
               {"tol", common.tol},
               {"max_iter", common.max_iter}};
  write_manifest(prefix, "decompose", {input}, cfgj, common.seed);

  std::cout << "atoms: " << res.atoms.size()
            << "  extraction residual: " << diag.extraction_residual
            << "  reconstruction error: " << diag.reconstruction_error << "\n";
  if (diag.not_certified) {
    std::cerr << "warning: extraction residual exceeds 1e-3, result not "
                 "certified\n";
    return kExitNotCertified;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// rates
// ---------------------------------------------------------------------------

rates::PsatzConstants parse_psatz(const json& slot, const std::string& preset,
                                  double gamma, double theta, bool have_theta) {
  const std::string name = slot.value("preset", preset);
  const double g = slot.value("gamma", gamma);
  const int n = slot.value("n", 1);
  const int deg = slot.value("deg", 2);
  rates::PsatzConstants ps;
  if (name == "ball") {
    ps = rates::ball_constants(n, deg, g);
  } else if (name == "box1") {
    ps = rates::box1_constants(n, deg, g);
  } else if (name == "box2") {
    ps = rates::box2_constants(n, deg, g);
  } else if (name == "generic") {
    const bool slot_theta = slot.contains("theta");
    if (!slot_theta && !have_theta)
      throw std::runtime_error("preset generic requires --theta");
    ps = rates::generic_constants(g, slot.value("theta", theta));
  } else {
    throw std::runtime_error("unknown preset " + name);
  }
  if (slot.contains("theta") && name != "generic")
    ps.theta = slot.at("theta").get<double>();
  if (slot.contains("ell0")) ps.ell0 = slot.at("ell0").get<double>();
  return ps;
}

int cmd_rates(const std::string& input, const std::string& preset,
              double gamma, double theta, bool have_theta, int max_order,
              const CommonOpts& common) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open " + input);
  json j;
  in >> j;

  rates::RateInputs inputs;
  inputs.t_dot_w = j.value("t_dot_w", 1.0);
  inputs.v_star_l1 = j.value("v_star_l1", 0.0);
  std::vector<double> ell0;
  for (const auto& js : j.at("slots")) {
    rates::SlotRateInputs slot;
    slot.f_max = js.value("f_max", 1.0);
    slot.h_star_max = js.value("h_star_max", 1.0);
    slot.hw_min = js.value("hw_min", 1.0);
    slot.c_s = js.value("c_s", rates::c_s_ball());
    slot.psatz = parse_psatz(js, preset, gamma, theta, have_theta);
    ell0.push_back(slot.psatz.ell0);
    inputs.slots.push_back(slot);
  }
  std::vector<int> degrees = j.value("active_degrees", std::vector<int>{});

  const auto kt = rates::kappa_theta(inputs);
  const double threshold = rates::ell_threshold(ell0, degrees);
  int first = static_cast<int>(std::ceil(threshold));
  if (first < 2) first = 2;
  if (first % 2 != 0) ++first;

  std::ostringstream csv;
  csv.precision(12);
  csv << "ell,bound\n";
  for (int ell = first; ell <= max_order; ell += 2)
    csv << ell << "," << rates::gap_bound(ell, kt.kappa, kt.theta) << "\n";
  std::cout << csv.str();
  if (!common.out.empty()) {
    write_text(common.out, csv.str());
    write_manifest(common.out, "rates", {input},
                   {{"preset", preset},
                    {"gamma", gamma},
                    {"theta", have_theta ? json(theta) : json()},
                    {"max_order", max_order},
                    {"kappa", kt.kappa},
                    {"theta_rate", kt.theta}},
                   common.seed);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep / hausdorff
// ---------------------------------------------------------------------------

int cmd_sweep(const std::string& input, const std::vector<int>& orders,
              int grid, const CommonOpts& common) {
  const gmp::GMPInstance inst = io::read_gmp_instance(input);
  std::optional<double> reference;
  if (grid > 0) reference = experiments::reference_optimum(inst, grid);
  const auto sweep =
      experiments::gap_sweep(inst, orders, reference, solver_settings(common));
  std::ostringstream csv;
  csv.precision(12);
  csv << "ell,p_ell,d_ell,gap,time_ms\n";
  for (const auto& row : sweep.rows) {
    const double gap = reference ? *reference - row.primal
                                 : row.primal - row.dual;
    csv << row.ell << "," << row.primal << "," << row.dual << "," << gap << ","
        << row.wall_ms << "\n";
    if (!row.error.empty())
      std::cerr << "ell " << row.ell << ": " << row.error << "\n";
  }
  std::cout << csv.str();
  if (!common.out.empty()) {
    write_text(common.out, csv.str());
    write_manifest(common.out, "sweep", {input},
                   {{"orders", orders},
                    {"grid", grid},
                    {"tol", common.tol},
                    {"max_iter", common.max_iter}},
                   common.seed);
  }
  return kExitOk;
}

int cmd_hausdorff(const std::string& input, int k,
                  const std::vector<int>& orders, int samples, int grid,
                  const CommonOpts& common) {
  const gmp::GMPInstance inst = io::read_gmp_instance(input);
  std::ostringstream csv;
  csv.precision(12);
  csv << "ell,estimate,samples,grid\n";
  for (int ell : orders) {
    const double est = experiments::empirical_hausdorff(
        inst, k, ell, samples, grid, common.seed, solver_settings(common));
    csv << ell << "," << est << "," << samples << "," << grid << "\n";
  }
  std::cout << csv.str();
  if (!common.out.empty()) {
    write_text(common.out, csv.str());
    write_manifest(common.out, "hausdorff", {input},
                   {{"k", k},
                    {"orders", orders},
                    {"samples", samples},
                    {"grid", grid},
                    {"tol", common.tol}},
                   common.seed);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment relaxations for generalized moment problems"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts common;

  // decompose
  auto* dec = app.add_subcommand(
      "decompose", "Symmetric tensor decomposition via the moment hierarchy");
  std::string dec_input, dec_mode = "positive";
  int dec_order = 0, dec_psi = 0;
  double dec_scale = 1.0, dec_L = 0.0, dec_rank_tol = 1e-6, dec_merge_tol = 1e-6;
  bool dec_kernel = false;
  dec->add_option("input", dec_input, "homogeneous tensor JSON")->required();
  dec->add_option("--mode", dec_mode, "positive|signed")
      ->check(CLI::IsMember({"positive", "signed"}));
  dec->add_option("--order", dec_order, "relaxation order ell (even)");
  dec->add_option("--psi-halfdeg", dec_psi, "half degree d' of Psi");
  dec->add_option("--scale", dec_scale, "rescaling factor");
  dec->add_option("--L", dec_L, "total variation cap (signed mode)");
  dec->add_flag("--use-kernel", dec_kernel, "catalecticant kernel augmentation");
  dec->add_option("--rank-tol", dec_rank_tol, "relative rank tolerance");
  dec->add_option("--merge-tol", dec_merge_tol, "atom merge tolerance");

  // rates
  auto* rat = app.add_subcommand("rates", "Convergence-rate table (CSV)");
  std::string rat_input, rat_preset = "ball";
  double rat_gamma = 1.0, rat_theta = 0.0;
  int rat_max_order = 100;
  rat->add_option("input", rat_input, "rate inputs JSON")->required();
  rat->add_option("--preset", rat_preset, "ball|box1|box2|generic")
      ->check(CLI::IsMember({"ball", "box1", "box2", "generic"}));
  rat->add_option("--gamma", rat_gamma, "Positivstellensatz constant gamma");
  auto* theta_opt = rat->add_option("--theta", rat_theta, "rate exponent (generic)");
  rat->add_option("--max-order", rat_max_order, "last ell in the table");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Hierarchy value sweep (CSV)");
  std::string swp_input;
  std::vector<int> swp_orders = {2, 4, 6};
  int swp_grid = 0;
  swp->add_option("input", swp_input, "GMP instance JSON")->required();
  swp->add_option("--orders", swp_orders, "relaxation orders")->delimiter(',');
  swp->add_option("--grid", swp_grid,
                  "grid points per dim for the LP reference (0 = none)");

  // hausdorff
  auto* hd = app.add_subcommand("hausdorff",
                                "Sampled Hausdorff-distance estimate (CSV)");
  std::string hd_input;
  int hd_k = 2, hd_samples = 50, hd_grid = 2001;
  std::vector<int> hd_orders = {2, 4, 6, 8};
  hd->add_option("input", hd_input, "GMP instance JSON")->required();
  hd->add_option("--k", hd_k, "truncation degree of the compared cones");
  hd->add_option("--orders", hd_orders, "relaxation orders")->delimiter(',');
  hd->add_option("--samples", hd_samples, "objective samples per order");
  hd->add_option("--grid", hd_grid, "grid points per dim for the reference");

  for (auto* sub : {dec, rat, swp, hd}) {
    sub->add_option("--tol", common.tol, "solver tolerance");
    sub->add_option("--max-iter", common.max_iter, "solver iteration cap");
    sub->add_option("--seed", common.seed, "random seed");
    sub->add_option("--out", common.out, "output path or prefix");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (dec->parsed())
      return cmd_decompose(dec_input, dec_mode, dec_order, dec_psi, dec_scale,
                           dec_L, dec_kernel, dec_rank_tol, dec_merge_tol,
                           common);
    if (rat->parsed())
      return cmd_rates(rat_input, rat_preset, rat_gamma, rat_theta,
                       theta_opt->count() > 0, rat_max_order, common);
    if (swp->parsed()) return cmd_sweep(swp_input, swp_orders, swp_grid, common);
    if (hd->parsed())
      return cmd_hausdorff(hd_input, hd_k, hd_orders, hd_samples, hd_grid,
                           common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
