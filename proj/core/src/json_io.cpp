#include "momentgmp/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace momentgmp::io {

using nlohmann::json;
using poly::MultiIndex;
using poly::Polynomial;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

Polynomial polynomial_from(const json& j) {
  if (!j.contains("n") || !j.contains("terms"))
    throw std::runtime_error("polynomial JSON needs \"n\" and \"terms\"");
  const int n = j.at("n").get<int>();
  Polynomial p(n);
  for (const auto& term : j.at("terms")) {
    std::vector<int> alpha = term.at("alpha").get<std::vector<int>>();
    if (static_cast<int>(alpha.size()) != n)
      throw std::runtime_error("polynomial JSON: alpha length != n");
    p.add_term(MultiIndex(std::move(alpha)), term.at("coef").get<double>());
  }
  return p;
}

json polynomial_to(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [a, c] : p.terms()) {
    terms.push_back({{"alpha", a.exponents()}, {"coef", c}});
  }
  return {{"n", p.n()}, {"terms", terms}};
}

bool is_unit_ball_generator(const Polynomial& g) {
  const Polynomial ball = gmp::unit_ball_generator(g.n());
  if (g.terms().size() != ball.terms().size()) return false;
  for (const auto& [a, c] : ball.terms())
    if (g.coefficient(a) != c) return false;
  return true;
}

}  // namespace

Polynomial parse_polynomial(const std::string& json_text) {
  return polynomial_from(json::parse(json_text));
}

std::string polynomial_to_json(const Polynomial& p) {
  return polynomial_to(p).dump(2);
}

Polynomial read_polynomial(const std::string& path) {
  return parse_polynomial(slurp(path));
}

void write_polynomial(const Polynomial& p, const std::string& path) {
  spill(polynomial_to_json(p) + "\n", path);
}

gmp::GMPInstance parse_gmp_instance(const std::string& json_text) {
  const json j = json::parse(json_text);
  gmp::GMPInstance inst;
  for (const auto& js : j.at("slots")) {
    gmp::MeasureSlot slot;
    slot.n = js.at("n").get<int>();
    for (const auto& jg : js.value("generators", json::array())) {
      slot.generators.push_back(polynomial_from(jg));
      if (is_unit_ball_generator(slot.generators.back()))
        slot.includes_ball = true;
    }
    inst.slots.push_back(std::move(slot));
  }
  for (const auto& jf : j.at("objective"))
    inst.objective.push_back(polynomial_from(jf));
  for (const auto& jr : j.value("rows", json::array())) {
    gmp::ConstraintRow row;
    for (const auto& jh : jr.at("h")) row.h.push_back(polynomial_from(jh));
    row.t = jr.at("t").get<double>();
    const std::string kind = jr.at("kind").get<std::string>();
    if (kind == "eq")
      row.kind = gmp::RowKind::Equality;
    else if (kind == "le")
      row.kind = gmp::RowKind::InequalityLE;
    else
      throw std::runtime_error("row kind must be \"eq\" or \"le\"");
    inst.rows.push_back(std::move(row));
  }
  if (j.contains("witness"))
    for (const auto& [key, value] : j.at("witness").items())
      inst.witness[std::stoi(key)] = value.get<double>();
  return inst;
}

std::string gmp_instance_to_json(const gmp::GMPInstance& instance) {
  json j;
  j["slots"] = json::array();
  for (const auto& slot : instance.slots) {
    json js;
    js["n"] = slot.n;
    js["generators"] = json::array();
    for (const auto& g : slot.generators) js["generators"].push_back(polynomial_to(g));
    j["slots"].push_back(js);
  }
  j["objective"] = json::array();
  for (const auto& f : instance.objective) j["objective"].push_back(polynomial_to(f));
  j["rows"] = json::array();
  for (const auto& row : instance.rows) {
    json jr;
    jr["h"] = json::array();
    for (const auto& h : row.h) jr["h"].push_back(polynomial_to(h));
    jr["t"] = row.t;
    jr["kind"] = row.kind == gmp::RowKind::Equality ? "eq" : "le";
    j["rows"].push_back(jr);
  }
  if (!instance.witness.empty()) {
    json jw = json::object();
    for (const auto& [idx, w] : instance.witness) jw[std::to_string(idx)] = w;
    j["witness"] = jw;
  }
  return j.dump(2);
}

gmp::GMPInstance read_gmp_instance(const std::string& path) {
  return parse_gmp_instance(slurp(path));
}

void write_gmp_instance(const gmp::GMPInstance& instance,
                        const std::string& path) {
  spill(gmp_instance_to_json(instance) + "\n", path);
}

extract::AtomSet parse_atom_set(const std::string& json_text) {
  const json j = json::parse(json_text);
  extract::AtomSet out;
  for (const auto& ja : j.at("atoms")) {
    extract::Atom atom;
    atom.weight = ja.at("weight").get<double>();
    const auto pt = ja.at("point").get<std::vector<double>>();
    atom.point = Eigen::Map<const Eigen::VectorXd>(pt.data(),
                                                   static_cast<long>(pt.size()));
    if (atom.weight < 0.0) out.signed_weights = true;
    out.atoms.push_back(std::move(atom));
  }
  out.residual = j.value("residual", 0.0);
  return out;
}

std::string atom_set_to_json(const extract::AtomSet& atoms) {
  json j;
  j["atoms"] = json::array();
  for (const auto& atom : atoms.atoms) {
    std::vector<double> pt(atom.point.data(), atom.point.data() + atom.point.size());
    j["atoms"].push_back({{"weight", atom.weight}, {"point", pt}});
  }
  j["residual"] = atoms.residual;
  return j.dump(2);
}

extract::AtomSet read_atom_set(const std::string& path) {
  return parse_atom_set(slurp(path));
}

void write_atom_set(const extract::AtomSet& atoms, const std::string& path) {
  spill(atom_set_to_json(atoms) + "\n", path);
}

}  // namespace momentgmp::io
