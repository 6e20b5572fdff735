#pragma once

#include <string>

#include "momentgmp/extract.hpp"
#include "momentgmp/gmp.hpp"
#include "momentgmp/poly.hpp"

namespace momentgmp::io {

/// Polynomial JSON: { "n": int, "terms": [ { "alpha": [ints], "coef": f } ] }.
poly::Polynomial parse_polynomial(const std::string& json_text);
std::string polynomial_to_json(const poly::Polynomial& p);
poly::Polynomial read_polynomial(const std::string& path);
void write_polynomial(const poly::Polynomial& p, const std::string& path);

/// GMP instance JSON:
/// { "slots": [ { "n": int, "generators": [Polynomial] } ],
///   "objective": [Polynomial],
///   "rows": [ { "h": [Polynomial], "t": float, "kind": "eq"|"le" } ],
///   "witness": { "<row index>": weight } }.
/// Slots whose generator list contains 1 - ||x||^2 are marked as including
/// the ball.
gmp::GMPInstance parse_gmp_instance(const std::string& json_text);
std::string gmp_instance_to_json(const gmp::GMPInstance& instance);
gmp::GMPInstance read_gmp_instance(const std::string& path);
void write_gmp_instance(const gmp::GMPInstance& instance,
                        const std::string& path);

/// AtomSet JSON: { "atoms": [ { "weight": f, "point": [floats] } ],
///                 "residual": f }.
extract::AtomSet parse_atom_set(const std::string& json_text);
std::string atom_set_to_json(const extract::AtomSet& atoms);
extract::AtomSet read_atom_set(const std::string& path);
void write_atom_set(const extract::AtomSet& atoms, const std::string& path);

}  // namespace momentgmp::io
