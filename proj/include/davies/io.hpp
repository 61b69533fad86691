// io.hpp: JSON forms of models, generator specs and reports

#pragma once

#include "davies/classical.hpp"
#include "davies/gaps.hpp"
#include "davies/generator.hpp"
#include "davies/operators.hpp"
#include "davies/spectral.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace davies {

using json = nlohmann::ordered_json;

// Throws ConfigError when `j` has a key outside `allowed`.
void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where);

json read_json_file(const std::string& path);

// Dense matrices are nested arrays of [re, im] pairs (a bare number is real).
Operator matrix_from_json(const json& j);
json matrix_to_json(const Operator& m);

// {"kind": "pauli-sum" | "dense" | "field-perturbed" | "xyz-ring", "n",
//  "terms": [[coeff, "XZI"], ...], "matrix", "field": {"P", "h"}, "xyz": {"J", "h"}}
ModelSpec model_from_json(const json& j);
json model_to_json(const ModelSpec& m);

struct RateSpec {
    RateKind kind{RateKind::Glauber};
    std::vector<std::pair<double, double>> table;
};

struct JumpSpec {
    std::string token;              // "X1", "ZZI", ...; empty for a dense matrix
    std::optional<Operator> matrix;
};

struct GeneratorSpec {
    std::optional<double> beta;
    std::optional<RateSpec> rate;          // unset: the driver picks
    std::optional<std::vector<JumpSpec>> jumps; // unset: single-site X, Y, Z
};

GeneratorSpec generator_from_json(const json& j);
json generator_to_json(const GeneratorSpec& g);

RateFunction make_rate(const RateSpec& spec, double beta);
std::vector<Operator> resolve_jumps(const std::optional<std::vector<JumpSpec>>& jumps, int n);

const char* rate_kind_name(RateKind k);

// A gap is a number or the string "+inf".
json gap_to_json(const GapValue& g);
json gap_report_to_json(const GapReport& r);
json ap_report_to_json(const APReport& r);
json chain_to_json(const ClassicalChain& c);
json witness_to_json(const CheegerWitness& w);
json cheeger_report_to_json(const CheegerReport& r);

} // namespace davies
