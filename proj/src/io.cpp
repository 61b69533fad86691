// io.cpp: JSON conversion

#include "davies/io.hpp"

#include "davies/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>

namespace davies {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown field \"" + key + "\"");
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

namespace {

double number(const json& j, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + ": expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw ConfigError(what + ": expected an integer");
    return j.get<int>();
}

char pauli_axis(const json& j, const std::string& what) {
    if (!j.is_string() || j.get<std::string>().size() != 1) throw ConfigError(what + ": expected \"X\", \"Y\" or \"Z\"");
    const char c = j.get<std::string>()[0];
    if (c != 'X' && c != 'Y' && c != 'Z') throw ConfigError(what + ": expected \"X\", \"Y\" or \"Z\"");
    return c;
}

const char* kind_name(ModelKind k) {
    switch (k) {
    case ModelKind::PauliSum: return "pauli-sum";
    case ModelKind::Dense: return "dense";
    case ModelKind::FieldPerturbed: return "field-perturbed";
    case ModelKind::XyzRing: return "xyz-ring";
    }
    return "?";
}

} // namespace

Operator matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("matrix: expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Operator m(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
            throw ConfigError("matrix: rows must be arrays of length " + std::to_string(rows));
        }
        for (Eigen::Index c = 0; c < rows; ++c) {
            const auto& e = row[static_cast<std::size_t>(c)];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ConfigError("matrix: entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

json matrix_to_json(const Operator& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        out.push_back(row);
    }
    return out;
}

ModelSpec model_from_json(const json& j) {
    reject_unknown(j, {"kind", "n", "terms", "matrix", "field", "xyz"}, "model");
    if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("model: missing \"kind\"");
    if (!j.contains("n")) throw ConfigError("model: missing \"n\"");
    ModelSpec m;
    m.n = integer(j["n"], "model.n");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "pauli-sum") {
        m.kind = ModelKind::PauliSum;
    } else if (kind == "dense") {
        m.kind = ModelKind::Dense;
    } else if (kind == "field-perturbed") {
        m.kind = ModelKind::FieldPerturbed;
    } else if (kind == "xyz-ring") {
        m.kind = ModelKind::XyzRing;
    } else {
        throw ConfigError("model: unknown kind \"" + kind + "\"");
    }
    if (j.contains("terms")) {
        if (!j["terms"].is_array()) throw ConfigError("model.terms: expected an array");
        for (const auto& t : j["terms"]) {
            if (!t.is_array() || t.size() != 2 || !t[1].is_string()) {
                throw ConfigError("model.terms: each term is [coeff, \"pauli string\"]");
            }
            try {
                m.terms.push_back({number(t[0], "model.terms coefficient"), PauliString(t[1].get<std::string>())});
            } catch (const ValidationError& e) {
                throw ConfigError(std::string("model.terms: ") + e.what());
            }
        }
    }
    if (j.contains("matrix")) m.matrix = matrix_from_json(j["matrix"]);
    if (j.contains("field")) {
        const auto& f = j["field"];
        reject_unknown(f, {"P", "h"}, "model.field");
        FieldSpec fs;
        fs.axis = f.contains("P") ? pauli_axis(f["P"], "model.field.P") : 'X';
        if (!f.contains("h") || !f["h"].is_array()) throw ConfigError("model.field: missing \"h\" array");
        fs.h.resize(static_cast<Eigen::Index>(f["h"].size()));
        for (std::size_t i = 0; i < f["h"].size(); ++i) fs.h(static_cast<Eigen::Index>(i)) = number(f["h"][i], "model.field.h");
        m.field = fs;
    }
    if (j.contains("xyz")) {
        const auto& x = j["xyz"];
        reject_unknown(x, {"J", "h"}, "model.xyz");
        if (x.contains("J")) m.xyz_j = number(x["J"], "model.xyz.J");
        if (x.contains("h")) m.xyz_h = number(x["h"], "model.xyz.h");
    }
    if (m.kind == ModelKind::Dense && !m.matrix) throw ConfigError("model: dense kind requires \"matrix\"");
    if (m.kind == ModelKind::FieldPerturbed && !m.field) throw ConfigError("model: field-perturbed kind requires \"field\"");
    return m;
}

json model_to_json(const ModelSpec& m) {
    json out;
    out["kind"] = kind_name(m.kind);
    out["n"] = m.n;
    if (!m.terms.empty()) {
        json terms = json::array();
        for (const auto& t : m.terms) terms.push_back({t.coeff, t.string.letters()});
        out["terms"] = terms;
    }
    if (m.matrix) out["matrix"] = matrix_to_json(*m.matrix);
    if (m.field) {
        std::vector<double> h(m.field->h.data(), m.field->h.data() + m.field->h.size());
        out["field"] = {{"P", std::string(1, m.field->axis)}, {"h", h}};
    }
    if (m.kind == ModelKind::XyzRing) out["xyz"] = {{"J", m.xyz_j}, {"h", m.xyz_h}};
    return out;
}

const char* rate_kind_name(RateKind k) {
    switch (k) {
    case RateKind::Glauber: return "glauber";
    case RateKind::Metropolis: return "metropolis";
    case RateKind::Table: return "table";
    }
    return "?";
}

GeneratorSpec generator_from_json(const json& j) {
    reject_unknown(j, {"beta", "rate", "jumps"}, "generator");
    GeneratorSpec g;
    if (j.contains("beta")) g.beta = number(j["beta"], "generator.beta");
    if (j.contains("rate")) {
        const auto& r = j["rate"];
        reject_unknown(r, {"kind", "table"}, "generator.rate");
        RateSpec rs;
        const auto kind = r.value("kind", std::string("glauber"));
        if (kind == "glauber") {
            rs.kind = RateKind::Glauber;
        } else if (kind == "metropolis") {
            rs.kind = RateKind::Metropolis;
        } else if (kind == "table") {
            rs.kind = RateKind::Table;
            if (!r.contains("table") || !r["table"].is_array()) throw ConfigError("generator.rate: table kind needs \"table\"");
            for (const auto& e : r["table"]) {
                if (!e.is_array() || e.size() != 2) throw ConfigError("generator.rate.table: entries are [omega, G]");
                rs.table.emplace_back(number(e[0], "rate table omega"), number(e[1], "rate table G"));
            }
        } else {
            throw ConfigError("generator.rate: unknown kind \"" + kind + "\"");
        }
        g.rate = rs;
    }
    if (j.contains("jumps")) {
        if (!j["jumps"].is_array()) throw ConfigError("generator.jumps: expected an array");
        std::vector<JumpSpec> js;
        for (const auto& e : j["jumps"]) {
            if (e.is_string()) {
                js.push_back({e.get<std::string>(), std::nullopt});
            } else {
                js.push_back({"", matrix_from_json(e)});
            }
        }
        g.jumps = js;
    }
    return g;
}

json generator_to_json(const GeneratorSpec& g) {
    json out = json::object();
    if (g.beta) out["beta"] = *g.beta;
    if (g.rate) {
        json r = {{"kind", rate_kind_name(g.rate->kind)}};
        if (g.rate->kind == RateKind::Table) {
            json t = json::array();
            for (const auto& [w, v] : g.rate->table) t.push_back({w, v});
            r["table"] = t;
        }
        out["rate"] = r;
    }
    if (g.jumps) {
        json js = json::array();
        for (const auto& s : *g.jumps) {
            if (s.matrix) {
                js.push_back(matrix_to_json(*s.matrix));
            } else {
                js.push_back(s.token);
            }
        }
        out["jumps"] = js;
    }
    return out;
}

RateFunction make_rate(const RateSpec& spec, double beta) {
    switch (spec.kind) {
    case RateKind::Glauber: return RateFunction::glauber(beta);
    case RateKind::Metropolis: return RateFunction::metropolis(beta);
    case RateKind::Table: return RateFunction::table(beta, spec.table);
    }
    throw ConfigError("unknown rate kind");
}

std::vector<Operator> resolve_jumps(const std::optional<std::vector<JumpSpec>>& jumps, int n) {
    if (!jumps) return default_jumps(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    std::vector<Operator> out;
    for (const auto& s : *jumps) {
        if (s.matrix) {
            if (s.matrix->rows() != dim) {
                throw ConfigError("generator.jumps: dense jump has dimension " + std::to_string(s.matrix->rows()) +
                                  ", expected " + std::to_string(dim));
            }
            out.push_back(*s.matrix);
            continue;
        }
        const auto& t = s.token;
        try {
            if (t.size() >= 2 && (t[0] == 'X' || t[0] == 'Y' || t[0] == 'Z') &&
                std::all_of(t.begin() + 1, t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
                out.push_back(PauliString::single(n, std::stoi(t.substr(1)), t[0]).matrix());
            } else {
                const PauliString ps(t);
                if (ps.qubits() != n) throw ConfigError("generator.jumps: \"" + t + "\" does not act on " + std::to_string(n) + " qubits");
                out.push_back(ps.matrix());
            }
        } catch (const ValidationError& e) {
            throw ConfigError(std::string("generator.jumps: ") + e.what());
        }
    }
    if (out.empty()) throw ConfigError("generator.jumps: empty jump set");
    return out;
}

json gap_to_json(const GapValue& g) {
    json out;
    if (g.infinite) {
        out["value"] = "+inf";
    } else {
        out["value"] = g.value;
    }
    out["ergodicity_suspect"] = g.ergodicity_suspect;
    return out;
}

json gap_report_to_json(const GapReport& r) {
    json out;
    out["lambda_L"] = gap_to_json(r.gap);
    out["lambda_L0"] = gap_to_json(r.gap0);
    out["minimizing_omega"] = r.minimizing_omega;
    json per = json::array();
    for (std::size_t k = 0; k < r.omegas.size(); ++k) {
        json row = gap_to_json(r.per_omega[k]);
        row["omega"] = r.omegas[k];
        per.push_back(row);
    }
    out["per_omega"] = per;
    if (r.hermitian_gap) out["lambda_L_hermitian"] = gap_to_json(*r.hermitian_gap);
    if (r.hermitian_gap0) out["lambda_L0_hermitian"] = gap_to_json(*r.hermitian_gap0);
    if (r.superoperator_gap) out["lambda_L_superoperator"] = gap_to_json(*r.superoperator_gap);
    out["residuals"] = {{"max_asymmetry", r.max_asymmetry}, {"orthonormality", r.orthonormality_residual}};
    out["tolerances"] = {{"equality", r.tol}, {"zero_gap", kZeroGapTol}};
    return out;
}

json ap_report_to_json(const APReport& r) {
    return {{"length", r.length}, {"a", r.a}, {"b", r.b}, {"value_tol", r.value_tol}, {"sep_tol", r.sep_tol}};
}

json chain_to_json(const ClassicalChain& c) {
    json out;
    out["pi"] = std::vector<double>(c.pi.data(), c.pi.data() + c.pi.size());
    json rates = json::array();
    for (Eigen::Index i = 0; i < c.rates.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < c.rates.cols(); ++j) row.push_back(c.rates(i, j));
        rates.push_back(row);
    }
    out["rates"] = rates;
    out["energies"] = std::vector<double>(c.energies.data(), c.energies.data() + c.energies.size());
    return out;
}

json witness_to_json(const CheegerWitness& w) {
    json out;
    out["subset_mask"] = w.mask;
    out["subset"] = w.subset;
    out["pi_subset"] = w.pi_subset;
    out["flow"] = w.flow;
    out["phi"] = w.phi;
    out["lambda_max"] = w.lambda_max;
    out["classical_gap"] = w.classical_gap;
    out["mode"] = w.mode == BottleneckMode::Exhaustive ? "exhaustive" : "sweep";
    out["upper_bound"] = w.upper_bound;
    out["chain_margin"] = w.chain_margin;
    return out;
}

json cheeger_report_to_json(const CheegerReport& r) {
    json out;
    out["witness"] = witness_to_json(r.witness);
    out["D"] = r.d;
    out["lambda_L"] = r.lambda_l;
    out["dirichlet"] = r.dirichlet;
    out["variance"] = r.variance;
    out["M"] = {{"value", r.m},
                {"g_sup_bohr", r.g_sup_bohr},
                {"g_sup_closed_form", r.g_sup_closed},
                {"jump_sum_norm", r.jump_sum_norm}};
    out["bound"] = r.bound;
    out["margin"] = r.margin;
    out["tol"] = r.tol;
    out["holds"] = r.holds;
    out["residuals"] = {{"idempotence", r.idempotence_residual}, {"commutator", r.commutator_residual}};
    return out;
}

} // namespace davies
