// harness.cpp: configuration, instances and the gap/compare/ap-scan/cheeger drivers

#include "davies/harness.hpp"

#include "davies/errors.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace davies {

namespace {

const std::vector<std::string> kApCases = {"z-field", "field-perturbed", "x-string", "edge-xx", "xyz-ring"};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> eigenvalues_of(const DaviesGenerator& gen) {
    const auto& v = gen.levels().spectrum.values;
    return {v.data(), v.data() + v.size()};
}

std::vector<double> spectrum_of(const HermitianOperator& h) {
    const auto sd = eigendecompose(h);
    return {sd.values.data(), sd.values.data() + sd.values.size()};
}

bool gaps_agree(const GapValue& a, const GapValue& b, double tol) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return std::abs(a.value - b.value) <= tol * std::max(1.0, std::abs(a.value));
}

double gap_difference(const GapValue& a, const GapValue& b) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite ? 0.0 : 1.0;
    return std::abs(a.value - b.value);
}

bool simple(const DaviesGenerator& gen) {
    const auto& m = gen.levels().multiplicity;
    return std::all_of(m.begin(), m.end(), [](int k) { return k == 1; });
}

PauliString pauli_on(int n, std::initializer_list<int> sites, char letter) {
    std::string s(static_cast<std::size_t>(n), 'I');
    for (int site : sites) s[static_cast<std::size_t>(site - 1)] = letter;
    return PauliString(s);
}

std::vector<PauliTerm> zz_background(int n, Rng& rng) {
    std::vector<PauliTerm> terms;
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) terms.push_back({rng.uniform(-1.0, 1.0), pauli_on(n, {i, j}, 'Z')});
    }
    return terms;
}

std::uint64_t require_seed(const ExperimentConfig& cfg) {
    if (!cfg.seed) throw ConfigError("a seed is required (config \"seed\" or --seed)");
    return *cfg.seed;
}

} // namespace

// ---------------------------------------------------------------------------
// Configuration

ExperimentConfig config_from_json(const json& j) {
    reject_unknown(j,
                   {"model", "random_model", "generator", "betas", "seed", "trials", "qubits", "tol_scale", "out",
                    "format", "threads", "ap_cases", "x_string_degree", "graph", "ap_value_tol", "suites", "samples",
                    "bottleneck"},
                   "config");
    ExperimentConfig c;
    try {
        if (j.contains("model")) c.model = model_from_json(j["model"]);
        if (j.contains("random_model")) {
            const auto& r = j["random_model"];
            reject_unknown(r, {"background", "field", "amplitude"}, "random_model");
            RandomModelSpec rm;
            rm.background = r.value("background", std::string("zz"));
            if (rm.background != "zz" && rm.background != "none") {
                throw ConfigError("random_model.background must be \"zz\" or \"none\"");
            }
            const auto axis = r.value("field", std::string("X"));
            if (axis != "X" && axis != "Y" && axis != "Z") throw ConfigError("random_model.field must be X, Y or Z");
            rm.field_axis = axis[0];
            rm.amplitude = r.value("amplitude", 1.0);
            if (!std::isfinite(rm.amplitude) || rm.amplitude < 0.0) throw ConfigError("random_model.amplitude must be >= 0");
            c.random_model = rm;
        }
        if (c.model && c.random_model) throw ConfigError("config: give either \"model\" or \"random_model\", not both");
        if (j.contains("generator")) c.generator = generator_from_json(j["generator"]);
        if (j.contains("betas")) c.betas = j["betas"].get<std::vector<double>>();
        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned()) throw ConfigError("config.seed must be a non-negative integer");
            c.seed = j["seed"].get<std::uint64_t>();
        }
        c.trials = j.value("trials", 1);
        if (j.contains("qubits")) c.qubits = j["qubits"].get<std::vector<int>>();
        c.tol_scale = j.value("tol_scale", 1.0);
        c.out = j.value("out", std::string());
        const auto fmt = j.value("format", std::string("json"));
        if (fmt == "json") {
            c.format = OutputFormat::Json;
        } else if (fmt == "csv") {
            c.format = OutputFormat::Csv;
        } else {
            throw ConfigError("config.format must be \"json\" or \"csv\"");
        }
        c.threads = j.value("threads", 0);
        if (j.contains("ap_cases")) c.ap_cases = j["ap_cases"].get<std::vector<std::string>>();
        c.x_string_degree = j.value("x_string_degree", 2);
        if (j.contains("graph")) c.graph = j["graph"].get<std::vector<std::pair<int, int>>>();
        if (j.contains("ap_value_tol")) c.ap_value_tol = j["ap_value_tol"].get<double>();
        if (j.contains("suites")) c.suites = j["suites"].get<std::vector<std::string>>();
        c.samples = j.value("samples", 4);
        c.bottleneck = j.value("bottleneck", std::string("auto"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (c.model) {
        if (c.model->n < 1 || c.model->n > kMaxHarnessQubits) {
            throw ConfigError("config: model.n must be in [1, 8], got " + std::to_string(c.model->n));
        }
        if (c.qubits.empty()) c.qubits = {c.model->n};
        if (c.qubits.size() != 1 || c.qubits[0] != c.model->n) throw ConfigError("config: qubits must match model.n");
    }
    if (c.qubits.empty()) c.qubits = {2};
    for (int n : c.qubits) {
        if (n < 1 || n > kMaxHarnessQubits) throw ConfigError("config: qubit counts must be in [1, 8], got " + std::to_string(n));
    }
    if (c.betas.empty() && c.generator.beta) c.betas = {*c.generator.beta};
    for (double b : c.betas) {
        if (!std::isfinite(b)) throw ConfigError("config: betas must be finite");
    }
    if (c.trials < 1) throw ConfigError("config: trials must be >= 1");
    if (!(c.tol_scale > 0.0) || !std::isfinite(c.tol_scale)) throw ConfigError("config: tol_scale must be positive");
    if (c.threads < 0) throw ConfigError("config: threads must be >= 0");
    if (c.samples < 1) throw ConfigError("config: samples must be >= 1");
    if (c.x_string_degree < 1) throw ConfigError("config: x_string_degree must be >= 1");
    if (c.ap_value_tol && !(*c.ap_value_tol > 0.0)) throw ConfigError("config: ap_value_tol must be positive");
    for (const auto& name : c.ap_cases) {
        if (std::find(kApCases.begin(), kApCases.end(), name) == kApCases.end()) {
            throw ConfigError("config: unknown ap case \"" + name + "\"");
        }
    }
    for (const auto& name : c.suites) {
        const auto& known = verify_suite_names();
        if (std::find(known.begin(), known.end(), name) == known.end()) {
            throw ConfigError("config: unknown suite \"" + name + "\"");
        }
    }
    for (const auto& [a, b] : c.graph) {
        if (a < 1 || b < 1 || a == b) throw ConfigError("config: graph edges need two distinct 1-based sites");
    }
    if (c.bottleneck != "auto" && c.bottleneck != "exhaustive" && c.bottleneck != "sweep") {
        throw ConfigError("config: bottleneck must be auto, exhaustive or sweep");
    }
    if (c.model && c.model->kind == ModelKind::FieldPerturbed && c.model->field->h.size() != c.model->n) {
        throw ConfigError("config: model.field.h must have n entries");
    }
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json out;
    if (c.model) out["model"] = model_to_json(*c.model);
    if (c.random_model) {
        out["random_model"] = {{"background", c.random_model->background},
                               {"field", std::string(1, c.random_model->field_axis)},
                               {"amplitude", c.random_model->amplitude}};
    }
    out["generator"] = generator_to_json(c.generator);
    out["betas"] = c.betas;
    if (c.seed) out["seed"] = *c.seed;
    out["trials"] = c.trials;
    out["qubits"] = c.qubits;
    out["tol_scale"] = c.tol_scale;
    return out;
}

// ---------------------------------------------------------------------------
// Instances

json instance_to_json(const Instance& inst) {
    json out;
    out["trial"] = inst.trial;
    out["seed"] = inst.seed;
    out["n"] = inst.n;
    out["beta"] = inst.beta;
    out["rate"] = rate_kind_name(inst.rate.kind);
    out["model"] = model_to_json(inst.model);
    return out;
}

ModelSpec random_field_model(const RandomModelSpec& spec, int n, Rng& rng) {
    ModelSpec m;
    m.kind = ModelKind::FieldPerturbed;
    m.n = n;
    if (spec.background == "zz") m.terms = zz_background(n, rng);
    FieldSpec f;
    f.axis = spec.field_axis;
    f.h.resize(n);
    for (int i = 0; i < n; ++i) f.h(i) = rng.uniform(-spec.amplitude, spec.amplitude);
    m.field = f;
    return m;
}

Instance make_instance(const ExperimentConfig& cfg, int trial, const InstancePolicy& policy) {
    Instance inst;
    inst.trial = trial;
    const auto nq = static_cast<int>(cfg.qubits.size());
    inst.n = cfg.qubits[static_cast<std::size_t>(trial % nq)];
    const std::uint64_t base = cfg.model ? cfg.seed.value_or(0) : require_seed(cfg);
    inst.seed = derive_seed(base, static_cast<std::uint64_t>(trial));
    Rng rng(inst.seed);

    if (!cfg.betas.empty()) {
        const auto nb = static_cast<int>(cfg.betas.size());
        inst.beta = cfg.betas[static_cast<std::size_t>((trial / nq) % nb)];
    } else if (policy.random_beta) {
        inst.beta = rng.uniform(0.0, 2.0);
    } else {
        inst.beta = 1.0;
    }

    if (cfg.generator.rate) {
        inst.rate = *cfg.generator.rate;
    } else {
        inst.rate.kind = (policy.alternate_rates && trial % 2 == 1) ? RateKind::Metropolis : RateKind::Glauber;
    }

    if (cfg.model) {
        inst.model = *cfg.model;
        inst.n = cfg.model->n;
        return inst;
    }
    const RandomModelSpec rm = cfg.random_model.value_or(RandomModelSpec{});
    const int kind = policy.mixed_models ? (trial / nq) % 3 : 0;
    if (kind == 0) {
        inst.model = random_field_model(rm, inst.n, rng);
    } else {
        inst.model.kind = ModelKind::PauliSum;
        inst.model.n = inst.n;
        for (int i = 1; i <= inst.n; ++i) {
            const double h = kind == 1 ? 1.0 : rng.uniform(-1.0, 1.0);
            inst.model.terms.push_back({h, PauliString::single(inst.n, i, 'Z')});
        }
    }
    return inst;
}

DaviesGenerator build_generator(const ExperimentConfig& cfg, const Instance& inst, GeneratorOptions opts) {
    return DaviesGenerator(build_model(inst.model), inst.beta, make_rate(inst.rate, inst.beta),
                           resolve_jumps(cfg.generator.jumps, inst.n), opts);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, count);
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex mu;
    int failed_index = count;
    std::exception_ptr failure;
    auto work = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// gap

std::vector<GapRow> run_gap(const ExperimentConfig& cfg) {
    std::vector<GapRow> rows(static_cast<std::size_t>(cfg.trials));
    const double tol = 1e-9 * cfg.tol_scale;
    parallel_for(cfg.trials, cfg.threads, [&](int t) {
        const auto t0 = std::chrono::steady_clock::now();
        GapRow row;
        row.instance = make_instance(cfg, t);
        const auto gen = build_generator(cfg, row.instance);
        row.report = spectral_gap_full(gen);
        row.report.tol = tol;
        const auto spec = eigenvalues_of(gen);
        const auto apt = default_ap_tolerances(spec);
        row.ap = find_proper_ap(spec, 0, apt.value_tol, apt.sep_tol);
        const auto& r = row.report;
        row.consistent = (!r.hermitian_gap || gaps_agree(r.gap, *r.hermitian_gap, tol)) &&
                         (!r.hermitian_gap0 || gaps_agree(r.gap0, *r.hermitian_gap0, tol)) &&
                         (!r.superoperator_gap || gaps_agree(r.gap, *r.superoperator_gap, tol));
        row.wall_time = seconds_since(t0);
        rows[static_cast<std::size_t>(t)] = std::move(row);
    });
    return rows;
}

// ---------------------------------------------------------------------------
// compare

ComparisonRow compare_instance(const ExperimentConfig& cfg, const Instance& inst) {
    const auto t0 = std::chrono::steady_clock::now();
    const double tol = 1e-9 * cfg.tol_scale;
    ComparisonRow row;
    row.instance = inst;
    const auto gen = build_generator(cfg, inst);
    const auto rep = spectral_gap_full(gen);
    row.gap = rep.gap;
    row.gap0 = rep.gap0;
    row.min_omega = rep.minimizing_omega;
    if (rep.hermitian_gap) {
        row.hermitian_residual = std::max(gap_difference(rep.gap, *rep.hermitian_gap),
                                          gap_difference(rep.gap0, *rep.hermitian_gap0));
    }
    if (rep.superoperator_gap) row.superoperator_residual = gap_difference(rep.gap, *rep.superoperator_gap);

    const auto spec = eigenvalues_of(gen);
    const auto apt = default_ap_tolerances(spec);
    row.d = std::max(1, find_proper_ap(spec, 0, apt.value_tol, apt.sep_tol).length);
    row.simple_spectrum = simple(gen);
    row.lambda_cl = classical_gap(extract_chain(gen));
    if (row.simple_spectrum && !row.gap0.infinite) row.classical_residual = std::abs(row.gap0.value - row.lambda_cl);

    row.ergodic = !row.gap0.ergodicity_suspect && !row.gap0.infinite;
    if (row.gap0.infinite) {
        row.verdict = row.gap.infinite;
    } else {
        const double l = row.gap.infinite ? std::numeric_limits<double>::max() : row.gap.value;
        const double l0 = row.gap0.value;
        row.verdict = l0 >= l - tol && l >= l0 / (2.0 * row.d) - tol;
        row.ratio = l0 > 0.0 ? l / l0 : 0.0;
    }
    row.wall_time = seconds_since(t0);
    return row;
}

std::vector<ComparisonRow> run_comparison(const ExperimentConfig& cfg) {
    std::vector<ComparisonRow> rows(static_cast<std::size_t>(cfg.trials));
    parallel_for(cfg.trials, cfg.threads, [&](int t) {
        rows[static_cast<std::size_t>(t)] = compare_instance(cfg, make_instance(cfg, t));
    });
    return rows;
}

// ---------------------------------------------------------------------------
// ap-scan

namespace {

std::vector<double> ap_case_spectrum(const ExperimentConfig& cfg, const std::string& name, int n, Rng& rng) {
    const RandomModelSpec rm = cfg.random_model.value_or(RandomModelSpec{});
    if (name == "z-field") {
        std::vector<double> h(static_cast<std::size_t>(n));
        for (auto& x : h) x = rng.uniform(-rm.amplitude, rm.amplitude);
        std::vector<double> out;
        for (std::size_t z = 0; z < (std::size_t{1} << n); ++z) {
            double e = 0.0;
            for (int i = 0; i < n; ++i) e += ((z >> (n - 1 - i)) & 1U) ? -h[static_cast<std::size_t>(i)] : h[static_cast<std::size_t>(i)];
            out.push_back(e);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    if (name == "xyz-ring") {
        const double j = rng.uniform(-2.0, 2.0);
        double h = rng.uniform(0.1, 2.0);
        if (rng.uniform() < 0.5) h = -h;
        return xyz_ring_spectrum(j, h, n);
    }
    std::vector<PauliTerm> terms = rm.background == "zz" ? zz_background(n, rng) : std::vector<PauliTerm>{};
    if (name == "field-perturbed") {
        Eigen::VectorXd h(n);
        for (int i = 0; i < n; ++i) h(i) = rng.uniform(-rm.amplitude, rm.amplitude);
        return spectrum_of(build_field_perturbation(build_pauli_hamiltonian(terms, n),
                                                    HermitianOperator(pauli_matrix(rm.field_axis)), h)
                               .hamiltonian);
    }
    if (name == "x-string") {
        const int k = std::min(cfg.x_string_degree, n);
        for (unsigned mask = 0; mask < (1U << n); ++mask) {
            if (std::popcount(mask) != k) continue;
            std::string s(static_cast<std::size_t>(n), 'I');
            for (int i = 0; i < n; ++i) {
                if ((mask >> i) & 1U) s[static_cast<std::size_t>(i)] = 'X';
            }
            terms.push_back({rng.uniform(-rm.amplitude, rm.amplitude), PauliString(s)});
        }
        return spectrum_of(build_pauli_hamiltonian(terms, n));
    }
    // edge-xx
    std::vector<std::pair<int, int>> edges = cfg.graph;
    if (edges.empty()) {
        for (int i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
        if (n > 2) edges.emplace_back(n, 1);
    }
    for (const auto& [a, b] : edges) {
        if (a > n || b > n) throw ConfigError("graph edge (" + std::to_string(a) + ", " + std::to_string(b) + ") exceeds n");
        terms.push_back({rng.uniform(-rm.amplitude, rm.amplitude), pauli_on(n, {a, b}, 'X')});
    }
    return spectrum_of(build_pauli_hamiltonian(terms, n));
}

} // namespace

std::vector<APCaseReport> run_ap_scan(const ExperimentConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    const auto& names = cfg.ap_cases.empty() ? kApCases : cfg.ap_cases;
    std::vector<APCaseReport> out;
    for (std::size_t c = 0; c < names.size(); ++c) {
        for (int n : cfg.qubits) {
            if (names[c] == "xyz-ring" && (n < 3 || n % 2 == 0)) continue;
            if (names[c] == "edge-xx" && n < 2) continue;
            APCaseReport rep;
            rep.name = names[c];
            rep.n = n;
            rep.trials = cfg.trials;
            rep.value_tol = cfg.ap_value_tol.value_or(0.0);
            const std::uint64_t case_seed = derive_seed(seed, c * 64 + static_cast<std::uint64_t>(n));
            std::vector<APReport> aps(static_cast<std::size_t>(cfg.trials));
            std::vector<char> repeats(static_cast<std::size_t>(cfg.trials));
            parallel_for(cfg.trials, cfg.threads, [&](int t) {
                Rng rng(derive_seed(case_seed, static_cast<std::uint64_t>(t)));
                const auto spec = ap_case_spectrum(cfg, names[c], n, rng);
                APTolerances tol = default_ap_tolerances(spec);
                if (cfg.ap_value_tol) tol = {*cfg.ap_value_tol, 100.0 * *cfg.ap_value_tol};
                aps[static_cast<std::size_t>(t)] = find_proper_ap(spec, 0, tol.value_tol, tol.sep_tol);
                repeats[static_cast<std::size_t>(t)] = has_repeated_values(spec, tol.value_tol) ? 1 : 0;
            });
            for (int t = 0; t < cfg.trials; ++t) {
                const bool ap3 = aps[static_cast<std::size_t>(t)].length >= 3;
                const bool rep_ = repeats[static_cast<std::size_t>(t)] != 0;
                rep.with_ap3 += ap3;
                rep.with_repeat += rep_;
                rep.with_either += (ap3 || rep_);
                rep.max_length = std::max(rep.max_length, aps[static_cast<std::size_t>(t)].length);
                if ((ap3 || rep_) && rep.flagged_seeds.size() < 16) {
                    rep.flagged_seeds.push_back(derive_seed(case_seed, static_cast<std::uint64_t>(t)));
                }
            }
            out.push_back(std::move(rep));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// cheeger

std::vector<CheegerRow> run_cheeger(const ExperimentConfig& cfg) {
    std::vector<CheegerRow> rows(static_cast<std::size_t>(cfg.trials));
    CheegerOptions opts;
    opts.tol_scale = cfg.tol_scale;
    opts.mode = cfg.bottleneck == "exhaustive" ? 1 : cfg.bottleneck == "sweep" ? 2 : 0;
    parallel_for(cfg.trials, cfg.threads, [&](int t) {
        CheegerRow row;
        row.instance = make_instance(cfg, t);
        const auto gen = build_generator(cfg, row.instance);
        const auto rep = spectral_gap_full(gen, GapOptions{false, false, 0});
        row.ergodic = !rep.gap0.ergodicity_suspect && !rep.gap0.infinite;
        row.simple_spectrum = simple(gen);
        const auto spec = eigenvalues_of(gen);
        const auto apt = default_ap_tolerances(spec);
        const int d = std::max(1, find_proper_ap(spec, 0, apt.value_tol, apt.sep_tol).length);
        try {
            row.report = cheeger_witness(gen, d, rep.gap.infinite ? 0.0 : rep.gap.value, opts);
            row.chain_ok = row.report->witness.chain_margin >= -1e-9 * cfg.tol_scale;
        } catch (const DegenerateWitnessError& e) {
            row.error = e.what();
            row.chain_ok = true;
        }
        rows[static_cast<std::size_t>(t)] = std::move(row);
    });
    return rows;
}

} // namespace davies
