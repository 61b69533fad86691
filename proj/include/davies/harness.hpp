// harness.hpp: experiment configuration, random instances and drivers

#pragma once

#include "davies/classical.hpp"
#include "davies/gaps.hpp"
#include "davies/generator.hpp"
#include "davies/io.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace davies {

inline constexpr int kMaxHarnessQubits = 8;

enum class OutputFormat { Json, Csv };

struct RandomModelSpec {
    std::string background{"zz"};   // "zz" (all pairs, couplings in [-1, 1]) or "none"
    char field_axis{'X'};
    double amplitude{1.0};          // field h_i uniform in [-amplitude, amplitude]
};

struct ExperimentConfig {
    std::optional<ModelSpec> model;
    std::optional<RandomModelSpec> random_model;
    GeneratorSpec generator;
    std::vector<double> betas;
    std::optional<std::uint64_t> seed;
    int trials{1};
    std::vector<int> qubits;
    double tol_scale{1.0};
    std::string out;
    OutputFormat format{OutputFormat::Json};
    int threads{0};                 // 0: hardware concurrency

    // ap-scan
    std::vector<std::string> ap_cases;
    int x_string_degree{2};
    std::vector<std::pair<int, int>> graph; // edges, 1-based sites; empty: ring
    std::optional<double> ap_value_tol;

    // verify
    std::vector<std::string> suites;
    int samples{4};                 // random observables per instance

    // cheeger
    std::string bottleneck{"auto"}; // auto | exhaustive | sweep
};

// Parses and validates; throws ConfigError.
ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& c);

// One concrete problem: Hamiltonian spec, beta and rate, with its seed.
struct Instance {
    int trial{0};
    std::uint64_t seed{0};
    int n{1};
    double beta{0.0};
    RateSpec rate;
    ModelSpec model;
};

json instance_to_json(const Instance& inst);

// All 2-local ZZ couplings (if requested) plus a random field on `axis`.
ModelSpec random_field_model(const RandomModelSpec& spec, int n, Rng& rng);

struct InstancePolicy {
    bool alternate_rates{false}; // unset rate: glauber on even trials, metropolis on odd
    bool random_beta{false};     // no betas given: beta uniform in [0, 2]
    bool mixed_models{false};    // no model given: cycle random field, uniform Z field, random Z field
};

// Trial t: n = qubits[t mod |qubits|], beta = betas[(t / |qubits|) mod |betas|].
Instance make_instance(const ExperimentConfig& cfg, int trial, const InstancePolicy& policy = {});

DaviesGenerator build_generator(const ExperimentConfig& cfg, const Instance& inst,
                                GeneratorOptions opts = {});

// Runs fn(0..count-1) on a small pool; results keep index order.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// ---------------------------------------------------------------------------

struct GapRow {
    Instance instance;
    GapReport report;
    APReport ap;
    bool consistent{false};  // min, Hermitian and superoperator gaps agree
    double wall_time{0.0};
};

std::vector<GapRow> run_gap(const ExperimentConfig& cfg);

struct ComparisonRow {
    Instance instance;
    GapValue gap;        // lambda_L
    GapValue gap0;       // lambda_{L,0}
    double lambda_cl{0.0};
    int d{1};
    double min_omega{0.0};
    double ratio{0.0};   // lambda_L / lambda_{L,0}
    bool simple_spectrum{false};
    bool ergodic{false};
    bool verdict{false};
    double classical_residual{0.0}; // |lambda_{L,0} - lambda_cl| on simple spectra
    double hermitian_residual{0.0};
    double superoperator_residual{0.0};
    double wall_time{0.0};
};

ComparisonRow compare_instance(const ExperimentConfig& cfg, const Instance& inst);
std::vector<ComparisonRow> run_comparison(const ExperimentConfig& cfg);

struct APCaseReport {
    std::string name;
    int n{0};
    int trials{0};
    int with_ap3{0};
    int with_repeat{0};
    int with_either{0};
    int max_length{0};
    double value_tol{0.0};   // 0: relative default per spectrum
    std::vector<std::uint64_t> flagged_seeds;
};

std::vector<APCaseReport> run_ap_scan(const ExperimentConfig& cfg);

struct SuiteFailure {
    Instance instance;
    double violation{0.0};
    std::string message;
};

struct SuiteResult {
    std::string name;
    int trials{0};
    int checks{0};
    double max_violation{0.0};  // worst (value past the bound) / tolerance
    std::vector<SuiteFailure> failures;
    bool passed() const noexcept { return failures.empty(); }
};

struct VerifyReport {
    std::vector<SuiteResult> suites;
    bool passed() const noexcept;
};

const std::vector<std::string>& verify_suite_names();
VerifyReport run_verify(const ExperimentConfig& cfg);

struct CheegerRow {
    Instance instance;
    bool ergodic{false};
    bool simple_spectrum{false};
    std::optional<CheegerReport> report;
    std::string error;
    bool chain_ok{false};
};

std::vector<CheegerRow> run_cheeger(const ExperimentConfig& cfg);

json gap_rows_to_json(const std::vector<GapRow>& rows);
json comparison_to_json(const std::vector<ComparisonRow>& rows);
json ap_scan_to_json(const std::vector<APCaseReport>& cases);
json verify_to_json(const VerifyReport& rep);
json cheeger_rows_to_json(const std::vector<CheegerRow>& rows);

std::string gap_rows_to_csv(const std::vector<GapRow>& rows);
std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);
std::string ap_scan_to_csv(const std::vector<APCaseReport>& cases);
std::string verify_to_csv(const VerifyReport& rep);
std::string cheeger_rows_to_csv(const std::vector<CheegerRow>& rows);

} // namespace davies
