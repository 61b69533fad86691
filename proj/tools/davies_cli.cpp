// davies: command-line driver for gap, compare, ap-scan, cheeger and verify runs
//
// Exit codes: 0 pass, 1 violation, 2 configuration error.

#include "davies/errors.hpp"
#include "davies/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace davies;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    std::optional<double> tol_scale;
    std::optional<int> threads;
};

ExperimentConfig load(const std::string& path, const Overrides& ov) {
    ExperimentConfig cfg = config_from_json(read_json_file(path));
    if (ov.seed) cfg.seed = ov.seed;
    if (!ov.out.empty()) cfg.out = ov.out;
    if (ov.format == "json") cfg.format = OutputFormat::Json;
    if (ov.format == "csv") cfg.format = OutputFormat::Csv;
    if (ov.tol_scale) {
        if (!(*ov.tol_scale > 0.0)) throw ConfigError("--tol-scale must be positive");
        cfg.tol_scale = *ov.tol_scale;
    }
    if (ov.threads) cfg.threads = *ov.threads;
    return cfg;
}

void emit(const ExperimentConfig& cfg, const json& j, const std::string& csv) {
    const std::string text = cfg.format == OutputFormat::Json ? j.dump(2) + "\n" : csv;
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out);
    if (!f) throw ConfigError("cannot write " + cfg.out);
    f << text;
}

int cmd_gap(const ExperimentConfig& cfg) {
    const auto rows = run_gap(cfg);
    emit(cfg, gap_rows_to_json(rows), gap_rows_to_csv(rows));
    int bad = 0;
    for (const auto& r : rows) bad += !r.consistent;
    std::cerr << "gap: " << rows.size() << " instances, " << bad << " inconsistent\n";
    return bad ? 1 : 0;
}

int cmd_compare(const ExperimentConfig& cfg) {
    const auto rows = run_comparison(cfg);
    emit(cfg, comparison_to_json(rows), comparison_to_csv(rows));
    int bad = 0;
    int ergodic = 0;
    for (const auto& r : rows) {
        ergodic += r.ergodic;
        bad += r.ergodic && !r.verdict;
    }
    std::cerr << "compare: " << rows.size() << " instances, " << ergodic << " ergodic, " << bad
              << " sandwich violations\n";
    return bad ? 1 : 0;
}

int cmd_ap_scan(const ExperimentConfig& cfg) {
    const auto cases = run_ap_scan(cfg);
    emit(cfg, ap_scan_to_json(cases), ap_scan_to_csv(cases));
    for (const auto& c : cases) {
        std::cerr << "ap-scan: " << c.name << " n=" << c.n << " " << c.with_either << "/" << c.trials
                  << " with a 3-AP or repeated eigenvalue\n";
    }
    return 0;
}

int cmd_cheeger(const ExperimentConfig& cfg) {
    const auto rows = run_cheeger(cfg);
    emit(cfg, cheeger_rows_to_json(rows), cheeger_rows_to_csv(rows));
    int bad = 0;
    for (const auto& r : rows) {
        bool ok = r.chain_ok;
        if (r.report) {
            ok = ok && r.report->idempotence_residual <= 1e-10 && r.report->commutator_residual <= 1e-10;
            if (r.ergodic && r.simple_spectrum) ok = ok && r.report->holds;
        }
        bad += !ok;
    }
    std::cerr << "cheeger: " << rows.size() << " instances, " << bad << " violations\n";
    return bad ? 1 : 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
    const auto rep = run_verify(cfg);
    emit(cfg, verify_to_json(rep), verify_to_csv(rep));
    for (const auto& s : rep.suites) {
        std::cerr << (s.passed() ? "PASS " : "FAIL ") << s.name << " (" << s.checks << " checks, max violation "
                  << s.max_violation << ")\n";
        if (!s.passed()) std::cerr << "  first failure: seed " << s.failures.front().instance.seed << ": "
                                   << s.failures.front().message << "\n";
    }
    return rep.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Davies generator gap and comparison experiments"};
    app.require_subcommand(1);
    Overrides ov;
    std::string config;
    std::uint64_t seed = 0;
    double tol_scale = 1.0;
    int threads = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "random seed (overrides config)");
        sub->add_option("--out", ov.out, "output path (default stdout)");
        sub->add_option("--format", ov.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--tol-scale", tol_scale, "multiply every tolerance");
        sub->add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    };
    auto* gap = app.add_subcommand("gap", "spectral gaps of each instance");
    auto* compare = app.add_subcommand("compare", "quantum vs classical gap comparison");
    auto* ap = app.add_subcommand("ap-scan", "arithmetic progressions in random spectra");
    auto* cheeger = app.add_subcommand("cheeger", "Cheeger projection witnesses");
    auto* verify = app.add_subcommand("verify", "inequality and identity suites");
    for (auto* s : {gap, compare, ap, cheeger, verify}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* used = app.get_subcommands().front();
        if (used->count("--seed")) ov.seed = seed;
        if (used->count("--tol-scale")) ov.tol_scale = tol_scale;
        if (used->count("--threads")) ov.threads = threads;
        const auto cfg = load(config, ov);
        if (used == gap) return cmd_gap(cfg);
        if (used == compare) return cmd_compare(cfg);
        if (used == ap) return cmd_ap_scan(cfg);
        if (used == cheeger) return cmd_cheeger(cfg);
        return cmd_verify(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownFrequencyError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
