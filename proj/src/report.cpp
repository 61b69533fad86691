// report.cpp: JSON and CSV output for harness results

#include "davies/harness.hpp"

#include <sstream>

namespace davies {

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::string gap_cell(const GapValue& g) { return g.infinite ? "+inf" : num(g.value); }

} // namespace

json gap_rows_to_json(const std::vector<GapRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json row;
        row["instance"] = instance_to_json(r.instance);
        row["gaps"] = gap_report_to_json(r.report);
        row["ap"] = ap_report_to_json(r.ap);
        row["consistent"] = r.consistent;
        row["wall_time"] = r.wall_time;
        out.push_back(row);
    }
    return out;
}

std::string gap_rows_to_csv(const std::vector<GapRow>& rows) {
    std::ostringstream os;
    os << "trial,seed,n,beta,rate,lambda_L,lambda_L0,minimizing_omega,lambda_L_hermitian,lambda_L0_hermitian,"
          "lambda_L_superoperator,ap_length,consistent,wall_time\n";
    for (const auto& r : rows) {
        const auto& g = r.report;
        os << r.instance.trial << ',' << r.instance.seed << ',' << r.instance.n << ',' << num(r.instance.beta) << ','
           << rate_kind_name(r.instance.rate.kind) << ',' << gap_cell(g.gap) << ',' << gap_cell(g.gap0) << ','
           << num(g.minimizing_omega) << ',' << (g.hermitian_gap ? gap_cell(*g.hermitian_gap) : "") << ','
           << (g.hermitian_gap0 ? gap_cell(*g.hermitian_gap0) : "") << ','
           << (g.superoperator_gap ? gap_cell(*g.superoperator_gap) : "") << ',' << r.ap.length << ','
           << (r.consistent ? "true" : "false") << ',' << num(r.wall_time) << '\n';
    }
    return os.str();
}

json comparison_to_json(const std::vector<ComparisonRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json row;
        row["seed"] = r.instance.seed;
        row["trial"] = r.instance.trial;
        row["n"] = r.instance.n;
        row["beta"] = r.instance.beta;
        row["lambda_L"] = gap_to_json(r.gap);
        row["lambda_L0"] = gap_to_json(r.gap0);
        row["lambda_cl"] = r.lambda_cl;
        row["D"] = r.d;
        row["min_omega"] = r.min_omega;
        row["ratio"] = r.ratio;
        row["simple_spectrum"] = r.simple_spectrum;
        row["ergodic"] = r.ergodic;
        row["sandwich"] = r.verdict;
        row["residuals"] = {{"classical", r.classical_residual},
                            {"hermitian", r.hermitian_residual},
                            {"superoperator", r.superoperator_residual}};
        row["model"] = model_to_json(r.instance.model);
        row["wall_time"] = r.wall_time;
        out.push_back(row);
    }
    return out;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream os;
    os << "trial,seed,n,beta,lambda_L,lambda_L0,lambda_cl,D,min_omega,ratio,simple_spectrum,ergodic,sandwich,"
          "classical_residual,hermitian_residual,superoperator_residual,wall_time\n";
    for (const auto& r : rows) {
        os << r.instance.trial << ',' << r.instance.seed << ',' << r.instance.n << ',' << num(r.instance.beta) << ','
           << gap_cell(r.gap) << ',' << gap_cell(r.gap0) << ',' << num(r.lambda_cl) << ',' << r.d << ','
           << num(r.min_omega) << ',' << num(r.ratio) << ',' << r.simple_spectrum << ',' << r.ergodic << ','
           << r.verdict << ',' << num(r.classical_residual) << ',' << num(r.hermitian_residual) << ','
           << num(r.superoperator_residual) << ',' << num(r.wall_time) << '\n';
    }
    return os.str();
}

json ap_scan_to_json(const std::vector<APCaseReport>& cases) {
    json out = json::array();
    for (const auto& c : cases) {
        json row;
        row["case"] = c.name;
        row["n"] = c.n;
        row["trials"] = c.trials;
        row["with_ap3"] = c.with_ap3;
        row["with_repeat"] = c.with_repeat;
        row["with_either"] = c.with_either;
        row["fraction"] = c.trials ? static_cast<double>(c.with_either) / c.trials : 0.0;
        row["max_length"] = c.max_length;
        if (c.value_tol > 0.0) {
            row["value_tol"] = c.value_tol;
        } else {
            row["value_tol"] = "relative";
        }
        row["flagged_seeds"] = c.flagged_seeds;
        out.push_back(row);
    }
    return out;
}

std::string ap_scan_to_csv(const std::vector<APCaseReport>& cases) {
    std::ostringstream os;
    os << "case,n,trials,with_ap3,with_repeat,with_either,max_length,value_tol\n";
    for (const auto& c : cases) {
        os << c.name << ',' << c.n << ',' << c.trials << ',' << c.with_ap3 << ',' << c.with_repeat << ','
           << c.with_either << ',' << c.max_length << ',' << (c.value_tol > 0.0 ? num(c.value_tol) : "relative")
           << '\n';
    }
    return os.str();
}

json verify_to_json(const VerifyReport& rep) {
    json out;
    out["passed"] = rep.passed();
    json suites = json::array();
    for (const auto& s : rep.suites) {
        json row;
        row["suite"] = s.name;
        row["trials"] = s.trials;
        row["checks"] = s.checks;
        row["max_violation"] = s.max_violation;
        row["passed"] = s.passed();
        json fails = json::array();
        for (const auto& f : s.failures) {
            fails.push_back({{"instance", instance_to_json(f.instance)}, {"violation", f.violation}, {"message", f.message}});
        }
        row["failures"] = fails;
        suites.push_back(row);
    }
    out["suites"] = suites;
    return out;
}

std::string verify_to_csv(const VerifyReport& rep) {
    std::ostringstream os;
    os << "suite,trials,checks,max_violation,passed,first_failure_seed\n";
    for (const auto& s : rep.suites) {
        os << s.name << ',' << s.trials << ',' << s.checks << ',' << num(s.max_violation) << ','
           << (s.passed() ? "true" : "false") << ',';
        if (!s.failures.empty()) os << s.failures.front().instance.seed;
        os << '\n';
    }
    return os.str();
}

json cheeger_rows_to_json(const std::vector<CheegerRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json row;
        row["instance"] = instance_to_json(r.instance);
        row["ergodic"] = r.ergodic;
        row["simple_spectrum"] = r.simple_spectrum;
        if (r.report) {
            row["witness"] = cheeger_report_to_json(*r.report);
        } else {
            row["error"] = r.error;
        }
        row["chain_ok"] = r.chain_ok;
        out.push_back(row);
    }
    return out;
}

std::string cheeger_rows_to_csv(const std::vector<CheegerRow>& rows) {
    std::ostringstream os;
    os << "trial,seed,n,beta,ergodic,simple_spectrum,subset_mask,phi,lambda_max,lambda_cl,D,M,lambda_L,dirichlet,"
          "variance,bound,margin,holds,chain_margin,error\n";
    for (const auto& r : rows) {
        os << r.instance.trial << ',' << r.instance.seed << ',' << r.instance.n << ',' << num(r.instance.beta) << ','
           << r.ergodic << ',' << r.simple_spectrum << ',';
        if (r.report) {
            const auto& c = *r.report;
            os << c.witness.mask << ',' << num(c.witness.phi) << ',' << num(c.witness.lambda_max) << ','
               << num(c.witness.classical_gap) << ',' << c.d << ',' << num(c.m) << ',' << num(c.lambda_l) << ','
               << num(c.dirichlet) << ',' << num(c.variance) << ',' << num(c.bound) << ',' << num(c.margin) << ','
               << c.holds << ',' << num(c.witness.chain_margin) << ",\n";
        } else {
            os << ",,,,,,,,,,,,," << '"' << r.error << '"' << '\n';
        }
    }
    return os.str();
}

} // namespace davies
