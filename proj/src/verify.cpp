// verify.cpp: inequality and identity suites over random instances

#include "davies/errors.hpp"
#include "davies/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace davies {

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names = {
        "identity",        "divergence",  "kms",           "invariance",           "decomposition",
        "trace",           "dirichlet-comparison",         "variance-comparison",  "coherent",
        "gap-consistency", "rayleigh",    "sandwich",      "per-omega",            "classical",
        "orbit-bound",     "cheeger",
    };
    return names;
}

bool VerifyReport::passed() const noexcept {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

namespace {

constexpr std::size_t kMaxStoredFailures = 20;

struct Partial {
    bool ran{false};
    int checks{0};
    double worst{0.0};
    std::vector<SuiteFailure> failures;
};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

class Recorder {
public:
    Recorder(Partial& p, const Instance& inst) : p_(p), inst_(inst) { p_.ran = true; }

    // Passes when excess <= tol.
    void check(double excess, double tol, const std::string& what) {
        ++p_.checks;
        const double ratio = excess / tol;
        p_.worst = std::max(p_.worst, std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio);
        if (!(excess <= tol) && p_.failures.size() < kMaxStoredFailures) {
            p_.failures.push_back({inst_, ratio, what + ": excess " + fmt(excess) + " > tol " + fmt(tol)});
        }
    }

    void error(const std::string& what) {
        ++p_.checks;
        p_.worst = std::numeric_limits<double>::infinity();
        if (p_.failures.size() < kMaxStoredFailures) {
            p_.failures.push_back({inst_, std::numeric_limits<double>::infinity(), what});
        }
    }

private:
    Partial& p_;
    const Instance& inst_;
};

class Trial {
public:
    Trial(const ExperimentConfig& cfg, int t)
        : cfg_(cfg),
          inst_(make_instance(cfg, t, InstancePolicy{true, true, true})),
          gen_(build_generator(cfg, inst_, GeneratorOptions{0.0, 0.0, false, 1e-10})),
          rng_(derive_seed(inst_.seed, 0x5eed)),
          ts_(cfg.tol_scale) {}

    std::vector<Partial> run() {
        const auto& names = verify_suite_names();
        std::vector<Partial> out(names.size());
        for (std::size_t s = 0; s < names.size(); ++s) {
            if (!cfg_.suites.empty() && std::find(cfg_.suites.begin(), cfg_.suites.end(), names[s]) == cfg_.suites.end()) {
                continue;
            }
            Recorder rec(out[s], inst_);
            try {
                dispatch(names[s], rec);
            } catch (const Error& e) {
                rec.error(names[s] + ": " + e.what());
            }
        }
        return out;
    }

private:
    Eigen::Index dim() const { return gen_.dim(); }
    Operator rand_op() { return random_complex(dim(), rng_); }
    Operator rand_herm() { return random_hermitian(dim(), rng_); }

    const GapReport& gaps() {
        if (!gaps_) gaps_ = spectral_gap_full(gen_);
        return *gaps_;
    }
    const ClassicalChain& chain() {
        if (!chain_) chain_ = extract_chain(gen_);
        return *chain_;
    }
    std::vector<double> spectrum() const {
        const auto& v = gen_.levels().spectrum.values;
        return {v.data(), v.data() + v.size()};
    }
    int proper_d() const {
        const auto s = spectrum();
        const auto t = default_ap_tolerances(s);
        return std::max(1, find_proper_ap(s, 0, t.value_tol, t.sep_tol).length);
    }
    int d_omega(double omega) const {
        const auto s = spectrum();
        return std::max(1, longest_ap_with_difference(s, omega, default_ap_tolerances(s).value_tol));
    }
    bool simple_spectrum() const {
        const auto& m = gen_.levels().multiplicity;
        return std::all_of(m.begin(), m.end(), [](int k) { return k == 1; });
    }
    double jscale() const { return std::max(1.0, gen_.jump_norm_sq_sum()); }

    void dispatch(const std::string& name, Recorder& rec) {
        if (name == "identity") return identity_suite(rec);
        if (name == "divergence") return divergence_suite(rec);
        if (name == "kms") return kms_suite(rec);
        if (name == "invariance") return invariance_suite(rec);
        if (name == "decomposition") return decomposition_suite(rec);
        if (name == "trace") return trace_suite(rec);
        if (name == "dirichlet-comparison") return dirichlet_comparison_suite(rec);
        if (name == "variance-comparison") return variance_comparison_suite(rec);
        if (name == "coherent") return coherent_suite(rec);
        if (name == "gap-consistency") return gap_consistency_suite(rec);
        if (name == "rayleigh") return rayleigh_suite(rec);
        if (name == "sandwich") return sandwich_suite(rec);
        if (name == "per-omega") return per_omega_suite(rec);
        if (name == "classical") return classical_suite(rec);
        if (name == "orbit-bound") return orbit_suite(rec);
        if (name == "cheeger") return cheeger_suite(rec);
    }

    void identity_suite(Recorder& rec) {
        const Operator id = identity(dim());
        rec.check(max_abs(gen_.apply(id)), 1e-10 * gen_.scale(id) * ts_, "max |L(I)|");
        for (const auto& s : gen_.jumps()) {
            const Operator adj = s.adjoint();
            double best = std::numeric_limits<double>::infinity();
            for (const auto& t : gen_.jumps()) best = std::min(best, max_abs(t - adj));
            rec.check(best, 1e-12, "jump set closed under adjoint");
        }
    }

    void divergence_suite(Recorder& rec) {
        for (int i = 0; i < cfg_.samples; ++i) {
            const Operator f = rand_op();
            const double a = dirichlet_form(gen_, f, DirichletMethod::Definitional);
            const double b = dirichlet_form(gen_, f, DirichletMethod::Divergence);
            rec.check(std::abs(a - b), 1e-9 * gen_.scale(f) * ts_, "|E_def - E_div|");
        }
    }

    void kms_suite(Recorder& rec) {
        for (int i = 0; i < cfg_.samples; ++i) {
            const Operator f = rand_op();
            const Operator g = rand_op();
            const cplx a = kms_inner(gen_.gibbs(), gen_.apply(f), g);
            const cplx b = kms_inner(gen_.gibbs(), f, gen_.apply(g));
            rec.check(std::abs(a - b), 1e-9 * std::max(gen_.scale(f), gen_.scale(g)) * ts_, "|<Lf,g> - <f,Lg>|");
        }
    }

    void invariance_suite(Recorder& rec) {
        for (int i = 0; i < cfg_.samples; ++i) {
            const auto k = static_cast<std::size_t>(rng_.below(gen_.bohr().size()));
            const Operator f = project_component_at(rand_op(), k, gen_.levels(), gen_.bohr());
            const Operator lf = gen_.apply(f);
            const Operator back = project_component_at(lf, k, gen_.levels(), gen_.bohr());
            rec.check(max_abs(lf - back), 1e-10 * gen_.scale(f) * ts_, "L(V_omega) outside V_omega");
        }
    }

    void decomposition_suite(Recorder& rec) {
        for (int i = 0; i < cfg_.samples; ++i) {
            const Operator f = rand_op();
            double e = 0.0;
            double v = 0.0;
            for (const auto& c : decompose(f, gen_.levels(), gen_.bohr())) {
                e += dirichlet_form(gen_, c);
                v += variance(gen_.gibbs(), c);
            }
            const double tol = 1e-9 * gen_.scale(f) * ts_;
            rec.check(std::abs(dirichlet_form(gen_, f) - e), tol, "E(f) vs sum E(f_omega)");
            rec.check(std::abs(variance(gen_.gibbs(), f) - v), tol, "Var(f) vs sum Var(f_omega)");
        }
    }

    void trace_suite(Recorder& rec) {
        for (int i = 0; i < cfg_.samples; ++i) {
            const Operator a = rand_op();
            const Operator b = rand_op();
            const Operator f = rand_op();
            const double r = trace_inequality_residual(a, b, f);
            rec.check(-r, 1e-10 * std::max(1.0, f.squaredNorm()) * ts_, "trace inequality residual");
        }
    }

    void dirichlet_comparison_suite(Recorder& rec) {
        for (int i = 0; i < cfg_.samples; ++i) {
            const auto k = static_cast<std::size_t>(rng_.below(gen_.bohr().size()));
            const Operator f = project_component_at(rand_op(), k, gen_.levels(), gen_.bohr());
            if (f.norm() < 1e-12) continue;
            const auto p = hermitianize_pair(gen_, f, gen_.bohr().omegas[k]);
            const double excess = dirichlet_form(gen_, p.g) + dirichlet_form(gen_, p.h) - 2.0 * dirichlet_form(gen_, f);
            rec.check(excess, 1e-9 * gen_.scale(f) * ts_, "E(g) + E(h) - 2E(f) at omega " + fmt(p.omega));
        }
    }

    void variance_comparison_suite(Recorder& rec) {
        const auto nz = gen_.bohr().size();
        if (nz < 2) return;
        for (int i = 0; i < cfg_.samples; ++i) {
            auto k = static_cast<std::size_t>(rng_.below(nz - 1));
            if (k >= gen_.bohr().zero_index()) ++k;
            const Operator f = project_component_at(rand_op(), k, gen_.levels(), gen_.bohr());
            if (f.norm() < 1e-12) continue;
            const double w = gen_.bohr().omegas[k];
            const auto p = hermitianize_pair(gen_, f, w);
            const double c = std::max(1.0 / d_omega(w), 1.0 - std::exp(-std::abs(gen_.beta() * w)));
            const double excess = c * variance(gen_.gibbs(), f) - variance(gen_.gibbs(), p.g) - variance(gen_.gibbs(), p.h);
            rec.check(excess, 1e-9 * gen_.scale(f) * ts_, "variance comparison at omega " + fmt(w));
        }
    }

    void coherent_suite(Recorder& rec) {
        for (int i = 0; i < cfg_.samples; ++i) {
            const Operator fh = rand_herm();
            rec.check(coherent_term_check(gen_, fh).magnitude, 1e-10 * gen_.scale(fh) * ts_, "|<[H,f],f>| for Hermitian f");
            const Operator f = rand_op();
            rec.check(std::abs(coherent_term_check(gen_, f).overlap.real()), 1e-10 * gen_.scale(f) * ts_,
                      "Re <i[H,f],f>");
        }
    }

    static double gap_num(const GapValue& g) { return g.infinite ? std::numeric_limits<double>::infinity() : g.value; }

    void gap_consistency_suite(Recorder& rec) {
        const auto& r = gaps();
        auto agree = [&](const GapValue& a, const GapValue& b, const std::string& what) {
            if (a.infinite || b.infinite) {
                rec.check(a.infinite == b.infinite ? 0.0 : 1.0, 0.5, what);
                return;
            }
            rec.check(std::abs(a.value - b.value), 1e-9 * std::max(1.0, std::abs(a.value)) * ts_, what);
        };
        double min_omega = std::numeric_limits<double>::infinity();
        for (const auto& g : r.per_omega) {
            min_omega = std::min(min_omega, gap_num(g));
            if (!g.infinite) rec.check(-g.value, 1e-9 * jscale() * ts_, "generator matrix PSD");
        }
        if (std::isfinite(min_omega)) rec.check(std::abs(gap_num(r.gap) - min_omega), 1e-9 * ts_, "lambda_L = min_omega");
        if (r.hermitian_gap) agree(r.gap, *r.hermitian_gap, "lambda_L vs Hermitian gap");
        if (r.hermitian_gap0) agree(r.gap0, *r.hermitian_gap0, "lambda_L0 vs Hermitian V0 gap");
        if (r.superoperator_gap) agree(r.gap, *r.superoperator_gap, "lambda_L vs superoperator gap");
        rec.check(r.orthonormality_residual, 1e-10 * ts_, "KMS orthonormality of V_omega bases");
    }

    void rayleigh_suite(Recorder& rec) {
        const auto& r = gaps();
        if (r.gap.infinite) return;
        for (int i = 0; i < cfg_.samples; ++i) {
            const Operator f = rand_op();
            const auto q = rayleigh_quotient(gen_, f);
            if (q.infinite) continue;
            rec.check(r.gap.value - q.value, 1e-9 * std::max(1.0, r.gap.value) * ts_, "Rayleigh quotient below lambda_L");
        }
    }

    void sandwich_suite(Recorder& rec) {
        const auto& r = gaps();
        if (r.gap0.infinite) return;
        const double l = gap_num(r.gap);
        const double l0 = r.gap0.value;
        const int d = proper_d();
        rec.check(l - l0, 1e-9 * ts_, "lambda_L <= lambda_L0");
        rec.check(l0 / (2.0 * d) - l, 1e-9 * ts_, "lambda_L >= lambda_L0 / (2D), D = " + std::to_string(d));
    }

    void per_omega_suite(Recorder& rec) {
        const auto& r = gaps();
        if (r.gap0.infinite) return;
        for (std::size_t k = 0; k < r.omegas.size(); ++k) {
            if (k == gen_.bohr().zero_index() || r.per_omega[k].infinite) continue;
            const double w = r.omegas[k];
            const double c = 0.5 * std::max(1.0 / d_omega(w), 1.0 - std::exp(-std::abs(gen_.beta() * w)));
            rec.check(c * r.gap0.value - r.per_omega[k].value, 1e-9 * ts_, "lambda_omega bound at omega " + fmt(w));
        }
    }

    void classical_suite(Recorder& rec) {
        const auto& ch = chain();
        rec.check(ch.reversibility_residual, 1e-10 * jscale() * ts_, "chain reversibility");
        rec.check(ch.crosscheck_residual, 1e-9 * jscale() * ts_, "chain rates vs <L(P_j), P_i>");
        rec.check(std::abs(ch.pi.sum() - 1.0), 1e-12 * ts_, "sum pi = 1");
        const auto& r = gaps();
        const double lcl = classical_gap(ch);
        if (simple_spectrum()) {
            if (!r.gap0.infinite) rec.check(std::abs(r.gap0.value - lcl), 1e-9 * std::max(1.0, lcl) * ts_, "lambda_L0 = lambda_cl");
        } else if (!r.gap0.infinite) {
            const auto scan = scan_rotations(gen_, 8, derive_seed(inst_.seed, 0xB10C));
            rec.check(r.gap0.value - scan.min_gap, 1e-9 * std::max(1.0, scan.min_gap) * ts_,
                      "lambda_L0 <= classical gap over rotated bases");
        }
        for (int i = 0; i < cfg_.samples; ++i) {
            Eigen::VectorXd f(ch.size());
            for (Eigen::Index j = 0; j < f.size(); ++j) f(j) = rng_.normal();
            const Operator q = diagonal_observable(ch, f);
            const double tol = 1e-9 * gen_.scale(q) * ts_;
            rec.check(std::abs(variance(gen_.gibbs(), q) - classical_variance(ch, f)), tol, "Var_rho(f) = Var_pi(F)");
            rec.check(std::abs(dirichlet_form(gen_, q) - classical_dirichlet(ch, f)), tol, "E(f) = E_cl(F)");
        }
        double g_sup = 0.0;
        for (std::size_t k = 0; k < gen_.bohr().size(); ++k) g_sup = std::max(g_sup, gen_.rate_at(k));
        Operator ssd = Operator::Zero(dim(), dim());
        for (const auto& s : gen_.jumps()) ssd += s * s.adjoint();
        const double m = g_sup * spectral_norm(ssd);
        for (Eigen::Index i = 0; i < ch.size(); ++i) rec.check(ch.exit_rate(i) - m, 1e-9 * ts_, "exit rate <= M");
    }

    void orbit_suite(Recorder& rec) {
        if (!simple_spectrum()) return;
        const auto& idx = gen_.pair_index();
        std::vector<int> count(gen_.bohr().size(), 0);
        for (Eigen::Index a = 0; a < idx.rows(); ++a) {
            for (Eigen::Index b = 0; b < idx.cols(); ++b) ++count[static_cast<std::size_t>(idx(a, b))];
        }
        for (std::size_t k = 0; k < count.size(); ++k) {
            if (k != gen_.bohr().zero_index() && count[k] != 1) return;
        }
        const auto& r = gaps();
        if (r.gap.infinite) return;
        const double lcl = classical_gap(chain());
        rec.check(0.5 * lcl - r.gap.value, 1e-9 * ts_, "lambda_L >= lambda_cl / 2 (one-dimensional orbits)");
    }

    void cheeger_suite(Recorder& rec) {
        if (dim() < 2) return;
        const auto& r = gaps();
        if (r.gap.infinite) return;
        CheegerOptions opts;
        opts.tol_scale = ts_;
        const auto w = cheeger_witness(gen_, proper_d(), r.gap.value, opts);
        rec.check(-w.witness.chain_margin, 1e-9 * ts_, "Phi^2 <= 2 Lambda lambda_cl");
        rec.check(w.idempotence_residual, 1e-10 * ts_, "P^2 = P");
        rec.check(w.commutator_residual, 1e-10 * std::max(1.0, max_abs(gen_.hamiltonian().matrix())) * ts_, "[P, H] = 0");
        if (simple_spectrum()) rec.check(-w.margin, w.tol, "E(P) <= 4 sqrt(D M lambda_L) Var(P)");
    }

    const ExperimentConfig& cfg_;
    Instance inst_;
    DaviesGenerator gen_;
    Rng rng_;
    double ts_;
    std::optional<GapReport> gaps_;
    std::optional<ClassicalChain> chain_;
};

} // namespace

VerifyReport run_verify(const ExperimentConfig& cfg) {
    std::vector<std::vector<Partial>> per_trial(static_cast<std::size_t>(cfg.trials));
    parallel_for(cfg.trials, cfg.threads, [&](int t) {
        Trial trial(cfg, t);
        per_trial[static_cast<std::size_t>(t)] = trial.run();
    });
    VerifyReport rep;
    const auto& names = verify_suite_names();
    for (std::size_t s = 0; s < names.size(); ++s) {
        if (!cfg.suites.empty() && std::find(cfg.suites.begin(), cfg.suites.end(), names[s]) == cfg.suites.end()) continue;
        SuiteResult res;
        res.name = names[s];
        for (const auto& trial : per_trial) {
            const auto& p = trial[s];
            if (!p.ran || p.checks == 0) continue;
            ++res.trials;
            res.checks += p.checks;
            res.max_violation = std::max(res.max_violation, p.worst);
            for (const auto& f : p.failures) {
                if (res.failures.size() < kMaxStoredFailures) res.failures.push_back(f);
            }
        }
        rep.suites.push_back(std::move(res));
    }
    return rep;
}

} // namespace davies
