#include "beckner/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "beckner/bochner.hpp"
#include "beckner/constants.hpp"
#include "beckner/dynamics.hpp"
#include "beckner/errors.hpp"
#include "beckner/fokker_planck.hpp"
#include "beckner/util.hpp"

namespace beckner {

using nlohmann::json;

namespace {

std::string short_num(double x) {
    std::ostringstream s;
    s << x;
    return s.str();
}

std::string fixed4(double x) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << x;
    return s.str();
}

class Session {
  public:
    Session(const ExperimentConfig &cfg, std::ostream &log) : cfg_(cfg), log_(log) {
        std::filesystem::create_directories(cfg.out);
        write("config.json", to_json(cfg).dump(2) + "\n");
    }

    void write(const std::string &name, const std::string &content) {
        const auto path = std::filesystem::path(cfg_.out) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + path.string());
        f << content;
        outcome_.files.push_back(path.string());
    }

    /// Logs one check and records it if it failed.
    void verdict(const std::string &label, bool ok) {
        log_ << label << ": " << (ok ? "PASS" : "FAIL") << '\n';
        if (!ok)
            outcome_.failures.push_back(label);
    }

    void report(const std::string &prefix, const Report &rep) {
        for (const auto &c : rep.checks) {
            std::ostringstream line;
            line << prefix << c.name << " residual " << format_double(c.max_residual) << " (tol "
                 << short_num(c.tolerance) << ")";
            if (!c.passed && !c.witness.empty())
                line << " at " << c.witness;
            verdict(line.str(), c.passed);
        }
    }

    std::uint64_t seed(const std::string &label) const { return derive_seed(cfg_.seed, label); }
    double tol(double fallback) const { return cfg_.tol.value_or(fallback); }
    std::ostream &log() { return log_; }

    RunOutcome finish() {
        outcome_.status = outcome_.failures.empty() ? 0 : 1;
        return outcome_;
    }

  private:
    const ExperimentConfig &cfg_;
    std::ostream &log_;
    RunOutcome outcome_;
};

void theta_surface_cmd(const ExperimentConfig &cfg, Session &s) {
    const auto grid = cfg.grid.values();
    const double tol = s.tol(1e-9);
    for (double a : cfg.alphas) {
        const auto rows = theta_surface(a, grid, grid);
        double low = 0.0, high = 0.0, ratio_min = std::numeric_limits<double>::infinity(),
               ratio_max = 0.0;
        for (const auto &r : rows) {
            low = std::max(low, r.lower_bound - r.theta);
            high = std::max(high, r.theta - r.upper_bound);
            if (r.lower_bound > 0.0) {
                ratio_min = std::min(ratio_min, r.theta / r.lower_bound);
                ratio_max = std::max(ratio_max, r.theta / r.lower_bound);
            }
        }
        const std::string name = "theta_surface_alpha_" + short_num(a) + ".csv";
        s.write(name, theta_surface_csv(rows));
        s.log() << "alpha=" << short_num(a) << ": " << rows.size() << " points -> " << name
                << ", Theta/((alpha-1)(A+B)) in [" << format_double(ratio_min) << ", "
                << format_double(ratio_max) << "]\n";
        s.verdict("alpha=" + short_num(a) + " Theta >= (alpha-1)(A+B)", low <= tol);
        s.verdict("alpha=" + short_num(a) + " Theta <= A+B", high <= tol);
    }
}

void verify_lemmas_cmd(const ExperimentConfig &cfg, Session &s) {
    json out = json::object();
    const std::vector<double> m_grid = {0.1, 0.25, 0.5, 0.75, 0.9};
    for (double a : cfg.alphas) {
        const std::string tag = "alpha=" + short_num(a);
        Report rep = verify_theta_identities(a, cfg.samples, s.seed("lemmas/identities/" + tag));
        rep.append(verify_concavity(ConvexEntropy::power(a), m_grid, cfg.samples,
                                    s.seed("lemmas/concavity/" + tag)));
        s.report(tag + " ", rep);
        out[short_num(a)] = rep.to_json();
    }
    s.write("lemmas.json", out.dump(2) + "\n");
}

void verify_bochner_cmd(const ExperimentConfig &cfg, Session &s) {
    const ModelSpec &spec = *cfg.model;
    const FiniteChain chain = build_chain(spec);
    const BochnerStructure bs = r_function(spec, chain);
    const double tol = s.tol(1e-10);
    json out;
    out["model"] = model_name(spec);
    out["states"] = chain.size();

    Report structural = check_reversibility(chain, 20, s.seed("bochner/reversibility"), tol);
    structural.append(verify_assumption(chain, bs, 20, s.seed("bochner/assumption"), tol));
    s.report("", structural);
    out["structure"] = structural.to_json();

    json per_alpha = json::object();
    for (double a : cfg.alphas) {
        const std::string tag = "alpha=" + short_num(a);
        const ConvexEntropy e = ConvexEntropy::power(a);
        const MeanFunction theta(e);
        auto rng = make_rng(s.seed("bochner/instances/" + tag), "bochner");
        std::normal_distribution<double> normal(0.0, 1.0);

        double lemma_worst = 0.0, id_worst = 0.0, prop_worst = 0.0;
        double ratio_min = std::numeric_limits<double>::infinity();
        std::string id_witness;
        for (std::size_t k = 0; k < cfg.instances; ++k) {
            const double amp = kSweepAmplitudes[k % std::size(kSweepAmplitudes)];
            const Vector rho = random_density(chain, rng, amp);
            Vector chi(rho.size()), psi(rho.size());
            for (Eigen::Index i = 0; i < rho.size(); ++i) {
                chi[i] = normal(rng);
                psi[i] = normal(rng);
            }
            const PairFunction beta = [&](std::size_t i, std::size_t j) {
                return theta(rho[i], rho[j]);
            };
            const IdentityGap gap = bochner_identity_check(chain, bs, chi, psi, beta, tol);
            lemma_worst = std::max(lemma_worst, gap.scale > 0.0 ? gap.gap / gap.scale : gap.gap);
            const PointwiseResidual id =
                identity_3id_check(chain, bs, rho, e, 200, s.seed("bochner/3id/" + tag) + k);
            if (id.max_relative > id_worst) {
                id_worst = id.max_relative;
                id_witness = id.witness;
            }
            const PropositionSides ps = proposition_sides(chain, bs, e, rho);
            prop_worst = std::max(prop_worst, (ps.rhs - ps.lhs) / std::max(std::abs(ps.lhs), 1e-300));
            ratio_min = std::min(ratio_min, ineq_ratio(chain, bs, e, rho));
        }
        json row;
        row["bochner_identity_max_relative"] = lemma_worst;
        row["pointwise_identity_max_relative"] = id_worst;
        row["proposition_max_shortfall"] = prop_worst;
        row["min_ineq_ratio"] = ratio_min;
        s.verdict(tag + " Bochner identity residual " + format_double(lemma_worst), lemma_worst <= tol);
        s.verdict(tag + " pointwise identity residual " + format_double(id_worst) +
                      (id_worst > tol && !id_witness.empty() ? " at " + id_witness : ""),
                  id_worst <= tol);
        s.verdict(tag + " curvature inequality shortfall " + format_double(prop_worst),
                  prop_worst <= 1e-9);
        try {
            const PaperConstant pc = paper_lambda(spec, a);
            row["paper_lambda"] = pc.value;
            s.verdict(tag + " min ineq_ratio " + format_double(ratio_min) + " >= " +
                          fixed4(pc.value),
                      ratio_min >= pc.value - 1e-6);
        } catch (const HypothesisError &err) {
            row["paper_lambda"] = nullptr;
            s.log() << tag << " min ineq_ratio " << format_double(ratio_min)
                    << " (no theorem constant: " << err.what() << ")\n";
        }
        per_alpha[short_num(a)] = row;
    }
    out["alpha"] = per_alpha;
    s.write("bochner_" + model_name(spec) + ".json", out.dump(2) + "\n");
}

void decay_cmd(const ExperimentConfig &cfg, Session &s) {
    const ModelSpec &spec = *cfg.model;
    const FiniteChain chain = build_chain(spec);
    const Spectrum spectrum(chain);
    const double gap = spectral_gap(chain);
    const double t_end = cfg.t_end > 0.0 ? cfg.t_end : 8.0 / gap;
    const auto times = uniform_times(t_end, cfg.samples);
    const double tol = s.tol(1e-6);

    for (double a : cfg.alphas) {
        const std::string tag = "alpha=" + short_num(a);
        const ConvexEntropy e = ConvexEntropy::power(a);
        std::optional<double> bound;
        try {
            bound = paper_lambda(spec, a).value;
        } catch (const HypothesisError &err) {
            s.log() << tag << ": no theorem constant (" << err.what() << ")\n";
        }
        auto rng = make_rng(s.seed("decay/" + tag), "starts");
        double rate_min = std::numeric_limits<double>::infinity();
        bool dirichlet_ok = true, entropy_ok = true;
        for (std::size_t k = 0; k < cfg.starts; ++k) {
            const double amp = kSweepAmplitudes[k % std::size(kSweepAmplitudes)];
            const Vector rho0 = random_density(chain, rng, amp);
            const Trajectory traj = evolve(spectrum, e, rho0, times);
            if (k == 0)
                s.write("decay_" + model_name(spec) + "_alpha_" + short_num(a) + ".csv",
                        trajectory_csv(traj));
            rate_min = std::min(rate_min, fit_decay_rate(traj, 0.0, t_end).rate);
            if (bound) {
                dirichlet_ok = dirichlet_ok && dirichlet_decay_check(traj, *bound).passed();
                entropy_ok = entropy_ok && entropy_decay_check(traj, *bound).passed();
            }
        }
        s.log() << tag << ": min instantaneous rate " << format_double(rate_min) << " over "
                << cfg.starts << " starts, 2 lambda_P = " << format_double(2.0 * gap) << '\n';
        if (bound) {
            s.verdict(tag + " rate ≥ " + fixed4(*bound), rate_min >= *bound - tol);
            s.verdict(tag + " Dirichlet form decay", dirichlet_ok);
            s.verdict(tag + " entropy decay", entropy_ok);
        }
    }
}

void constants_cmd(const ExperimentConfig &cfg, Session &s) {
    const ModelSpec &spec = *cfg.model;
    const FiniteChain chain = build_chain(spec);
    OptimizerOptions opts;
    opts.starts = cfg.starts;
    opts.seed = s.seed("constants");
    const auto rows = constants_report(chain, spec, cfg.alphas, opts, s.tol(1e-6));
    s.write("constants_" + model_name(spec) + ".csv", constants_csv(rows));
    if (!rows.empty())
        s.log() << "lambda_P = " << format_double(0.5 * rows[0].two_lambda_P)
                << ", lambda_M = " << format_double(rows[0].lambda_M)
                << ", lambda_L = " << format_double(rows[0].lambda_L) << '\n';
    for (const auto &r : rows) {
        std::ostringstream line;
        line << "alpha=" << short_num(r.alpha) << " theorem " << format_double(r.paper_bound)
             << " <= beckner " << format_double(r.beckner_hat) << " <= 2 lambda_P "
             << format_double(r.two_lambda_P);
        for (const auto &[name, value] : r.references)
            line << "; " << name << " " << format_double(value);
        s.verdict(line.str(), r.ordering_pass);
    }
}

void fokker_planck_cmd(const ExperimentConfig &cfg, Session &s) {
    const auto &base = std::get<FokkerPlanckSpec>(*cfg.model);
    json conditions = json::object();
    for (double a : cfg.alphas) {
        const std::string tag = "alpha=" + short_num(a);
        const auto rows = mesh_refinement_study(base.V, base.lambda_conv, cfg.cells, a,
                                                s.seed("fokker-planck/" + tag));
        s.write("fv_refinement_alpha_" + short_num(a) + ".csv", refinement_csv(rows));
        for (const auto &r : rows)
            s.verdict(tag + " cells=" + std::to_string(r.cells) + " fitted rate " +
                          format_double(r.fitted_rate) + " >= 2 alpha lambda_h " +
                          fixed4(r.bound),
                      r.pass);
        const auto ratios = refinement_ratios(rows, base.lambda_conv);
        for (std::size_t k = 0; k < ratios.size(); ++k)
            s.log() << tag << " (lambda - lambda_h) ratio " << rows[k].cells << "->"
                    << rows[k + 1].cells << ": " << format_double(ratios[k]) << '\n';

        json per = json::object();
        for (int n : cfg.cells) {
            FokkerPlanckSpec spec = base;
            spec.cells = n;
            const FvCondition c = fv_condition_check(spec, a);
            s.report(tag + " cells=" + std::to_string(n) + " ", c.report);
            s.log() << tag << " cells=" << n << " condition min " << format_double(c.condition_min)
                    << " (alpha lambda_h " << format_double(c.certified_rate)
                    << ", 2 alpha lambda_h " << format_double(c.stated_rate) << ")\n";
            json j = c.report.to_json();
            j["condition_min"] = c.condition_min;
            j["alpha_lambda_h"] = c.certified_rate;
            j["two_alpha_lambda_h"] = c.stated_rate;
            j["unscaled_form_violations"] = c.unscaled_form_violations;
            per[std::to_string(n)] = j;
        }
        conditions[short_num(a)] = per;
    }
    s.write("fv_conditions.json", conditions.dump(2) + "\n");
}

void export_chain_cmd(const ExperimentConfig &cfg, Session &s) {
    const FiniteChain chain = build_chain(*cfg.model);
    s.write("chain_" + model_name(*cfg.model) + ".json", chain_to_json(chain));
    s.log() << model_name(*cfg.model) << ": " << chain.size() << " states, "
            << chain.num_moves() << " moves\n";
}

} // namespace

RunOutcome run(const ExperimentConfig &cfg, std::ostream &log) {
    Session s(cfg, log);
    switch (cfg.command) {
    case Command::ThetaSurface:
        theta_surface_cmd(cfg, s);
        break;
    case Command::VerifyLemmas:
        verify_lemmas_cmd(cfg, s);
        break;
    case Command::VerifyBochner:
        verify_bochner_cmd(cfg, s);
        break;
    case Command::Decay:
        decay_cmd(cfg, s);
        break;
    case Command::Constants:
        constants_cmd(cfg, s);
        break;
    case Command::FokkerPlanck:
        fokker_planck_cmd(cfg, s);
        break;
    case Command::ExportChain:
        export_chain_cmd(cfg, s);
        break;
    }
    return s.finish();
}

} // namespace beckner
