// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "beckner/bochner.hpp"
#include "beckner/chain.hpp"
#include "beckner/constants.hpp"
#include "beckner/dynamics.hpp"
#include "beckner/entropy.hpp"
#include "beckner/errors.hpp"
#include "beckner/fokker_planck.hpp"
#include "beckner/models.hpp"
#include "beckner/util.hpp"
#include "oracles.hpp"

using namespace beckner;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Collects failures and a short summary for one criterion.
class Tally {
  public:
    void require(bool ok, const std::string &what) {
        if (!ok && first_failure_.empty())
            first_failure_ = what;
        pass_ = pass_ && ok;
    }
    void note(const std::string &s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
    Outcome outcome() const {
        return {pass_, first_failure_.empty() ? notes_ : "first failure: " + first_failure_ + "; " + notes_};
    }

  private:
    bool pass_ = true;
    std::string first_failure_;
    std::string notes_;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

struct Model {
    ModelSpec spec;
    FiniteChain chain;
    BochnerStructure bs;
    explicit Model(ModelSpec s) : spec(std::move(s)), chain(build_chain(spec)), bs(r_function(spec, chain)) {}
    std::string name() const { return model_name(spec) + "(" + std::to_string(chain.size()) + ")"; }
};

// Sizes used by the exactness criteria.
std::vector<ModelSpec> exactness_specs() {
    return {birth_death_linear(12), zero_range_linear(3, 3, 1.0), bernoulli_laplace_homogeneous(5, 2, 1.0),
            RandomTranspositionSpec{4}};
}

// Models with a closed-form decay constant.
std::vector<ModelSpec> constant_specs() {
    return {zero_range_linear(3, 3, 1.0), bernoulli_laplace_homogeneous(5, 2, 1.0), RandomTranspositionSpec{3},
            RandomTranspositionSpec{4}, birth_death_linear(8)};
}

Vector gaussian(std::size_t n, Rng &rng) {
    std::normal_distribution<double> g;
    Vector v(static_cast<Eigen::Index>(n));
    for (auto &x : v)
        x = g(rng);
    return v;
}

double amplitude(std::size_t k) { return kSweepAmplitudes[k % std::size(kSweepAmplitudes)]; }

Matrix oracle_generator(const ModelSpec &spec, const FiniteChain &c) {
    return std::visit(
        [&](const auto &s) -> Matrix {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BirthDeathSpec>)
                return oracle::birth_death_generator(c, s.a, s.b);
            else if constexpr (std::is_same_v<T, ZeroRangeSpec>)
                return oracle::zero_range_generator(c, s.rates);
            else if constexpr (std::is_same_v<T, BernoulliLaplaceSpec>)
                return oracle::bernoulli_laplace_generator(c, s.lambda);
            else if constexpr (std::is_same_v<T, RandomTranspositionSpec>)
                return oracle::random_transposition_generator(c, s.n);
            else
                throw DomainError("no dense oracle for this model");
        },
        spec);
}

Outcome theta_bounds() {
    Tally t;
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k)
        grid.push_back(0.5 * k);
    double worst_low = 0.0, worst_high = 0.0, worst_quad = 0.0;
    double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = 0.0;
    for (double alpha : {1.01, 1.5, 1.8, 2.0}) {
        const auto rows = theta_surface(alpha, grid, grid);
        for (const auto &r : rows) {
            const double low = (alpha - 1.0) * (r.A + r.B) - r.theta;
            const double high = r.theta - (r.A + r.B);
            worst_low = std::max(worst_low, low);
            worst_high = std::max(worst_high, high);
            const std::string at = "alpha " + fmt(alpha) + " A " + fmt(r.A) + " B " + fmt(r.B);
            t.require(low <= 1e-9, "lower bound at " + at);
            t.require(high <= 1e-9, "upper bound at " + at);
            if (alpha == 2.0) {
                worst_quad = std::max(worst_quad, std::abs(r.theta - (r.A + r.B)));
                t.require(std::abs(r.theta - (r.A + r.B)) <= 1e-9, "quadratic value at " + at);
            }
            if (alpha == 1.01 && r.A + r.B > 0.0) {
                // The floor is reached on the axes; inside, Theta stays close to A+B.
                ratio_min = std::min(ratio_min, r.theta / (0.01 * (r.A + r.B)));
                ratio_max = std::max(ratio_max, r.theta / (0.01 * (r.A + r.B)));
            }
        }
    }
    t.note("max lower-bound excess " + fmt(worst_low) + ", upper " + fmt(worst_high) + ", |Theta-(A+B)| at 2 " +
           fmt(worst_quad) + ", Theta/((a-1)(A+B)) at 1.01 in [" + fmt(ratio_min) + ", " +
           fmt(ratio_max) + "]");
    return t.outcome();
}

Outcome theta_identities() {
    Tally t;
    for (double alpha : {1.1, 1.5, 1.9}) {
        const Report r = verify_theta_identities(alpha, 10000, 42);
        for (const auto &c : r.checks)
            t.require(c.passed, "alpha " + fmt(alpha) + " " + c.name + " " + c.witness);
        double worst = 0.0;
        for (const auto &c : r.checks)
            worst = std::max(worst, c.max_residual);
        t.note("alpha " + fmt(alpha) + " worst residual " + fmt(worst));
    }
    return t.outcome();
}

Outcome bochner_exactness() {
    Tally t;
    for (const auto &s : exactness_specs()) {
        const Model m(s);
        auto rng = make_rng(3, "acceptance/bochner/" + m.name());
        const std::size_t S = m.chain.size();
        double worst_lemma = 0.0, worst_3id = 0.0;
        for (std::size_t k = 0; k < 100; ++k) {
            const double alpha = std::array{1.1, 1.5, 2.0}[k % 3];
            const Vector rho = random_density(m.chain, rng, amplitude(k));
            const MeanFunction th(ConvexEntropy::power(alpha));
            const PairFunction beta = [&](std::size_t i, std::size_t j) { return th(rho[i], rho[j]); };
            const auto gap = bochner_identity_check(m.chain, m.bs, gaussian(S, rng), gaussian(S, rng), beta);
            const double rel = gap.scale > 0.0 ? gap.gap / gap.scale : gap.gap;
            worst_lemma = std::max(worst_lemma, rel);
            t.require(rel <= 1e-10, m.name() + " identity instance " + std::to_string(k));

            const auto e = k % 4 == 3 ? ConvexEntropy::log() : ConvexEntropy::power(alpha);
            const auto p = identity_3id_check(m.chain, m.bs, rho, e, 20, k);
            worst_3id = std::max(worst_3id, p.max_relative);
            t.require(p.max_relative <= 1e-10, m.name() + " pointwise instance " + std::to_string(k) + " " + p.witness);
        }
        t.note(m.name() + " " + fmt(worst_lemma) + "/" + fmt(worst_3id));
    }
    return t.outcome();
}

Outcome proposition() {
    Tally t;
    for (const auto &s : exactness_specs()) {
        const Model m(s);
        auto rng = make_rng(4, "acceptance/proposition/" + m.name());
        double worst = 0.0;
        for (double alpha : {1.1, 1.5, 2.0}) {
            const auto e = ConvexEntropy::power(alpha);
            for (std::size_t k = 0; k < 1000; ++k) {
                const auto p = proposition_sides(m.chain, m.bs, e, random_density(m.chain, rng, amplitude(k)));
                const double deficit = (p.rhs - p.lhs) / std::max(std::abs(p.lhs), 1e-300);
                worst = std::max(worst, deficit);
                t.require(p.lhs - p.rhs >= -1e-9 * std::abs(p.lhs),
                          m.name() + " alpha " + fmt(alpha) + " sample " + std::to_string(k));
            }
        }
        t.note(m.name() + " worst relative deficit " + fmt(worst));
    }
    return t.outcome();
}

Outcome paper_constants() {
    Tally t;
    for (const auto &s : constant_specs()) {
        const Model m(s);
        auto rng = make_rng(5, "acceptance/ratio/" + m.name());
        for (double alpha : {1.1, 1.5, 2.0}) {
            const double bound = paper_lambda(s, alpha).value;
            const auto e = ConvexEntropy::power(alpha);
            double lo = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < 1000; ++k)
                lo = std::min(lo, ineq_ratio(m.chain, m.bs, e, random_density(m.chain, rng, amplitude(k))));
            t.require(lo >= bound - 1e-6, m.name() + " alpha " + fmt(alpha) + " min " + fmt(lo) + " < " + fmt(bound));
            if (alpha == 1.5)
                t.note(m.name() + " min " + fmt(lo) + " >= " + fmt(bound));
        }
    }
    return t.outcome();
}

Outcome decay_rates() {
    Tally t;
    for (const auto &s : constant_specs()) {
        const Model m(s);
        const Spectrum sp(m.chain);
        const double t_end = 8.0 / spectral_gap(m.chain);
        const auto times = uniform_times(t_end, 161);
        auto rng = make_rng(6, "acceptance/decay/" + m.name());
        for (double alpha : {1.1, 1.5, 2.0}) {
            const double bound = paper_lambda(s, alpha).value;
            const auto e = ConvexEntropy::power(alpha);
            double inf_rate = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < 20; ++k) {
                const auto traj = evolve(sp, e, random_density(m.chain, rng, amplitude(k)), times);
                inf_rate = std::min(inf_rate, fit_decay_rate(traj, 0.0, t_end).rate);
                const Report d = dirichlet_decay_check(traj, bound);
                t.require(d.passed(), m.name() + " alpha " + fmt(alpha) + " Dirichlet decay start " + std::to_string(k));
            }
            t.require(inf_rate >= bound - 1e-6,
                      m.name() + " alpha " + fmt(alpha) + " rate " + fmt(inf_rate) + " < " + fmt(bound));
            if (alpha == 1.5)
                t.note(m.name() + " inf rate " + fmt(inf_rate) + " >= " + fmt(bound));
        }
    }
    return t.outcome();
}

Outcome constant_relations() {
    Tally t;
    OptimizerOptions opts;
    opts.seed = 7;
    for (const auto &s : constant_specs()) {
        const Model m(s);
        const double two_p = 2.0 * spectral_gap(m.chain);
        const double b2 = beckner_constant(m.chain, 2.0, opts).value;
        t.require(std::abs(b2 - two_p) <= 1e-6 * two_p, m.name() + " Beckner(2) " + fmt(b2) + " vs " + fmt(two_p));
        for (double alpha : {1.1, 1.5, 1.9}) {
            const double b = beckner_constant(m.chain, alpha, opts).value;
            t.require(b <= two_p + 1e-6, m.name() + " Beckner(" + fmt(alpha) + ") above 2 lambda_P");
        }
        const double lm = mlsi_constant(m.chain, opts).value;
        const double ll = lsi_constant(m.chain, opts).value;
        t.require(4.0 * ll <= lm + 1e-6, m.name() + " 4 lambda_L > lambda_M");
        t.require(lm <= two_p + 1e-6, m.name() + " lambda_M > 2 lambda_P");
        const double bl = beckner_constant(m.chain, 1.0 + 1e-4, opts).value;
        const double rel = std::abs(bl - lm) / lm;
        t.require(rel <= 1e-2, m.name() + " Beckner near 1 vs lambda_M off by " + fmt(rel));
        t.note(m.name() + " 2lP " + fmt(two_p) + " lM " + fmt(lm) + " 4lL " + fmt(4.0 * ll));
    }
    return t.outcome();
}

Outcome fokker_planck() {
    Tally t;
    const Potential V = Potential::quadratic(2.0);
    const std::vector<int> cells = {8, 16, 32, 64};
    std::vector<double> lh;
    for (int n : cells)
        lh.push_back(lambda_h(1.0 / n, 4.0));
    for (std::size_t k = 1; k < lh.size(); ++k) {
        t.require(lh[k] > lh[k - 1], "lambda_h not increasing at " + std::to_string(cells[k]));
        const double r = (4.0 - lh[k - 1]) / (4.0 - lh[k]);
        t.require(r >= 3.5 && r <= 4.5, "refinement ratio " + fmt(r) + " at " + std::to_string(cells[k]));
        t.note("ratio " + fmt(r));
    }
    for (double alpha : {1.5, 2.0})
        for (int n : cells) {
            const FokkerPlanckSpec spec{V, n, 4.0};
            const std::string at = "alpha " + fmt(alpha) + " cells " + std::to_string(n);
            const FvCondition cond = fv_condition_check(spec, alpha);
            t.require(cond.report.passed(), "condition " + at);
            t.require(std::abs(cond.lambda_h - lambda_h(1.0 / n, 4.0)) <= 1e-12 * cond.lambda_h, "mesh width " + at);
            const FiniteChain chain = build_chain(spec);
            auto rng = make_rng(8, "acceptance/fv/" + std::to_string(n));
            for (std::size_t k = 0; k < 3; ++k) {
                const auto ex = run_fv_experiment(spec, alpha, random_density(chain, rng, amplitude(k)));
                for (const auto &c : ex.report.checks)
                    t.require(c.passed, c.name + " " + at + " " + c.witness);
                if (k == 1 && n == 32)
                    t.note(at + " fitted " + fmt(ex.fit.rate) + " >= " + fmt(ex.bound));
            }
        }
    return t.outcome();
}

double rel_err(double got, double ref) { return std::abs(got - ref) / std::max(1.0, std::abs(ref)); }

Outcome oracle_equivalences() {
    Tally t;
    double worst_dense = 0.0, worst_rk4 = 0.0, worst_gap = 0.0;
    for (const auto &s : constant_specs()) {
        const Model m(s);
        const auto &c = m.chain;
        const Matrix Q = oracle_generator(s, c);
        const Vector pi = oracle::stationary(Q);
        auto rng = make_rng(9, "acceptance/oracle/" + m.name());
        const std::size_t S = c.size();

        worst_dense = std::max(worst_dense, (dense_generator(c) - Q).cwiseAbs().maxCoeff() / c.max_rate());
        worst_dense = std::max(worst_dense, (c.pi() - pi).cwiseAbs().maxCoeff());
        for (std::size_t k = 0; k < 10; ++k) {
            const Vector f = gaussian(S, rng), g = gaussian(S, rng);
            worst_dense = std::max(worst_dense, (generator_apply(c, f) - Q * f).cwiseAbs().maxCoeff() / c.max_rate());
            worst_dense = std::max(worst_dense, rel_err(dirichlet_form(c, f, g), oracle::dirichlet(Q, pi, f, g)));
            const Vector rho = random_density(c, rng, amplitude(k));
            worst_dense = std::max(worst_dense, rel_err(entropy(c, ConvexEntropy::power(1.5), rho),
                                                        oracle::sum_entropy(pi, rho, [](double x) {
                                                            return oracle::phi_power(1.5, x);
                                                        })));
            worst_dense = std::max(worst_dense,
                                   rel_err(entropy(c, ConvexEntropy::log(), rho), oracle::sum_entropy(pi, rho, oracle::phi_log)));
        }

        const Vector rho0 = random_density(c, rng, 1.0);
        const double dt = std::min(1e-4, 1.0 / (4.0 * (-Q.diagonal()).maxCoeff()));
        const Vector ref = oracle::rk4(Q, rho0, 0.5, dt);
        worst_rk4 = std::max(worst_rk4, (Spectrum(c).evolve(rho0, 0.5) - ref).cwiseAbs().maxCoeff());

        const double gap = spectral_gap(c);
        const double g1 = oracle::first_positive(oracle::general_spectrum(Q));
        const double g2 = oracle::first_positive(oracle::generalized_spectrum(Q, pi));
        worst_gap = std::max({worst_gap, std::abs(gap - g1) / gap, std::abs(gap - g2) / gap});
    }
    double worst_erf = 0.0;
    for (double s : {0.05, 0.3, 1.0, 2.0, 3.5})
        worst_erf = std::max(worst_erf, std::abs(beckner::erf(s) - oracle::simpson_erf(s)));
    t.require(worst_dense <= 1e-10, "dense/direct " + fmt(worst_dense));
    t.require(worst_rk4 <= 1e-8, "RK4 " + fmt(worst_rk4));
    t.require(worst_erf <= 1e-10, "erf " + fmt(worst_erf));
    t.require(worst_gap <= 1e-8, "spectral gap " + fmt(worst_gap));
    t.note("dense " + fmt(worst_dense) + ", RK4 " + fmt(worst_rk4) + ", erf " + fmt(worst_erf) + ", gap " +
           fmt(worst_gap));
    return t.outcome();
}

/// Name and witness of the first failed check, empty if everything passed.
std::string first_failed(const Report &r) {
    for (const auto &c : r.checks)
        if (!c.passed)
            return c.name + " at " + c.witness;
    return {};
}

Outcome negative_controls() {
    Tally t;
    // Perturbed R on a moving, off-diagonal triple.
    const Model zr(zero_range_linear(3, 3, 1.0));
    const RTriple *pick = nullptr;
    for (const auto &tr : zr.bs.row(4))
        if (zr.chain.target(4, tr.gamma) != 4 && tr.gamma != tr.delta) {
            pick = &tr;
            break;
        }
    t.require(pick != nullptr, "no perturbable triple");
    if (pick) {
        const Report r = verify_assumption(zr.chain, zr.bs.perturbed(4, pick->gamma, pick->delta, 1.5), 20, 3);
        bool adjoint = false;
        for (const auto &c : r.checks)
            adjoint = adjoint || (!c.passed && c.name.find("adjoint") != std::string::npos && !c.witness.empty());
        t.require(adjoint, "perturbed R not caught by the adjointness check");
        t.note("perturbed R: " + first_failed(r));
    }

    // Decay checks at ten times the true rate.
    const Model bd(birth_death_linear(8));
    auto rng = make_rng(10, "acceptance/negative");
    const auto e = ConvexEntropy::power(1.5);
    const double lam = paper_lambda(bd.spec, 1.5).value;
    const auto traj = evolve(bd.chain, e, random_density(bd.chain, rng, 1.0), uniform_times(4.0, 81));
    const Report dd = dirichlet_decay_check(traj, 10.0 * lam);
    const Report ed = entropy_decay_check(traj, 10.0 * lam);
    t.require(!dd.passed() && !first_failed(dd).empty(), "inflated rate passes Dirichlet decay");
    t.require(!ed.passed() && !first_failed(ed).empty(), "inflated rate passes entropy decay");
    t.note("inflated rate: " + first_failed(ed));

    // Concave potential.
    const FokkerPlanckSpec concave{Potential::quadratic(-1.0), 16, 4.0};
    const FvCondition cond = fv_condition_check(concave, 1.5);
    const std::string w = first_failed(cond.report);
    t.require(!cond.report.passed() && w.find("cell ") != std::string::npos, "concave potential not rejected");
    t.note("concave V: " + w);
    return t.outcome();
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"theta bounds", theta_bounds},
        {"theta identities", theta_identities},
        {"Bochner exactness", bochner_exactness},
        {"proposition inequality", proposition},
        {"theorem constants are lower bounds", paper_constants},
        {"decay rates", decay_rates},
        {"constant relations", constant_relations},
        {"Fokker-Planck finite volumes", fokker_planck},
        {"oracle equivalences", oracle_equivalences},
        {"negative controls", negative_controls},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception &ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %zu %s: %s (%.1f s) %s\n", k + 1, criteria[k].first.c_str(), o.pass ? "PASS" : "FAIL",
                    secs, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
