#include "beckner/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "beckner/bochner.hpp"
#include "beckner/entropy.hpp"
#include "beckner/errors.hpp"
#include "beckner/util.hpp"

namespace beckner {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0))
        throw DomainError("alpha must lie in (1,2]");
}

std::string cell_witness(std::size_t n) { return "cell " + std::to_string(n); }

/// Tracks the worst residual of a family of inequalities.
struct Worst {
    double value = 0.0;
    std::string witness;
    void update(double r, const std::string &where) {
        if (r > value) {
            value = r;
            witness = where;
        }
    }
    CheckResult result(const std::string &name, double tol) const {
        const bool ok = value <= tol;
        return {name, value, tol, ok, ok ? std::string() : witness};
    }
};

} // namespace

FvCondition fv_condition_check(const FokkerPlanckSpec &spec, double alpha) {
    require_alpha(alpha);
    if (!(spec.lambda_conv > 0.0))
        throw DomainError("the convexity constant must be positive");
    const FvDiscretization d = fv_discretize(spec.V, spec.cells);
    const std::size_t N = d.cell_pi.size();
    const auto &p = d.cell_pi;

    FvCondition out;
    out.h = d.h;
    out.lambda_h = lambda_h(d.h, spec.lambda_conv);
    out.certified_rate = alpha * out.lambda_h;
    out.stated_rate = 2.0 * alpha * out.lambda_h;
    const double lh = out.lambda_h;

    Worst log_concave;
    const double factor = 1.0 - 0.5 * d.h * d.h * lh;
    for (std::size_t n = 1; n + 1 < N; ++n) {
        const double geo = std::sqrt(p[n - 1] * p[n + 1]);
        log_concave.update((geo - factor * p[n]) / p[n], cell_witness(n));
        if ((1.0 - lh) * p[n] < geo)
            ++out.unscaled_form_violations;
    }
    out.report.add(log_concave.result("cell_log_concavity", 1e-12));

    Worst birth, death, theta_lb, condition;
    out.condition_min = std::numeric_limits<double>::infinity();
    const ConvexEntropy e = ConvexEntropy::power(alpha);
    for (std::size_t n = 0; n + 1 < N; ++n) {
        const double A = d.a[n] - d.a[n + 1];
        const double B = d.b[n + 1] - d.b[n];
        const double scale = std::max(d.a[n], d.b[n + 1]);
        const double ratio = std::sqrt(p[n + 1] / p[n]);
        birth.update((0.5 * lh * ratio - A) / scale, cell_witness(n));
        death.update((0.5 * lh / ratio - B) / scale, cell_witness(n));
        if (A < 0.0 || B < 0.0) {
            condition.update(std::numeric_limits<double>::infinity(), cell_witness(n));
            continue;
        }
        const double theta = big_theta(e, A, B).value;
        theta_lb.update(((alpha - 1.0) * (A + B) - theta) / std::max(1.0, A + B),
                        cell_witness(n));
        const double value = A + B + theta;
        if (value < out.condition_min) {
            out.condition_min = value;
            out.condition_argmin = n;
        }
        condition.update((out.certified_rate - value) / std::max(1.0, out.certified_rate),
                         cell_witness(n));
    }
    out.report.add(birth.result("birth_rate_decrease", 1e-9));
    out.report.add(death.result("death_rate_increase", 1e-9));
    out.report.add(theta_lb.result("theta_lower_bound", 1e-9));
    out.report.add(condition.result("birth_death_condition", 1e-9));
    return out;
}

std::pair<double, double> fv_beckner_sides(const FvDiscretization &d, double lambda_h,
                                           double alpha, const Vector &eps) {
    require_alpha(alpha);
    const std::size_t N = d.cell_pi.size();
    if (static_cast<std::size_t>(eps.size()) != N)
        throw DomainError("density must have one value per cell");
    const ConvexEntropy e = ConvexEntropy::power(alpha);
    // sum pi_n (rho_n^a - 1) = (a - 1) sum pi_n phi_a(rho_n) when sum h pi_n rho_n = 1.
    double ent = 0.0;
    for (std::size_t n = 0; n < N; ++n)
        ent += d.cell_pi[n] * e.phi_shifted(eps[n]);
    const double lhs = 2.0 * lambda_h * (alpha - 1.0) * ent;

    const double q = alpha - 1.0;
    double rhs = 0.0;
    for (std::size_t n = 0; n + 1 < N; ++n) {
        const double kappa = std::sqrt(d.cell_pi[n] * d.cell_pi[n + 1]);
        const double dpow =
            std::expm1(q * std::log1p(eps[n + 1])) - std::expm1(q * std::log1p(eps[n]));
        rhs += kappa / (d.h * d.h) * dpow * (eps[n + 1] - eps[n]);
    }
    return {lhs, rhs};
}

FvExperiment run_fv_experiment(const FokkerPlanckSpec &spec, double alpha, const Vector &rho0,
                               double t_end, std::size_t samples) {
    require_alpha(alpha);
    const PaperConstant pc = paper_lambda(spec, alpha); // checks V'' >= lambda
    const FiniteChain chain = build_chain(spec);
    const FvDiscretization d = fv_discretize(spec.V, spec.cells);
    require_density(chain, rho0);

    FvExperiment ex;
    ex.potential = spec.V.description();
    ex.cells = spec.cells;
    ex.h = d.h;
    ex.lambda_conv = spec.lambda_conv;
    ex.alpha = alpha;
    ex.lambda_h = lambda_h(d.h, spec.lambda_conv);
    ex.bound = pc.value;
    if (!(t_end > 0.0))
        t_end = 20.0 / ex.bound;
    ex.trajectory = evolve(chain, ConvexEntropy::power(alpha), rho0, uniform_times(t_end, samples));
    const Trajectory &traj = ex.trajectory;

    ex.stationary = !(traj.entropy_values.front() > 0.0);
    if (ex.stationary) {
        ex.report.add({"entropy_decay", 0.0, 1e-9, true, {}});
        ex.report.add({"discrete_beckner", 0.0, 1e-9, true, {}});
        return ex;
    }
    ex.report.append(entropy_decay_check(traj, ex.bound));

    Worst beckner;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto [lhs, rhs] = fv_beckner_sides(d, ex.lambda_h, alpha, traj.deviations[k]);
        if (lhs == 0.0 && rhs == 0.0)
            continue;
        beckner.update((lhs - rhs) / std::max(std::abs(rhs), std::abs(lhs)),
                       "t = " + format_double(traj.times[k]));
    }
    ex.report.add(beckner.result("discrete_beckner", 1e-9));

    // Fit while Ent is above 1e-6 of its initial value.
    const double floor = 1e-6 * traj.entropy_values.front();
    double t_cut = traj.times.front();
    for (std::size_t k = 0; k < traj.times.size() && traj.entropy_values[k] >= floor; ++k)
        t_cut = traj.times[k];
    if (t_cut <= traj.times.front())
        t_cut = traj.times[1];
    ex.fit = fit_decay_rate(traj, traj.times.front(), t_cut);
    const double shortfall = ex.bound - ex.fit.rate;
    ex.report.add({"fitted_rate", std::max(0.0, shortfall), 1e-6, shortfall <= 1e-6,
                   shortfall <= 1e-6 ? std::string()
                                     : "rate " + format_double(ex.fit.rate)});
    return ex;
}

std::vector<RefinementRow> mesh_refinement_study(const Potential &V, double lambda_conv,
                                                 const std::vector<int> &cells_list,
                                                 double alpha, std::uint64_t seed) {
    require_alpha(alpha);
    if (cells_list.empty())
        throw DomainError("cells list is empty");
    for (std::size_t k = 1; k < cells_list.size(); ++k)
        if (cells_list[k] <= cells_list[k - 1])
            throw DomainError("cells list must be increasing");

    std::vector<RefinementRow> rows(cells_list.size());
    parallel_for(rows.size(), [&](std::size_t k) {
        FokkerPlanckSpec spec{V, cells_list[k], lambda_conv};
        const FiniteChain chain = build_chain(spec);
        auto rng = make_rng(seed, "fv/cells/" + std::to_string(cells_list[k]));
        const Vector rho0 = random_density(chain, rng, 1.0);
        const FvExperiment ex = run_fv_experiment(spec, alpha, rho0);
        RefinementRow &row = rows[k];
        row.cells = cells_list[k];
        row.h = ex.h;
        row.lambda_h = ex.lambda_h;
        row.fitted_rate = ex.fit.rate;
        row.bound = ex.bound;
        row.pass = ex.report.passed();
    });
    return rows;
}

std::vector<double> refinement_ratios(const std::vector<RefinementRow> &rows,
                                      double lambda_conv) {
    std::vector<double> out;
    for (std::size_t k = 1; k < rows.size(); ++k)
        out.push_back((lambda_conv - rows[k - 1].lambda_h) / (lambda_conv - rows[k].lambda_h));
    return out;
}

std::string refinement_csv(const std::vector<RefinementRow> &rows) {
    std::ostringstream out;
    out << "h,lambda_h,fitted_rate,bound_2alpha_lambda_h,pass\n";
    for (const auto &r : rows)
        out << format_double(r.h) << ',' << format_double(r.lambda_h) << ','
            << format_double(r.fitted_rate) << ',' << format_double(r.bound) << ','
            << (r.pass ? "true" : "false") << '\n';
    return out.str();
}

} // namespace beckner
