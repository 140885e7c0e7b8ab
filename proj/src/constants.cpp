#include "beckner/constants.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "beckner/bochner.hpp"
#include "beckner/dynamics.hpp"
#include "beckner/errors.hpp"
#include "beckner/util.hpp"

namespace beckner {

std::string to_string(FunctionalKind kind) {
    switch (kind) {
    case FunctionalKind::Poincare:
        return "poincare";
    case FunctionalKind::ModifiedLogSobolev:
        return "modified_log_sobolev";
    case FunctionalKind::LogSobolev:
        return "log_sobolev";
    case FunctionalKind::Beckner:
        return "beckner";
    }
    return "unknown";
}

std::string to_string(EstimateMethod method) {
    return method == EstimateMethod::Spectral ? "spectral" : "multistart_gradient";
}

double spectral_gap(const FiniteChain &chain) {
    if (chain.size() < 2)
        throw DegenerateInputError("a single-state chain has no spectral gap");
    const Spectrum spec(chain);
    const double gap = spec.rates()[1];
    if (!(gap > 1e-12 * std::max(1.0, chain.max_rate())))
        throw DegenerateInputError("chain is reducible: the eigenvalue 0 of -L is not simple");
    return gap;
}

Vector gap_eigenfunction(const FiniteChain &chain) {
    spectral_gap(chain);
    const Spectrum spec(chain);
    Vector f = spec.eigenfunction(1);
    // Fix the sign so results do not depend on the eigensolver.
    Eigen::Index k;
    f.cwiseAbs().maxCoeff(&k);
    if (f[k] < 0.0)
        f = -f;
    return f;
}

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0))
        throw DomainError("alpha must lie in (1,2]");
}

ConvexEntropy entropy_for(FunctionalKind kind, double alpha) {
    switch (kind) {
    case FunctionalKind::Beckner:
        return ConvexEntropy::power(alpha);
    case FunctionalKind::Poincare:
        return ConvexEntropy::quadratic();
    default:
        return ConvexEntropy::log();
    }
}

/// Q and its gradient in the log-density parameter u, where
/// rho = exp(u) / pi[exp(u)]. Everything is carried as eps = rho - 1.
class Objective {
  public:
    Objective(const FiniteChain &chain, FunctionalKind kind, double alpha)
        : chain_(chain), kind_(kind), e_(entropy_for(kind, alpha)) {}

    /// Deviation of the normalized density; false on overflow.
    bool deviation(const Vector &u, Vector &eps) const {
        const Vector &pi = chain_.pi();
        const double mean = pi.dot(u);
        const Vector v = u.array() - mean;
        if (v.maxCoeff() > 600.0)
            return false;
        double s = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            s += pi[i] * std::expm1(v[i]);
        const double logZ = std::log1p(s);
        eps.resize(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            eps[i] = std::expm1(v[i] - logZ);
        return 1.0 + eps.minCoeff() >= kDensityFloor;
    }

    bool evaluate(const Vector &u, double &q, Vector *grad) const {
        Vector eps;
        if (!deviation(u, eps))
            return false;
        return evaluate_deviation(eps, q, grad);
    }

    bool evaluate_deviation(const Vector &eps, double &q, Vector *grad) const {
        const Vector &pi = chain_.pi();
        const Eigen::Index S = eps.size();
        const double D = entropy_dev(chain_, e_, eps);
        if (!(D > 0.0) || !std::isfinite(D))
            return false;
        double N = 0.0;
        Vector dN(S);
        if (kind_ == FunctionalKind::LogSobolev) {
            Vector w(S), root(S);
            for (Eigen::Index i = 0; i < S; ++i) {
                root[i] = std::sqrt(1.0 + eps[i]);
                w[i] = eps[i] / (1.0 + root[i]);
            }
            N = dirichlet_form_fast(chain_, w, w);
            if (grad) {
                const Vector Lw = generator_apply(chain_, w);
                for (Eigen::Index i = 0; i < S; ++i)
                    dN[i] = -pi[i] * Lw[i] / root[i];
            }
        } else {
            N = production_dev(chain_, e_, eps);
            if (grad) {
                Vector psi(S);
                for (Eigen::Index i = 0; i < S; ++i)
                    psi[i] = e_.d1_shifted(eps[i]);
                const Vector Lpsi = generator_apply(chain_, psi);
                const Vector Lrho = generator_apply(chain_, eps);
                for (Eigen::Index i = 0; i < S; ++i)
                    dN[i] = -pi[i] * (e_.d2(1.0 + eps[i]) * Lrho[i] + Lpsi[i]);
            }
        }
        q = N / D;
        if (!std::isfinite(q))
            return false;
        if (grad) {
            Vector g(S);
            for (Eigen::Index i = 0; i < S; ++i)
                g[i] = (dN[i] - q * pi[i] * e_.d1_shifted(eps[i])) / D;
            const Vector rho = eps.array() + 1.0;
            const double proj = g.dot(rho);
            grad->resize(S);
            for (Eigen::Index i = 0; i < S; ++i)
                (*grad)[i] = rho[i] * g[i] - pi[i] * rho[i] * proj;
        }
        return true;
    }

    const FiniteChain &chain() const { return chain_; }

  private:
    const FiniteChain &chain_;
    FunctionalKind kind_;
    ConvexEntropy e_;
};

struct StartResult {
    double value = std::numeric_limits<double>::infinity();
    Vector u;
    std::size_t iterations = 0;
    double gradient_norm = std::numeric_limits<double>::infinity();
    bool converged = false;
    std::string label;
};

double pi_norm(const Vector &pi, const Vector &x) { return std::sqrt(pi.dot(x.cwiseAbs2())); }

/// Dimensionless stationarity measure |grad|_{pi^-1} * |u - pi[u]|_pi / Q.
double stationarity(const Vector &pi, const Vector &u, const Vector &grad, double q) {
    const double gn = std::sqrt(grad.cwiseAbs2().cwiseQuotient(pi).sum());
    const double amp = pi_norm(pi, u.array() - pi.dot(u));
    return gn * amp / std::max(q, 1e-300);
}

StartResult descend(const Objective &obj, Vector u, std::string label,
                    const OptimizerOptions &opts) {
    const Vector &pi = obj.chain().pi();
    StartResult out;
    out.label = std::move(label);
    double q;
    Vector grad;
    if (!obj.evaluate(u, q, &grad))
        return out;

    constexpr std::size_t kStallWindow = 200;
    std::deque<double> history;
    Vector u_prev, grad_prev;
    double step = 0.0;
    std::size_t it = 0;
    for (; it < opts.max_iter; ++it) {
        const double amp = pi_norm(pi, u.array() - pi.dot(u));
        out.gradient_norm = stationarity(pi, u, grad, q);
        if (out.gradient_norm <= opts.tol || amp < 1e-9) {
            out.converged = true;
            break;
        }
        history.push_back(q);
        if (history.size() > kStallWindow) {
            history.pop_front();
            if (history.front() - q <= 1e-14 * q) {
                out.converged = true;
                break;
            }
        }
        const Vector d = -grad.cwiseQuotient(pi);
        const double slope = grad.dot(d);
        if (it == 0) {
            step = 0.1 * std::max(amp, 1e-3) / pi_norm(pi, d);
        } else if (u_prev.size() == 0) {
            // step was reset after a radial move
        } else {
            const Vector s = u - u_prev, y = grad - grad_prev;
            const double sy = s.dot(y);
            step = sy > 0.0 ? pi.dot(s.cwiseAbs2()) / sy : 2.0 * step;
        }
        // Keep a single step from moving u by more than a few units.
        step = std::min(step, 4.0 / std::max(d.cwiseAbs().maxCoeff(), 1e-300));

        bool accepted = false;
        double q_new = q;
        Vector grad_new, u_new;
        for (int k = 0; k < 60; ++k, step *= 0.5) {
            u_new = u + step * d;
            if (obj.evaluate(u_new, q_new, nullptr) && q_new <= q + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Descent no longer resolvable in double precision.
            out.converged = out.gradient_norm <= 1e-5;
            break;
        }
        u_prev = u;
        grad_prev = grad;
        u = u_new;
        // Radial moves: the infimum is often approached as rho -> 1 or at
        // growing concentration, where plain descent only creeps.
        bool rescaled = false;
        for (double factor : {0.5, 2.0}) {
            for (int k = 0; k < 20; ++k) {
                double q_r;
                const Vector u_r = factor * u;
                if (!obj.evaluate(u_r, q_r, nullptr) || !(q_r < q_new))
                    break;
                u = u_r;
                q_new = q_r;
                rescaled = true;
            }
            if (rescaled)
                break;
        }
        if (!obj.evaluate(u, q, &grad))
            break;
        if (rescaled) {
            u_prev.resize(0);
            step = 0.1 * pi_norm(pi, u.array() - pi.dot(u)) / pi_norm(pi, grad.cwiseQuotient(pi));
        }
    }
    out.value = q;
    out.u = u;
    out.iterations = it;
    return out;
}

ConstantEstimate minimize_quotient(const FiniteChain &chain, FunctionalKind kind, double alpha,
                                   const OptimizerOptions &opts) {
    if (opts.starts < 1 || opts.max_iter < 1 || !(opts.tol > 0.0))
        throw DomainError("optimizer needs starts >= 1, max_iter >= 1 and tol > 0");
    const Vector f = gap_eigenfunction(chain);
    const Objective obj(chain, kind, alpha);
    const std::size_t S = chain.size();

    std::vector<std::pair<Vector, std::string>> inits;
    for (double a : {1e-3, 0.3, 1.0, 3.0})
        for (double sign : {1.0, -1.0}) {
            std::ostringstream name;
            name << "gap eigenfunction x " << format_double(sign * a);
            inits.emplace_back(sign * a * f, name.str());
        }
    {
        Eigen::Index hi, lo;
        f.maxCoeff(&hi);
        f.minCoeff(&lo);
        for (Eigen::Index k : {hi, lo}) {
            Vector u = Vector::Zero(static_cast<Eigen::Index>(S));
            u[k] = 3.0;
            inits.emplace_back(u, "concentrated at state " + std::to_string(k));
        }
    }
    for (std::size_t r = 0; inits.size() < std::max<std::size_t>(opts.starts, 1); ++r) {
        auto rng = make_rng(opts.seed, "constants/start/" + std::to_string(r));
        std::normal_distribution<double> normal(0.0, 1.0);
        const double amp = kSweepAmplitudes[r % std::size(kSweepAmplitudes)];
        Vector u(static_cast<Eigen::Index>(S));
        for (std::size_t i = 0; i < S; ++i)
            u[static_cast<Eigen::Index>(i)] = amp * normal(rng);
        inits.emplace_back(u, "random #" + std::to_string(r));
    }
    inits.resize(std::min(inits.size(), std::max<std::size_t>(opts.starts, 1)));

    std::vector<StartResult> results(inits.size());
    parallel_for(inits.size(), [&](std::size_t k) {
        results[k] = descend(obj, inits[k].first, inits[k].second, opts);
    });

    const StartResult *best = nullptr, *best_any = nullptr;
    std::size_t converged = 0;
    for (const auto &r : results) {
        if (!std::isfinite(r.value))
            continue;
        if (!best_any || r.value < best_any->value)
            best_any = &r;
        if (!r.converged)
            continue;
        ++converged;
        if (!best || r.value < best->value)
            best = &r;
    }
    if (!best)
        throw OptimizationError("no start of the " + to_string(kind) + " minimization converged",
                                best_any ? best_any->value
                                         : std::numeric_limits<double>::quiet_NaN());

    ConstantEstimate est;
    est.kind = kind;
    est.alpha = alpha;
    est.value = best->value;
    Vector eps;
    obj.deviation(best->u, eps);
    est.minimizer = eps.array() + 1.0;
    est.method = EstimateMethod::MultistartGradient;
    est.iterations = best->iterations;
    est.gradient_norm = best->gradient_norm;
    est.starts = results.size();
    est.converged_starts = converged;
    est.start_label = best->label;
    return est;
}

} // namespace

double functional_quotient(const FiniteChain &chain, FunctionalKind kind, double alpha,
                           const Vector &rho) {
    if (kind == FunctionalKind::Beckner)
        require_alpha(alpha);
    require_density(chain, rho);
    const Vector eps = rho.array() - 1.0;
    if (kind == FunctionalKind::Poincare) {
        const double var = chain.pi().dot(eps.cwiseAbs2());
        if (!(var > 0.0))
            throw DegenerateInputError("quotient is 0/0 at the constant density");
        return dirichlet_form_fast(chain, eps, eps) / var;
    }
    if (rho.minCoeff() < 0.5) {
        // Far from equilibrium the deviation form gains nothing, and 1 + eps
        // would round tiny entries of rho to 0.
        const ConvexEntropy e =
            kind == FunctionalKind::Beckner ? ConvexEntropy::power(alpha) : ConvexEntropy::log();
        const double ent = entropy(chain, e, rho);
        if (kind == FunctionalKind::LogSobolev) {
            const Vector root = rho.cwiseSqrt();
            return dirichlet_form_fast(chain, root, root) / ent;
        }
        return entropy_production(chain, e, rho) / ent;
    }
    const Objective obj(chain, kind, alpha);
    double q;
    if (!obj.evaluate_deviation(eps, q, nullptr))
        throw DegenerateInputError("quotient is 0/0 at the constant density");
    return q;
}

ConstantEstimate poincare_constant(const FiniteChain &chain) {
    ConstantEstimate est;
    est.kind = FunctionalKind::Poincare;
    est.value = spectral_gap(chain);
    const Vector f = gap_eigenfunction(chain);
    est.minimizer = Vector::Ones(f.size()) + (0.5 / f.cwiseAbs().maxCoeff()) * f;
    est.method = EstimateMethod::Spectral;
    est.start_label = "gap eigenfunction";
    return est;
}

ConstantEstimate beckner_constant(const FiniteChain &chain, double alpha,
                                  const OptimizerOptions &opts) {
    require_alpha(alpha);
    return minimize_quotient(chain, FunctionalKind::Beckner, alpha, opts);
}

ConstantEstimate mlsi_constant(const FiniteChain &chain, const OptimizerOptions &opts) {
    return minimize_quotient(chain, FunctionalKind::ModifiedLogSobolev, 1.0, opts);
}

ConstantEstimate lsi_constant(const FiniteChain &chain, const OptimizerOptions &opts) {
    return minimize_quotient(chain, FunctionalKind::LogSobolev, 1.0, opts);
}

std::vector<ConstantsRow> constants_report(const FiniteChain &chain, const ModelSpec &spec,
                                           const std::vector<double> &alphas,
                                           const OptimizerOptions &opts, double slack) {
    if (alphas.empty())
        throw DomainError("alpha list is empty");
    for (double a : alphas)
        require_alpha(a);
    const double two_lp = 2.0 * spectral_gap(chain);
    const double lm = mlsi_constant(chain, opts).value;
    const double ll = lsi_constant(chain, opts).value;
    const double tol = slack * std::max(1.0, two_lp);

    std::vector<ConstantsRow> rows;
    for (double a : alphas) {
        ConstantsRow row;
        row.alpha = a;
        row.two_lambda_P = two_lp;
        row.lambda_M = lm;
        row.lambda_L = ll;
        row.paper_bound = std::numeric_limits<double>::quiet_NaN();
        try {
            const PaperConstant pc = paper_lambda(spec, a);
            row.paper_bound = pc.value;
            row.references = pc.references;
        } catch (const HypothesisError &) {
        }
        row.beckner_hat = beckner_constant(chain, a, opts).value;
        bool ok = row.beckner_hat <= two_lp + tol && 4.0 * ll <= lm + tol && lm <= two_lp + tol;
        if (std::isfinite(row.paper_bound))
            ok = ok && row.paper_bound <= row.beckner_hat + tol;
        row.ordering_pass = ok;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string constants_csv(const std::vector<ConstantsRow> &rows) {
    std::ostringstream out;
    out << "alpha,paper_bound,beckner_hat,two_lambda_P,ordering_pass\n";
    for (const auto &r : rows)
        out << format_double(r.alpha) << ','
            << (std::isfinite(r.paper_bound) ? format_double(r.paper_bound) : std::string("nan"))
            << ',' << format_double(r.beckner_hat) << ',' << format_double(r.two_lambda_P) << ','
            << (r.ordering_pass ? "true" : "false") << '\n';
    return out.str();
}

} // namespace beckner
