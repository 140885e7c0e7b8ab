#include "beckner/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "beckner/errors.hpp"
#include "beckner/util.hpp"

namespace beckner {

namespace {

std::string key_string(const StateKey &k) {
    std::string out = "(";
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(k[i]);
    }
    return out + ")";
}

std::string locate(const FiniteChain &chain, std::size_t i, std::size_t g) {
    return "state " + std::to_string(i) + " " + key_string(chain.key(i)) + ", move " +
           std::to_string(g) + " '" + chain.move(g).name + "'";
}

} // namespace

FiniteChain::FiniteChain(std::vector<StateKey> states, std::vector<Move> moves, Matrix rates,
                         Vector pi, bool renormalize)
    : states_(std::move(states)), moves_(std::move(moves)), rates_(std::move(rates)),
      pi_(std::move(pi)) {
    const std::size_t S = states_.size(), G = moves_.size();
    if (S == 0)
        throw ConstructionError("chain has no states");
    for (std::size_t i = 0; i < S; ++i)
        if (!index_.emplace(states_[i], i).second)
            throw ConstructionError("duplicate state key " + key_string(states_[i]));
    for (std::size_t g = 0; g < G; ++g) {
        const auto &m = moves_[g];
        if (m.map.size() != S)
            throw ConstructionError("move '" + m.name + "' has a map of the wrong length");
        if (m.inverse >= G)
            throw ConstructionError("move '" + m.name + "' names an unknown inverse");
        for (std::size_t i = 0; i < S; ++i)
            if (m.map[i] >= S)
                throw ConstructionError("move '" + m.name + "' leads outside S from state " +
                                        std::to_string(i));
    }
    if (static_cast<std::size_t>(rates_.rows()) != S ||
        static_cast<std::size_t>(rates_.cols()) != G)
        throw ConstructionError("rate table must be |S| x |G|");
    if (static_cast<std::size_t>(pi_.size()) != S)
        throw ConstructionError("pi must have one entry per state");
    for (std::size_t i = 0; i < S; ++i) {
        if (!(pi_[i] > 0.0) || !std::isfinite(pi_[i]))
            throw ConstructionError("pi must be strictly positive and finite (state " +
                                    std::to_string(i) + ")");
        for (std::size_t g = 0; g < G; ++g) {
            const double c = rates_(i, g);
            if (!(c >= 0.0) || !std::isfinite(c))
                throw ConstructionError("rates must be finite and nonnegative at " +
                                        locate(*this, i, g));
            max_rate_ = std::max(max_rate_, c);
            if (c > 0.0 && moves_[moves_[g].inverse].map[moves_[g].map[i]] != i)
                throw ConstructionError("inverse move does not undo " + locate(*this, i, g));
        }
    }
    const double total = pi_.sum();
    if (renormalize)
        pi_ /= total;
    else if (std::abs(total - 1.0) > 1e-12)
        throw ConstructionError("pi does not sum to 1");
}

std::size_t FiniteChain::index_of(const StateKey &key) const {
    const auto it = index_.find(key);
    if (it == index_.end())
        throw ConstructionError("unknown state " + key_string(key));
    return it->second;
}

double pi_mean(const FiniteChain &chain, const Vector &f) { return chain.pi().dot(f); }

Vector generator_apply(const FiniteChain &chain, const Vector &f) {
    if (static_cast<std::size_t>(f.size()) != chain.size())
        throw DomainError("function must have one value per state");
    Vector out = Vector::Zero(f.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        double acc = 0.0;
        for (std::size_t g = 0; g < chain.num_moves(); ++g) {
            const double c = chain.rate(i, g);
            if (c != 0.0)
                acc += c * (f[chain.target(i, g)] - f[i]);
        }
        out[i] = acc;
    }
    return out;
}

double dirichlet_form_fast(const FiniteChain &chain, const Vector &f, const Vector &g) {
    if (static_cast<std::size_t>(f.size()) != chain.size() ||
        static_cast<std::size_t>(g.size()) != chain.size())
        throw DomainError("function must have one value per state");
    double total = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        double acc = 0.0;
        for (std::size_t m = 0; m < chain.num_moves(); ++m) {
            const double c = chain.rate(i, m);
            if (c != 0.0) {
                const std::size_t j = chain.target(i, m);
                acc += c * (f[j] - f[i]) * (g[j] - g[i]);
            }
        }
        total += chain.pi()[i] * acc;
    }
    return 0.5 * total;
}

double dirichlet_form(const FiniteChain &chain, const Vector &f, const Vector &g) {
    const double grad_form = dirichlet_form_fast(chain, f, g);
    const Vector Lg = generator_apply(chain, g);
    double adjoint = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        adjoint -= chain.pi()[i] * f[i] * Lg[i];
        double local = 0.0;
        for (std::size_t m = 0; m < chain.num_moves(); ++m) {
            const std::size_t j = chain.target(i, m);
            local += chain.rate(i, m) * (std::abs(f[i]) + std::abs(f[j] - f[i])) *
                     std::abs(g[j] - g[i]);
        }
        scale += chain.pi()[i] * local;
    }
    if (std::abs(grad_form - adjoint) > 1e-9 * scale + 1e-300)
        throw ReversibilityError("Dirichlet form: gradient form " + format_double(grad_form) +
                                 " differs from -pi[f Lg] = " + format_double(adjoint));
    return grad_form;
}

double entropy_production(const FiniteChain &chain, const ConvexEntropy &e, const Vector &rho) {
    Vector psi(rho.size());
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        psi[i] = e.d1(rho[i]);
    return dirichlet_form_fast(chain, psi, rho);
}

double entropy(const FiniteChain &chain, const ConvexEntropy &e, const Vector &rho) {
    if (static_cast<std::size_t>(rho.size()) != chain.size())
        throw DomainError("density must have one value per state");
    double total = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i)
        total += chain.pi()[i] * e.phi(rho[i]);
    return total;
}

double entropy_of_deviation(const FiniteChain &chain, const ConvexEntropy &e, const Vector &eps) {
    if (static_cast<std::size_t>(eps.size()) != chain.size())
        throw DomainError("density must have one value per state");
    double total = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i)
        total += chain.pi()[i] * e.phi_shifted(eps[i]);
    return total;
}

Report check_reversibility(const FiniteChain &chain, std::size_t trials, std::uint64_t seed,
                           double tol) {
    if (trials < 1)
        throw DomainError("need at least one trial");
    const std::size_t S = chain.size(), G = chain.num_moves();
    auto rng = make_rng(seed, "reversibility");
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    CheckResult random_f{"reversibility_random_F", 0.0, tol, true, {}};
    Matrix F(S, G);
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < S; ++i)
            for (std::size_t g = 0; g < G; ++g)
                F(i, g) = unif(rng);
        double lhs = 0.0, rhs = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < S; ++i)
            for (std::size_t g = 0; g < G; ++g) {
                const double w = chain.pi()[i] * chain.rate(i, g);
                const std::size_t j = chain.target(i, g);
                const std::size_t inv = chain.move(g).inverse;
                lhs += w * F(i, g);
                rhs += w * F(j, inv);
                scale += w * (std::abs(F(i, g)) + std::abs(F(j, inv)));
            }
        const double rel = std::abs(lhs - rhs) / std::max(scale, 1e-300);
        if (rel > random_f.max_residual) {
            random_f.max_residual = rel;
            random_f.witness = "trial " + std::to_string(t);
        }
    }
    random_f.passed = random_f.max_residual <= tol;
    if (random_f.passed)
        random_f.witness.clear();

    // Indicator F at (j, d): pi(j) c(j,d) must equal the flux arriving
    // through moves g with g i = j and g^{-1} = d.
    Matrix inflow = Matrix::Zero(S, G);
    double peak = 0.0;
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t g = 0; g < G; ++g) {
            const double w = chain.pi()[i] * chain.rate(i, g);
            inflow(chain.target(i, g), chain.move(g).inverse) += w;
            peak = std::max(peak, w);
        }
    CheckResult flux{"reversibility_pointwise_flux", 0.0, tol, true, {}};
    for (std::size_t j = 0; j < S; ++j)
        for (std::size_t d = 0; d < G; ++d) {
            const double out = chain.pi()[j] * chain.rate(j, d);
            const double in = inflow(j, d);
            const double rel =
                std::abs(out - in) / std::max({out, in, 1e-12 * peak, 1e-300});
            if (rel > flux.max_residual) {
                flux.max_residual = rel;
                flux.witness = locate(chain, j, d);
            }
        }
    flux.passed = flux.max_residual <= tol;
    if (flux.passed)
        flux.witness.clear();

    Report rep;
    rep.add(random_f);
    rep.add(flux);
    return rep;
}

Report check_inverse_consistency(const FiniteChain &chain) {
    CheckResult res{"inverse_consistency", 0.0, 0.0, true, {}};
    for (std::size_t i = 0; i < chain.size() && res.passed; ++i)
        for (std::size_t g = 0; g < chain.num_moves(); ++g)
            if (chain.rate(i, g) > 0.0 &&
                chain.target(chain.target(i, g), chain.move(g).inverse) != i) {
                res.passed = false;
                res.max_residual = 1.0;
                res.witness = locate(chain, i, g);
                break;
            }
    Report rep;
    rep.add(res);
    return rep;
}

Vector normalize_density(const FiniteChain &chain, const Vector &raw, double floor) {
    if (static_cast<std::size_t>(raw.size()) != chain.size())
        throw DomainError("density must have one value per state");
    if (!(floor > 0.0))
        throw DomainError("density floor must be positive");
    bool any = false;
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        if (!(raw[i] >= 0.0) || !std::isfinite(raw[i]))
            throw DomainError("raw density entries must be finite and nonnegative");
        any = any || raw[i] > 0.0;
    }
    if (!any)
        throw DomainError("raw density is identically zero");
    Vector rho = raw.cwiseMax(floor);
    return rho / pi_mean(chain, rho);
}

void require_density(const FiniteChain &chain, const Vector &rho, double tol, double floor) {
    if (static_cast<std::size_t>(rho.size()) != chain.size())
        throw DomainError("density must have one value per state");
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        if (!(rho[i] > floor) || !std::isfinite(rho[i]))
            throw DomainError("density must be positive and finite (state " + std::to_string(i) +
                              ")");
    const double mean = pi_mean(chain, rho);
    if (std::abs(mean - 1.0) > tol)
        throw DomainError("density must have pi-mean 1, got " + format_double(mean));
}

Matrix dense_generator(const FiniteChain &chain) {
    const std::size_t S = chain.size();
    if (S > kDenseCap)
        throw SizeError("state space of " + std::to_string(S) + " exceeds the dense cap");
    Matrix Q = Matrix::Zero(S, S);
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t g = 0; g < chain.num_moves(); ++g) {
            const double c = chain.rate(i, g);
            Q(i, chain.target(i, g)) += c;
            Q(i, i) -= c;
        }
    return Q;
}

Matrix symmetrized_generator(const FiniteChain &chain) {
    const Matrix Q = dense_generator(chain);
    const Vector sq = chain.pi().cwiseSqrt();
    Matrix A = sq.asDiagonal() * Q * sq.cwiseInverse().asDiagonal();
    return 0.5 * (A + A.transpose());
}

FiniteChain permute_states(const FiniteChain &chain, const std::vector<std::size_t> &perm) {
    const std::size_t S = chain.size();
    if (perm.size() != S)
        throw DomainError("permutation has the wrong length");
    std::vector<std::size_t> inv(S, S);
    for (std::size_t k = 0; k < S; ++k) {
        if (perm[k] >= S || inv[perm[k]] != S)
            throw DomainError("not a permutation");
        inv[perm[k]] = k;
    }
    std::vector<StateKey> states(S);
    Vector pi(S);
    Matrix rates(S, chain.num_moves());
    std::vector<Move> moves = chain.moves();
    for (std::size_t k = 0; k < S; ++k) {
        states[k] = chain.key(perm[k]);
        pi[k] = chain.pi()[perm[k]];
        rates.row(k) = chain.rates().row(perm[k]);
    }
    for (std::size_t g = 0; g < moves.size(); ++g)
        for (std::size_t k = 0; k < S; ++k)
            moves[g].map[k] = inv[chain.target(perm[k], g)];
    return FiniteChain(std::move(states), std::move(moves), std::move(rates), std::move(pi),
                       false);
}

} // namespace beckner
