#include "beckner/bochner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "beckner/errors.hpp"

namespace beckner {

namespace {

std::string triple_name(const FiniteChain &chain, std::size_t i, std::size_t g, std::size_t d) {
    return "state " + std::to_string(i) + ", moves (" + chain.move(g).name + ", " +
           chain.move(d).name + ") = (" + std::to_string(g) + ", " + std::to_string(d) + ")";
}

// Bounded pseudo-random psi(trial, eta, gamma, delta) in [-1, 1].
double hashed_unit(std::uint64_t seed, std::size_t a, std::size_t b, std::size_t c) {
    std::uint64_t x = seed;
    for (std::uint64_t v : {std::uint64_t(a), std::uint64_t(b), std::uint64_t(c)}) {
        x ^= v + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        x ^= x >> 31;
    }
    return static_cast<double>(x >> 11) * 0x1.0p-52 - 1.0;
}

void push(std::vector<RTriple> &row, std::size_t g, std::size_t d, double v) {
    if (v != 0.0)
        row.push_back({g, d, v});
}

} // namespace

BochnerStructure::BochnerStructure(std::vector<std::vector<RTriple>> rows)
    : rows_(std::move(rows)) {
    for (auto &row : rows_) {
        std::sort(row.begin(), row.end(), [](const RTriple &x, const RTriple &y) {
            return std::tie(x.gamma, x.delta) < std::tie(y.gamma, y.delta);
        });
        for (const auto &t : row)
            if (!std::isfinite(t.value))
                throw ConstructionError("R must be finite");
    }
}

std::size_t BochnerStructure::nonzeros() const {
    std::size_t n = 0;
    for (const auto &row : rows_)
        n += row.size();
    return n;
}

double BochnerStructure::R(std::size_t state, std::size_t gamma, std::size_t delta) const {
    const auto &row = rows_.at(state);
    const auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(gamma, delta),
                                     [](const RTriple &t, const std::pair<std::size_t, std::size_t> &k) {
                                         return std::tie(t.gamma, t.delta) < std::tie(k.first, k.second);
                                     });
    if (it != row.end() && it->gamma == gamma && it->delta == delta)
        return it->value;
    return 0.0;
}

double BochnerStructure::Gamma(const FiniteChain &chain, std::size_t state, std::size_t gamma,
                               std::size_t delta) const {
    return chain.rate(state, gamma) * chain.rate(state, delta) - R(state, gamma, delta);
}

BochnerStructure BochnerStructure::perturbed(std::size_t state, std::size_t gamma,
                                             std::size_t delta, double factor) const {
    auto rows = rows_;
    for (auto &t : rows.at(state))
        if (t.gamma == gamma && t.delta == delta) {
            t.value *= factor;
            return BochnerStructure(std::move(rows));
        }
    throw DomainError("no stored R entry at the requested triple");
}

BochnerStructure zero_structure(const FiniteChain &chain) {
    return BochnerStructure(std::vector<std::vector<RTriple>>(chain.size()));
}

BochnerStructure r_function(const ModelSpec &spec, const FiniteChain &chain) {
    const std::size_t S = chain.size();
    std::vector<std::vector<RTriple>> rows(S);

    if (std::holds_alternative<BirthDeathSpec>(spec) ||
        std::holds_alternative<FokkerPlanckSpec>(spec)) {
        if (chain.num_moves() != 2)
            throw DomainError("chain does not match the birth-death spec");
        const std::size_t up = birth_move(), down = death_move();
        for (std::size_t n = 0; n < S; ++n) {
            const double a = chain.rate(n, up), b = chain.rate(n, down);
            push(rows[n], up, up, n + 1 < S ? a * chain.rate(n + 1, up) : 0.0);
            push(rows[n], up, down, a * b);
            push(rows[n], down, up, a * b);
            push(rows[n], down, down, n > 0 ? b * chain.rate(n - 1, down) : 0.0);
        }
        return BochnerStructure(std::move(rows));
    }

    if (const auto *s = std::get_if<ZeroRangeSpec>(&spec)) {
        const int L = s->L;
        if (chain.num_moves() != static_cast<std::size_t>(L * L))
            throw DomainError("chain does not match the zero-range spec");
        const double w = 1.0 / (static_cast<double>(L) * L);
        for (std::size_t i = 0; i < S; ++i) {
            const auto &eta = chain.key(i);
            for (int x = 0; x < L; ++x)
                for (int y = 0; y < L; ++y)
                    for (int u = 0; u < L; ++u)
                        for (int v = 0; v < L; ++v) {
                            const double cx = s->rates[x][eta[x]];
                            double val = 0.0;
                            if (x != u)
                                val = w * cx * s->rates[u][eta[u]];
                            else if (eta[x] >= 1)
                                val = w * cx * s->rates[x][eta[x] - 1];
                            push(rows[i], zero_range_move(L, x, y), zero_range_move(L, u, v), val);
                        }
        }
        return BochnerStructure(std::move(rows));
    }

    if (const auto *s = std::get_if<BernoulliLaplaceSpec>(&spec)) {
        const int L = s->L;
        if (chain.num_moves() != static_cast<std::size_t>(L * (L - 1)))
            throw DomainError("chain does not match the Bernoulli-Laplace spec");
        for (std::size_t i = 0; i < S; ++i)
            for (int x = 0; x < L; ++x)
                for (int y = 0; y < L; ++y)
                    for (int u = 0; u < L; ++u)
                        for (int v = 0; v < L; ++v) {
                            if (x == y || x == u || x == v || y == u || y == v || u == v)
                                continue;
                            const auto g = bernoulli_laplace_move(L, x, y);
                            const auto d = bernoulli_laplace_move(L, u, v);
                            push(rows[i], g, d, chain.rate(i, g) * chain.rate(i, d));
                        }
        return BochnerStructure(std::move(rows));
    }

    const int n = std::get<RandomTranspositionSpec>(spec).n;
    if (chain.num_moves() != static_cast<std::size_t>(n * (n - 1) / 2))
        throw DomainError("chain does not match the random-transposition spec");
    const double c = 2.0 / (n * (n - 1.0));
    for (std::size_t s = 0; s < S; ++s)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = k + 1; l < n; ++l)
                        if (i != k && i != l && j != k && j != l)
                            push(rows[s], transposition_move(n, i, j), transposition_move(n, k, l),
                                 c * c);
    return BochnerStructure(std::move(rows));
}

Report verify_assumption(const FiniteChain &chain, const BochnerStructure &bs,
                         std::size_t trials, std::uint64_t seed, double tol) {
    if (trials < 1)
        throw DomainError("need at least one trial");
    if (bs.size() != chain.size())
        throw DomainError("R and chain have different state counts");
    const auto &pi = chain.pi();

    CheckResult sym{"assumption_symmetry", 0.0, 0.0, true, {}};
    CheckResult comm{"assumption_commutation", 0.0, 0.0, true, {}};
    for (std::size_t i = 0; i < chain.size(); ++i)
        for (const auto &t : bs.row(i)) {
            const double other = bs.R(i, t.delta, t.gamma);
            const double diff = std::abs(other - t.value);
            if (diff > sym.max_residual) {
                sym.max_residual = diff;
                sym.witness = triple_name(chain, i, t.gamma, t.delta);
            }
            if (t.value > 0.0 && comm.passed) {
                const auto gd = chain.target(chain.target(i, t.delta), t.gamma);
                const auto dg = chain.target(chain.target(i, t.gamma), t.delta);
                if (gd != dg) {
                    comm.passed = false;
                    comm.max_residual = 1.0;
                    comm.witness = triple_name(chain, i, t.gamma, t.delta);
                }
            }
        }
    sym.passed = sym.max_residual == 0.0;

    const std::uint64_t base = derive_seed(seed, "assumption-psi");
    CheckResult adj{"assumption_adjointness_random_psi", 0.0, tol, true, {}};
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::uint64_t ts = base + 0x632be59bd9b4e019ULL * (trial + 1);
        double lhs = 0.0, rhs = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < chain.size(); ++i)
            for (const auto &t : bs.row(i)) {
                const double w = pi[i] * t.value;
                const double a = hashed_unit(ts, i, t.gamma, t.delta);
                const double b = hashed_unit(ts, chain.target(i, t.gamma),
                                             chain.move(t.gamma).inverse, t.delta);
                lhs += w * a;
                rhs += w * b;
                scale += std::abs(w) * (std::abs(a) + std::abs(b));
            }
        const double rel = std::abs(lhs - rhs) / std::max(scale, 1e-300);
        if (rel > adj.max_residual) {
            adj.max_residual = rel;
            adj.witness = "trial " + std::to_string(trial);
        }
    }
    adj.passed = adj.max_residual <= tol;

    // Indicator psi: pi(xi) R(xi, g', d) against the mass moved onto
    // (xi, g', d) by (eta, g, d) -> (g eta, g^{-1}, d).
    using Key = std::tuple<std::size_t, std::size_t, std::size_t>;
    std::map<Key, std::pair<double, double>> flux; // (out, in)
    double peak = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i)
        for (const auto &t : bs.row(i)) {
            const double w = pi[i] * t.value;
            flux[{i, t.gamma, t.delta}].first += w;
            flux[{chain.target(i, t.gamma), chain.move(t.gamma).inverse, t.delta}].second += w;
            peak = std::max(peak, std::abs(w));
        }
    CheckResult point{"assumption_adjointness_pointwise", 0.0, tol, true, {}};
    for (const auto &[k, v] : flux) {
        const double rel = std::abs(v.first - v.second) /
                           std::max({std::abs(v.first), std::abs(v.second), 1e-12 * peak, 1e-300});
        if (rel > point.max_residual) {
            point.max_residual = rel;
            point.witness = triple_name(chain, std::get<0>(k), std::get<1>(k), std::get<2>(k));
        }
    }
    point.passed = point.max_residual <= tol;

    Report rep;
    for (auto *c : {&sym, &adj, &point, &comm}) {
        if (c->passed)
            c->witness.clear();
        rep.add(*c);
    }
    return rep;
}

IdentityGap bochner_identity_check(const FiniteChain &chain, const BochnerStructure &bs,
                                   const Vector &chi, const Vector &psi, const PairFunction &beta,
                                   double tol) {
    const std::size_t S = chain.size();
    if (static_cast<std::size_t>(chi.size()) != S || static_cast<std::size_t>(psi.size()) != S)
        throw DomainError("functions must have one value per state");
    auto b = [&](std::size_t x, std::size_t y) {
        const double v = beta(x, y), w = beta(y, x);
        if (std::abs(v - w) > 1e-12 * (std::abs(v) + std::abs(w)))
            throw DomainError("beta is not symmetric at states (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")");
        return v;
    };
    IdentityGap out;
    double scale_l = 0.0, scale_r = 0.0;
    for (std::size_t i = 0; i < S; ++i)
        for (const auto &t : bs.row(i)) {
            const double w = chain.pi()[i] * t.value;
            const std::size_t gi = chain.target(i, t.gamma), di = chain.target(i, t.delta);
            const std::size_t dgi = chain.target(gi, t.delta), gdi = chain.target(di, t.gamma);
            const double F0 = b(i, di) * (chi[di] - chi[i]);
            const double F1 = b(gi, dgi) * (chi[dgi] - chi[gi]);
            const double left = w * F0 * (psi[gi] - psi[i]);
            const double dd = psi[gdi] - psi[di] - psi[gi] + psi[i];
            const double right = 0.25 * w * (F1 - F0) * dd;
            out.lhs += left;
            out.rhs += right;
            scale_l += std::abs(w) * std::abs(F0) * (std::abs(psi[gi]) + std::abs(psi[i]));
            scale_r += 0.25 * std::abs(w) * (std::abs(F1) + std::abs(F0)) *
                       (std::abs(psi[gdi]) + std::abs(psi[di]) + std::abs(psi[gi]) +
                        std::abs(psi[i]));
        }
    out.gap = std::abs(out.lhs - out.rhs);
    out.scale = scale_l + scale_r;
    out.passed = out.gap <= tol * out.scale;
    return out;
}

PointwiseResidual identity_3id_check(const FiniteChain &chain, const BochnerStructure &bs,
                                     const Vector &rho, const ConvexEntropy &e,
                                     std::size_t samples, std::uint64_t seed) {
    require_density(chain, rho, 1e-8);
    const MeanFunction th(e);
    Vector psi(rho.size());
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        psi[i] = e.d1(rho[i]);
    auto hat = [&](std::size_t x, std::size_t y) { return th(rho[x], rho[y]); };

    std::vector<std::pair<std::size_t, std::size_t>> where; // (state, row position)
    for (std::size_t i = 0; i < chain.size(); ++i)
        for (std::size_t k = 0; k < bs.row(i).size(); ++k)
            if (bs.row(i)[k].value > 0.0)
                where.emplace_back(i, k);

    PointwiseResidual out;
    if (where.empty())
        return out;
    std::vector<std::size_t> picks;
    if (samples >= where.size()) {
        for (std::size_t k = 0; k < where.size(); ++k)
            picks.push_back(k);
    } else {
        auto rng = make_rng(seed, "identity-3id");
        std::uniform_int_distribution<std::size_t> pick(0, where.size() - 1);
        for (std::size_t k = 0; k < samples; ++k)
            picks.push_back(pick(rng));
    }

    for (std::size_t k : picks) {
        const auto [i, pos] = where[k];
        const auto &t = bs.row(i)[pos];
        const std::size_t gi = chain.target(i, t.gamma), di = chain.target(i, t.delta);
        const std::size_t dgi = chain.target(gi, t.delta), gdi = chain.target(di, t.gamma);
        const double d_psi = psi[di] - psi[i];      // grad_d psi(eta)
        const double d_psi_g = psi[dgi] - psi[gi];  // grad_d psi(g eta)
        const double gd_psi = d_psi_g - d_psi;      // grad_g grad_d psi(eta)
        const double dg_psi = psi[gdi] - psi[di] - psi[gi] + psi[i];
        const double h0 = hat(i, di), h_gd = hat(gi, gdi), h_dg = hat(gi, dgi);

        const double l1 = (h_dg - h0) * d_psi * d_psi;
        const double l2 = (h_dg * d_psi_g - h0 * d_psi) * dg_psi;
        const double r1 = h_gd * gd_psi * gd_psi;
        const double r2 = -h0 * d_psi_g * d_psi;
        const double r3 = h_dg * d_psi_g * d_psi;
        const double scale = (std::abs(h_dg) + std::abs(h0)) * d_psi * d_psi +
                             (std::abs(h_dg * d_psi_g) + std::abs(h0 * d_psi)) *
                                 (std::abs(psi[gdi]) + std::abs(psi[di]) + std::abs(psi[gi]) +
                                  std::abs(psi[i])) +
                             std::abs(r1) + std::abs(r2) + std::abs(r3);
        const double rel = std::abs(l1 + l2 - (r1 + r2 + r3)) / std::max(scale, 1e-300);
        ++out.evaluated;
        if (rel > out.max_relative) {
            out.max_relative = rel;
            out.witness = triple_name(chain, i, t.gamma, t.delta);
        }
    }
    return out;
}

namespace {

struct GammaSum {
    double value = 0.0;
    double scale = 0.0;
};

// pi[sum_{g,d} Gamma (grad_g psi grad_d rho + phi'' grad_g rho grad_d rho)].
GammaSum gamma_sum(const FiniteChain &chain, const BochnerStructure &bs, const Vector &psi,
                   const Vector &rho, const Vector &phi2) {
    const std::size_t G = chain.num_moves();
    std::vector<double> gp(G), gr(G);
    Matrix R(G, G);
    GammaSum out;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        for (std::size_t g = 0; g < G; ++g) {
            const std::size_t j = chain.target(i, g);
            gp[g] = psi[j] - psi[i];
            gr[g] = rho[j] - rho[i];
        }
        R.setZero();
        for (const auto &t : bs.row(i))
            R(t.gamma, t.delta) = t.value;
        double acc = 0.0, acc_abs = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
            const double cg = chain.rate(i, g);
            for (std::size_t d = 0; d < G; ++d) {
                const double gamma = cg * chain.rate(i, d) - R(g, d);
                if (gamma == 0.0)
                    continue;
                const double term = gamma * (gp[g] * gr[d] + phi2[i] * gr[g] * gr[d]);
                acc += term;
                acc_abs += std::abs(term);
            }
        }
        out.value += chain.pi()[i] * acc;
        out.scale += chain.pi()[i] * acc_abs;
    }
    return out;
}

void entropy_fields(const ConvexEntropy &e, const Vector &rho, Vector &psi, Vector &phi2) {
    psi.resize(rho.size());
    phi2.resize(rho.size());
    for (Eigen::Index i = 0; i < rho.size(); ++i) {
        psi[i] = e.d1(rho[i]);
        phi2[i] = e.d2(rho[i]);
    }
}

} // namespace

PropositionSides proposition_sides(const FiniteChain &chain, const BochnerStructure &bs,
                                   const ConvexEntropy &e, const Vector &rho) {
    if (static_cast<std::size_t>(rho.size()) != chain.size())
        throw DomainError("density must have one value per state");
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        if (!(rho[i] > 0.0))
            throw DomainError("density must be positive");
    Vector psi, phi2;
    entropy_fields(e, rho, psi, phi2);
    const Vector Lpsi = generator_apply(chain, psi), Lrho = generator_apply(chain, rho);
    PropositionSides out;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const double a = Lpsi[i] * Lrho[i], b = phi2[i] * Lrho[i] * Lrho[i];
        out.lhs += chain.pi()[i] * (a + b);
        out.scale += chain.pi()[i] * (std::abs(a) + b);
    }
    const auto gs = gamma_sum(chain, bs, psi, rho, phi2);
    out.rhs = gs.value;
    out.scale += gs.scale;
    return out;
}

double ineq_ratio(const FiniteChain &chain, const BochnerStructure &bs, const ConvexEntropy &e,
                  const Vector &rho) {
    if (static_cast<std::size_t>(rho.size()) != chain.size())
        throw DomainError("density must have one value per state");
    if (rho.maxCoeff() == rho.minCoeff())
        throw DegenerateInputError("curvature ratio is 0/0 at a constant density");
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        if (!(rho[i] > 0.0))
            throw DomainError("density must be positive");
    Vector psi, phi2;
    entropy_fields(e, rho, psi, phi2);
    const double production = dirichlet_form_fast(chain, psi, rho);
    if (!(production > 0.0))
        throw DegenerateInputError("entropy production vanishes at this density");
    return gamma_sum(chain, bs, psi, rho, phi2).value / production;
}

Vector random_density(const FiniteChain &chain, Rng &rng, double amplitude) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector g(chain.size());
    for (Eigen::Index i = 0; i < g.size(); ++i)
        g[i] = amplitude * normal(rng);
    const Vector raw = (g.array() - g.maxCoeff()).exp().matrix();
    return normalize_density(chain, raw);
}

} // namespace beckner
