#include "beckner/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include "beckner/entropy.hpp"
#include "beckner/errors.hpp"
#include "beckner/quadrature.hpp"
#include "beckner/util.hpp"

namespace beckner {

namespace {

std::string fmt(double x) { return format_double(x); }

std::string site_move_name(int x, int y) {
    return std::to_string(x + 1) + ">" + std::to_string(y + 1);
}

void require_finite_nonnegative(const std::vector<double> &v, const char *what) {
    for (double x : v)
        if (!(x >= 0.0) || !std::isfinite(x))
            throw DomainError(std::string(what) + " must be finite and nonnegative");
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

void require_state_count(double count, const char *model) {
    if (count > static_cast<double>(kStateCap))
        throw SizeError(std::string(model) + " state space of " + fmt(count) +
                        " states exceeds the cap of " + std::to_string(kStateCap));
}

Vector exp_normalized(const std::vector<double> &log_w) {
    const double top = *std::max_element(log_w.begin(), log_w.end());
    Vector pi(log_w.size());
    for (std::size_t i = 0; i < log_w.size(); ++i)
        pi[i] = std::exp(log_w[i] - top);
    return pi / pi.sum();
}

FiniteChain birth_death_chain(const std::vector<double> &a, const std::vector<double> &b,
                              Vector pi) {
    const std::size_t S = a.size();
    std::vector<StateKey> states(S);
    Move up{"+", 1, std::vector<std::size_t>(S)}, down{"-", 0, std::vector<std::size_t>(S)};
    Matrix rates(S, 2);
    for (std::size_t n = 0; n < S; ++n) {
        states[n] = {static_cast<std::int64_t>(n)};
        up.map[n] = std::min(n + 1, S - 1);
        down.map[n] = n == 0 ? 0 : n - 1;
        rates(n, 0) = a[n];
        rates(n, 1) = b[n];
    }
    return FiniteChain(std::move(states), {up, down}, std::move(rates), std::move(pi));
}

} // namespace

std::string model_name(const ModelSpec &spec) {
    static const char *names[] = {"birth_death", "zero_range", "bernoulli_laplace",
                                  "random_transposition", "fokker_planck"};
    return names[spec.index()];
}

BirthDeathSpec birth_death_linear(int K) {
    if (K < 1)
        throw DomainError("K must be at least 1");
    BirthDeathSpec s;
    for (int n = 0; n <= K; ++n) {
        s.a.push_back(std::max(K - n, 0));
        s.b.push_back(n);
    }
    return s;
}

ZeroRangeSpec zero_range_linear(int L, int N, double c) {
    ZeroRangeSpec s{L, N, {}};
    for (int x = 0; x < L; ++x) {
        std::vector<double> row;
        for (int k = 0; k <= N; ++k)
            row.push_back(c * k);
        s.rates.push_back(std::move(row));
    }
    return s;
}

BernoulliLaplaceSpec bernoulli_laplace_homogeneous(int L, int N, double lambda) {
    return {L, N, std::vector<double>(std::max(L, 0), lambda)};
}

FiniteChain build_birth_death(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.size() != b.size() || a.size() < 2)
        throw DomainError("birth-death rates need equal lengths n_max + 1 >= 2");
    require_finite_nonnegative(a, "birth rates");
    require_finite_nonnegative(b, "death rates");
    if (b.front() != 0.0)
        throw DomainError("b(0) must be 0");
    if (a.back() != 0.0)
        throw DomainError("a(n_max) must be 0 to close the truncated chain");
    std::vector<double> log_pi(a.size(), 0.0);
    for (std::size_t n = 0; n + 1 < a.size(); ++n) {
        if (a[n] > 0.0 && b[n + 1] == 0.0)
            throw ConstructionError("detailed-balance recursion breaks: a(" + std::to_string(n) +
                                    ") > 0 but b(" + std::to_string(n + 1) + ") = 0");
        if (a[n] == 0.0)
            throw ConstructionError("birth-death chain is reducible: a(" + std::to_string(n) +
                                    ") = 0 below n_max");
        log_pi[n + 1] = log_pi[n] + std::log(a[n]) - std::log(b[n + 1]);
    }
    return birth_death_chain(a, b, exp_normalized(log_pi));
}

FiniteChain build_zero_range(int L, int N, const std::vector<std::vector<double>> &rates) {
    if (L < 2 || N < 1)
        throw DomainError("zero-range needs L >= 2 and N >= 1");
    if (rates.size() != static_cast<std::size_t>(L))
        throw DomainError("zero-range needs one rate table per site");
    for (int x = 0; x < L; ++x) {
        const auto &c = rates[x];
        if (c.size() < static_cast<std::size_t>(N) + 1)
            throw DomainError("zero-range rate table of site " + std::to_string(x + 1) +
                              " must cover 0..N");
        if (c[0] != 0.0)
            throw DomainError("zero-range rates need c_x(0) = 0");
        for (int k = 1; k <= N; ++k)
            if (!(c[k] > 0.0) || !std::isfinite(c[k]))
                throw DomainError("zero-range rates need c_x(n) > 0 for n > 0");
    }
    require_state_count(binomial(N + L - 1, L - 1), "zero-range");

    std::vector<StateKey> states;
    StateKey cur(L, 0);
    std::function<void(int, int)> fill = [&](int site, int left) {
        if (site == L - 1) {
            cur[site] = left;
            states.push_back(cur);
            return;
        }
        for (int k = left; k >= 0; --k) {
            cur[site] = k;
            fill(site + 1, left - k);
        }
    };
    fill(0, N);

    const std::size_t S = states.size(), G = static_cast<std::size_t>(L) * L;
    std::vector<double> log_w(S, 0.0);
    for (std::size_t i = 0; i < S; ++i)
        for (int x = 0; x < L; ++x)
            for (int k = 1; k <= states[i][x]; ++k)
                log_w[i] -= std::log(rates[x][k]);

    // Index lookup through a temporary chain-free map.
    std::map<StateKey, std::size_t> index;
    for (std::size_t i = 0; i < S; ++i)
        index.emplace(states[i], i);

    std::vector<Move> moves(G);
    Matrix c(S, G);
    for (int x = 0; x < L; ++x)
        for (int y = 0; y < L; ++y) {
            const std::size_t g = zero_range_move(L, x, y);
            moves[g] = {site_move_name(x, y), zero_range_move(L, y, x), std::vector<std::size_t>(S)};
            for (std::size_t i = 0; i < S; ++i) {
                StateKey k = states[i];
                if (k[x] > 0) {
                    --k[x];
                    ++k[y];
                }
                const auto it = index.find(k);
                if (it == index.end())
                    throw ConstructionError("zero-range move leaves the N-particle sector");
                moves[g].map[i] = it->second;
                c(i, g) = rates[x][states[i][x]] / L;
            }
        }
    return FiniteChain(std::move(states), std::move(moves), std::move(c), exp_normalized(log_w));
}

FiniteChain build_bernoulli_laplace(int L, int N, const std::vector<double> &lambda) {
    if (L < 2 || L > 30)
        throw DomainError("Bernoulli-Laplace needs 2 <= L <= 30");
    if (N < 1 || N > L)
        throw DomainError("Bernoulli-Laplace needs 0 < N <= L");
    if (lambda.size() != static_cast<std::size_t>(L))
        throw DomainError("Bernoulli-Laplace needs one intensity per site");
    for (double l : lambda)
        if (!(l > 0.0) || !std::isfinite(l))
            throw DomainError("Bernoulli-Laplace intensities must be positive");
    require_state_count(binomial(L, N), "Bernoulli-Laplace");

    std::vector<StateKey> states;
    std::map<StateKey, std::size_t> index;
    std::vector<double> log_w;
    for (std::int64_t mask = 0; mask < (std::int64_t{1} << L); ++mask) {
        if (std::popcount(static_cast<std::uint64_t>(mask)) != N)
            continue;
        double lw = 0.0;
        for (int x = 0; x < L; ++x) {
            const bool occupied = (mask >> x) & 1;
            lw += occupied ? -std::log1p(lambda[x]) : std::log(lambda[x] / (1.0 + lambda[x]));
        }
        index.emplace(StateKey{mask}, states.size());
        states.push_back({mask});
        log_w.push_back(lw);
    }

    const std::size_t S = states.size(), G = static_cast<std::size_t>(L) * (L - 1);
    std::vector<Move> moves(G);
    Matrix c(S, G);
    for (int x = 0; x < L; ++x)
        for (int y = 0; y < L; ++y) {
            if (x == y)
                continue;
            const std::size_t g = bernoulli_laplace_move(L, x, y);
            moves[g] = {site_move_name(x, y), bernoulli_laplace_move(L, y, x),
                        std::vector<std::size_t>(S)};
            for (std::size_t i = 0; i < S; ++i) {
                const std::int64_t mask = states[i][0];
                const bool active = ((mask >> x) & 1) && !((mask >> y) & 1);
                const std::int64_t next =
                    active ? mask ^ (std::int64_t{1} << x) ^ (std::int64_t{1} << y) : mask;
                moves[g].map[i] = index.at(StateKey{next});
                c(i, g) = active ? lambda[x] / L : 0.0;
            }
        }
    return FiniteChain(std::move(states), std::move(moves), std::move(c), exp_normalized(log_w));
}

FiniteChain build_random_transposition(int n) {
    if (n < 2 || n > 7)
        throw SizeError("random transposition needs 2 <= n <= 7");
    std::vector<StateKey> states;
    StateKey word(n);
    for (int i = 0; i < n; ++i)
        word[i] = i + 1;
    do
        states.push_back(word);
    while (std::next_permutation(word.begin(), word.end()));

    std::map<StateKey, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i)
        index.emplace(states[i], i);

    const std::size_t S = states.size(), G = static_cast<std::size_t>(n) * (n - 1) / 2;
    const double rate = 2.0 / (n * (n - 1.0));
    std::vector<Move> moves(G);
    Matrix c = Matrix::Constant(S, G, rate);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const std::size_t g = transposition_move(n, i, j);
            moves[g] = {"(" + std::to_string(i + 1) + " " + std::to_string(j + 1) + ")", g,
                        std::vector<std::size_t>(S)};
            // Left composition tau o sigma swaps the values i+1 and j+1.
            for (std::size_t s = 0; s < S; ++s) {
                StateKey w = states[s];
                for (auto &v : w)
                    if (v == i + 1)
                        v = j + 1;
                    else if (v == j + 1)
                        v = i + 1;
                moves[g].map[s] = index.at(w);
            }
        }
    return FiniteChain(std::move(states), std::move(moves), std::move(c),
                       Vector::Constant(S, 1.0 / S));
}

FvDiscretization fv_discretize(const Potential &V, int cells) {
    if (cells < 2)
        throw DomainError("the finite-volume chain needs at least two cells");
    require_state_count(cells, "finite-volume");
    FvDiscretization d;
    d.h = 1.0 / cells;
    const auto &rule = gauss_legendre16();

    double v_min = std::numeric_limits<double>::infinity();
    for (int n = 0; n < cells; ++n)
        for (double node : rule.nodes)
            v_min = std::min(v_min, V.value((n + node) * d.h));
    if (!std::isfinite(v_min))
        throw NumericalError("potential is not finite on [0,1]");

    std::vector<double> mass(cells);
    for (int n = 0; n < cells; ++n) {
        const double lo = n * d.h, hi = (n + 1) * d.h;
        auto weight = [&](double x) { return std::exp(-(V.value(x) - v_min)); };
        double prev = integrate_gl16(weight, lo, hi, 1);
        bool converged = false;
        for (std::size_t pieces = 2; pieces <= 1024; pieces *= 2) {
            const double next = integrate_gl16(weight, lo, hi, pieces);
            const bool stable = std::abs(next - prev) <= 1e-12 * std::abs(next);
            prev = next;
            if (stable) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw NumericalError("cell quadrature did not stabilize in cell " + std::to_string(n));
        if (!(prev > 0.0) || !std::isfinite(prev))
            throw NumericalError("exp(-V) underflows in cell " + std::to_string(n));
        mass[n] = prev;
    }
    double Z = 0.0;
    for (double m : mass)
        Z += m;
    d.cell_pi.resize(cells);
    for (int n = 0; n < cells; ++n)
        d.cell_pi[n] = mass[n] / (d.h * Z);

    const double inv_h2 = 1.0 / (d.h * d.h);
    d.a.assign(cells, 0.0);
    d.b.assign(cells, 0.0);
    for (int n = 0; n < cells; ++n) {
        if (n + 1 < cells)
            d.a[n] = std::sqrt(d.cell_pi[n + 1] / d.cell_pi[n]) * inv_h2;
        if (n > 0)
            d.b[n] = std::sqrt(d.cell_pi[n - 1] / d.cell_pi[n]) * inv_h2;
    }
    return d;
}

FiniteChain build_fokker_planck_fv(const Potential &V, int cells, double lambda_conv) {
    if (!(lambda_conv > 0.0))
        throw DomainError("the convexity constant must be positive");
    const auto d = fv_discretize(V, cells);
    Vector pi(cells);
    for (int n = 0; n < cells; ++n)
        pi[n] = d.h * d.cell_pi[n];
    return birth_death_chain(d.a, d.b, pi);
}

FiniteChain build_chain(const ModelSpec &spec) {
    return std::visit(
        [](const auto &s) -> FiniteChain {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BirthDeathSpec>)
                return build_birth_death(s.a, s.b);
            else if constexpr (std::is_same_v<T, ZeroRangeSpec>)
                return build_zero_range(s.L, s.N, s.rates);
            else if constexpr (std::is_same_v<T, BernoulliLaplaceSpec>)
                return build_bernoulli_laplace(s.L, s.N, s.lambda);
            else if constexpr (std::is_same_v<T, RandomTranspositionSpec>)
                return build_random_transposition(s.n);
            else
                return build_fokker_planck_fv(s.V, s.cells, s.lambda_conv);
        },
        spec);
}

double erf(double s) { return std::erf(s); }

double fv_phi(double u) {
    if (!(u >= 0.0))
        throw DomainError("Phi needs a nonnegative argument");
    if (u < 1e-3) {
        // Taylor coefficients of Phi at 0.
        static const double c[] = {4.0,
                                   -32.0 / 3.0,
                                   992.0 / 45.0,
                                   -35008.0 / 945.0,
                                   105856.0 / 2025.0,
                                   -29684992.0 / 467775.0};
        double acc = 0.0;
        for (int k = 5; k >= 0; --k)
            acc = acc * u + c[k];
        return acc * u;
    }
    const double s = std::sqrt(u);
    const double e = erf(s);
    return (3.0 * e - erf(3.0 * s)) / (2.0 * e);
}

double lambda_h(double h, double lambda_conv) {
    if (!(h > 0.0) || !(lambda_conv > 0.0))
        throw DomainError("lambda_h needs h > 0 and lambda > 0");
    return 2.0 / (h * h) * fv_phi(h * h * lambda_conv / 8.0);
}

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0))
        throw DomainError("alpha must lie in (1,2], got " + fmt(alpha));
}

PaperConstant birth_death_constant(const std::vector<double> &a, const std::vector<double> &b,
                                   double alpha) {
    const std::size_t S = a.size();
    for (std::size_t n = 0; n + 1 < S; ++n) {
        if (a[n + 1] > a[n])
            throw HypothesisError("birth rates must be nonincreasing (violated at n = " +
                                  std::to_string(n) + ")");
        if (b[n + 1] < b[n])
            throw HypothesisError("death rates must be nondecreasing (violated at n = " +
                                  std::to_string(n) + ")");
    }
    const auto e = ConvexEntropy::power(alpha);
    std::vector<double> per_n(S, std::numeric_limits<double>::infinity());
    // Terms with a(n) = 0 carry no weight in the curvature sum.
    parallel_for(S - 1, [&](std::size_t n) {
        if (a[n] == 0.0)
            return;
        const double A = a[n] - a[n + 1], B = b[n + 1] - b[n];
        per_n[n] = A + B + big_theta(e, A, B, 1e-8).value;
    });
    const auto it = std::min_element(per_n.begin(), per_n.end());
    if (!(*it > 0.0) || !std::isfinite(*it))
        throw HypothesisError("birth-death curvature condition yields no positive constant");
    return {*it,
            "birth-death: min_n A_n + B_n + Theta(A_n, B_n)",
            {{"alpha", alpha}, {"argmin_n", static_cast<double>(it - per_n.begin())}},
            {}};
}

} // namespace

PaperConstant paper_lambda(const ModelSpec &spec, double alpha) {
    require_alpha(alpha);
    if (const auto *s = std::get_if<BirthDeathSpec>(&spec)) {
        build_birth_death(s->a, s->b); // validates the rates
        return birth_death_constant(s->a, s->b, alpha);
    }
    if (const auto *s = std::get_if<ZeroRangeSpec>(&spec)) {
        build_zero_range(s->L, s->N, s->rates);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto &row : s->rates)
            for (int n = 0; n < s->N; ++n) {
                const double inc = row[n + 1] - row[n];
                lo = std::min(lo, inc);
                hi = std::max(hi, inc);
            }
        const double c = lo, delta = hi - lo;
        if (!(c > 0.0))
            throw HypothesisError("zero-range rate increments must be bounded below by c > 0");
        if (!(delta < std::pow(2.0, 2.0 - alpha) * c))
            throw HypothesisError("zero-range increment spread delta must be below 2^(2-alpha) c");
        const double value = alpha * c - (3.0 + std::pow(2.0, alpha - 2.0) - alpha) * delta;
        if (!(value > 0.0))
            throw HypothesisError("zero-range constant is not positive");
        return {value,
                "zero-range: alpha c - (3 + 2^(alpha-2) - alpha) delta",
                {{"alpha", alpha}, {"c", c}, {"delta", delta}},
                {}};
    }
    if (const auto *s = std::get_if<BernoulliLaplaceSpec>(&spec)) {
        build_bernoulli_laplace(s->L, s->N, s->lambda);
        const auto [mn, mx] = std::minmax_element(s->lambda.begin(), s->lambda.end());
        const double c = *mn, delta = *mx - *mn;
        if (!(delta <= std::pow(2.0, 2.0 - alpha) * c))
            throw HypothesisError(
                "Bernoulli-Laplace intensity spread delta must not exceed 2^(2-alpha) c");
        const double value = alpha * c - (2.5 + std::pow(2.0, alpha - 3.0) - alpha) * delta;
        if (!(value > 0.0))
            throw HypothesisError("Bernoulli-Laplace constant is not positive");
        PaperConstant out{value,
                          "Bernoulli-Laplace: alpha c - (5/2 + 2^(alpha-3) - alpha) delta",
                          {{"alpha", alpha}, {"c", c}, {"delta", delta}},
                          {}};
        if (delta == 0.0) {
            const double L = s->L;
            out.references.emplace_back("homogeneous_sharper", (alpha * L - 2.0 * alpha + 4.0) * c / L);
            out.references.emplace_back("bobkov_tetali", alpha * (L + 2.0) * c / (2.0 * L));
        }
        return out;
    }
    if (const auto *s = std::get_if<RandomTranspositionSpec>(&spec)) {
        if (s->n < 2)
            throw DomainError("random transposition needs n >= 2");
        const double n = s->n;
        return {8.0 / (n * (n - 1.0)), "random transposition: 8/(n(n-1))", {{"n", n}}, {}};
    }
    const auto &s = std::get<FokkerPlanckSpec>(spec);
    if (!(s.lambda_conv > 0.0))
        throw HypothesisError("the convexity constant lambda must be positive");
    const double v2 = s.V.min_second_derivative();
    if (v2 < s.lambda_conv * (1.0 - 1e-6))
        throw HypothesisError("potential violates V'' >= lambda: min V'' = " + fmt(v2) +
                              " < " + fmt(s.lambda_conv));
    const double h = 1.0 / s.cells;
    const double lh = lambda_h(h, s.lambda_conv);
    return {2.0 * alpha * lh,
            "finite-volume Fokker-Planck: 2 alpha lambda_h",
            {{"alpha", alpha}, {"h", h}, {"lambda", s.lambda_conv}, {"lambda_h", lh}},
            {}};
}

} // namespace beckner
