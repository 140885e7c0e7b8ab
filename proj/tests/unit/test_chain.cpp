#include <doctest.h>

#include <numeric>
#include <random>

#include "beckner/chain.hpp"
#include "beckner/errors.hpp"
#include "beckner/models.hpp"
#include "beckner/util.hpp"
#include "oracles.hpp"

using namespace beckner;
using doctest::Approx;

namespace {

FiniteChain two_state(double a, double b) {
    Matrix rates(2, 1);
    rates << a, b;
    Vector pi(2);
    pi << b, a;
    return FiniteChain({{0}, {1}}, {Move{"flip", 0, {1, 0}}}, rates, pi);
}

std::vector<FiniteChain> all_models() {
    std::vector<FiniteChain> out;
    out.push_back(build_chain(birth_death_linear(8)));
    out.push_back(build_chain(zero_range_linear(3, 3, 1.0)));
    out.push_back(build_chain(bernoulli_laplace_homogeneous(5, 2, 1.0)));
    out.push_back(build_random_transposition(4));
    out.push_back(build_fokker_planck_fv(Potential::quadratic(2.0), 16, 4.0));
    return out;
}

Vector random_vector(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Vector v(static_cast<Eigen::Index>(n));
    for (auto &x : v)
        x = g(rng);
    return v;
}

} // namespace

TEST_CASE("generator on a two-state chain") {
    const auto c = two_state(2.0, 3.0);
    CHECK(generator_apply(c, Vector::Ones(2)).norm() == 0.0);
    const Vector Lf = generator_apply(c, Vector::Unit(2, 1));
    CHECK(Lf[0] == Approx(2.0));
    CHECK(Lf[1] == Approx(-3.0));
    CHECK(c.pi().sum() == Approx(1.0).epsilon(1e-12));
    CHECK(c.pi()[0] == Approx(0.6));
}

TEST_CASE("generator matches the dense oracle for random transpositions") {
    const auto c = build_random_transposition(3);
    const Matrix Q = oracle::random_transposition_generator(c, 3);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) {
        const Vector f = random_vector(c.size(), rng);
        CHECK((generator_apply(c, f) - Q * f).norm() <= 1e-13 * (1.0 + f.norm()));
    }
    CHECK((dense_generator(c) - Q).norm() <= 1e-14);
}

TEST_CASE("Dirichlet form") {
    const auto c = two_state(2.0, 3.0);
    const Vector ind = Vector::Unit(2, 1);
    CHECK(dirichlet_form(c, ind, Vector::Ones(2)) == 0.0);
    CHECK(dirichlet_form(c, ind, ind) == Approx(c.pi()[0] * 2.0));

    std::mt19937_64 rng(2);
    for (const auto &m : all_models()) {
        const Matrix Q = dense_generator(m);
        for (int k = 0; k < 100; ++k) {
            const Vector f = random_vector(m.size(), rng), g = random_vector(m.size(), rng);
            const double e = dirichlet_form(m, f, g);
            const double adj = -(m.pi().array() * f.array() * generator_apply(m, g).array()).sum();
            CHECK(e == Approx(adj).epsilon(1e-10).scale(std::abs(adj) + 1e-12));
            CHECK(e == Approx(dirichlet_form(m, g, f)).epsilon(1e-12));
            CHECK(e == Approx(oracle::dirichlet(Q, m.pi(), f, g)).epsilon(1e-10).scale(std::abs(e) + 1e-12));
            CHECK(dirichlet_form(m, f, f) >= 0.0);
        }
        // Vanishes exactly on constants for the irreducible models.
        CHECK(dirichlet_form(m, Vector::Constant(m.size(), 2.5), Vector::Constant(m.size(), 2.5)) == 0.0);
    }
}

TEST_CASE("stationarity and self-adjointness on every model") {
    std::mt19937_64 rng(4);
    for (const auto &m : all_models()) {
        const auto S = static_cast<Eigen::Index>(m.size());
        for (Eigen::Index i = 0; i < S; ++i)
            CHECK(std::abs(pi_mean(m, generator_apply(m, Vector::Unit(S, i)))) <= 1e-12 * m.max_rate());
        for (int k = 0; k < 100; ++k) {
            const Vector f = random_vector(m.size(), rng), g = random_vector(m.size(), rng);
            const double lhs = pi_mean(m, Vector(f.array() * generator_apply(m, g).array()));
            const double rhs = pi_mean(m, Vector(g.array() * generator_apply(m, f).array()));
            CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + std::abs(rhs) + 1e-12));
        }
    }
}

TEST_CASE("entropy") {
    const auto zr = build_chain(zero_range_linear(3, 3, 1.0));
    CHECK(entropy(zr, ConvexEntropy::log(), Vector::Ones(zr.size())) == 0.0);
    auto rng = make_rng(5, "entropy");
    std::uniform_real_distribution<double> u(0.1, 3.0);
    Vector raw(zr.size());
    for (auto &x : raw)
        x = u(rng);
    const Vector rho = normalize_density(zr, raw);
    const double var = (zr.pi().array() * rho.array().square()).sum() - 1.0;
    CHECK(entropy(zr, ConvexEntropy::quadratic(), rho) == Approx(var).epsilon(1e-12));
    for (double a : {1.1, 1.5, 1.9}) {
        const double direct = oracle::sum_entropy(zr.pi(), rho, [&](double s) { return oracle::phi_power(a, s); });
        CHECK(entropy(zr, ConvexEntropy::power(a), rho) == Approx(direct).epsilon(1e-12));
        CHECK(entropy_of_deviation(zr, ConvexEntropy::power(a), rho - Vector::Ones(rho.size())) ==
              Approx(direct).epsilon(1e-10));
    }
    const double lg = oracle::sum_entropy(zr.pi(), rho, oracle::phi_log);
    CHECK(entropy(zr, ConvexEntropy::log(), rho) == Approx(lg).epsilon(1e-12));
    Vector bad = rho;
    bad[0] = 0.0;
    CHECK_THROWS_AS(entropy(zr, ConvexEntropy::log(), bad), DomainError);

    // Relabeling invariance.
    std::vector<std::size_t> perm(zr.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto rel = permute_states(zr, perm);
    Vector rho_rel(zr.size());
    for (std::size_t k = 0; k < perm.size(); ++k)
        rho_rel[static_cast<Eigen::Index>(k)] = rho[static_cast<Eigen::Index>(perm[k])];
    CHECK(entropy(rel, ConvexEntropy::power(1.5), rho_rel) ==
          Approx(entropy(zr, ConvexEntropy::power(1.5), rho)).epsilon(1e-13));
    CHECK(dirichlet_form(rel, rho_rel, rho_rel) == Approx(dirichlet_form(zr, rho, rho)).epsilon(1e-12));
}

TEST_CASE("reversibility diagnostics") {
    CHECK(check_reversibility(build_chain(birth_death_linear(6)), 50, 1).passed());
    CHECK(check_reversibility(build_random_transposition(4), 50, 1).passed());
    CHECK(check_inverse_consistency(build_random_transposition(4)).passed());

    const auto bd = build_chain(birth_death_linear(6));
    Matrix rates = bd.rates();
    rates(2, birth_move()) *= 1.1;
    const FiniteChain bad(bd.states(), bd.moves(), rates, bd.pi());
    const auto rep = check_reversibility(bad, 50, 1);
    REQUIRE_FALSE(rep.passed());
    bool located = false;
    for (const auto &c : rep.checks)
        if (!c.passed && c.witness.find("2") != std::string::npos)
            located = true;
    CHECK(located);
    CHECK_THROWS_AS(dirichlet_form(bad, Vector::Unit(7, 2), Vector::Unit(7, 3)), ReversibilityError);
}

TEST_CASE("normalize_density") {
    const auto bd = build_chain(birth_death_linear(6));
    const Vector one = normalize_density(bd, Vector::Constant(7, 5.0));
    CHECK((one - Vector::Ones(7)).cwiseAbs().maxCoeff() <= 1e-14);
    const Vector ind = normalize_density(bd, Vector::Unit(7, 3));
    CHECK(ind[3] == Approx(1.0 / bd.pi()[3]).epsilon(1e-9));
    CHECK(pi_mean(bd, ind) == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(normalize_density(bd, Vector::Zero(7)), DomainError);
    CHECK_NOTHROW(require_density(bd, ind));
    CHECK_THROWS_AS(require_density(bd, 2.0 * ind), DomainError);
}

TEST_CASE("JSON round trip") {
    for (const auto &m : {build_chain(zero_range_linear(3, 2, 1.0)), build_random_transposition(3)}) {
        const auto back = chain_from_json(chain_to_json(m));
        CHECK(back.states() == m.states());
        CHECK(back.pi() == m.pi());
        CHECK(back.rates() == m.rates());
        REQUIRE(back.num_moves() == m.num_moves());
        for (std::size_t g = 0; g < m.num_moves(); ++g) {
            CHECK(back.move(g).map == m.move(g).map);
            CHECK(back.move(g).inverse == m.move(g).inverse);
        }
    }
    CHECK_THROWS(chain_from_json("{\"states\": 3}"));
}

TEST_CASE("construction errors") {
    Matrix rates(2, 1);
    rates << 1.0, 1.0;
    Vector pi(2);
    pi << 0.5, 0.5;
    CHECK_THROWS_AS(FiniteChain({{0}, {1}}, {Move{"flip", 0, {1, 5}}}, rates, pi), ConstructionError);
    Vector neg(2);
    neg << -1.0, 2.0;
    CHECK_THROWS_AS(FiniteChain({{0}, {1}}, {Move{"flip", 0, {1, 0}}}, rates, neg), ConstructionError);
    CHECK_THROWS_AS(build_chain(birth_death_linear(3)).index_of({9}), ConstructionError);
}
