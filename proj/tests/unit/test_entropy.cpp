#include <doctest.h>

#include <cmath>
#include <random>

#include "beckner/entropy.hpp"
#include "beckner/errors.hpp"
#include "oracles.hpp"

using namespace beckner;
using doctest::Approx;

TEST_CASE("phi closed forms") {
    CHECK(ConvexEntropy::power(1.5).phi(1.0) == Approx(0.0));
    CHECK(ConvexEntropy::power(2.0).phi(3.0) == Approx(4.0));
    CHECK(ConvexEntropy::power(1.5).phi(4.0) == Approx(5.0));
    CHECK(ConvexEntropy::log().phi(std::exp(1.0)) == Approx(1.0));
    CHECK(ConvexEntropy::power(2.0).kind() == EntropyKind::Quadratic);
    CHECK_THROWS_AS(ConvexEntropy::power(1.5).phi(0.0), DomainError);
    CHECK_THROWS_AS(ConvexEntropy::log().phi(-1.0), DomainError);
    CHECK_THROWS_AS(ConvexEntropy::power(2.5), DomainError);
}

TEST_CASE("phi matches the oracle and is nonnegative") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (double a : {1.1, 1.5, 1.9}) {
        const auto e = ConvexEntropy::power(a);
        for (int k = 0; k < 200; ++k) {
            const double s = std::exp(u(rng));
            CHECK(e.phi(s) == Approx(oracle::phi_power(a, s)).epsilon(1e-10));
            CHECK(e.phi(s) >= 0.0);
        }
    }
}

TEST_CASE("shifted evaluation agrees with the direct form") {
    for (auto e : {ConvexEntropy::log(), ConvexEntropy::power(1.3), ConvexEntropy::quadratic()})
        for (double eps : {-0.5, -1e-3, 1e-3, 0.7, 4.0}) {
            CHECK(e.phi_shifted(eps) == Approx(e.phi(1.0 + eps)).epsilon(1e-10));
            CHECK(e.d1_shifted(eps) == Approx(e.d1(1.0 + eps)).epsilon(1e-10));
        }
    // Small deviations: phi(1+eps) ~ phi''(1) eps^2 / 2.
    const auto e = ConvexEntropy::power(1.5);
    CHECK(e.phi_shifted(1e-9) == Approx(0.5 * e.d2(1.0) * 1e-18).epsilon(1e-6));
}

TEST_CASE("d1_inverse inverts d1") {
    for (auto e : {ConvexEntropy::log(), ConvexEntropy::power(1.5), ConvexEntropy::quadratic()})
        for (double s : {0.01, 0.5, 1.0, 3.0, 50.0})
            CHECK(e.d1_inverse(e.d1(s)) == Approx(s).epsilon(1e-12));
    // phi_1.5' > -3 on (0, inf).
    CHECK_THROWS_AS(ConvexEntropy::power(1.5).d1_inverse(-10.0), DomainError);
}

TEST_CASE("theta examples") {
    CHECK(MeanFunction(ConvexEntropy::power(2.0))(7.0, 2.0) == Approx(0.5));
    CHECK(MeanFunction(ConvexEntropy::power(1.5))(4.0, 1.0) == Approx(1.0));
    CHECK(MeanFunction(ConvexEntropy::log())(std::exp(1.0), 1.0) == Approx(std::exp(1.0) - 1.0));
    const auto e = ConvexEntropy::power(1.3);
    CHECK(MeanFunction(e)(0.7, 0.7 + 1e-14) == Approx(1.0 / e.d2(0.7)).epsilon(1e-8));
    CHECK_THROWS_AS(MeanFunction{e}(0.0, 1.0), DomainError);
}

TEST_CASE("theta symmetry, diagonal continuity and homogeneity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(std::log(1e-2), std::log(1e2));
    for (double a : {1.1, 1.5, 1.9}) {
        const MeanFunction th(ConvexEntropy::power(a));
        for (int k = 0; k < 300; ++k) {
            const double s = std::exp(u(rng)), t = std::exp(u(rng));
            CHECK(std::abs(th(s, t) - th(t, s)) <= 1e-12 * th(s, t));
            CHECK(th(s, t) == Approx(oracle::theta_power(a, s, t)).epsilon(1e-9));
            CHECK(std::abs(th(s, s) * th.entropy().d2(s) - 1.0) <= 1e-10);
            for (double lam : {1e-2, 1e-1, 10.0, 1e2}) {
                CHECK(th(lam * s, lam * t) == Approx(std::pow(lam, 2.0 - a) * th(s, t)).epsilon(1e-10));
                const auto [p1, p2] = th.partials(s, t);
                const auto [q1, q2] = th.partials(lam * s, lam * t);
                const double f = std::pow(lam, 1.0 - a);
                CHECK(q1 == Approx(f * p1).epsilon(1e-9).scale(std::abs(f * p1) + 1e-300));
                CHECK(q2 == Approx(f * p2).epsilon(1e-9).scale(std::abs(f * p2) + 1e-300));
            }
        }
    }
}

TEST_CASE("theta partials") {
    const MeanFunction quad(ConvexEntropy::power(2.0));
    const auto [z1, z2] = quad.partials(3.0, 0.2);
    CHECK(z1 == 0.0);
    CHECK(z2 == 0.0);

    const MeanFunction th(ConvexEntropy::power(1.5));
    auto fd = [&](double h) {
        const double d1 = (th(2.0 + h, 1.0) - th(2.0 - h, 1.0)) / (2 * h);
        const double d2 = (th(2.0, 1.0 + h) - th(2.0, 1.0 - h)) / (2 * h);
        return std::pair{d1, d2};
    };
    const auto [p1, p2] = th.partials(2.0, 1.0);
    const auto [f1, f2] = fd(1e-6);
    CHECK(std::abs(p1 - f1) <= 1e-6);
    CHECK(std::abs(p2 - f2) <= 1e-6);
    // Second-order convergence of the central difference.
    const double r1 = std::abs(fd(1e-2).first - p1), r2 = std::abs(fd(5e-3).first - p1);
    CHECK(r1 / r2 == Approx(4.0).epsilon(0.05));
    // Swapping arguments swaps the partials.
    const auto [s1, s2] = th.partials(1.0, 2.0);
    CHECK(s1 == Approx(p2));
    CHECK(s2 == Approx(p1));
    CHECK(p1 >= 0.0);
    CHECK(p2 >= 0.0);
    const auto [h1, h2] = th.partials(8.0, 4.0);
    CHECK(h1 == Approx(std::pow(4.0, -0.5) * p1));
    (void)h2;
}

TEST_CASE("big_theta") {
    CHECK(big_theta(ConvexEntropy::power(2.0), 3.0, 5.0).value == Approx(8.0).epsilon(1e-12));
    CHECK(big_theta(ConvexEntropy::power(1.5), 0.0, 0.0).value == 0.0);
    CHECK_THROWS_AS(big_theta(ConvexEntropy::power(1.5), -1.0, 1.0), DomainError);

    for (auto [a, A, B] : {std::tuple{1.5, 1.0, 1.0}, std::tuple{1.8, 1.0, 1.0},
                           std::tuple{1.2, 0.0, 5.0}, std::tuple{1.5, 2.0, 0.5}}) {
        const auto th = big_theta(ConvexEntropy::power(a), A, B);
        const double v = th.value;
        const double grid = oracle::big_theta_grid(a, A, B, 401);
        INFO("alpha = " << a << ", A = " << A << ", B = " << B);
        CHECK(v >= big_theta_lower_bound(a, A, B) - 1e-12);
        CHECK(v <= A + B + 1e-12);
        // The grid value is an upper bound; limits at r -> 0, inf lie outside its box.
        CHECK(v <= grid + 1e-9);
        if (th.attained)
            CHECK(v >= grid - 1e-6 * (A + B));
    }
    CHECK(big_theta_lower_bound(1.5, 2.0, 2.0) == Approx(2.0));
    CHECK(big_theta_lower_bound(1.2, 0.0, 5.0) == Approx(1.0));
    CHECK(big_theta_lower_bound(2.0 - 1e-9, 1.0, 1.0) == Approx(2.0));
    CHECK(big_theta(ConvexEntropy::power(2.0), 1.0, 1.0).value == 2.0);
}

TEST_CASE("theta surface") {
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k)
        grid.push_back(k);
    for (const auto &row : theta_surface(2.0, grid, grid))
        CHECK(std::abs(row.theta - (row.A + row.B)) <= 1e-9);
    for (const auto &row : theta_surface(1.01, grid, grid)) {
        CHECK(row.theta >= row.lower_bound - 1e-9);
        CHECK(row.theta <= row.upper_bound + 1e-9);
    }
    const auto csv = theta_surface_csv(theta_surface(1.5, {1.0}, {2.0}));
    CHECK(csv.rfind("A,B,theta,lower_bound,upper_bound\n", 0) == 0);
    CHECK_THROWS_AS(theta_surface(2.5, grid, grid), DomainError);
}

TEST_CASE("theta identities and concavity reports") {
    CHECK(verify_theta_identities(1.5, 10000, 42).passed());
    CHECK(verify_theta_identities(2.0 - 1e-6, 2000, 1).passed());
    const std::vector<double> m_grid{0.1, 0.25, 0.5, 0.75, 0.9};
    CHECK(verify_concavity(ConvexEntropy::power(1.5), m_grid, 2000, 5).passed());
    CHECK(verify_concavity(ConvexEntropy::log(), m_grid, 2000, 5).passed());
    CHECK(verify_concavity(ConvexEntropy::quadratic(), m_grid, 500, 5).passed());
}

TEST_CASE("mixed second partial of Y matches the closed form") {
    const double a = 1.5, m = 0.3, s = 1.7, t = 0.6, h = 1e-4;
    const auto e = ConvexEntropy::power(a);
    auto Y = [&](double x, double y) { return e.mix(x, y, m); };
    const double y = Y(s, t);
    const double num = (Y(s + h, t + h) - Y(s + h, t - h) - Y(s - h, t + h) + Y(s - h, t - h)) / (4 * h * h);
    const double closed = m * (1 - m) * (2 - a) * std::pow(s * t, a - 3.0) * std::pow(y, 3.0 - 2 * a) * s * t;
    CHECK(num == Approx(closed).epsilon(1e-5));
}
