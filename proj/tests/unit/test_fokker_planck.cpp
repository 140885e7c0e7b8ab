#include <doctest.h>

#include <cmath>

#include "beckner/bochner.hpp"
#include "beckner/errors.hpp"
#include "beckner/fokker_planck.hpp"
#include "beckner/models.hpp"
#include "beckner/util.hpp"

using namespace beckner;
using doctest::Approx;

TEST_CASE("cell certificate on a convex potential") {
    const FokkerPlanckSpec spec{Potential::quadratic(2.0), 16, 4.0};
    for (double a : {1.5, 2.0}) {
        const auto cond = fv_condition_check(spec, a);
        INFO("alpha = " << a);
        CHECK(cond.report.passed());
        CHECK(cond.certified_rate == Approx(a * lambda_h(1.0 / 16, 4.0)));
        CHECK(cond.condition_min >= cond.certified_rate - 1e-9);
        // The unit-free form of the cell inequality cannot hold: lambda_h ~ 4 > 1.
        CHECK(cond.unscaled_form_violations == 14);
    }
    // alpha = 2: Theta(A,B) = A + B, so the condition is 2 (A + B).
    const auto d = fv_discretize(spec.V, 16);
    double lo = 1e300;
    for (int n = 0; n + 1 < 16; ++n)
        lo = std::min(lo, 2.0 * (d.a[n] - d.a[n + 1] + d.b[n + 1] - d.b[n]));
    CHECK(fv_condition_check(spec, 2.0).condition_min == Approx(lo).epsilon(1e-10));
}

TEST_CASE("concave potential is rejected with a located cell") {
    const FokkerPlanckSpec spec{Potential::quadratic(-1.0), 16, 1.0};
    const auto cond = fv_condition_check(spec, 1.5);
    REQUIRE_FALSE(cond.report.passed());
    for (const auto &c : cond.report.checks)
        if (!c.passed)
            CHECK(c.witness.rfind("cell ", 0) == 0);
    CHECK_THROWS_AS(run_fv_experiment(spec, 1.5, Vector::Ones(16)), HypothesisError);
    CHECK_THROWS_AS(run_fv_experiment(FokkerPlanckSpec{Potential::quadratic(0.0), 16, 1.0}, 1.5, Vector::Ones(16)),
                    HypothesisError);
}

TEST_CASE("finite-volume chain equals the birth-death chain") {
    const auto d = fv_discretize(Potential::quadratic(2.0), 12);
    const auto fv = build_fokker_planck_fv(Potential::quadratic(2.0), 12, 4.0);
    const auto bd = build_birth_death(d.a, d.b);
    CHECK((fv.rates() - bd.rates()).cwiseAbs().maxCoeff() <= 1e-14 * fv.max_rate());
    CHECK((fv.pi() - bd.pi()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("decay experiment") {
    const FokkerPlanckSpec spec{Potential::quadratic(2.0), 32, 4.0};
    const auto chain = build_chain(spec);
    auto rng = make_rng(1, "fv");
    const Vector rho0 = random_density(chain, rng, 1.0);
    const auto ex = run_fv_experiment(spec, 1.5, rho0);
    CHECK(ex.report.passed());
    CHECK(ex.bound == Approx(3.0 * lambda_h(1.0 / 32, 4.0)));
    CHECK(ex.fit.rate >= ex.bound);

    const auto flat = run_fv_experiment(spec, 1.5, Vector::Ones(32));
    CHECK(flat.stationary);
    CHECK(flat.report.passed());
    for (double v : flat.trajectory.entropy_values)
        CHECK(v == 0.0);

    // Beckner sides along the trajectory.
    const auto d = fv_discretize(spec.V, 32);
    for (std::size_t k = 0; k < ex.trajectory.times.size(); k += 20) {
        const auto [lhs, rhs] = fv_beckner_sides(d, ex.lambda_h, 1.5, ex.trajectory.deviations[k]);
        CHECK(lhs <= rhs + 1e-9 * std::abs(rhs));
    }
    const auto [l0, r0] = fv_beckner_sides(d, ex.lambda_h, 1.5, Vector::Zero(32));
    CHECK(l0 == 0.0);
    CHECK(r0 == 0.0);
}

TEST_CASE("mesh refinement") {
    const std::vector<int> cells{8, 16, 32, 64};
    for (double a : {1.5, 2.0}) {
        const auto rows = mesh_refinement_study(Potential::quadratic(2.0), 4.0, cells, a, 3);
        REQUIRE(rows.size() == 4);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            CHECK(rows[k].pass);
            CHECK(rows[k].fitted_rate >= rows[k].bound);
            CHECK(rows[k].lambda_h < 4.0);
            if (k > 0)
                CHECK(rows[k].lambda_h > rows[k - 1].lambda_h);
        }
        for (double r : refinement_ratios(rows, 4.0)) {
            CHECK(r >= 3.5);
            CHECK(r <= 4.5);
        }
        CHECK(refinement_csv(rows).rfind("h,lambda_h,fitted_rate,bound_2alpha_lambda_h,pass\n", 0) == 0);
    }
}
