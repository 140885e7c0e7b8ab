#ifndef BECKNER_FOKKER_PLANCK_HPP
#define BECKNER_FOKKER_PLANCK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "beckner/chain.hpp"
#include "beckner/dynamics.hpp"
#include "beckner/models.hpp"

namespace beckner {

/// Per-cell certificate behind the finite-volume decay rate.
///
/// The log-concavity inequality is checked in its dimensionally consistent
/// form (1 - h^2 lambda_h / 2) pi_n >= sqrt(pi_{n-1} pi_{n+1}); it gives
/// a(n) - a(n+1) >= (lambda_h/2) sqrt(pi_{n+1}/pi_n) and
/// b(n+1) - b(n) >= (lambda_h/2) sqrt(pi_n/pi_{n+1}), and through the
/// arithmetic-geometric mean step the birth-death condition with constant
/// alpha * lambda_h.
struct FvCondition {
    Report report;
    double h = 0.0;
    double lambda_h = 0.0;
    double certified_rate = 0.0;  // alpha * lambda_h
    double stated_rate = 0.0;     // 2 alpha lambda_h
    /// min over cells of a(n)-a(n+1)+b(n+1)-b(n)+Theta(...).
    double condition_min = 0.0;
    std::size_t condition_argmin = 0;
    /// Cells where the unscaled form (1 - lambda_h) pi_n >= sqrt(pi_{n-1} pi_{n+1})
    /// fails; diagnostic only.
    std::size_t unscaled_form_violations = 0;
};

FvCondition fv_condition_check(const FokkerPlanckSpec &spec, double alpha);

struct FvExperiment {
    std::string potential;
    int cells = 0;
    double h = 0.0;
    double lambda_conv = 0.0;
    double alpha = 0.0;
    double lambda_h = 0.0;
    double bound = 0.0; // 2 alpha lambda_h
    Trajectory trajectory;
    DecayFit fit;
    bool stationary = false; // rho0 = 1: nothing decays
    Report report;
};

/// Left and right sides of the discrete Beckner inequality
/// 2 lambda_h sum pi_n (rho_n^a - 1) <= sum sqrt(pi_n pi_{n+1}) / h^2 (grad rho^{a-1})(grad rho),
/// evaluated on a deviation eps = rho - 1.
std::pair<double, double> fv_beckner_sides(const FvDiscretization &d, double lambda_h,
                                           double alpha, const Vector &eps);

/// Evolve rho0 on `samples` equally spaced times in [0, t_end] and check the
/// entropy bound with rate 2 alpha lambda_h and the discrete Beckner inequality.
/// t_end <= 0 selects 20 / (2 alpha lambda_h). HypothesisError if V'' >= lambda fails.
FvExperiment run_fv_experiment(const FokkerPlanckSpec &spec, double alpha, const Vector &rho0,
                               double t_end = 0.0, std::size_t samples = 201);

struct RefinementRow {
    int cells = 0;
    double h = 0.0;
    double lambda_h = 0.0;
    double fitted_rate = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// One seeded experiment per mesh, rows in the order of cells_list.
std::vector<RefinementRow> mesh_refinement_study(const Potential &V, double lambda_conv,
                                                 const std::vector<int> &cells_list,
                                                 double alpha, std::uint64_t seed = 0);

/// (lambda - lambda_h) of one row over that of the next.
std::vector<double> refinement_ratios(const std::vector<RefinementRow> &rows, double lambda_conv);

/// CSV `h,lambda_h,fitted_rate,bound_2alpha_lambda_h,pass`.
std::string refinement_csv(const std::vector<RefinementRow> &rows);

} // namespace beckner

#endif
