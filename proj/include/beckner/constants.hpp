#ifndef BECKNER_CONSTANTS_HPP
#define BECKNER_CONSTANTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "beckner/chain.hpp"
#include "beckner/models.hpp"

namespace beckner {

enum class FunctionalKind { Poincare, ModifiedLogSobolev, LogSobolev, Beckner };
enum class EstimateMethod { Spectral, MultistartGradient };

std::string to_string(FunctionalKind kind);
std::string to_string(EstimateMethod method);

struct ConstantEstimate {
    FunctionalKind kind = FunctionalKind::Poincare;
    double alpha = 2.0; // meaningful for Beckner only
    double value = 0.0;
    Vector minimizer;
    EstimateMethod method = EstimateMethod::Spectral;
    std::size_t iterations = 0;     // of the winning start
    double gradient_norm = 0.0;     // dimensionless, at the minimizer
    std::size_t starts = 0;
    std::size_t converged_starts = 0;
    std::string start_label;        // which initialization won
};

struct OptimizerOptions {
    std::size_t starts = 32;
    std::size_t max_iter = 4000;
    double tol = 1e-9;
    std::uint64_t seed = 0;
};

/// Smallest nonzero eigenvalue of -L on L^2(pi). DegenerateInputError if
/// the chain is reducible.
double spectral_gap(const FiniteChain &chain);
/// Eigenfunction for spectral_gap, normalized so pi[f^2] = 1.
Vector gap_eigenfunction(const FiniteChain &chain);

/// The quotients minimized below, evaluated at a density with pi[rho] = 1:
/// Beckner E(phi_a'(rho), rho)/Ent_a(rho), MLSI E(log rho, rho)/Ent_1(rho),
/// LSI E(sqrt rho, sqrt rho)/Ent_1(rho), Poincare E(rho,rho)/Var(rho).
double functional_quotient(const FiniteChain &chain, FunctionalKind kind, double alpha,
                           const Vector &rho);

ConstantEstimate poincare_constant(const FiniteChain &chain);
ConstantEstimate beckner_constant(const FiniteChain &chain, double alpha,
                                  const OptimizerOptions &opts = {});
ConstantEstimate mlsi_constant(const FiniteChain &chain, const OptimizerOptions &opts = {});
ConstantEstimate lsi_constant(const FiniteChain &chain, const OptimizerOptions &opts = {});

struct ConstantsRow {
    double alpha = 0.0;
    double paper_bound = 0.0; // NaN when the theorem hypotheses fail
    double beckner_hat = 0.0;
    double two_lambda_P = 0.0;
    double lambda_M = 0.0;
    double lambda_L = 0.0;
    bool ordering_pass = false;
    std::vector<std::pair<std::string, double>> references;
};

/// One row per alpha; ordering_pass covers
/// paper_bound <= beckner_hat <= 2 lambda_P and 4 lambda_L <= lambda_M <= 2 lambda_P.
std::vector<ConstantsRow> constants_report(const FiniteChain &chain, const ModelSpec &spec,
                                           const std::vector<double> &alphas,
                                           const OptimizerOptions &opts = {},
                                           double slack = 1e-6);

/// CSV `alpha,paper_bound,beckner_hat,two_lambda_P,ordering_pass`.
std::string constants_csv(const std::vector<ConstantsRow> &rows);

} // namespace beckner

#endif
