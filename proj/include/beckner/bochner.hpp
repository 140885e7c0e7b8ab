#ifndef BECKNER_BOCHNER_HPP
#define BECKNER_BOCHNER_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "beckner/chain.hpp"
#include "beckner/entropy.hpp"
#include "beckner/models.hpp"
#include "beckner/report.hpp"
#include "beckner/util.hpp"

namespace beckner {

struct RTriple {
    std::size_t gamma;
    std::size_t delta;
    double value;
};

/// Sparse R(eta, gamma, delta), stored per state over its nonzero entries.
/// Gamma(eta, gamma, delta) = c(eta,gamma) c(eta,delta) - R(eta, gamma, delta).
class BochnerStructure {
  public:
    explicit BochnerStructure(std::vector<std::vector<RTriple>> rows);

    std::size_t size() const { return rows_.size(); }
    const std::vector<RTriple> &row(std::size_t state) const { return rows_[state]; }
    std::size_t nonzeros() const;
    double R(std::size_t state, std::size_t gamma, std::size_t delta) const;
    double Gamma(const FiniteChain &chain, std::size_t state, std::size_t gamma,
                 std::size_t delta) const;

    /// Copy with R(state, gamma, delta) multiplied by `factor` (only that
    /// ordered triple, so symmetry is broken as well).
    BochnerStructure perturbed(std::size_t state, std::size_t gamma, std::size_t delta,
                               double factor) const;

  private:
    std::vector<std::vector<RTriple>> rows_;
};

/// The R-function of the Bochner construction for each model family; the
/// finite-volume chain uses the birth-death R. `chain` must be build_chain(spec).
BochnerStructure r_function(const ModelSpec &spec, const FiniteChain &chain);

/// R = 0; useful as a vacuous case.
BochnerStructure zero_structure(const FiniteChain &chain);

/// Symmetry, the adjointness identity on random psi plus its pointwise form,
/// and commutation.
Report verify_assumption(const FiniteChain &chain, const BochnerStructure &bs,
                         std::size_t trials, std::uint64_t seed, double tol = 1e-10);

using PairFunction = std::function<double(std::size_t, std::size_t)>;

struct IdentityGap {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;   // |lhs - rhs|
    double scale = 0.0; // sum of absolute summands
    bool passed = true;
};

/// Both sides of the discrete Bochner identity
///   pi[sum R beta(eta,d eta) grad_d chi grad_g psi]
///     = 1/4 pi[sum R grad_g(beta(eta,d eta) grad_d chi) grad_d grad_g psi].
/// DomainError if beta is not symmetric on the pairs it is evaluated at.
IdentityGap bochner_identity_check(const FiniteChain &chain, const BochnerStructure &bs,
                                   const Vector &chi, const Vector &psi, const PairFunction &beta,
                                   double tol = 1e-10);

struct PointwiseResidual {
    double max_relative = 0.0;
    std::size_t evaluated = 0;
    std::string witness;
};

/// The pointwise identity behind the proof of the proposition, at sampled
/// triples with R > 0, with psi = phi'(rho) and the mean theta.
PointwiseResidual identity_3id_check(const FiniteChain &chain, const BochnerStructure &bs,
                                     const Vector &rho, const ConvexEntropy &e,
                                     std::size_t samples, std::uint64_t seed);

struct PropositionSides {
    double lhs = 0.0;   // pi[L phi'(rho) L rho + phi''(rho) (L rho)^2]
    double rhs = 0.0;   // pi[sum Gamma (grad phi'(rho) grad rho + phi''(rho) grad rho grad rho)]
    double scale = 0.0; // sum of absolute summands
};

PropositionSides proposition_sides(const FiniteChain &chain, const BochnerStructure &bs,
                                   const ConvexEntropy &e, const Vector &rho);

/// Largest lambda for which the curvature inequality holds at rho:
/// Gamma-sum / E(phi'(rho), rho). DegenerateInputError for constant rho.
double ineq_ratio(const FiniteChain &chain, const BochnerStructure &bs, const ConvexEntropy &e,
                  const Vector &rho);

/// Amplitudes of the log-normal perturbations used by density sweeps.
inline constexpr double kSweepAmplitudes[] = {0.1, 1.0, 3.0};

/// rho proportional to exp(amplitude * N(0,1)) per state, with pi-mean 1.
Vector random_density(const FiniteChain &chain, Rng &rng, double amplitude);

} // namespace beckner

#endif
