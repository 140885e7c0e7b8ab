#ifndef BECKNER_CHAIN_HPP
#define BECKNER_CHAIN_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beckner/entropy.hpp"
#include "beckner/report.hpp"

namespace beckner {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Canonical state encoding: {n} for birth-death, occupation vectors for
/// zero-range, {bitmask} for Bernoulli-Laplace, permutation words for S_n.
using StateKey = std::vector<std::int64_t>;

/// A move gamma: S -> S given by its target table, plus the index of the
/// inverse move.
struct Move {
    std::string name;
    std::size_t inverse = 0;
    std::vector<std::size_t> map;
};

/// Largest state space for which dense |S| x |S| matrices are built.
inline constexpr std::size_t kDenseCap = 20000;

/// Default positivity floor for densities.
inline constexpr double kDensityFloor = 1e-12;

/// Finite Markov chain in move/rate form, L f = sum_g c(., g) grad_g f.
/// Immutable after construction.
class FiniteChain {
  public:
    /// `rates` is |S| x |G|. `pi` need not be normalized unless
    /// `renormalize` is false, in which case it must already sum to 1.
    FiniteChain(std::vector<StateKey> states, std::vector<Move> moves, Matrix rates, Vector pi,
                bool renormalize = true);

    std::size_t size() const { return states_.size(); }
    std::size_t num_moves() const { return moves_.size(); }

    const std::vector<StateKey> &states() const { return states_; }
    const StateKey &key(std::size_t i) const { return states_[i]; }
    /// Index of a state key; ConstructionError if absent.
    std::size_t index_of(const StateKey &key) const;

    const std::vector<Move> &moves() const { return moves_; }
    const Move &move(std::size_t g) const { return moves_[g]; }
    std::size_t target(std::size_t i, std::size_t g) const { return moves_[g].map[i]; }

    const Matrix &rates() const { return rates_; }
    double rate(std::size_t i, std::size_t g) const { return rates_(i, g); }
    double max_rate() const { return max_rate_; }

    const Vector &pi() const { return pi_; }

  private:
    std::vector<StateKey> states_;
    std::vector<Move> moves_;
    Matrix rates_;
    Vector pi_;
    std::map<StateKey, std::size_t> index_;
    double max_rate_ = 0.0;
};

/// pi[f].
double pi_mean(const FiniteChain &chain, const Vector &f);

/// (L f)(i) = sum_g c(i,g) (f(g i) - f(i)).
Vector generator_apply(const FiniteChain &chain, const Vector &f);

/// 1/2 pi[sum_g c grad_g f grad_g g]. Throws ReversibilityError when this
/// disagrees with -pi[f L g] beyond rounding.
double dirichlet_form(const FiniteChain &chain, const Vector &f, const Vector &g);

/// The gradient form of the Dirichlet form without the consistency check.
double dirichlet_form_fast(const FiniteChain &chain, const Vector &f, const Vector &g);

/// E(phi'(rho), rho), the entropy production.
double entropy_production(const FiniteChain &chain, const ConvexEntropy &e, const Vector &rho);

/// pi[phi(rho)].
double entropy(const FiniteChain &chain, const ConvexEntropy &e, const Vector &rho);

/// pi[phi(1 + eps)], accurate when rho = 1 + eps is close to 1.
double entropy_of_deviation(const FiniteChain &chain, const ConvexEntropy &e, const Vector &eps);

/// Compares both sides of the reversibility identity on `trials` random
/// F: S x G -> [-1,1], plus the pointwise flux balance that locates the
/// offending (state, move) pair.
Report check_reversibility(const FiniteChain &chain, std::size_t trials, std::uint64_t seed,
                           double tol = 1e-10);

/// Inverse consistency: c(i,g) > 0 implies g^{-1}(g i) = i.
Report check_inverse_consistency(const FiniteChain &chain);

/// Clamps entries below `floor` and rescales to pi-mean 1.
Vector normalize_density(const FiniteChain &chain, const Vector &raw,
                         double floor = kDensityFloor);

/// DomainError unless rho is finite, >= floor and has pi-mean 1 within tol.
void require_density(const FiniteChain &chain, const Vector &rho, double tol = 1e-10,
                     double floor = 0.0);

/// Q with (Q f)(i) = (L f)(i); SizeError above the dense cap.
Matrix dense_generator(const FiniteChain &chain);

/// D^{1/2} L D^{-1/2} with D = diag(pi), symmetrized.
Matrix symmetrized_generator(const FiniteChain &chain);

/// Same chain with states relabeled: new state k is old state perm[k].
FiniteChain permute_states(const FiniteChain &chain, const std::vector<std::size_t> &perm);

/// JSON document {"states","pi","moves":[{"name","inverse","map"}],"rates":[[s,m,v]]}.
std::string chain_to_json(const FiniteChain &chain);
FiniteChain chain_from_json(const std::string &text);

} // namespace beckner

#endif
