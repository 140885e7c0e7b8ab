#ifndef BECKNER_DYNAMICS_HPP
#define BECKNER_DYNAMICS_HPP

#include <string>
#include <vector>

#include "beckner/chain.hpp"
#include "beckner/entropy.hpp"
#include "beckner/report.hpp"

namespace beckner {

/// Eigendecomposition of the symmetrized generator D^{1/2} L D^{-1/2}.
/// rates() are the eigenvalues of -L in ascending order (rates()[0] = 0).
class Spectrum {
  public:
    explicit Spectrum(const FiniteChain &chain);

    const FiniteChain &chain() const { return *chain_; }
    const Vector &rates() const { return rates_; }
    /// Orthonormal eigenvectors of the symmetrized matrix, column k for rates()[k].
    const Matrix &vectors() const { return vectors_; }

    /// exp(tL) f.
    Vector evolve(const Vector &f, double t) const;
    /// exp(tL) applied to a pi-mean-zero deviation; the zero mode is
    /// projected out so that rho_t - 1 is resolved to full relative precision.
    Vector evolve_deviation(const Vector &eps, double t) const;

    /// Eigenfunction of -L for rates()[k], normalized to pi[f^2] = 1.
    Vector eigenfunction(std::size_t k) const;

  private:
    const FiniteChain *chain_;
    Vector rates_;
    Matrix vectors_;
    Vector sqrt_pi_;
};

/// rho_t stored as deviations eps_t = rho_t - 1.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> deviations;
    std::vector<double> entropy_values;
    std::vector<double> dirichlet_values; // E(phi'(rho_t), rho_t)

    Vector density(std::size_t k) const {
        return deviations[k] + Vector::Ones(deviations[k].size());
    }
    /// E/Ent, the exact instantaneous decay rate (NaN when Ent = 0).
    double instantaneous_rate(std::size_t k) const;
};

/// pi[phi(1 + eps)] and E(phi'(1 + eps), 1 + eps) evaluated on deviations.
double entropy_dev(const FiniteChain &chain, const ConvexEntropy &e, const Vector &eps);
double production_dev(const FiniteChain &chain, const ConvexEntropy &e, const Vector &eps);

/// Exact evolution rho_t = exp(tL) rho0 on the given time grid.
Trajectory evolve(const Spectrum &spec, const ConvexEntropy &e, const Vector &rho0,
                  const std::vector<double> &times);
Trajectory evolve(const FiniteChain &chain, const ConvexEntropy &e, const Vector &rho0,
                  const std::vector<double> &times);

/// count equally spaced times on [0, t_end].
std::vector<double> uniform_times(double t_end, std::size_t count);

struct DerivativeResiduals {
    double first = 0.0;  // max |FD d/dt Ent + E| / max|E|
    double second = 0.0; // max |FD d2/dt2 Ent - pi[...]| / max|pi[...]|
};

/// Central differences of Ent along a uniform grid against -E(phi'(rho),rho)
/// and pi[L phi'(rho) L rho + phi''(rho)(L rho)^2].
DerivativeResiduals derivative_residuals(const FiniteChain &chain, const ConvexEntropy &e,
                                         const Trajectory &traj);
Report derivative_identity_check(const FiniteChain &chain, const ConvexEntropy &e,
                                 const Trajectory &traj, double tol = 1e-4);

struct DecayFit {
    /// inf over the window of E/Ent = -(d/dt) log Ent, evaluated exactly.
    double rate = 0.0;
    /// The same infimum from central differences of log Ent (diagnostic).
    double fd_rate = 0.0;
    /// Least-squares slope of -log Ent.
    double slope = 0.0;
    double t_begin = 0.0, t_end = 0.0;
    std::size_t points = 0;
};

/// Points with Ent below 1e-14 are dropped from the window.
DecayFit fit_decay_rate(const Trajectory &traj, double t_begin, double t_end);

/// E(t) <= exp(-lambda (t - s)) E(s) for all sampled s < t.
Report dirichlet_decay_check(const Trajectory &traj, double lambda, double slack = 1e-9);
/// Ent(t) <= exp(-lambda (t - s)) Ent(s) for all sampled s < t.
Report entropy_decay_check(const Trajectory &traj, double lambda, double slack = 1e-9);

/// CSV `t,entropy,dirichlet,inst_rate`.
std::string trajectory_csv(const Trajectory &traj);

} // namespace beckner

#endif
