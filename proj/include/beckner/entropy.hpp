#ifndef BECKNER_ENTROPY_HPP
#define BECKNER_ENTROPY_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "beckner/report.hpp"

namespace beckner {

enum class EntropyKind { Log, Quadratic, Power };

/// Convex entropy density phi with phi(1) = 0.
///
///   Log:        phi(s) = s (log s - 1) + 1
///   Quadratic:  phi(s) = (s - 1)^2
///   Power(a):   phi(s) = (s^a - s)/(a - 1) - s + 1,   1 < a < 2
///
/// power(2) canonicalizes to quadratic(). All three kinds have phi''' <= 0
/// and make theta(s,t)*phi''(s) jointly 0-homogeneous, which is what the
/// infimum and concavity routines rely on.
class ConvexEntropy {
  public:
    static ConvexEntropy log();
    static ConvexEntropy quadratic();
    static ConvexEntropy power(double alpha);

    EntropyKind kind() const { return kind_; }
    /// 1 for Log, 2 for Quadratic.
    double alpha() const { return alpha_; }
    std::string name() const;

    double phi(double s) const;
    double d1(double s) const;
    double d2(double s) const;
    double d3(double s) const;
    double d4(double s) const;

    /// phi(1 + eps) and phi'(1 + eps) without cancellation for small eps.
    double phi_shifted(double eps) const;
    double d1_shifted(double eps) const;

    /// (phi')^{-1}(y); DomainError when y is outside the range of phi'.
    double d1_inverse(double y) const;

    /// Y(s,t) = (phi')^{-1}((1-m) phi'(s) + m phi'(t)) evaluated in a
    /// cancellation-free closed form.
    double mix(double s, double t, double m) const;

  private:
    ConvexEntropy(EntropyKind kind, double alpha) : kind_(kind), alpha_(alpha) {}
    void require_positive(double s) const;

    EntropyKind kind_;
    double alpha_;
};

/// theta(s,t) = (s - t)/(phi'(s) - phi'(t)), theta(s,s) = 1/phi''(s).
class MeanFunction {
  public:
    explicit MeanFunction(ConvexEntropy e, double diagonal_tol = 1e-7)
        : entropy_(e), diagonal_tol_(diagonal_tol) {}

    const ConvexEntropy &entropy() const { return entropy_; }
    double diagonal_tol() const { return diagonal_tol_; }

    double operator()(double s, double t) const { return theta(s, t); }
    double theta(double s, double t) const;
    /// (d theta/ds, d theta/dt).
    std::pair<double, double> partials(double s, double t) const;

  private:
    double partial_first(double s, double t) const;

    ConvexEntropy entropy_;
    double diagonal_tol_;
};

struct ThetaInfimum {
    double value;
    /// s/t at the best point; 0 or +inf when the infimum is a limit.
    double ratio;
    bool attained;
};

/// Theta(A,B) = inf_{s,t>0} theta(s,t) (A phi''(s) + B phi''(t)).
ThetaInfimum big_theta(const ConvexEntropy &e, double A, double B, double tol = 1e-12);

/// (alpha - 1)(A + B), the analytic floor of Theta for power entropies.
double big_theta_lower_bound(double alpha, double A, double B);

struct ThetaSurfaceRow {
    double A, B, theta, lower_bound, upper_bound;
};

std::vector<ThetaSurfaceRow> theta_surface(double alpha, const std::vector<double> &A_grid,
                                           const std::vector<double> &B_grid);

/// CSV `A,B,theta,lower_bound,upper_bound`, row-major, 17 significant digits.
std::string theta_surface_csv(const std::vector<ThetaSurfaceRow> &rows);

struct SampleBox {
    double lo = 1e-2;
    double hi = 1e2;
};

/// Homogeneity, Euler identity and the two inequalities satisfied by the
/// power mean, on seeded random samples.
Report verify_theta_identities(double alpha, std::size_t samples, std::uint64_t seed,
                               SampleBox box = {});

/// Midpoint concavity, the tangent inequality and the sign conditions on
/// the second partials of Y(s,t) for each mixing weight in m_grid.
Report verify_concavity(const ConvexEntropy &e, const std::vector<double> &m_grid,
                        std::size_t samples, std::uint64_t seed, SampleBox box = {});

} // namespace beckner

#endif
