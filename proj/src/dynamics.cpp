#include "beckner/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "beckner/errors.hpp"
#include "beckner/util.hpp"

namespace beckner {

namespace {

constexpr double kEntropyFloor = 1e-14;

void require_grid(const std::vector<double> &times) {
    if (times.empty())
        throw DomainError("time grid is empty");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || times[k] < 0.0)
            throw DomainError("times must be finite and non-negative");
        if (k > 0 && times[k] <= times[k - 1])
            throw DomainError("times must be strictly increasing");
    }
}

} // namespace

Spectrum::Spectrum(const FiniteChain &chain) : chain_(&chain) {
    const Matrix A = symmetrized_generator(chain);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(-A);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigensolver failed on the symmetrized generator");
    rates_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
    sqrt_pi_ = chain.pi().cwiseSqrt();
    // The zero mode is known in closed form; use it exactly.
    const double align = vectors_.col(0).dot(sqrt_pi_);
    vectors_.col(0) = (align < 0.0 ? -1.0 : 1.0) * sqrt_pi_;
    rates_[0] = 0.0;
}

Vector Spectrum::evolve(const Vector &f, double t) const {
    if (static_cast<std::size_t>(f.size()) != chain_->size())
        throw DomainError("function must have one value per state");
    if (!(t >= 0.0))
        throw DomainError("time must be non-negative");
    Vector c = vectors_.transpose() * sqrt_pi_.cwiseProduct(f);
    for (Eigen::Index k = 0; k < c.size(); ++k)
        c[k] *= std::exp(-t * rates_[k]);
    return (vectors_ * c).cwiseQuotient(sqrt_pi_);
}

Vector Spectrum::evolve_deviation(const Vector &eps, double t) const {
    if (static_cast<std::size_t>(eps.size()) != chain_->size())
        throw DomainError("deviation must have one value per state");
    if (!(t >= 0.0))
        throw DomainError("time must be non-negative");
    Vector c = vectors_.transpose() * sqrt_pi_.cwiseProduct(eps);
    c[0] = 0.0;
    for (Eigen::Index k = 1; k < c.size(); ++k)
        c[k] *= std::exp(-t * rates_[k]);
    return (vectors_ * c).cwiseQuotient(sqrt_pi_);
}

Vector Spectrum::eigenfunction(std::size_t k) const {
    if (k >= static_cast<std::size_t>(rates_.size()))
        throw DomainError("eigenvalue index out of range");
    // pi[f^2] = |u|^2 = 1 for f = u / sqrt(pi).
    return vectors_.col(static_cast<Eigen::Index>(k)).cwiseQuotient(sqrt_pi_);
}

double Trajectory::instantaneous_rate(std::size_t k) const {
    if (entropy_values[k] <= 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return dirichlet_values[k] / entropy_values[k];
}

double entropy_dev(const FiniteChain &chain, const ConvexEntropy &e, const Vector &eps) {
    return entropy_of_deviation(chain, e, eps);
}

double production_dev(const FiniteChain &chain, const ConvexEntropy &e, const Vector &eps) {
    if (static_cast<std::size_t>(eps.size()) != chain.size())
        throw DomainError("deviation must have one value per state");
    Vector psi(eps.size());
    for (Eigen::Index i = 0; i < eps.size(); ++i)
        psi[i] = e.d1_shifted(eps[i]);
    double total = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        double row = 0.0;
        for (std::size_t g = 0; g < chain.num_moves(); ++g) {
            const double c = chain.rate(i, g);
            if (c == 0.0)
                continue;
            const std::size_t j = chain.target(i, g);
            row += c * (psi[j] - psi[i]) * (eps[j] - eps[i]);
        }
        total += chain.pi()[i] * row;
    }
    return 0.5 * total;
}

Trajectory evolve(const Spectrum &spec, const ConvexEntropy &e, const Vector &rho0,
                  const std::vector<double> &times) {
    const FiniteChain &chain = spec.chain();
    require_grid(times);
    require_density(chain, rho0);
    const Vector eps0 = rho0 - Vector::Ones(rho0.size());
    Trajectory traj;
    traj.times = times;
    traj.deviations.resize(times.size());
    traj.entropy_values.resize(times.size());
    traj.dirichlet_values.resize(times.size());
    parallel_for(times.size(), [&](std::size_t k) {
        Vector eps = spec.evolve_deviation(eps0, times[k]);
        traj.entropy_values[k] = std::max(0.0, entropy_dev(chain, e, eps));
        traj.dirichlet_values[k] = std::max(0.0, production_dev(chain, e, eps));
        traj.deviations[k] = std::move(eps);
    });
    return traj;
}

Trajectory evolve(const FiniteChain &chain, const ConvexEntropy &e, const Vector &rho0,
                  const std::vector<double> &times) {
    const Spectrum spec(chain);
    return evolve(spec, e, rho0, times);
}

std::vector<double> uniform_times(double t_end, std::size_t count) {
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw DomainError("t_end must be positive");
    if (count < 2)
        throw DomainError("need at least two time points");
    std::vector<double> t(count);
    for (std::size_t k = 0; k < count; ++k)
        t[k] = t_end * static_cast<double>(k) / static_cast<double>(count - 1);
    return t;
}

DerivativeResiduals derivative_residuals(const FiniteChain &chain, const ConvexEntropy &e,
                                         const Trajectory &traj) {
    const std::size_t T = traj.times.size();
    if (T < 3)
        throw DomainError("derivative check needs at least three time points");
    const double dt = traj.times[1] - traj.times[0];
    for (std::size_t k = 2; k < T; ++k)
        if (std::abs((traj.times[k] - traj.times[k - 1]) - dt) > 1e-9 * dt)
            throw DomainError("derivative check needs a uniform time grid");

    DerivativeResiduals out;
    double scale1 = 0.0, scale2 = 0.0, worst1 = 0.0, worst2 = 0.0;
    for (std::size_t k = 1; k + 1 < T; ++k) {
        const double em = traj.entropy_values[k - 1], e0 = traj.entropy_values[k],
                     ep = traj.entropy_values[k + 1];
        const double d1 = (ep - em) / (2.0 * dt);
        const double d2 = (ep - 2.0 * e0 + em) / (dt * dt);

        const Vector rho = traj.density(k);
        const Vector Lrho = generator_apply(chain, traj.deviations[k]);
        Vector psi(rho.size()), curv(rho.size());
        for (Eigen::Index i = 0; i < rho.size(); ++i) {
            psi[i] = e.d1_shifted(traj.deviations[k][i]);
            curv[i] = e.d2(rho[i]);
        }
        const Vector Lpsi = generator_apply(chain, psi);
        const double second =
            pi_mean(chain, Lpsi.cwiseProduct(Lrho) + curv.cwiseProduct(Lrho.cwiseAbs2()));
        const double first = -traj.dirichlet_values[k];

        scale1 = std::max(scale1, std::abs(first));
        scale2 = std::max(scale2, std::abs(second));
        worst1 = std::max(worst1, std::abs(d1 - first));
        worst2 = std::max(worst2, std::abs(d2 - second));
    }
    out.first = scale1 > 0.0 ? worst1 / scale1 : worst1;
    out.second = scale2 > 0.0 ? worst2 / scale2 : worst2;
    return out;
}

Report derivative_identity_check(const FiniteChain &chain, const ConvexEntropy &e,
                                 const Trajectory &traj, double tol) {
    const DerivativeResiduals r = derivative_residuals(chain, e, traj);
    Report rep;
    rep.add({"entropy_first_derivative", r.first, tol, r.first <= tol, {}});
    rep.add({"entropy_second_derivative", r.second, tol, r.second <= tol, {}});
    return rep;
}

DecayFit fit_decay_rate(const Trajectory &traj, double t_begin, double t_end) {
    if (!(t_end > t_begin))
        throw DomainError("decay window is empty");
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        if (traj.times[k] >= t_begin && traj.times[k] <= t_end &&
            traj.entropy_values[k] >= kEntropyFloor)
            idx.push_back(k);
    if (idx.empty())
        throw DomainError("no entropy values above 1e-14 inside the decay window");

    DecayFit fit;
    fit.points = idx.size();
    fit.t_begin = traj.times[idx.front()];
    fit.t_end = traj.times[idx.back()];
    fit.rate = std::numeric_limits<double>::infinity();
    for (std::size_t k : idx)
        fit.rate = std::min(fit.rate, traj.instantaneous_rate(k));

    fit.fd_rate = std::numeric_limits<double>::quiet_NaN();
    double fd = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n + 1 < idx.size(); ++n) {
        const std::size_t a = idx[n - 1], b = idx[n + 1];
        if (b - a != 2)
            continue;
        const double r = -(std::log(traj.entropy_values[b]) - std::log(traj.entropy_values[a])) /
                         (traj.times[b] - traj.times[a]);
        fd = std::min(fd, r);
    }
    if (std::isfinite(fd))
        fit.fd_rate = fd;

    if (idx.size() >= 2) {
        double st = 0, sy = 0, stt = 0, sty = 0;
        for (std::size_t k : idx) {
            const double t = traj.times[k], y = -std::log(traj.entropy_values[k]);
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
        const double n = static_cast<double>(idx.size());
        fit.slope = (n * sty - st * sy) / (n * stt - st * st);
    } else {
        fit.slope = fit.rate;
    }
    return fit;
}

namespace {

Report pairwise_decay(const std::vector<double> &times, const std::vector<double> &values,
                      double lambda, double slack, const std::string &name) {
    if (!std::isfinite(lambda))
        throw DomainError("decay rate must be finite");
    double worst = 0.0;
    std::string witness;
    for (std::size_t s = 0; s < times.size(); ++s)
        for (std::size_t t = s + 1; t < times.size(); ++t) {
            const double bound = std::exp(-lambda * (times[t] - times[s])) * values[s];
            const double excess = (values[t] - bound) / std::max(values[s], 1e-300);
            if (excess > worst) {
                worst = excess;
                std::ostringstream w;
                w << "s = " << format_double(times[s]) << ", t = " << format_double(times[t]);
                witness = w.str();
            }
        }
    Report rep;
    const bool ok = worst <= slack;
    rep.add({name, worst, slack, ok, ok ? std::string() : witness});
    return rep;
}

} // namespace

Report dirichlet_decay_check(const Trajectory &traj, double lambda, double slack) {
    return pairwise_decay(traj.times, traj.dirichlet_values, lambda, slack, "dirichlet_decay");
}

Report entropy_decay_check(const Trajectory &traj, double lambda, double slack) {
    return pairwise_decay(traj.times, traj.entropy_values, lambda, slack, "entropy_decay");
}

std::string trajectory_csv(const Trajectory &traj) {
    std::ostringstream out;
    out << "t,entropy,dirichlet,inst_rate\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double r = traj.instantaneous_rate(k);
        out << format_double(traj.times[k]) << ',' << format_double(traj.entropy_values[k])
            << ',' << format_double(traj.dirichlet_values[k]) << ','
            << (std::isfinite(r) ? format_double(r) : std::string("nan")) << '\n';
    }
    return out.str();
}

} // namespace beckner
