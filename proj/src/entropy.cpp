#include "beckner/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "beckner/errors.hpp"
#include "beckner/quadrature.hpp"
#include "beckner/util.hpp"

namespace beckner {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(s/t) accurate also when s/t is close to 1.
double log_ratio(double s, double t) {
    const double r = s / t;
    if (r > 0.5 && r < 2.0)
        return std::log1p((s - t) / t);
    return std::log(r);
}

// expm1(a)/expm1(b) for a, b of equal sign, robust against overflow.
double expm1_ratio(double a, double b) {
    if (a > 700.0 || b > 700.0)
        return std::exp(a - b) * (-std::expm1(-a)) / (-std::expm1(-b));
    return std::expm1(a) / std::expm1(b);
}

// e^y - 1 - y, with the Taylor series where expm1(y) - y cancels.
double expm1_minus_linear(double y) {
    if (std::abs(y) < 0.1) {
        double term = 0.5 * y * y, acc = 0.0;
        for (int k = 3; k < 14 && term != 0.0; ++k) {
            acc += term;
            term *= y / k;
        }
        return acc;
    }
    return std::expm1(y) - y;
}

std::string fmt(double x) { return format_double(x); }

} // namespace

ConvexEntropy ConvexEntropy::log() { return {EntropyKind::Log, 1.0}; }

ConvexEntropy ConvexEntropy::quadratic() { return {EntropyKind::Quadratic, 2.0}; }

ConvexEntropy ConvexEntropy::power(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0))
        throw DomainError("alpha must lie in (1,2], got " + fmt(alpha));
    if (alpha == 2.0)
        return quadratic();
    return {EntropyKind::Power, alpha};
}

std::string ConvexEntropy::name() const {
    switch (kind_) {
    case EntropyKind::Log:
        return "log";
    case EntropyKind::Quadratic:
        return "quadratic";
    case EntropyKind::Power:
        return "power(" + fmt(alpha_) + ")";
    }
    return "?";
}

void ConvexEntropy::require_positive(double s) const {
    if (!(s > 0.0) || !std::isfinite(s))
        throw DomainError("entropy argument must be positive and finite, got " + fmt(s));
}

double ConvexEntropy::phi(double s) const {
    require_positive(s);
    if (std::abs(s - 1.0) < 0.5)
        return phi_shifted(s - 1.0);
    switch (kind_) {
    case EntropyKind::Log:
        return s * (std::log(s) - 1.0) + 1.0;
    case EntropyKind::Quadratic:
        return (s - 1.0) * (s - 1.0);
    case EntropyKind::Power: {
        const double q = alpha_ - 1.0;
        return (std::pow(s, alpha_) - s) / q - s + 1.0;
    }
    }
    return 0.0;
}

double ConvexEntropy::phi_shifted(double eps) const {
    if (!(eps > -1.0) || !std::isfinite(eps))
        throw DomainError("entropy argument must be positive and finite, got 1+" + fmt(eps));
    if (kind_ == EntropyKind::Quadratic)
        return eps * eps;
    if (std::abs(eps) >= 0.1) {
        const double s = 1.0 + eps;
        if (kind_ == EntropyKind::Log)
            return s * std::log(s) - eps;
        const double q = alpha_ - 1.0;
        return (std::pow(s, alpha_) - s) / q - eps;
    }
    // Taylor series about 1; |eps| < 0.1 keeps 30 terms far below rounding.
    double sum = 0.0;
    double power = eps * eps;
    if (kind_ == EntropyKind::Log) {
        for (int k = 2; k < 32; ++k) {
            sum += power / (k * (k - 1.0));
            power *= -eps;
        }
        return sum;
    }
    double coeff = alpha_ / 2.0; // phi^{(k)}(1)/k!
    for (int k = 2; k < 32; ++k) {
        sum += coeff * power;
        coeff *= (alpha_ - k) / (k + 1.0);
        power *= eps;
    }
    return sum;
}

double ConvexEntropy::d1(double s) const {
    require_positive(s);
    switch (kind_) {
    case EntropyKind::Log:
        return std::log(s);
    case EntropyKind::Quadratic:
        return 2.0 * (s - 1.0);
    case EntropyKind::Power: {
        const double q = alpha_ - 1.0;
        return alpha_ / q * std::expm1(q * std::log(s));
    }
    }
    return 0.0;
}

double ConvexEntropy::d1_shifted(double eps) const {
    if (!(eps > -1.0))
        throw DomainError("entropy argument must be positive, got 1+" + fmt(eps));
    switch (kind_) {
    case EntropyKind::Log:
        return std::log1p(eps);
    case EntropyKind::Quadratic:
        return 2.0 * eps;
    case EntropyKind::Power: {
        const double q = alpha_ - 1.0;
        return alpha_ / q * std::expm1(q * std::log1p(eps));
    }
    }
    return 0.0;
}

double ConvexEntropy::d2(double s) const {
    require_positive(s);
    switch (kind_) {
    case EntropyKind::Log:
        return 1.0 / s;
    case EntropyKind::Quadratic:
        return 2.0;
    case EntropyKind::Power:
        return alpha_ * std::pow(s, alpha_ - 2.0);
    }
    return 0.0;
}

double ConvexEntropy::d3(double s) const {
    require_positive(s);
    switch (kind_) {
    case EntropyKind::Log:
        return -1.0 / (s * s);
    case EntropyKind::Quadratic:
        return 0.0;
    case EntropyKind::Power:
        return alpha_ * (alpha_ - 2.0) * std::pow(s, alpha_ - 3.0);
    }
    return 0.0;
}

double ConvexEntropy::d4(double s) const {
    require_positive(s);
    switch (kind_) {
    case EntropyKind::Log:
        return 2.0 / (s * s * s);
    case EntropyKind::Quadratic:
        return 0.0;
    case EntropyKind::Power:
        return alpha_ * (alpha_ - 2.0) * (alpha_ - 3.0) * std::pow(s, alpha_ - 4.0);
    }
    return 0.0;
}

double ConvexEntropy::d1_inverse(double y) const {
    double s = 0.0;
    switch (kind_) {
    case EntropyKind::Log:
        s = std::exp(y);
        break;
    case EntropyKind::Quadratic:
        s = 1.0 + 0.5 * y;
        break;
    case EntropyKind::Power: {
        const double q = alpha_ - 1.0;
        const double base = 1.0 + q * y / alpha_;
        if (!(base > 0.0))
            throw DomainError("value " + fmt(y) + " outside the range of phi'");
        s = std::pow(base, 1.0 / q);
        break;
    }
    }
    if (!(s > 0.0) || !std::isfinite(s))
        throw DomainError("value " + fmt(y) + " outside the range of phi'");
    return s;
}

double ConvexEntropy::mix(double s, double t, double m) const {
    require_positive(s);
    require_positive(t);
    switch (kind_) {
    case EntropyKind::Log:
        return std::exp((1.0 - m) * std::log(s) + m * std::log(t));
    case EntropyKind::Quadratic:
        return (1.0 - m) * s + m * t;
    case EntropyKind::Power: {
        const double q = alpha_ - 1.0;
        return std::pow((1.0 - m) * std::pow(s, q) + m * std::pow(t, q), 1.0 / q);
    }
    }
    return 0.0;
}

double MeanFunction::theta(double s, double t) const {
    const auto &e = entropy_;
    if (!(s > 0.0) || !(t > 0.0))
        throw DomainError("theta requires positive arguments, got (" + fmt(s) + ", " + fmt(t) +
                          ")");
    if (e.kind() == EntropyKind::Quadratic)
        return 0.5;
    const double d = s - t;
    if (std::abs(d) <= diagonal_tol_ * std::max(s, t)) {
        const double mid = 0.5 * (s + t);
        const double p2 = e.d2(mid);
        return 1.0 / p2 - e.d4(mid) * d * d / (24.0 * p2 * p2);
    }
    const double x = log_ratio(s, t);
    if (e.kind() == EntropyKind::Log)
        return d / x;
    const double q = e.alpha() - 1.0;
    return q / e.alpha() * d / (std::pow(t, q) * std::expm1(q * x));
}

double MeanFunction::partial_first(double s, double t) const {
    const auto &e = entropy_;
    if (e.kind() == EntropyKind::Quadratic)
        return 0.0;
    const double x = log_ratio(s, t);
    if (std::abs(x) <= 0.1) {
        // d/ds of int_0^1 1/phi''(Y(s,t;m)) dm; the integrand is smooth in m.
        const double p2s = e.d2(s);
        return integrate_gl16(
            [&](double m) {
                const double y = e.mix(s, t, m);
                const double p2y = e.d2(y);
                return -e.d3(y) / (p2y * p2y) * (1.0 - m) * p2s / p2y;
            },
            0.0, 1.0);
    }
    double D = 0.0; // phi'(s) - phi'(t)
    if (e.kind() == EntropyKind::Log) {
        D = x;
    } else {
        const double q = e.alpha() - 1.0, p = 1.0 - q;
        if (p < 0.5) {
            // The numerator vanishes like p = 2 - alpha. With f(y) = e^y - 1 - y,
            // d theta/ds = (q/alpha) t^{1-q} s^{-1} e^{qx} (p f(x) - f(px)) / expm1(qx)^2.
            const double em = std::expm1(q * x);
            return q / e.alpha() * std::pow(t, 1.0 - q) / s * std::exp(q * x) *
                   (p * expm1_minus_linear(x) - expm1_minus_linear(p * x)) / (em * em);
        }
        D = e.alpha() / q * std::pow(t, q) * std::expm1(q * x);
    }
    return (D - (s - t) * e.d2(s)) / (D * D);
}

std::pair<double, double> MeanFunction::partials(double s, double t) const {
    if (!(s > 0.0) || !(t > 0.0))
        throw DomainError("theta requires positive arguments, got (" + fmt(s) + ", " + fmt(t) +
                          ")");
    return {partial_first(s, t), partial_first(t, s)};
}

namespace {

// theta(s,t) phi''(t) as a function of the log-coordinate v; the A-term of
// the Theta objective is the same function at -v.
double theta_profile(const ConvexEntropy &e, double v) {
    switch (e.kind()) {
    case EntropyKind::Quadratic:
        return 1.0;
    case EntropyKind::Log:
        if (v == 0.0)
            return 1.0;
        if (v > 700.0)
            return std::exp(v - std::log(v));
        return std::expm1(v) / v;
    case EntropyKind::Power: {
        if (v == 0.0)
            return 1.0;
        const double q = e.alpha() - 1.0;
        return q * expm1_ratio(v / q, v);
    }
    }
    return 0.0;
}

// lim_{v -> -inf} theta_profile(v).
double theta_profile_floor(const ConvexEntropy &e) {
    switch (e.kind()) {
    case EntropyKind::Quadratic:
        return 1.0;
    case EntropyKind::Log:
        return 0.0;
    case EntropyKind::Power:
        return e.alpha() - 1.0;
    }
    return 0.0;
}

// s/t corresponding to the log-coordinate u.
double ratio_of(const ConvexEntropy &e, double u) {
    switch (e.kind()) {
    case EntropyKind::Quadratic:
        return 1.0;
    case EntropyKind::Log:
        return std::exp(u);
    case EntropyKind::Power:
        return std::exp(u / (e.alpha() - 1.0));
    }
    return 1.0;
}

} // namespace

ThetaInfimum big_theta(const ConvexEntropy &e, double A, double B, double tol) {
    if (!(A >= 0.0) || !(B >= 0.0))
        throw DomainError("Theta requires A, B >= 0, got (" + fmt(A) + ", " + fmt(B) + ")");
    if (!(tol > 0.0))
        throw DomainError("Theta tolerance must be positive");
    if (A == 0.0 && B == 0.0)
        return {0.0, 1.0, true};
    if (e.kind() == EntropyKind::Quadratic)
        return {A + B, 1.0, true};
    // theta(s,t) (A phi''(s) + B phi''(t)) depends on s/t only; in the
    // coordinate u it equals A g(-u) + B g(u) with g = theta_profile.
    if (A == 0.0)
        return {B * theta_profile_floor(e), 0.0, false};
    if (B == 0.0)
        return {A * theta_profile_floor(e), kInf, false};

    auto objective = [&](double u) {
        const double v = A * theta_profile(e, -u) + B * theta_profile(e, u);
        return std::isnan(v) ? kInf : v;
    };

    // The objective is convex in u, so a scan followed by golden section on
    // the bracket around the best node finds the minimum.
    double half_width = 64.0;
    double lo = 0.0, hi = 0.0, best_u = 0.0;
    for (;;) {
        const int nodes = 2561;
        const double step = 2.0 * half_width / (nodes - 1);
        int best = 0;
        double best_val = kInf;
        for (int i = 0; i < nodes; ++i) {
            const double val = objective(-half_width + step * i);
            if (val < best_val) {
                best_val = val;
                best = i;
            }
        }
        best_u = -half_width + step * best;
        if ((best == 0 || best == nodes - 1) && half_width < 4096.0) {
            half_width *= 4.0;
            continue;
        }
        lo = best_u - step;
        hi = best_u + step;
        break;
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    int iter = 0;
    for (; iter < 400 && (hi - lo) > 1e-11 * (1.0 + std::abs(lo)); ++iter) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    double u = f1 <= f2 ? x1 : x2;
    double value = std::min(f1, f2);
    const double at_best = objective(best_u);
    if (at_best < value) {
        value = at_best;
        u = best_u;
    }
    if (!std::isfinite(value) || iter == 400)
        throw NumericalError("Theta minimization did not converge; bracket [" + fmt(lo) + ", " +
                             fmt(hi) + "], best " + fmt(value));
    return {value, ratio_of(e, u), true};
}

double big_theta_lower_bound(double alpha, double A, double B) { return (alpha - 1.0) * (A + B); }

std::vector<ThetaSurfaceRow> theta_surface(double alpha, const std::vector<double> &A_grid,
                                           const std::vector<double> &B_grid) {
    if (!(alpha > 1.0 && alpha <= 2.0))
        throw DomainError("alpha must lie in (1,2], got " + fmt(alpha));
    const auto e = ConvexEntropy::power(alpha);
    for (double v : A_grid)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DomainError("Theta grid values must be finite and nonnegative");
    for (double v : B_grid)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DomainError("Theta grid values must be finite and nonnegative");

    std::vector<ThetaSurfaceRow> rows(A_grid.size() * B_grid.size());
    parallel_for(rows.size(), [&](std::size_t k) {
        const double A = A_grid[k / B_grid.size()];
        const double B = B_grid[k % B_grid.size()];
        rows[k] = {A, B, big_theta(e, A, B).value, big_theta_lower_bound(alpha, A, B), A + B};
    });
    return rows;
}

std::string theta_surface_csv(const std::vector<ThetaSurfaceRow> &rows) {
    std::ostringstream out;
    out << "A,B,theta,lower_bound,upper_bound\n";
    for (const auto &r : rows)
        out << fmt(r.A) << ',' << fmt(r.B) << ',' << fmt(r.theta) << ',' << fmt(r.lower_bound)
            << ',' << fmt(r.upper_bound) << '\n';
    return out.str();
}

namespace {

struct Worst {
    double value = 0.0;
    std::string witness;

    void update(double v, const std::string &where) {
        if (v > value) {
            value = v;
            witness = where;
        }
    }
};

CheckResult finish(const std::string &name, const Worst &w, double tol) {
    const bool ok = w.value <= tol;
    return {name, w.value, tol, ok, ok ? std::string{} : w.witness};
}

std::string at(std::size_t i, std::initializer_list<std::pair<const char *, double>> vals) {
    std::string out = "sample " + std::to_string(i);
    for (const auto &[k, v] : vals)
        out += std::string(" ") + k + "=" + fmt(v);
    return out;
}

} // namespace

Report verify_theta_identities(double alpha, std::size_t samples, std::uint64_t seed,
                               SampleBox box) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw DomainError("identities are stated for alpha in (1,2), got " + fmt(alpha));
    if (samples < 1)
        throw DomainError("need at least one sample");
    const MeanFunction th(ConvexEntropy::power(alpha));
    auto rng = make_rng(seed, "theta-identities");
    const double two_pow = std::pow(2.0, alpha - 1.0);
    const double scales[] = {1e-2, 1e-1, 1.0, 1e1, 1e2};

    Worst euler, second, third, homog, symm;
    for (std::size_t i = 0; i < samples; ++i) {
        const double r = log_uniform(rng, box.lo, box.hi);
        const double s = log_uniform(rng, box.lo, box.hi);
        const double t = log_uniform(rng, box.lo, box.hi);
        const double l1 = log_uniform(rng, box.lo, box.hi);
        const double l2 = log_uniform(rng, box.lo, box.hi);
        const double th_st = th(s, t);
        const auto [p1, p2] = th.partials(s, t);
        const auto where = at(i, {{"r", r}, {"s", s}, {"t", t}});

        euler.update(std::abs(s * p1 + t * p2 - (2.0 - alpha) * th_st) / th_st, where);

        const double lhs2 = two_pow * r * (p1 + p2) - (th(r, s) + th(r, t));
        second.update(-(lhs2 + two_pow * th_st), where);

        const double lhs3 = l1 * p1 * (s - t) - l2 * p2 * (s - t);
        third.update(lhs3 - (2.0 - alpha) * std::abs(l1 - l2) * th_st,
                     at(i, {{"s", s}, {"t", t}, {"lambda1", l1}, {"lambda2", l2}}));

        symm.update(std::abs(th(t, s) - th_st) / th_st, where);

        for (double lam : scales) {
            const double scaled = th(lam * s, lam * t);
            const auto [q1, q2] = th.partials(lam * s, lam * t);
            const double f0 = std::pow(lam, 2.0 - alpha);
            const double f1 = std::pow(lam, 1.0 - alpha);
            double rel = std::abs(scaled - f0 * th_st) / (f0 * th_st);
            rel = std::max(rel, std::abs(q1 - f1 * p1) / std::max(std::abs(f1 * p1), 1e-300));
            rel = std::max(rel, std::abs(q2 - f1 * p2) / std::max(std::abs(f1 * p2), 1e-300));
            homog.update(rel, at(i, {{"s", s}, {"t", t}, {"lambda", lam}}));
        }
    }

    Report rep;
    rep.add(finish("euler_identity", euler, 1e-9));
    rep.add(finish("translation_inequality", second, 1e-9));
    rep.add(finish("weighted_difference_inequality", third, 1e-9));
    rep.add(finish("homogeneity", homog, 1e-10));
    rep.add(finish("symmetry", symm, 1e-12));
    return rep;
}

namespace {

struct YPartials {
    double y, y11, y22, y12;
};

// Second partials of Y(s,t) through (phi')^{-1}, by Richardson-extrapolated
// central differences.
YPartials y_partials(const ConvexEntropy &e, double s, double t, double m) {
    auto Y = [&](double a, double b) {
        return e.d1_inverse((1.0 - m) * e.d1(a) + m * e.d1(b));
    };
    const double y = Y(s, t);
    auto dss = [&](double h) { return (Y(s + h, t) - 2.0 * y + Y(s - h, t)) / (h * h); };
    auto dtt = [&](double k) { return (Y(s, t + k) - 2.0 * y + Y(s, t - k)) / (k * k); };
    auto dst = [&](double h, double k) {
        return (Y(s + h, t + k) - Y(s + h, t - k) - Y(s - h, t + k) + Y(s - h, t - k)) /
               (4.0 * h * k);
    };
    const double h = 1e-2 * s, k = 1e-2 * t;
    return {y, (4.0 * dss(h / 2) - dss(h)) / 3.0, (4.0 * dtt(k / 2) - dtt(k)) / 3.0,
            (4.0 * dst(h / 2, k / 2) - dst(h, k)) / 3.0};
}

} // namespace

Report verify_concavity(const ConvexEntropy &e, const std::vector<double> &m_grid,
                        std::size_t samples, std::uint64_t seed, SampleBox box) {
    if (samples < 1)
        throw DomainError("need at least one sample");
    for (double m : m_grid)
        if (!(m > 0.0 && m < 1.0))
            throw DomainError("mixing weights must lie in (0,1), got " + fmt(m));
    const MeanFunction th(e);
    auto rng = make_rng(seed, "concavity");

    Worst monotone, midpoint, tangent, y_diag, y_det, y_zero, y_mixed;
    for (std::size_t i = 0; i < samples; ++i) {
        const double s1 = log_uniform(rng, box.lo, box.hi), t1 = log_uniform(rng, box.lo, box.hi);
        const double s2 = log_uniform(rng, box.lo, box.hi), t2 = log_uniform(rng, box.lo, box.hi);
        const auto [p1, p2] = th.partials(s1, t1);
        monotone.update(std::max(-p1, -p2), at(i, {{"s", s1}, {"t", t1}}));

        const double mid = th(0.5 * (s1 + s2), 0.5 * (t1 + t2));
        midpoint.update(0.5 * (th(s1, t1) + th(s2, t2)) - mid,
                        at(i, {{"s1", s1}, {"t1", t1}, {"s2", s2}, {"t2", t2}}));

        tangent.update(th(s2, t2) - th(s1, t1) - p1 * (s2 - s1) - p2 * (t2 - t1),
                       at(i, {{"u", s2}, {"v", t2}, {"s", s1}, {"t", t1}}));

        for (double m : m_grid) {
            const auto d = y_partials(e, s1, t1, m);
            // Dimensionless second partials: the sign conditions are
            // invariant under this rescaling.
            const double a11 = s1 * s1 * d.y11 / d.y;
            const double a22 = t1 * t1 * d.y22 / d.y;
            const double a12 = s1 * t1 * d.y12 / d.y;
            const auto where = at(i, {{"s", s1}, {"t", t1}, {"m", m}});
            y_diag.update(std::max(a11, a22), where);
            y_det.update(a12 * a12 - a11 * a22, where);
            if (e.kind() == EntropyKind::Power) {
                const double alpha = e.alpha();
                y_zero.update(std::abs(a11 * a22 - a12 * a12), where);
                const double closed = m * (1.0 - m) * (2.0 - alpha) *
                                      std::pow(s1 * t1, alpha - 3.0) *
                                      std::pow(d.y, 3.0 - 2.0 * alpha) * s1 * t1;
                y_mixed.update(std::abs(a12 - s1 * t1 * closed / d.y), where);
            }
        }
    }

    Report rep;
    rep.add(finish("theta_monotone", monotone, 1e-12));
    rep.add(finish("midpoint_concavity", midpoint, 1e-9));
    rep.add(finish("tangent_inequality", tangent, 1e-9));
    if (!m_grid.empty()) {
        rep.add(finish("y_second_partials_nonpositive", y_diag, 1e-6));
        rep.add(finish("y_hessian_determinant", y_det, 1e-6));
        if (e.kind() == EntropyKind::Power) {
            rep.add(finish("y_determinant_vanishes", y_zero, 1e-6));
            rep.add(finish("y_mixed_partial_closed_form", y_mixed, 1e-6));
        }
    }
    return rep;
}

} // namespace beckner
