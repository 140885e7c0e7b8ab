#include "beckner/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beckner/errors.hpp"
#include "beckner/util.hpp"

namespace beckner {

double Potential::Impl::min_second_derivative(std::size_t samples) const {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i)
        lo = std::min(lo, second_derivative(static_cast<double>(i) / (samples - 1)));
    return lo;
}

double Potential::min_second_derivative(std::size_t samples) const {
    if (samples < 2)
        throw DomainError("need at least two samples");
    return impl_->min_second_derivative(samples);
}

namespace {

struct Quadratic : Potential::Impl {
    double coeff, center;
    Quadratic(double c, double x0) : coeff(c), center(x0) {
        description = "quadratic(coeff=" + format_double(c) + ", center=" + format_double(x0) + ")";
    }
    double value(double x) const override { return coeff * (x - center) * (x - center); }
    double second_derivative(double) const override { return 2.0 * coeff; }
};

struct Spline : Potential::Impl {
    std::vector<double> x, v, m; // m: second derivatives at the knots

    Spline(std::vector<double> xs, std::vector<double> vs) : x(std::move(xs)), v(std::move(vs)) {
        const std::size_t n = x.size();
        m.assign(n, 0.0);
        if (n < 3)
            return;
        // Natural spline: tridiagonal system for the interior second derivatives.
        std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
            diag[i] = (h0 + h1) / 3.0;
            upper[i] = h1 / 6.0;
            rhs[i] = (v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0;
        }
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double lower = (x[i] - x[i - 1]) / 6.0;
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
            if (i == 1)
                break;
        }
        description = "tabulated(" + std::to_string(n) + " knots)";
    }

    std::size_t segment(double t) const {
        const auto it = std::upper_bound(x.begin(), x.end(), t);
        std::size_t k = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
        return std::min(k, x.size() - 2);
    }

    double value(double t) const override {
        const std::size_t k = segment(t);
        const double h = x[k + 1] - x[k];
        const double A = (x[k + 1] - t) / h, B = (t - x[k]) / h;
        return A * v[k] + B * v[k + 1] +
               ((A * A * A - A) * m[k] + (B * B * B - B) * m[k + 1]) * h * h / 6.0;
    }

    double second_derivative(double t) const override {
        const std::size_t k = segment(t);
        const double h = x[k + 1] - x[k];
        return ((x[k + 1] - t) * m[k] + (t - x[k]) * m[k + 1]) / h;
    }

    double min_second_derivative(std::size_t) const override {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < x.size(); ++i) {
            const double d1 = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
            const double d0 = (v[i] - v[i - 1]) / (x[i] - x[i - 1]);
            lo = std::min(lo, 2.0 * (d1 - d0) / (x[i + 1] - x[i - 1]));
        }
        return lo;
    }
};

struct Custom : Potential::Impl {
    std::function<double(double)> f, f2;
    Custom(std::function<double(double)> a, std::function<double(double)> b, std::string d)
        : f(std::move(a)), f2(std::move(b)) {
        description = std::move(d);
    }
    double value(double x) const override { return f(x); }
    double second_derivative(double x) const override { return f2(x); }
};

} // namespace

Potential Potential::quadratic(double coeff, double center) {
    if (!std::isfinite(coeff) || !std::isfinite(center))
        throw DomainError("quadratic potential needs finite parameters");
    return Potential(std::make_shared<Quadratic>(coeff, center));
}

Potential Potential::tabulated(std::vector<double> x, std::vector<double> v) {
    if (x.size() != v.size() || x.size() < 3)
        throw DomainError("tabulated potential needs at least three (x, V) pairs");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(v[i]))
            throw DomainError("tabulated potential values must be finite");
        if (i && !(x[i] > x[i - 1]))
            throw DomainError("tabulated abscissae must be strictly increasing");
    }
    if (x.front() > 0.0 || x.back() < 1.0)
        throw DomainError("tabulated potential must cover [0,1]");
    return Potential(std::make_shared<Spline>(std::move(x), std::move(v)));
}

Potential Potential::custom(std::function<double(double)> value,
                            std::function<double(double)> second_derivative,
                            std::string description) {
    if (!value || !second_derivative)
        throw DomainError("custom potential needs V and V''");
    return Potential(std::make_shared<Custom>(std::move(value), std::move(second_derivative),
                                              std::move(description)));
}

} // namespace beckner
