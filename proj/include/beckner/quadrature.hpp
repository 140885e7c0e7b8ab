#ifndef BECKNER_QUADRATURE_HPP
#define BECKNER_QUADRATURE_HPP

#include <array>
#include <cstddef>

namespace beckner {

struct GaussLegendreRule {
    std::array<double, 16> nodes;   // on [0, 1]
    std::array<double, 16> weights; // sum to 1
};

/// 16-point Gauss-Legendre rule mapped to [0, 1].
const GaussLegendreRule &gauss_legendre16();

/// Integral of f over [a, b] with the 16-point rule on `pieces` equal panels.
template <class F>
double integrate_gl16(F &&f, double a, double b, std::size_t pieces = 1) {
    const auto &rule = gauss_legendre16();
    const double width = (b - a) / static_cast<double>(pieces);
    double total = 0.0;
    for (std::size_t p = 0; p < pieces; ++p) {
        const double left = a + width * static_cast<double>(p);
        double panel = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k)
            panel += rule.weights[k] * f(left + width * rule.nodes[k]);
        total += panel * width;
    }
    return total;
}

} // namespace beckner

#endif
