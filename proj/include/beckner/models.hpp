#ifndef BECKNER_MODELS_HPP
#define BECKNER_MODELS_HPP

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "beckner/chain.hpp"
#include "beckner/potential.hpp"

namespace beckner {

/// Rates a(n), b(n) on {0..n_max}, n_max = a.size() - 1.
struct BirthDeathSpec {
    std::vector<double> a, b;
};

/// rates[x][k] = c_x(k) for k = 0..N, one row per site.
struct ZeroRangeSpec {
    int L = 0;
    int N = 0;
    std::vector<std::vector<double>> rates;
};

struct BernoulliLaplaceSpec {
    int L = 0;
    int N = 0;
    std::vector<double> lambda;
};

struct RandomTranspositionSpec {
    int n = 0;
};

struct FokkerPlanckSpec {
    Potential V = Potential::quadratic(0.0);
    int cells = 0;
    double lambda_conv = 0.0;
};

using ModelSpec = std::variant<BirthDeathSpec, ZeroRangeSpec, BernoulliLaplaceSpec,
                               RandomTranspositionSpec, FokkerPlanckSpec>;

/// "birth_death", "zero_range", "bernoulli_laplace", "random_transposition",
/// "fokker_planck".
std::string model_name(const ModelSpec &spec);

/// a(n) = max(K - n, 0), b(n) = n on {0..K}.
BirthDeathSpec birth_death_linear(int K);
/// c_x(k) = c k at every site.
ZeroRangeSpec zero_range_linear(int L, int N, double c);
/// lambda_x = lambda at every site.
BernoulliLaplaceSpec bernoulli_laplace_homogeneous(int L, int N, double lambda);

/// Largest state count accepted by the builders.
inline constexpr std::size_t kStateCap = 200000;

FiniteChain build_birth_death(const std::vector<double> &a, const std::vector<double> &b);
FiniteChain build_zero_range(int L, int N, const std::vector<std::vector<double>> &rates);
FiniteChain build_bernoulli_laplace(int L, int N, const std::vector<double> &lambda);
FiniteChain build_random_transposition(int n);
FiniteChain build_fokker_planck_fv(const Potential &V, int cells, double lambda_conv);
FiniteChain build_chain(const ModelSpec &spec);

/// Cell data of the finite-volume scheme: cell_pi[n] is the cell average of
/// the normalized Gibbs density (sum_n h cell_pi[n] = 1), a and b the rates.
struct FvDiscretization {
    double h = 0.0;
    std::vector<double> cell_pi;
    std::vector<double> a, b;
};

FvDiscretization fv_discretize(const Potential &V, int cells);

/// Move indices inside the built chains.
inline std::size_t birth_move() { return 0; }
inline std::size_t death_move() { return 1; }
/// Zero-range: moves x->y for all sites x, y (x = y is the identity).
inline std::size_t zero_range_move(int L, int x, int y) {
    return static_cast<std::size_t>(x * L + y);
}
/// Bernoulli-Laplace: moves x->y for x != y, in lexicographic order.
inline std::size_t bernoulli_laplace_move(int L, int x, int y) {
    return static_cast<std::size_t>(x * (L - 1) + (y < x ? y : y - 1));
}
/// Random transposition: transpositions (i j), i < j, in lexicographic order.
inline std::size_t transposition_move(int n, int i, int j) {
    if (i > j)
        std::swap(i, j);
    return static_cast<std::size_t>(i * n - i * (i + 1) / 2 + (j - i - 1));
}

double erf(double s);

/// Phi(u) = (3 erf(s) - erf(3s))/(2 erf(s)) with u = s^2; series for small u.
double fv_phi(double u);

/// lambda_h = 2 h^{-2} Phi(h^2 lambda / 8).
double lambda_h(double h, double lambda_conv);

struct PaperConstant {
    double value = 0.0;
    std::string formula;
    std::vector<std::pair<std::string, double>> parameters;
    /// Reference values quoted alongside the theorem constant.
    std::vector<std::pair<std::string, double>> references;
};

/// The theorem decay constant for `spec` at exponent alpha.
/// HypothesisError names the violated condition.
PaperConstant paper_lambda(const ModelSpec &spec, double alpha);

} // namespace beckner

#endif
