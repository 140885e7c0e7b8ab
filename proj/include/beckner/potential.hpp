#ifndef BECKNER_POTENTIAL_HPP
#define BECKNER_POTENTIAL_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace beckner {

/// Potential V on [0,1] for the finite-volume Fokker-Planck chain.
class Potential {
  public:
    /// V(x) = coeff (x - center)^2, so V'' = 2 coeff.
    static Potential quadratic(double coeff, double center = 0.0);
    /// Natural cubic spline through (x_i, v_i); x must be increasing and
    /// cover [0,1].
    static Potential tabulated(std::vector<double> x, std::vector<double> v);
    static Potential custom(std::function<double(double)> value,
                            std::function<double(double)> second_derivative,
                            std::string description);

    double value(double x) const { return impl_->value(x); }
    double second_derivative(double x) const { return impl_->second_derivative(x); }
    const std::string &description() const { return impl_->description; }

    /// Lower bound on V'' over [0,1]: second divided differences of the table
    /// for tabulated potentials, a fine sampling of V'' otherwise.
    double min_second_derivative(std::size_t samples = 4001) const;

    struct Impl {
        virtual ~Impl() = default;
        virtual double value(double x) const = 0;
        virtual double second_derivative(double x) const = 0;
        virtual double min_second_derivative(std::size_t samples) const;
        std::string description;
    };

  private:
    explicit Potential(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

} // namespace beckner

#endif
