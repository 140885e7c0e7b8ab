#ifndef BECKNER_ERRORS_HPP
#define BECKNER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace beckner {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed (non-convergence, underflow, eigensolver).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Requested state space exceeds the desk-scale caps.
class SizeError : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// Inconsistent chain description (move leaving S, broken inverse table, ...).
class ConstructionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A theorem hypothesis does not hold for the supplied model.
class HypothesisError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Input for which a quotient is 0/0 (e.g. a constant density).
class DegenerateInputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Operation not available for the given model variant.
class CapabilityError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Variational estimate failed; carries the best value reached.
class OptimizationError : public std::runtime_error {
  public:
    OptimizationError(const std::string &what, double best)
        : std::runtime_error(what), best_value(best) {}
    double best_value;
};

/// The two algebraic forms of the Dirichlet form disagree.
class ReversibilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace beckner

#endif
