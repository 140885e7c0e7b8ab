#ifndef BECKNER_CONFIG_HPP
#define BECKNER_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "beckner/models.hpp"

namespace beckner {

/// Malformed or out-of-range configuration; the message names the key.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Command {
    ThetaSurface,
    VerifyLemmas,
    VerifyBochner,
    Decay,
    Constants,
    FokkerPlanck,
    ExportChain
};

std::string to_string(Command c);

struct Grid {
    double lo = 0.0, hi = 10.0, step = 0.5;
    std::vector<double> values() const;
};

struct ExperimentConfig {
    Command command = Command::ThetaSurface;
    std::optional<ModelSpec> model;
    nlohmann::json model_json; // normalized model block, null when absent
    std::vector<double> alphas;
    std::uint64_t seed = 0;
    std::string out = "beckner_out";
    std::optional<double> tol;

    Grid grid;                  // theta-surface
    std::size_t samples = 0;    // lemma samples, trajectory points, ...
    std::size_t instances = 0;  // verify-bochner random instances
    std::size_t starts = 0;     // decay starts or optimizer starts
    double t_end = 0.0;         // decay horizon, 0 = automatic
    std::vector<int> cells;     // fokker-planck meshes
};

/// Strict parse: unknown keys are rejected and ranges checked; defaults
/// depend on the command (see README).
ExperimentConfig validate_config(const std::string &text);
ExperimentConfig validate_config(const nlohmann::json &raw);

/// The effective configuration after defaults, as echoed into the output directory.
nlohmann::json to_json(const ExperimentConfig &cfg);

/// Model block parsing shared with the Python bindings.
ModelSpec model_from_json(const nlohmann::json &block, const std::string &path = "model");

/// "a:b:step" grid syntax.
Grid parse_grid(const std::string &text);

} // namespace beckner

#endif
