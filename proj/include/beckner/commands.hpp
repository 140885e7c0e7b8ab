#ifndef BECKNER_COMMANDS_HPP
#define BECKNER_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "beckner/config.hpp"

namespace beckner {

struct RunOutcome {
    /// 0 when every enabled check passed, 1 otherwise.
    int status = 0;
    std::vector<std::string> failures;
    std::vector<std::string> files;
};

/// Executes the configured pipeline, writing CSV/JSON files (and an echo of
/// the effective configuration) into cfg.out. Progress and verdicts go to `log`.
RunOutcome run(const ExperimentConfig &cfg, std::ostream &log);

} // namespace beckner

#endif
