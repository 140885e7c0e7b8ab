#ifndef BECKNER_REPORT_HPP
#define BECKNER_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

namespace beckner {

/// One named verification outcome. `witness` locates the worst offender
/// (state/move indices, sample number, ...) and is empty on success.
struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    std::string witness;
};

struct Report {
    std::vector<CheckResult> checks;

    bool passed() const;
    void add(CheckResult c) { checks.push_back(std::move(c)); }
    void append(const Report &other);
    std::vector<std::string> failures() const;
    nlohmann::json to_json() const;
};

nlohmann::json to_json(const CheckResult &c);

} // namespace beckner

#endif
