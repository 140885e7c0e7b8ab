#include "beckner/report.hpp"

namespace beckner {

bool Report::passed() const {
    for (const auto &c : checks)
        if (!c.passed)
            return false;
    return true;
}

void Report::append(const Report &other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::vector<std::string> Report::failures() const {
    std::vector<std::string> out;
    for (const auto &c : checks)
        if (!c.passed)
            out.push_back(c.name);
    return out;
}

nlohmann::json to_json(const CheckResult &c) {
    nlohmann::json j{{"name", c.name},
                     {"max_residual", c.max_residual},
                     {"tolerance", c.tolerance},
                     {"pass", c.passed}};
    if (!c.witness.empty())
        j["witness"] = c.witness;
    return j;
}

nlohmann::json Report::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &c : checks)
        arr.push_back(beckner::to_json(c));
    return {{"pass", passed()}, {"checks", arr}};
}

} // namespace beckner
