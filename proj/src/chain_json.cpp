#include <sstream>

#include <json.hpp>

#include "beckner/chain.hpp"
#include "beckner/errors.hpp"
#include "beckner/util.hpp"

namespace beckner {

std::string chain_to_json(const FiniteChain &chain) {
    // Written by hand so that every float carries 17 significant digits.
    std::ostringstream out;
    out << "{\"states\":[";
    for (std::size_t i = 0; i < chain.size(); ++i) {
        out << (i ? "," : "") << '[';
        const auto &k = chain.key(i);
        for (std::size_t j = 0; j < k.size(); ++j)
            out << (j ? "," : "") << k[j];
        out << ']';
    }
    out << "],\"pi\":[";
    for (std::size_t i = 0; i < chain.size(); ++i)
        out << (i ? "," : "") << format_double(chain.pi()[i]);
    out << "],\"moves\":[";
    for (std::size_t g = 0; g < chain.num_moves(); ++g) {
        const auto &m = chain.move(g);
        out << (g ? "," : "") << "{\"name\":" << nlohmann::json(m.name).dump()
            << ",\"inverse\":" << m.inverse << ",\"map\":[";
        for (std::size_t i = 0; i < m.map.size(); ++i)
            out << (i ? "," : "") << m.map[i];
        out << "]}";
    }
    out << "],\"rates\":[";
    bool first = true;
    for (std::size_t i = 0; i < chain.size(); ++i)
        for (std::size_t g = 0; g < chain.num_moves(); ++g)
            if (chain.rate(i, g) != 0.0) {
                out << (first ? "" : ",") << '[' << i << ',' << g << ','
                    << format_double(chain.rate(i, g)) << ']';
                first = false;
            }
    out << "]}\n";
    return out.str();
}

FiniteChain chain_from_json(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConstructionError(std::string("malformed chain JSON: ") + e.what());
    }
    try {
        std::vector<StateKey> states = doc.at("states").get<std::vector<StateKey>>();
        const auto pi_list = doc.at("pi").get<std::vector<double>>();
        std::vector<Move> moves;
        for (const auto &m : doc.at("moves"))
            moves.push_back({m.at("name").get<std::string>(), m.at("inverse").get<std::size_t>(),
                             m.at("map").get<std::vector<std::size_t>>()});
        const std::size_t S = states.size(), G = moves.size();
        Matrix rates = Matrix::Zero(S, G);
        for (const auto &r : doc.at("rates")) {
            if (!r.is_array() || r.size() != 3)
                throw ConstructionError("rate entries must be [state, move, value]");
            const auto i = r[0].get<std::size_t>(), g = r[1].get<std::size_t>();
            if (i >= S || g >= G)
                throw ConstructionError("rate entry refers to an unknown state or move");
            rates(i, g) = r[2].get<double>();
        }
        Vector pi = Eigen::Map<const Vector>(pi_list.data(), pi_list.size());
        return FiniteChain(std::move(states), std::move(moves), std::move(rates), std::move(pi),
                           false);
    } catch (const nlohmann::json::exception &e) {
        throw ConstructionError(std::string("invalid chain JSON: ") + e.what());
    }
}

} // namespace beckner
