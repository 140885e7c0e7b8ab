#include "beckner/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace beckner {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &what) {
    throw ConfigError(path.empty() ? what : path + ": " + what);
}

void reject_unknown(const json &obj, const std::set<std::string> &allowed,
                    const std::string &path) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

std::string join(const std::string &path, const std::string &key) {
    return path.empty() ? key : path + "." + key;
}

double get_number(const json &obj, const std::string &key, const std::string &path) {
    const json &v = obj.at(key);
    if (!v.is_number())
        fail(join(path, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        fail(join(path, key), "must be finite");
    return x;
}

long long get_integer(const json &v, const std::string &where) {
    if (v.is_number_integer())
        return v.get<long long>();
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15)
            return static_cast<long long>(x);
    }
    fail(where, "expected an integer");
}

int get_int(const json &obj, const std::string &key, const std::string &path, long long lo,
            long long hi) {
    const long long n = get_integer(obj.at(key), join(path, key));
    if (n < lo || n > hi)
        fail(join(path, key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(n);
}

std::vector<double> get_numbers(const json &v, const std::string &where) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(v.get<double>());
    } else if (v.is_array()) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!v[k].is_number())
                fail(where + "[" + std::to_string(k) + "]", "expected a number");
            out.push_back(v[k].get<double>());
        }
    } else {
        fail(where, "expected a number or an array of numbers");
    }
    for (double x : out)
        if (!std::isfinite(x))
            fail(where, "must be finite");
    return out;
}

std::vector<double> require_nonnegative(std::vector<double> v, const std::string &where) {
    for (double x : v)
        if (x < 0.0)
            fail(where, "rates must be nonnegative");
    return v;
}

Potential potential_from_json(const json &block, const std::string &path) {
    if (!block.is_object())
        fail(path, "expected an object");
    if (!block.contains("type") || !block["type"].is_string())
        fail(join(path, "type"), "missing potential type");
    const std::string type = block["type"];
    if (type == "quadratic") {
        reject_unknown(block, {"type", "coeff", "center"}, path);
        if (!block.contains("coeff"))
            fail(join(path, "coeff"), "missing");
        const double c = get_number(block, "coeff", path);
        const double x0 = block.contains("center") ? get_number(block, "center", path) : 0.0;
        return Potential::quadratic(c, x0);
    }
    if (type == "tabulated") {
        reject_unknown(block, {"type", "x", "v"}, path);
        if (!block.contains("x") || !block.contains("v"))
            fail(path, "tabulated potential needs x and v");
        try {
            return Potential::tabulated(get_numbers(block["x"], join(path, "x")),
                                        get_numbers(block["v"], join(path, "v")));
        } catch (const std::invalid_argument &e) {
            fail(path, e.what());
        } catch (const std::domain_error &e) {
            fail(path, e.what());
        }
    }
    fail(join(path, "type"), "unknown potential type '" + type + "'");
}

json potential_echo(const json &block) {
    json out = block;
    if (out.value("type", "") == "quadratic" && !out.contains("center"))
        out["center"] = 0.0;
    return out;
}

// The model block with its defaults written out.
json model_echo(const json &block) {
    json out = block;
    const std::string type = out["type"];
    if (type == "zero_range" && !out.contains("rates") && !out.contains("c"))
        out["c"] = 1.0;
    if (type == "bernoulli_laplace" && !out.contains("lambda"))
        out["lambda"] = 1.0;
    if (type == "fokker_planck") {
        if (!out.contains("cells"))
            out["cells"] = 32;
        if (!out.contains("lambda"))
            out["lambda"] = 4.0;
        if (!out.contains("potential"))
            out["potential"] = {{"type", "quadratic"}, {"coeff", 2.0}};
        out["potential"] = potential_echo(out["potential"]);
    }
    return out;
}

} // namespace

std::string to_string(Command c) {
    switch (c) {
    case Command::ThetaSurface:
        return "theta-surface";
    case Command::VerifyLemmas:
        return "verify-lemmas";
    case Command::VerifyBochner:
        return "verify-bochner";
    case Command::Decay:
        return "decay";
    case Command::Constants:
        return "constants";
    case Command::FokkerPlanck:
        return "fokker-planck";
    case Command::ExportChain:
        return "export-chain";
    }
    return "unknown";
}

std::vector<double> Grid::values() const {
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long k = 0; k <= n; ++k)
        out.push_back(lo + static_cast<double>(k) * step);
    return out;
}

Grid parse_grid(const std::string &text) {
    std::vector<double> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception &) {
            fail("grid", "expected lo:hi:step, got '" + text + "'");
        }
    }
    if (parts.size() != 3)
        fail("grid", "expected lo:hi:step, got '" + text + "'");
    Grid g{parts[0], parts[1], parts[2]};
    if (!(g.lo >= 0.0) || !(g.hi >= g.lo) || !(g.step > 0.0))
        fail("grid", "need 0 <= lo <= hi and step > 0");
    if ((g.hi - g.lo) / g.step > 1e5)
        fail("grid", "more than 1e5 points per axis");
    return g;
}

ModelSpec model_from_json(const json &block, const std::string &path) {
    if (!block.is_object())
        fail(path, "expected an object");
    if (!block.contains("type") || !block["type"].is_string())
        fail(join(path, "type"), "missing model type");
    const std::string type = block["type"];
    if (type == "birth_death") {
        reject_unknown(block, {"type", "K", "a", "b"}, path);
        if (block.contains("K")) {
            if (block.contains("a") || block.contains("b"))
                fail(path, "give either K or explicit rates a, b");
            return birth_death_linear(get_int(block, "K", path, 1, 200000));
        }
        if (!block.contains("a") || !block.contains("b"))
            fail(path, "birth_death needs K or rates a and b");
        BirthDeathSpec s;
        s.a = require_nonnegative(get_numbers(block["a"], join(path, "a")), join(path, "a"));
        s.b = require_nonnegative(get_numbers(block["b"], join(path, "b")), join(path, "b"));
        if (s.a.size() != s.b.size())
            fail(path, "a and b must have the same length");
        return s;
    }
    if (type == "zero_range") {
        reject_unknown(block, {"type", "L", "N", "c", "rates"}, path);
        if (!block.contains("L") || !block.contains("N"))
            fail(path, "zero_range needs L and N");
        const int L = get_int(block, "L", path, 1, 64);
        const int N = get_int(block, "N", path, 0, 100000);
        if (block.contains("rates")) {
            if (block.contains("c"))
                fail(path, "give either c or rates");
            const json &r = block["rates"];
            if (!r.is_array() || r.size() != static_cast<std::size_t>(L))
                fail(join(path, "rates"), "expected one row per site");
            ZeroRangeSpec s{L, N, {}};
            for (int x = 0; x < L; ++x) {
                const std::string where = join(path, "rates") + "[" + std::to_string(x) + "]";
                auto row = require_nonnegative(get_numbers(r[x], where), where);
                if (row.size() != static_cast<std::size_t>(N) + 1)
                    fail(where, "expected N + 1 values c_x(0..N)");
                s.rates.push_back(std::move(row));
            }
            return s;
        }
        const double c = block.contains("c") ? get_number(block, "c", path) : 1.0;
        if (!(c > 0.0))
            fail(join(path, "c"), "must be positive");
        return zero_range_linear(L, N, c);
    }
    if (type == "bernoulli_laplace") {
        reject_unknown(block, {"type", "L", "N", "lambda"}, path);
        if (!block.contains("L") || !block.contains("N"))
            fail(path, "bernoulli_laplace needs L and N");
        const int L = get_int(block, "L", path, 2, 62);
        const int N = get_int(block, "N", path, 1, L - 1);
        if (!block.contains("lambda") || block["lambda"].is_number()) {
            const double lam = block.contains("lambda") ? get_number(block, "lambda", path) : 1.0;
            if (!(lam > 0.0))
                fail(join(path, "lambda"), "must be positive");
            return bernoulli_laplace_homogeneous(L, N, lam);
        }
        auto lam = get_numbers(block["lambda"], join(path, "lambda"));
        if (lam.size() != static_cast<std::size_t>(L))
            fail(join(path, "lambda"), "expected one rate per site");
        for (double x : lam)
            if (!(x > 0.0))
                fail(join(path, "lambda"), "site rates must be positive");
        return BernoulliLaplaceSpec{L, N, lam};
    }
    if (type == "random_transposition") {
        reject_unknown(block, {"type", "n"}, path);
        if (!block.contains("n"))
            fail(join(path, "n"), "missing");
        return RandomTranspositionSpec{get_int(block, "n", path, 2, 7)};
    }
    if (type == "fokker_planck") {
        reject_unknown(block, {"type", "cells", "lambda", "potential"}, path);
        FokkerPlanckSpec s;
        s.V = block.contains("potential") ? potential_from_json(block["potential"], join(path, "potential"))
                                          : Potential::quadratic(2.0);
        s.lambda_conv = block.contains("lambda") ? get_number(block, "lambda", path) : 4.0;
        if (!(s.lambda_conv > 0.0))
            fail(join(path, "lambda"), "must be positive");
        s.cells = block.contains("cells") ? get_int(block, "cells", path, 2, 200000) : 32;
        return s;
    }
    fail(join(path, "type"), "unknown model type '" + type + "'");
}

ExperimentConfig validate_config(const std::string &text) {
    json raw;
    try {
        raw = json::parse(text);
    } catch (const json::parse_error &e) {
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first == std::string::npos)
            throw ConfigError("missing command");
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return validate_config(raw);
}

ExperimentConfig validate_config(const json &raw) {
    if (raw.is_null())
        throw ConfigError("missing command");
    if (!raw.is_object())
        fail("", "configuration must be a JSON object");
    reject_unknown(raw, {"command", "model", "alpha", "seed", "out", "tol", "grid", "samples",
                         "instances", "starts", "t_end", "cells"},
                   "");
    if (!raw.contains("command"))
        throw ConfigError("missing command");
    if (!raw["command"].is_string())
        fail("command", "expected a string");

    ExperimentConfig cfg;
    const std::string cmd = raw["command"];
    const Command all[] = {Command::ThetaSurface, Command::VerifyLemmas, Command::VerifyBochner,
                           Command::Decay,        Command::Constants,    Command::FokkerPlanck,
                           Command::ExportChain};
    bool known = false;
    for (Command c : all)
        if (to_string(c) == cmd) {
            cfg.command = c;
            known = true;
        }
    if (!known)
        fail("command", "unknown command '" + cmd + "'");

    // Command-specific defaults.
    switch (cfg.command) {
    case Command::ThetaSurface:
        cfg.alphas = {1.01, 1.5, 1.8, 2.0};
        break;
    case Command::VerifyLemmas:
        cfg.alphas = {1.1, 1.5, 1.9};
        cfg.samples = 10000;
        break;
    case Command::VerifyBochner:
        cfg.alphas = {1.1, 1.5, 2.0};
        cfg.instances = 100;
        break;
    case Command::Decay:
        cfg.alphas = {1.1, 1.5, 2.0};
        cfg.starts = 20;
        cfg.samples = 201;
        break;
    case Command::Constants:
        cfg.alphas = {1.1, 1.5, 2.0};
        cfg.starts = 32;
        break;
    case Command::FokkerPlanck:
        cfg.alphas = {1.5, 2.0};
        cfg.samples = 201;
        cfg.cells = {8, 16, 32, 64};
        break;
    case Command::ExportChain:
        break;
    }

    if (raw.contains("model")) {
        cfg.model = model_from_json(raw["model"]);
        cfg.model_json = model_echo(raw["model"]);
    }
    const bool needs_model = cfg.command == Command::VerifyBochner ||
                             cfg.command == Command::Decay || cfg.command == Command::Constants ||
                             cfg.command == Command::ExportChain;
    if (needs_model && !cfg.model)
        fail("model", "the " + cmd + " command needs a model block");
    if (cfg.command == Command::FokkerPlanck) {
        if (!cfg.model) {
            cfg.model = model_from_json(json{{"type", "fokker_planck"}});
            cfg.model_json = model_echo(json{{"type", "fokker_planck"}});
        } else if (!std::holds_alternative<FokkerPlanckSpec>(*cfg.model)) {
            fail("model.type", "the fokker-planck command needs a fokker_planck model");
        }
    }

    if (raw.contains("alpha")) {
        cfg.alphas = get_numbers(raw["alpha"], "alpha");
        if (cfg.alphas.empty())
            fail("alpha", "needs at least one value");
    }
    for (double a : cfg.alphas)
        if (!(a > 1.0 && a <= 2.0))
            throw ConfigError("alpha must lie in (1,2]");

    if (raw.contains("seed")) {
        const json &s = raw["seed"];
        if (s.is_number_unsigned())
            cfg.seed = s.get<std::uint64_t>();
        else if (s.is_number_integer() && s.get<long long>() >= 0)
            cfg.seed = static_cast<std::uint64_t>(s.get<long long>());
        else
            fail("seed", "expected a non-negative integer");
    }
    if (raw.contains("out")) {
        if (!raw["out"].is_string() || raw["out"].get<std::string>().empty())
            fail("out", "expected a non-empty path");
        cfg.out = raw["out"];
    }
    if (raw.contains("tol")) {
        const double t = get_number(raw, "tol", "");
        if (!(t > 0.0 && t < 1.0))
            fail("tol", "must lie in (0,1)");
        cfg.tol = t;
    }
    if (raw.contains("grid")) {
        const json &g = raw["grid"];
        if (!g.is_string())
            fail("grid", "expected \"lo:hi:step\"");
        cfg.grid = parse_grid(g);
    }
    auto count = [&](const char *key, std::size_t &field, long long lo, long long hi) {
        if (raw.contains(key))
            field = static_cast<std::size_t>(get_int(raw, key, "", lo, hi));
    };
    count("samples", cfg.samples, 3, 10000000);
    count("instances", cfg.instances, 1, 1000000);
    count("starts", cfg.starts, 1, 10000);
    if (raw.contains("t_end")) {
        cfg.t_end = get_number(raw, "t_end", "");
        if (!(cfg.t_end > 0.0))
            fail("t_end", "must be positive");
    }
    if (raw.contains("cells")) {
        const json &c = raw["cells"];
        const json list = c.is_array() ? c : json::array({c});
        cfg.cells.clear();
        for (std::size_t k = 0; k < list.size(); ++k) {
            const long long n = get_integer(list[k], "cells[" + std::to_string(k) + "]");
            if (n < 2 || n > 200000)
                fail("cells[" + std::to_string(k) + "]", "must lie in [2, 200000]");
            cfg.cells.push_back(static_cast<int>(n));
        }
        if (cfg.cells.empty())
            fail("cells", "needs at least one mesh");
        if (!std::is_sorted(cfg.cells.begin(), cfg.cells.end()) ||
            std::adjacent_find(cfg.cells.begin(), cfg.cells.end()) != cfg.cells.end())
            fail("cells", "must be strictly increasing");
    }
    return cfg;
}

json to_json(const ExperimentConfig &cfg) {
    json out;
    out["command"] = to_string(cfg.command);
    if (cfg.model)
        out["model"] = cfg.model_json;
    out["alpha"] = cfg.alphas;
    out["seed"] = cfg.seed;
    out["out"] = cfg.out;
    if (cfg.tol)
        out["tol"] = *cfg.tol;
    switch (cfg.command) {
    case Command::ThetaSurface: {
        std::ostringstream g;
        g << cfg.grid.lo << ':' << cfg.grid.hi << ':' << cfg.grid.step;
        out["grid"] = g.str();
        break;
    }
    case Command::VerifyLemmas:
        out["samples"] = cfg.samples;
        break;
    case Command::VerifyBochner:
        out["instances"] = cfg.instances;
        break;
    case Command::Decay:
        out["starts"] = cfg.starts;
        out["samples"] = cfg.samples;
        if (cfg.t_end > 0.0)
            out["t_end"] = cfg.t_end;
        break;
    case Command::Constants:
        out["starts"] = cfg.starts;
        break;
    case Command::FokkerPlanck:
        out["samples"] = cfg.samples;
        out["cells"] = cfg.cells;
        if (cfg.t_end > 0.0)
            out["t_end"] = cfg.t_end;
        break;
    case Command::ExportChain:
        break;
    }
    return out;
}

} // namespace beckner
