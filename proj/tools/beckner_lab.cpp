#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beckner/commands.hpp"
#include "beckner/config.hpp"

using nlohmann::json;

namespace {

constexpr int kUsageError = 2;

json read_config_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw beckner::ConfigError("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return json();
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw beckner::ConfigError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Numerical checks of discrete Bochner identities, Beckner inequalities and "
                 "entropy decay for reversible Markov chains"};
    app.set_version_flag("--version", "beckner_lab 0.1.0");

    std::string command, config_path, out, model, grid;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol, c_rate, lambda, t_end, coeff;
    std::optional<int> n, L, N, K;
    std::optional<std::size_t> samples, instances, starts;
    std::vector<double> alphas;
    std::vector<int> cells;

    app.add_option("command", command,
                   "theta-surface | verify-lemmas | verify-bochner | decay | constants | "
                   "fokker-planck | export-chain");
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--tol", tol, "tolerance override for the main checks");
    app.add_option("--model", model,
                   "birth_death | zero_range | bernoulli_laplace | random_transposition | "
                   "fokker_planck");
    app.add_option("--n", n, "random transposition: number of cards");
    app.add_option("--L", L, "number of sites");
    app.add_option("--N", N, "number of particles");
    app.add_option("--K", K, "birth-death: a(n) = max(K - n, 0), b(n) = n");
    app.add_option("--c", c_rate, "zero-range: c_x(k) = c k");
    app.add_option("--lambda", lambda,
                   "Bernoulli-Laplace site rate, or the convexity constant of the potential");
    app.add_option("--coeff", coeff, "fokker-planck: V(x) = coeff x^2");
    app.add_option("--alpha", alphas, "entropy exponent(s) in (1,2]")->delimiter(',');
    app.add_option("--grid", grid, "theta-surface grid lo:hi:step");
    app.add_option("--cells", cells, "fokker-planck meshes")->delimiter(',');
    app.add_option("--samples", samples, "samples or trajectory points");
    app.add_option("--instances", instances, "random instances for verify-bochner");
    app.add_option("--starts", starts, "random starts (decay) or optimizer starts (constants)");
    app.add_option("--t-end", t_end, "decay horizon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        json raw = config_path.empty() ? json() : read_config_file(config_path);
        if (!raw.is_null() && !raw.is_object())
            throw beckner::ConfigError("configuration must be a JSON object");
        auto set = [&](const char *key, const json &value) {
            if (raw.is_null())
                raw = json::object();
            raw[key] = value;
        };
        if (!command.empty())
            set("command", command);
        if (!out.empty())
            set("out", out);
        if (seed)
            set("seed", *seed);
        if (tol)
            set("tol", *tol);
        if (!alphas.empty())
            set("alpha", alphas);
        if (!grid.empty())
            set("grid", grid);
        if (!cells.empty())
            set("cells", cells);
        if (samples)
            set("samples", *samples);
        if (instances)
            set("instances", *instances);
        if (starts)
            set("starts", *starts);
        if (t_end)
            set("t_end", *t_end);
        // The fokker-planck command has only one model, so --model is optional there.
        if (model.empty() && command == "fokker-planck")
            model = "fokker_planck";
        if (!model.empty()) {
            json m = {{"type", model}};
            if (n)
                m["n"] = *n;
            if (L)
                m["L"] = *L;
            if (N)
                m["N"] = *N;
            if (K)
                m["K"] = *K;
            if (c_rate)
                m["c"] = *c_rate;
            if (lambda)
                m["lambda"] = *lambda;
            if (coeff)
                m["potential"] = {{"type", "quadratic"}, {"coeff", *coeff}};
            set("model", m);
        } else if (n || L || N || K || c_rate || lambda || coeff) {
            throw beckner::ConfigError("model parameters given without --model");
        }

        const beckner::ExperimentConfig cfg = beckner::validate_config(raw);
        std::cout << "config: " << beckner::to_json(cfg).dump() << '\n';
        const beckner::RunOutcome result = beckner::run(cfg, std::cout);
        for (const auto &f : result.files)
            std::cout << "wrote " << f << '\n';
        if (result.status != 0) {
            std::cerr << result.failures.size() << " check(s) failed:\n";
            for (const auto &f : result.failures)
                std::cerr << "  " << f << '\n';
        }
        return result.status;
    } catch (const beckner::ConfigError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }
}
