#include <doctest.h>

#include <fstream>
#include <sstream>

#include "beckner/config.hpp"

using namespace beckner;
using nlohmann::json;

namespace {

std::string error_of(const std::string &text) {
    try {
        validate_config(text);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return {};
}

bool mentions(const std::string &msg, const std::string &part) { return msg.find(part) != std::string::npos; }

} // namespace

TEST_CASE("rejections") {
    CHECK(mentions(error_of(""), "missing command"));
    CHECK(mentions(error_of("{}"), "missing command"));
    CHECK(mentions(error_of("{\"command\": \"decay\", \"alpha\": 2.5, \"model\": {\"type\": \"random_transposition\", \"n\": 4}}"),
                   "alpha must lie in (1,2]"));
    CHECK(mentions(error_of("{\"command\": \"theta-surface\", \"colour\": 1}"), "colour"));
    CHECK(mentions(error_of("{\"command\": \"theta-surface\", \"colour\": 1}"), "unknown key"));
    CHECK(mentions(error_of("{\"command\": \"launch\"}"), "command"));
    CHECK(mentions(error_of("{\"command\": \"decay\"}"), "model"));
    CHECK(mentions(error_of("{\"command\": \"constants\", \"model\": {\"type\": \"zero_range\", \"L\": 3, \"N\": 3, \"q\": 1}}"),
                   "model.q"));
    CHECK_FALSE(error_of("{\"command\": ").empty());
    CHECK_FALSE(error_of("{\"command\": \"theta-surface\", \"grid\": \"0:10:-1\"}").empty());
    CHECK_FALSE(error_of("{\"command\": \"theta-surface\", \"seed\": -3}").empty());
}

TEST_CASE("defaults") {
    const auto cfg = validate_config(std::string("{\"command\": \"theta-surface\"}"));
    CHECK(cfg.command == Command::ThetaSurface);
    CHECK(cfg.alphas == std::vector<double>{1.01, 1.5, 1.8, 2.0});
    CHECK(cfg.grid.values().size() == 21);
    const auto fp = validate_config(std::string("{\"command\": \"fokker-planck\"}"));
    CHECK(fp.cells == std::vector<int>{8, 16, 32, 64});
    REQUIRE(fp.model.has_value());
    CHECK(std::holds_alternative<FokkerPlanckSpec>(*fp.model));
}

TEST_CASE("grid syntax") {
    const auto g = parse_grid("0:10:0.25");
    CHECK(g.values().size() == 41);
    CHECK(g.values().back() == doctest::Approx(10.0));
    CHECK_THROWS_AS(parse_grid("1:2"), ConfigError);
    CHECK_THROWS_AS(parse_grid("3:1:0.5"), ConfigError);
}

TEST_CASE("model blocks") {
    const auto bd = model_from_json(json::parse(R"({"type": "birth_death", "K": 5})"));
    CHECK(std::get<BirthDeathSpec>(bd).a.size() == 6);
    const auto zr = model_from_json(json::parse(R"({"type": "zero_range", "L": 3, "N": 2, "c": 2})"));
    CHECK(std::get<ZeroRangeSpec>(zr).rates[1][2] == doctest::Approx(4.0));
    const auto bl = model_from_json(json::parse(R"({"type": "bernoulli_laplace", "L": 4, "N": 2, "lambda": [1, 2, 3, 4]})"));
    CHECK(std::get<BernoulliLaplaceSpec>(bl).lambda[3] == 4.0);
    const auto fv = model_from_json(
        json::parse(R"({"type": "fokker_planck", "cells": 8, "lambda": 2, "potential": {"type": "tabulated", "x": [0, 0.5, 1], "v": [0, 0.25, 1]}})"));
    CHECK(std::get<FokkerPlanckSpec>(fv).cells == 8);
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"type": "random_transposition", "n": 9})")), ConfigError);
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"type": "birth_death", "K": 3, "L": 2})")), ConfigError);
}

TEST_CASE("normalized echo of a zero-range config matches the golden file") {
    const auto cfg = validate_config(std::string(
        R"({"command": "verify-bochner", "model": {"type": "zero_range", "L": 3, "N": 3}, "alpha": 1.5, "seed": 7})"));
    std::ifstream in(BECKNER_TEST_DATA "/config_zero_range.json");
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(to_json(cfg) == json::parse(ss.str()));
    // Echo -> parse -> echo is a fixed point.
    CHECK(to_json(validate_config(to_json(cfg))) == to_json(cfg));
}
