#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "relaxbench/config.hpp"
#include "relaxbench/experiment.hpp"

using namespace relaxbench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool error_mentions(const std::string& text, const char* needle) {
    return text.find(needle) != std::string::npos;
}

const char* kMinimal =
    R"({"kind":"relax2","heterogeneity":{"family":"affine","a0":2.0}})";

} // namespace

TEST_CASE("a minimal config materializes every default") {
    const ExperimentConfig cfg = parse_config(kMinimal);
    CHECK(cfg.kind == ExperimentKind::Relax2);
    CHECK(cfg.het.family == "affine");
    CHECK(cfg.het.a0 == 2.0);
    CHECK(cfg.grid.length == 1.0);
    CHECK(cfg.grid.n_cells == 400);
    CHECK(cfg.initial.type == "constant");
    CHECK(cfg.relax.epsilon == 1e-3);
    CHECK(cfg.relax.cfl == 1.0);
    CHECK(cfg.relax.t_end == 1.0);
    CHECK(cfg.relax.alpha == 0.5);
    CHECK(std::isnan(cfg.relax.u0)); // derived from the data at run time
    CHECK(cfg.limit.cfl == 0.9);
    CHECK(cfg.checks.positivity);
    CHECK(cfg.checks.mass);
    CHECK_FALSE(cfg.checks.entropy);
    CHECK(cfg.n_p_samples == 17);
    CHECK(cfg.output_dir == "out");
}

TEST_CASE("unknown keys are rejected with their path") {
    try {
        parse_config(
            R"({"kind":"relax2","heterogeneity":{"family":"affine","a0":2},)"
            R"("relax":{"eps":0.1}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(error_mentions(e.what(), "relax.eps"));
    }
    try {
        parse_config(
            R"({"kind":"relax2","heterogeneity":{"family":"affine","a0":2},)"
            R"("grid":{"cells":100}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(error_mentions(e.what(), "grid.cells"));
    }
}

TEST_CASE("out-of-range values are rejected with a reason") {
    auto expect_error = [](const std::string& text, const char* needle) {
        try {
            parse_config(text);
            FAIL_CHECK("expected ConfigError for: " << text);
        } catch (const ConfigError& e) {
            CHECK_MESSAGE(error_mentions(e.what(), needle),
                          "message was: " << e.what());
        }
    };

    expect_error(
        R"({"kind":"relax2","heterogeneity":{"family":"affine","a0":2},)"
        R"("relax":{"alpha":1.2}})",
        "(0, 1)");
    expect_error(
        R"({"kind":"relax2","heterogeneity":{"family":"affine","a0":2},)"
        R"("relax":{"epsilon":-1.0}})",
        "epsilon");
    expect_error(
        R"({"kind":"relax2","heterogeneity":{"family":"affine","a0":2},)"
        R"("relax":{"cfl":0.0}})",
        "cfl");
    expect_error(
        R"({"kind":"sweep-eps","heterogeneity":{"family":"affine","a0":2},)"
        R"("epsilons":[1e-3,1e-2]})",
        "strictly decreasing");
    expect_error(
        R"({"kind":"sweep-eps","heterogeneity":{"family":"affine","a0":2},)"
        R"("epsilons":[1e-3]})",
        "epsilons");
    expect_error(
        R"({"kind":"steady","heterogeneity":{"family":"affine","a0":2}})",
        "u0");
    expect_error(
        R"({"kind":"relax2","heterogeneity":{"family":"affine","a0":2},)"
        R"("initial":{"type":"flux_plateau","level":1.0,)"
        R"("plateau_end":0.5,"foot":0.4}})",
        "foot");
    expect_error(R"({"kind":"nope","heterogeneity":{"family":"affine","a0":2}})",
                 "kind");
    expect_error(R"({"heterogeneity":{"family":"affine","a0":2}})", "kind");
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1,2,3]"), ConfigError);
}

TEST_CASE("piecewise jumps parse into the model") {
    const ExperimentConfig cfg = parse_config(
        R"({"kind":"relax2","heterogeneity":{"family":"piecewise_bv","a0":2.0,)"
        R"("jumps":[{"position":0.25,"delta":0.5}]}})");
    REQUIRE(cfg.het.jumps.size() == 1);
    CHECK(cfg.het.jumps[0].position == 0.25);
    CHECK(cfg.het.jumps[0].delta == 0.5);
    const Heterogeneity het = make_heterogeneity(cfg.het);
    CHECK(het.beta() == 2.0);
    CHECK(het.mu() == 2.5);

    try {
        parse_config(
            R"({"kind":"relax2","heterogeneity":{"family":"piecewise_bv",)"
            R"("a0":2.0,"jumps":[{"delta":0.5}]}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(error_mentions(e.what(), "jumps"));
    }
}

TEST_CASE("resolving a config is idempotent") {
    const ExperimentConfig cfg1 = parse_config(kMinimal);
    const std::string s1 = resolved_config_json(cfg1);
    const ExperimentConfig cfg2 = parse_config(s1);
    const std::string s2 = resolved_config_json(cfg2);
    CHECK(s1 == s2);
}

TEST_CASE("experiment runs are reproducible byte for byte") {
    const std::string text = R"({
        "kind": "relax2",
        "heterogeneity": {"family": "affine", "a0": 2.0},
        "grid": {"n_cells": 50},
        "initial": {"type": "constant", "value": 0.4},
        "relax": {"epsilon": 1e-2, "t_end": 0.1}
    })";
    const ExperimentConfig cfg = parse_config(text);
    const fs::path base = fs::temp_directory_path();
    const fs::path dir_a = base / "relaxbench_cfgtest_a";
    const fs::path dir_b = base / "relaxbench_cfgtest_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    const ExperimentOutcome oa = run_experiment(cfg, dir_a.string(), 1);
    const ExperimentOutcome ob = run_experiment(cfg, dir_b.string(), 1);
    CHECK(oa.exit_code == 0);
    CHECK(ob.exit_code == 0);
    CHECK(oa.checks_run == ob.checks_run);
    CHECK(oa.checks_failed == 0);

    CHECK(slurp(dir_a / "state.csv") == slurp(dir_b / "state.csv"));
    CHECK(slurp(dir_a / "traces.csv") == slurp(dir_b / "traces.csv"));

    nlohmann::json ra = nlohmann::json::parse(slurp(dir_a / "report.json"));
    nlohmann::json rb = nlohmann::json::parse(slurp(dir_b / "report.json"));
    ra.erase("metadata");
    rb.erase("metadata");
    CHECK(ra == rb);

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("a failed check drives the exit code to 1") {
    const std::string text = R"({
        "kind": "relax2",
        "heterogeneity": {"family": "affine", "a0": 2.0},
        "grid": {"n_cells": 50},
        "initial": {"type": "constant", "value": 0.4},
        "relax": {"epsilon": 1e-2, "t_end": 0.1},
        "checks": {"ceiling_value": 0.1}
    })";
    const ExperimentConfig cfg = parse_config(text);
    const fs::path dir =
        fs::temp_directory_path() / "relaxbench_cfgtest_fail";
    fs::remove_all(dir);
    const ExperimentOutcome out = run_experiment(cfg, dir.string(), 1);
    CHECK(out.exit_code == 1);
    CHECK(out.checks_failed >= 1);
    fs::remove_all(dir);
}

TEST_CASE("kind names round-trip") {
    CHECK(std::string(kind_name(ExperimentKind::Relax2)) == "relax2");
    CHECK(std::string(kind_name(ExperimentKind::SweepEps)) == "sweep-eps");
    CHECK(std::string(kind_name(ExperimentKind::ValidateModel)) ==
          "validate-model");
}
