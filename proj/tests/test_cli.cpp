#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "resbench/cli.hpp"
#include "test_support.hpp"

using namespace resbench;
using resbench::testing::config_path;
using resbench::testing::kPi;
using nlohmann::json;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
    json doc() const { return json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("resbench_" + name);
    std::ofstream(path) << text;
    return path.string();
}

std::string schema_error_message(const std::string& text) {
    try {
        parse_config(text);
    } catch (const SchemaError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ParseConfig, BundledWright) {
    const ParsedConfig cfg = load_config(config_path("wright.json"));
    EXPECT_EQ(cfg.problem.kind(), ProblemKind::PeriodicCoefficient);
    EXPECT_EQ(cfg.problem.beta(), -1.0);
    EXPECT_EQ(cfg.problem.g().S, 1.0);
    EXPECT_EQ(cfg.problem.g().T, 1.0);
    EXPECT_NEAR(cfg.problem.gamma(), kPi / 2.0 + 0.05, 1e-15);
}

TEST(ParseConfig, QuadraticOnlyHasNoLinearPart) {
    EXPECT_THROW(parse_config(R"({"kind":"general","coeffs":[{"power":2,"dc":1.0}]})"), BetaZero);
}

TEST(ParseConfig, UnknownKeysNamed) {
    EXPECT_NE(schema_error_message(R"({"kind":"general","colour":1,"coeffs":[{"power":1,"dc":1}]})").find("$.colour"),
              std::string::npos);
    EXPECT_NE(schema_error_message(R"({"kind":"general","coeffs":[{"power":1,"dc":1},{"power":2,"cosine":[1]}]})")
                  .find("$.coeffs[1].cosine"),
              std::string::npos);
    EXPECT_NE(schema_error_message(R"({"kind":"periodic_coefficient","r":{"dc":1},"g":{"form":"expm1","S":2}})")
                  .find("$.g.S"),
              std::string::npos);
}

TEST(ParseConfig, FieldErrors) {
    EXPECT_THROW(parse_config("{not json"), SchemaError);
    EXPECT_THROW(parse_config(R"({"coeffs":[{"power":1,"dc":1}]})"), SchemaError);
    EXPECT_THROW(parse_config(R"({"kind":"banana"})"), SchemaError);
    EXPECT_THROW(parse_config(R"({"kind":"general","grid_n":1001,"coeffs":[{"power":1,"dc":1}]})"), SchemaError);
    EXPECT_THROW(parse_config(R"({"kind":"general","grid_n":128,"coeffs":[{"power":1,"dc":1}]})"), SchemaError);
    EXPECT_THROW(parse_config(R"({"kind":"general","coeffs":[{"power":0,"dc":1}]})"), SchemaError);
    EXPECT_THROW(parse_config(R"({"kind":"general","coeffs":[{"power":1,"dc":"x"}]})"), SchemaError);
    EXPECT_THROW(parse_config(R"({"kind":"general","gamma":"big","coeffs":[{"power":1,"dc":1}]})"), SchemaError);
    EXPECT_THROW(parse_config(R"({"kind":"general","gamma":{"offset":1},"coeffs":[{"power":1,"dc":1}]})"),
                 SchemaError);
    EXPECT_THROW(parse_config(R"({"kind":"general","r":{"dc":1},"coeffs":[{"power":1,"dc":1}]})"), SchemaError);
    EXPECT_THROW(parse_config(R"({"kind":"periodic_coefficient","r":{"dc":1},"g":{"form":"sine"}})"), SchemaError);
}

TEST(ParseConfig, GammaSources) {
    const ParsedConfig a = parse_config(R"({"kind":"general","gamma":2.5,"coeffs":[{"power":1,"dc":-2}]})");
    EXPECT_EQ(a.problem.gamma(), 2.5);
    EXPECT_TRUE(std::holds_alternative<double>(a.gamma_source));
    const ParsedConfig b =
        parse_config(R"({"kind":"general","gamma":{"critical_index":1,"offset":-0.1},"coeffs":[{"power":1,"dc":-2}]})");
    EXPECT_NEAR(b.problem.gamma(), (-kPi / 2.0 + 2.0 * kPi) / -2.0 - 0.1, 1e-15);
    const ParsedConfig c = parse_config(R"({"kind":"general","coeffs":[{"power":1,"dc":-2}]})");
    EXPECT_NEAR(c.problem.gamma(), kPi / 4.0, 1e-15);
}

TEST(ParseConfig, GridSizeFromEnvironment) {
    const std::string text = R"({"kind":"general","coeffs":[{"power":1,"dc":-1}]})";
    EXPECT_EQ(parse_config(text).problem.grid_n(), 4096u);
    setenv("RESBENCH_N", "1024", 1);
    EXPECT_EQ(parse_config(text).problem.grid_n(), 1024u);
    EXPECT_EQ(parse_config(R"({"kind":"general","grid_n":512,"coeffs":[{"power":1,"dc":-1}]})").problem.grid_n(),
              512u);
    setenv("RESBENCH_N", "1023", 1);
    EXPECT_THROW(parse_config(text), SchemaError);
    unsetenv("RESBENCH_N");
}

TEST(Cli, ClassifyWright) {
    const CliRun r = run({"classify", "--config", config_path("wright.json"), "--j", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.doc();
    EXPECT_EQ(j["verdict"], "invariant_curve");
    EXPECT_EQ(j["direction"], "supercritical");
    EXPECT_NEAR(j["gamma_j"].get<double>(), 1.5707963, 1e-7);
}

TEST(Cli, Oracle) {
    const CliRun r = run({"oracle", "--samples", "100", "--seed", "42"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.doc();
    EXPECT_LE(j["max_deviation"].get<double>(), 1e-12);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["samples"], 100);
}

TEST(Cli, CriticalRange) {
    const CliRun r = run({"critical", "--config", config_path("wright.json"), "--j", "-1..2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json list = r.doc()["critical_points"];
    ASSERT_EQ(list.size(), 4u);
    EXPECT_EQ(list[1]["j"], 0);
    EXPECT_NEAR(list[1]["gamma_j"].get<double>(), kPi / 2.0, 1e-12);
    EXPECT_NEAR(list[0]["gamma_j"].get<double>(), 5.0 * kPi / 2.0, 1e-12);
}

TEST(Cli, Multipliers) {
    const CliRun r = run({"multipliers", "--config", config_path("wright.json"), "--j", "0", "--count", "4",
                       "--grid-n", "1024"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json m = r.doc()["multipliers"];
    ASSERT_EQ(m.size(), 4u);
    EXPECT_NEAR(m[0]["abs_mu"].get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(m[0]["mu"]["im"].get<double>()), 1.0, 1e-12);
    EXPECT_LE(m[0]["eigen_residual"].get<double>(), 1e-7);
}

TEST(Cli, NormalFormReportsBothRoutes) {
    const CliRun r = run({"normal-form", "--config", config_path("periodic_cubic.json"), "--grid-n", "2048"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.doc();
    EXPECT_LE(j["route_gap"].get<double>(), 1e-8);
    EXPECT_EQ(j["closed_form_status"], "ok");
    EXPECT_NEAR(j["a1"]["re"].get<double>(), j["closed_form_a1"]["re"].get<double>(), 1e-8);
    EXPECT_NEAR(j["a1"]["im"].get<double>(), j["closed_form_a1"]["im"].get<double>(), 1e-8);
    EXPECT_NEAR(j["a2"]["re"].get<double>(), 0.0, 1e-9);
}

TEST(Cli, DegenerateVerdictExitsOne) {
    const std::string path = write_temp(
        "degenerate.json", R"({"kind":"periodic_coefficient","grid_n":1024,"r":{"dc":1},"g":{"form":"cubic","S":1,"T":2.2}})");
    const CliRun r = run({"classify", "--config", path});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.doc()["verdict"], "degenerate");
    EXPECT_EQ(r.doc()["degenerate_reason"], "delta_zero");
}

TEST(Cli, SimulateWithCsv) {
    const auto csv = (std::filesystem::temp_directory_path() / "resbench_traj.csv").string();
    const CliRun r = run({"simulate", "--config", config_path("wright.json"), "--grid-n", "1024", "--transient", "500",
                       "--collect", "400", "--csv", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.doc()["kind"], "invariant_curve");
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "iter,re_z,im_z,sup_norm");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 400);
}

TEST(Cli, SimulateFindsBundledFourCycle) {
    const CliRun r = run({"simulate", "--config", config_path("resonant_general.json"), "--grid-n", "2048"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.doc();
    EXPECT_EQ(j["kind"], "four_periodic");
    EXPECT_LE(j["four_return_residual"].get<double>(), 1e-5);
}

TEST(Cli, VerifyWright) {
    const CliRun r = run({"verify", "--config", config_path("wright_periodic.json"), "--grid-n", "1024"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.doc();
    EXPECT_EQ(j["consistency"], "consistent");
    EXPECT_EQ(j["above_kind"], "invariant_curve");
    EXPECT_EQ(j["below_kind"], "fixed_point_zero");
    for (const auto& [k, v] : j.items()) EXPECT_FALSE(v.is_object() && k.rfind("above", 0) == 0) << k;
}

TEST(Cli, ExplicitGammaExcludesOffset) {
    const CliRun r = run({"simulate", "--config", config_path("wright.json"), "--gamma", "1.0", "--offset", "0.1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UsageAndInputErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"classify"}).code, 2);
    const CliRun missing = run({"classify", "--config", "/nonexistent/x.json"});
    EXPECT_EQ(missing.code, 2);
    EXPECT_NE(missing.err.find("schema_error"), std::string::npos);
    EXPECT_TRUE(missing.out.empty());
    const std::string beta0 = write_temp("beta0.json", R"({"kind":"general","coeffs":[{"power":2,"dc":1.0}]})");
    const CliRun b = run({"critical", "--config", beta0});
    EXPECT_EQ(b.code, 2);
    EXPECT_NE(b.err.find("beta_zero"), std::string::npos);
    EXPECT_EQ(run({"critical", "--config", config_path("wright.json"), "--j", "3..1"}).code, 2);
    EXPECT_EQ(run({"critical", "--config", config_path("wright.json"), "--grid-n", "100"}).code, 2);
}

TEST(Cli, DeterministicOutput) {
    const std::vector<std::string> args{"normal-form", "--config", config_path("resonant_general.json"), "--grid-n",
                                        "1024"};
    EXPECT_EQ(run(args).out, run(args).out);
    const std::vector<std::string> o{"oracle", "--samples", "20", "--seed", "7"};
    EXPECT_EQ(run(o).out, run(o).out);
}

TEST(Cli, OutputIsFinite) {
    EXPECT_NO_THROW(cli::assert_finite(run({"oracle", "--samples", "5"}).doc()));
    json bad = {{"x", {{"y", std::nan("")}}}};
    EXPECT_THROW(cli::assert_finite(bad), DomainError);
}

TEST(Cli, JListParsing) {
    EXPECT_EQ(cli::parse_j_list("-1..2"), (std::vector<int>{-1, 0, 1, 2}));
    EXPECT_EQ(cli::parse_j_list("0,3,5"), (std::vector<int>{0, 3, 5}));
    EXPECT_EQ(cli::parse_j_list("4"), (std::vector<int>{4}));
    EXPECT_THROW(cli::parse_j_list("a..b"), InvalidArgument);
}
