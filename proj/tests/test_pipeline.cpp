#include "tlsurf/error.hpp"
#include "tlsurf/io.hpp"
#include "tlsurf/pipeline.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tlsurf;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(TLSURF_SOURCE_DIR) / "configs";

std::filesystem::path out_dir(const std::string& name)
{
    return std::filesystem::temp_directory_path() / "tlsurf_tests" / name;
}

json config(const std::string& name)
{
    std::ifstream in(kConfigs / (name + ".json"));
    return json::parse(in);
}

std::string config_error(const json& j)
{
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("bundled flat case passes end to end")
{
    Overrides ov;
    ov.out_dir = out_dir("case_i_flat");
    const RunConfig cfg = load_config(kConfigs / "case_i_flat.json", ov);
    const PipelineOutcome out = run_pipeline(cfg, Mode::run);
    CHECK(out.pass);
    CHECK(out.report["classification"]["k_equals_L0"]["holds"] == true);
    for (const char* key : {"gauss_max", "codazzi_max", "ricci_max", "compatibility_max", "classification", "frame"})
        CHECK(out.report.contains(key));
    const std::string q = out.report["classification"]["q_status"].get<std::string>();
    CHECK((q == "zero" || q == "null_nonzero" || q == "non_null" || q == "mixed"));
    CHECK(std::filesystem::exists(*ov.out_dir / "report.json"));
    CHECK(std::filesystem::exists(*ov.out_dir / "immersion.csv"));
    CHECK(std::filesystem::exists(*ov.out_dir / "immersion.csv.json"));
    CHECK(std::filesystem::exists(*ov.out_dir / "fields" / "alpha1.csv"));
}

TEST_CASE("every bundled builder config passes")
{
    for (const char* name : {"case_i_liouville", "case_ii", "flat_normal", "one_lift", "lorentzian"}) {
        Overrides ov;
        ov.out_dir = out_dir(name);
        const PipelineOutcome out = run_pipeline(load_config(kConfigs / (std::string(name) + ".json"), ov), Mode::run);
        INFO(name, ": ", out.report["failing"].dump());
        CHECK(out.pass);
    }
}

TEST_CASE("negative control fails and names the residual")
{
    Overrides ov;
    ov.out_dir = out_dir("negative_control");
    const PipelineOutcome out = run_pipeline(load_config(kConfigs / "negative_control.json", ov), Mode::run);
    CHECK_FALSE(out.pass);
    const auto& f = out.failing;
    CHECK(std::find(f.begin(), f.end(), "gauss") != f.end());
    CHECK(out.report["perturbation"]["field"] == "alpha1");
}

TEST_CASE("reports are deterministic apart from the timestamp")
{
    Overrides ov;
    ov.out_dir = out_dir("determinism");
    const RunConfig cfg = load_config(kConfigs / "case_ii.json", ov);
    run_pipeline(cfg, Mode::run);
    json a = json::parse(slurp(*ov.out_dir / "report.json"));
    const std::string csv_a = slurp(*ov.out_dir / "immersion.csv");
    run_pipeline(cfg, Mode::run);
    json b = json::parse(slurp(*ov.out_dir / "report.json"));
    CHECK(a["timestamp"].is_string());
    a.erase("timestamp");
    b.erase("timestamp");
    CHECK(a.dump() == b.dump());
    CHECK(csv_a == slurp(*ov.out_dir / "immersion.csv"));
}

TEST_CASE("schema errors name the offending key")
{
    json j = config("case_i_flat");
    j["case"] = "nosuch";
    CHECK(config_error(j).find("\"case\"") != std::string::npos);

    j = config("case_i_flat");
    j["schema_version"] = 2;
    CHECK(config_error(j).find("schema_version") != std::string::npos);

    j = config("case_i_flat");
    j["signs"]["epsilon"] = 0;
    CHECK(config_error(j).find("signs.epsilon") != std::string::npos);

    j = config("case_i_flat");
    j["functions"].erase("p_plus");
    CHECK(config_error(j).find("p_plus") != std::string::npos);

    j = config("case_i_flat");
    j["functions"]["p_plus"] = "1+";
    CHECK(config_error(j).find("p_plus") != std::string::npos);

    j = config("case_i_flat");
    j["ambient"]["family"] = "lorentzian";
    CHECK(config_error(j).find("ambient.family") != std::string::npos);

    j = config("case_i_flat");
    j["lambda"] = {{"source", "goursat"}, {"on_s0", "0"}, {"on_t0", "0"}};
    CHECK(config_error(j).find("lambda") != std::string::npos);

    j = config("flat_normal");
    j["grid"] = {{"u", {0, 1}}, {"v", {0, 1}}};
    CHECK(config_error(j).find("grid") != std::string::npos);

    j = config("case_i_flat");
    j["perturb"] = {{"field", "alpha9"}, {"amount", 0.1}};
    CHECK(config_error(j).find("perturb.field") != std::string::npos);

    j = config("case_i_flat");
    j["expect"]["q_status"] = "sometimes";
    CHECK(config_error(j).find("expect.q_status") != std::string::npos);
}

TEST_CASE("signs accept integers and +/- strings")
{
    json j = config("flat_normal");
    j["signs"] = {{"epsilon", "+"}, {"epsilon_prime_plus", "-"}, {"epsilon_prime_minus", -1}};
    const RunConfig cfg = parse_config(j);
    CHECK(cfg.signs.epsilon == 1);
    CHECK(cfg.signs.epsilon_prime_plus == -1);
    CHECK(cfg.signs.epsilon_prime_minus == -1);
}

TEST_CASE("command-line overrides")
{
    Overrides ov;
    ov.grid_n = 33;
    ov.tol = 1e-3;
    ov.out_dir = out_dir("override");
    const RunConfig cfg = parse_config(config("case_ii"), ov);
    CHECK(cfg.grid.n1 == 33);
    CHECK(cfg.grid.n2 == 33);
    CHECK(*cfg.tol.absolute == 1e-3);
    CHECK(cfg.out_dir == *ov.out_dir);
}

TEST_CASE("stage failures carry the stage name")
{
    json j = config("case_i_flat");
    j["lambda"]["expr"] = "u^2";
    j["output"]["dir"] = out_dir("stage").string();
    try {
        run_pipeline(parse_config(j), Mode::check);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "build");
    }
}

TEST_CASE("solve mode writes the solved fields")
{
    Overrides ov;
    ov.out_dir = out_dir("solve");
    const PipelineOutcome out = run_pipeline(load_config(kConfigs / "one_lift.json", ov), Mode::solve);
    CHECK(out.pass);
    CHECK(std::filesystem::exists(*ov.out_dir / "f1.csv"));
    CHECK(std::filesystem::exists(*ov.out_dir / "f2.csv"));
    CHECK(slurp(*ov.out_dir / "f2.csv").rfind("s,t,value\n", 0) == 0);
}

TEST_CASE("perturbing any field of a builder output is detected")
{
    for (std::string_view name : kFundamentalFieldNames) {
        json j = config("case_ii");
        j["perturb"] = {{"field", name}, {"amount", 0.1}};
        j["pipeline"] = {{"integrate_frame", false}};
        j["output"]["dir"] = out_dir("perturb").string();
        const PipelineOutcome out = run_pipeline(parse_config(j), Mode::check);
        INFO(name);
        CHECK_FALSE(out.pass);
    }
}
