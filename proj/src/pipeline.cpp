#include "tlsurf/pipeline.hpp"

#include "tlsurf/frame.hpp"
#include "tlsurf/pde.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>

namespace tlsurf {

namespace {

const std::vector<std::string> kCoordVars{"u", "v", "s", "t"};
const std::vector<std::string> kStVars{"s", "t"};
const std::vector<std::string> kOneVar{"x"};

const std::set<std::string> kCases{"case_i", "case_ii", "flat_normal", "one_lift", "lorentzian"};

[[noreturn]] void fail(const std::string& key, const std::string& what)
{
    throw ConfigError("config key \"" + key + "\": " + what);
}

const json& at(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.is_object() || !obj.contains(key)) fail(path, "required key missing");
    return obj.at(key);
}

double number(const json& j, const std::string& path)
{
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::string text(const json& j, const std::string& path)
{
    if (j.is_number()) return format_double(j.get<double>());
    if (!j.is_string()) fail(path, "expected an expression string");
    return j.get<std::string>();
}

int sign(const json& j, const std::string& path)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "+" || s == "+1") return 1;
        if (s == "-" || s == "-1") return -1;
    } else if (j.is_number_integer()) {
        const int v = j.get<int>();
        if (v == 1 || v == -1) return v;
    }
    fail(path, "sign must be +1 or -1");
}

// parse now so that configs with broken expressions are rejected up front
std::string checked_expr(const json& j, const std::string& path, const std::vector<std::string>& vars)
{
    const std::string s = text(j, path);
    try {
        parse(s, vars);
    } catch (const Error& e) {
        fail(path, e.what());
    }
    return s;
}

Grid parse_grid(const json& j, const Overrides& ov)
{
    if (!j.is_object()) fail("grid", "expected an object");
    const bool uv = j.contains("u") || j.contains("v");
    const bool st = j.contains("s") || j.contains("t");
    if (uv == st) fail("grid", "give either u and v ranges or s and t ranges");
    const std::string a = uv ? "u" : "s", b = uv ? "v" : "t";
    auto range = [&](const std::string& k) {
        const json& r = at(j, k, "grid." + k);
        if (!r.is_array() || r.size() != 2) fail("grid." + k, "expected [min, max]");
        return std::pair{number(r[0], "grid." + k), number(r[1], "grid." + k)};
    };
    const auto [min1, max1] = range(a);
    const auto [min2, max2] = range(b);
    int n = 129;
    if (j.contains("n")) {
        if (!j["n"].is_number_integer()) fail("grid.n", "expected an integer");
        n = j["n"].get<int>();
    }
    if (ov.grid_n) n = *ov.grid_n;
    try {
        return Grid::make(uv ? CoordKind::uv : CoordKind::st, min1, max1, min2, max2, n, n);
    } catch (const GridError& e) {
        fail("grid", e.what());
    }
}

FieldSource parse_source(const json& j, const std::string& path, bool pair)
{
    if (!j.is_object()) fail(path, "expected an object");
    const std::string kind = at(j, "source", path + ".source").is_string() ? j["source"].get<std::string>() : "";
    FieldSource src;
    auto take = [&](const std::string& key, const std::vector<std::string>& vars) {
        src.text[key] = checked_expr(at(j, key, path + "." + key), path + "." + key, vars);
    };
    if (kind == "expression") {
        src.kind = FieldSource::Kind::expression;
        if (pair) {
            take("f1", kCoordVars);
            take("f2", kCoordVars);
        } else {
            take("expr", kCoordVars);
        }
    } else if (kind == "liouville" && !pair) {
        src.kind = FieldSource::Kind::liouville;
        take("p", kOneVar);
        take("q", kOneVar);
    } else if (kind == "goursat") {
        src.kind = FieldSource::Kind::goursat;
        if (pair) {
            for (const char* k : {"f1_on_s0", "f1_on_t0", "f2_on_s0", "f2_on_t0"}) take(k, kStVars);
        } else {
            take("on_s0", kStVars);
            take("on_t0", kStVars);
        }
    } else {
        fail(path + ".source", "unknown source \"" + kind + "\"");
    }
    return src;
}

struct CaseSpec
{
    std::vector<std::string> one_var;  // required one-variable functions
    std::vector<std::string> fields;   // required field expressions over u,v,s,t
    std::vector<std::string> optional; // field expressions defaulting to "0"
};

CaseSpec case_spec(const std::string& name)
{
    if (name == "case_i") return {{"p_plus", "p_minus"}, {}, {"gamma"}};
    if (name == "case_ii") return {{"phi", "psi"}, {}, {"gamma"}};
    if (name == "flat_normal") return {{}, {"P_plus"}, {}};
    if (name == "one_lift") return {{}, {}, {"P_tilde_minus"}};
    return {{"C"}, {}, {"gamma"}};
}

json grid_json(const RunConfig& cfg) { return to_json(cfg.grid); }

void write_text(const std::filesystem::path& p, const std::string& s)
{
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    out << s;
}

void write_field(const std::filesystem::path& p, const ScalarField& f)
{
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    write_csv(f, out);
}

template <typename F>
auto stage(const std::string& name, F&& f)
{
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

struct Solved
{
    std::optional<ScalarField> lambda, f1, f2;
    json info = json::object();
};

Solved solve(const RunConfig& cfg)
{
    Solved out;
    const FieldSource& src = cfg.source;
    const double L0 = cfg.ambient.L0;
    const int eps = cfg.signs.epsilon;
    if (cfg.case_name == "one_lift") {
        if (src.kind == FieldSource::Kind::expression) {
            out.f1 = sample(parse(src.text.at("f1"), kCoordVars), cfg.grid);
            out.f2 = sample(parse(src.text.at("f2"), kCoordVars), cfg.grid);
        } else {
            GoursatSystemProblem prob{L0,
                                      eps,
                                      parse(src.text.at("f1_on_s0"), kStVars),
                                      parse(src.text.at("f1_on_t0"), kStVars),
                                      parse(src.text.at("f2_on_s0"), kStVars),
                                      parse(src.text.at("f2_on_t0"), kStVars),
                                      cfg.grid,
                                      {}};
            auto [f1, f2] = goursat_system(prob);
            const auto [r1, r2] = goursat_system_residual(prob, f1, f2);
            out.info["f1_self_residual_max"] = interior_max_abs(r1.values(), cfg.tol.margin);
            out.info["f2_self_residual_max"] = interior_max_abs(r2.values(), cfg.tol.margin);
            out.f1 = std::move(f1);
            out.f2 = std::move(f2);
        }
        return out;
    }
    switch (src.kind) {
        case FieldSource::Kind::expression:
            out.lambda = sample(parse(src.text.at("expr"), kCoordVars), cfg.grid);
            break;
        case FieldSource::Kind::liouville:
            out.lambda = liouville_closed_form(L0, parse(src.text.at("p"), kOneVar), parse(src.text.at("q"), kOneVar),
                                               cfg.grid);
            break;
        case FieldSource::Kind::goursat: {
            GoursatScalarProblem prob{L0, eps, parse(src.text.at("on_s0"), kStVars),
                                      parse(src.text.at("on_t0"), kStVars), cfg.grid, {}};
            out.lambda = goursat_scalar(prob);
            out.info["lambda_self_residual_max"] =
                interior_max_abs(goursat_scalar_residual(prob, *out.lambda).values(), cfg.tol.margin);
            break;
        }
    }
    return out;
}

FundamentalData build(const RunConfig& cfg, const Solved& solved)
{
    const auto fn = [&](const std::string& k, const std::vector<std::string>& vars) {
        return parse(cfg.functions.at(k), vars);
    };
    const auto field = [&](const std::string& k) { return sample(fn(k, kCoordVars), cfg.grid); };
    const int eps = cfg.signs.epsilon;
    if (cfg.case_name == "case_i")
        return build_case_i(cfg.ambient, *solved.lambda, fn("gamma", kCoordVars), fn("p_plus", kOneVar),
                            fn("p_minus", kOneVar), eps, cfg.tol)
            .data;
    if (cfg.case_name == "case_ii")
        return build_case_ii(cfg.ambient, *solved.lambda, fn("gamma", kCoordVars), fn("phi", kOneVar),
                             fn("psi", kOneVar), eps, cfg.tol)
            .data;
    if (cfg.case_name == "flat_normal")
        return build_flat_normal(cfg.ambient, *solved.lambda, field("P_plus"), cfg.c, cfg.signs, cfg.tol).data;
    if (cfg.case_name == "one_lift")
        return build_one_lift(cfg.ambient, *solved.f1, *solved.f2, field("P_tilde_minus"), cfg.signs, cfg.tol).data;
    return build_lorentzian(cfg.ambient, *solved.lambda, fn("gamma", kCoordVars), fn("C", kOneVar), eps, cfg.tol)
        .data;
}

FundamentalData perturbed(const RunConfig& cfg, FundamentalData data)
{
    if (!cfg.perturb) return data;
    const ScalarField& f = data.field(cfg.perturb->field);
    return data.with_field(cfg.perturb->field, ScalarField(f.grid(), f.values() + cfg.perturb->amount));
}

std::string timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

json signs_json(const SignChoice& s)
{
    return json{{"epsilon", s.epsilon},
                {"epsilon_prime_plus", s.epsilon_prime_plus},
                {"epsilon_prime_minus", s.epsilon_prime_minus},
                {"epsilon_prime", s.epsilon_prime},
                {"epsilon_double_prime", s.epsilon_double_prime}};
}

// Compares the classification against the config's "expect" block.
json check_expectations(const json& expect, const ClassificationReport& rep, std::vector<std::string>& failing)
{
    json out = json::array();
    auto record = [&](const std::string& name, const json& expected, const json& actual, bool pass) {
        out.push_back(json{{"name", name}, {"expected", expected}, {"actual", actual}, {"pass", pass}});
        if (!pass) failing.push_back("expect." + name);
    };
    for (const auto& [key, value] : expect.items()) {
        if (key == "k_equals_L0") {
            record(key, value, rep.k_equals_L0.holds, value.get<bool>() == rep.k_equals_L0.holds);
        } else if (key == "normal_flat") {
            record(key, value, rep.normal_flat.holds, value.get<bool>() == rep.normal_flat.holds);
        } else if (key == "q_status") {
            const json actual = rep.q_status ? json(std::string(to_string(*rep.q_status))) : json(nullptr);
            bool pass = false;
            if (value.is_array()) {
                for (const auto& v : value) pass = pass || v == actual;
            } else {
                pass = value == actual;
            }
            record(key, value, actual, pass);
        } else {
            const auto& lift = key == "lift_plus" ? rep.lift_plus : rep.lift_minus;
            const json actual = lift ? json(std::string(to_string(lift->status))) : json(nullptr);
            record(key, value, actual, value == actual);
        }
    }
    return out;
}

} // namespace

RunConfig parse_config(const json& j, const Overrides& ov)
{
    if (!j.is_object()) fail("<root>", "config must be a JSON object");
    RunConfig cfg;
    cfg.raw = j;

    const json& version = at(j, "schema_version", "schema_version");
    if (!version.is_number_integer() || version.get<int>() != 1) fail("schema_version", "only version 1 is supported");

    const json& c = at(j, "case", "case");
    if (!c.is_string() || !kCases.count(c.get<std::string>()))
        fail("case", "unknown case \"" + (c.is_string() ? c.get<std::string>() : c.dump()) +
                         "\"; expected one of case_i, case_ii, flat_normal, one_lift, lorentzian");
    cfg.case_name = c.get<std::string>();
    const bool lorentzian_case = cfg.case_name == "lorentzian";

    Family family = lorentzian_case ? Family::lorentzian : Family::neutral;
    double L0 = 0.0;
    if (j.contains("ambient")) {
        const json& a = j["ambient"];
        if (!a.is_object()) fail("ambient", "expected an object");
        if (a.contains("family")) {
            const json& f = a["family"];
            if (f == "neutral") family = Family::neutral;
            else if (f == "lorentzian") family = Family::lorentzian;
            else fail("ambient.family", "expected \"neutral\" or \"lorentzian\"");
        }
        if (a.contains("L0")) L0 = number(a["L0"], "ambient.L0");
    }
    if ((family == Family::lorentzian) != lorentzian_case)
        fail("ambient.family", "case " + cfg.case_name + " needs a " + (lorentzian_case ? "lorentzian" : "neutral") +
                                   " ambient");
    cfg.ambient = AmbientSpec::make(family, L0);

    if (j.contains("signs")) {
        const json& s = j["signs"];
        if (!s.is_object()) fail("signs", "expected an object");
        const std::pair<const char*, int SignChoice::*> names[] = {
            {"epsilon", &SignChoice::epsilon},
            {"epsilon_prime_plus", &SignChoice::epsilon_prime_plus},
            {"epsilon_prime_minus", &SignChoice::epsilon_prime_minus},
            {"epsilon_prime", &SignChoice::epsilon_prime},
            {"epsilon_double_prime", &SignChoice::epsilon_double_prime},
        };
        for (const auto& [key, value] : s.items()) {
            auto it = std::find_if(std::begin(names), std::end(names), [&](const auto& n) { return key == n.first; });
            if (it == std::end(names)) fail("signs." + key, "unknown sign");
            cfg.signs.*(it->second) = sign(value, "signs." + key);
        }
    }

    cfg.grid = parse_grid(at(j, "grid", "grid"), ov);

    const bool pair = cfg.case_name == "one_lift";
    const std::string source_key = pair ? "f" : "lambda";
    cfg.source = parse_source(at(j, source_key, source_key), source_key, pair);
    if (cfg.source.kind == FieldSource::Kind::goursat) {
        if (!pair && cfg.case_name != "flat_normal")
            fail("lambda.source", "goursat solves the flat-normal equation; case " + cfg.case_name +
                                      " needs an expression or liouville source");
        if (cfg.grid.kind != CoordKind::st) fail("grid", "goursat sources need an s,t grid");
    }

    const CaseSpec spec = case_spec(cfg.case_name);
    const json empty = json::object();
    const json& fns = j.contains("functions") ? j["functions"] : empty;
    if (!fns.is_object()) fail("functions", "expected an object");
    for (const auto& k : spec.one_var)
        cfg.functions[k] = checked_expr(at(fns, k, "functions." + k), "functions." + k, kOneVar);
    for (const auto& k : spec.fields)
        cfg.functions[k] = checked_expr(at(fns, k, "functions." + k), "functions." + k, kCoordVars);
    for (const auto& k : spec.optional)
        cfg.functions[k] = fns.contains(k) ? checked_expr(fns[k], "functions." + k, kCoordVars) : "0";
    if (cfg.case_name == "flat_normal" && fns.contains("c")) cfg.c = number(fns["c"], "functions.c");

    if (j.contains("tolerance")) {
        const json& t = j["tolerance"];
        if (!t.is_object()) fail("tolerance", "expected an object");
        if (t.contains("absolute")) cfg.tol.absolute = number(t["absolute"], "tolerance.absolute");
        if (t.contains("factor")) cfg.tol.factor = number(t["factor"], "tolerance.factor");
        if (t.contains("frame")) cfg.frame_tolerance = number(t["frame"], "tolerance.frame");
    }
    if (ov.tol) cfg.tol.absolute = *ov.tol;

    if (j.contains("perturb")) {
        const json& p = j["perturb"];
        const json& f = at(p, "field", "perturb.field");
        const std::string name = f.is_string() ? f.get<std::string>() : "";
        if (std::find(kFundamentalFieldNames.begin(), kFundamentalFieldNames.end(), name) ==
            kFundamentalFieldNames.end())
            fail("perturb.field", "unknown fundamental field \"" + name + "\"");
        cfg.perturb = Perturbation{name, number(at(p, "amount", "perturb.amount"), "perturb.amount")};
    }

    if (j.contains("expect")) {
        const json& e = j["expect"];
        if (!e.is_object()) fail("expect", "expected an object");
        for (const auto& [key, value] : e.items()) {
            if (key == "k_equals_L0" || key == "normal_flat") {
                if (!value.is_boolean()) fail("expect." + key, "expected true or false");
            } else if (key == "q_status") {
                const std::set<std::string> ok{"zero", "null_nonzero", "non_null", "mixed"};
                const json list = value.is_array() ? value : json::array({value});
                for (const auto& v : list)
                    if (!v.is_string() || !ok.count(v.get<std::string>()))
                        fail("expect.q_status", "expected zero, null_nonzero, non_null or mixed");
            } else if (key == "lift_plus" || key == "lift_minus") {
                if (value != "zero_or_lightlike" && value != "not" && value != "mixed")
                    fail("expect." + key, "expected zero_or_lightlike, not or mixed");
            } else {
                fail("expect." + key, "unknown expectation");
            }
        }
        cfg.expect = e;
    }

    if (j.contains("pipeline")) {
        const json& p = j["pipeline"];
        if (!p.is_object()) fail("pipeline", "expected an object");
        for (const auto& [key, value] : p.items()) {
            if (!value.is_boolean()) fail("pipeline." + key, "expected true or false");
            if (key == "integrate_frame") cfg.integrate_frame = value.get<bool>();
            else if (key == "export") cfg.export_files = value.get<bool>();
            else fail("pipeline." + key, "unknown switch");
        }
    }

    if (j.contains("output")) {
        const json& o = j["output"];
        if (o.contains("dir")) {
            if (!o["dir"].is_string()) fail("output.dir", "expected a path");
            cfg.out_dir = o["dir"].get<std::string>();
        }
    }
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j, overrides);
}

FundamentalData build_from_config(const RunConfig& cfg)
{
    const Solved solved = stage("solve", [&] { return solve(cfg); });
    const FundamentalData data = stage("build", [&] { return build(cfg, solved); });
    return stage("build", [&] { return perturbed(cfg, data); });
}

PipelineOutcome run_pipeline(const RunConfig& cfg, Mode mode)
{
    PipelineOutcome out;
    json& rep = out.report;
    rep["config"] = cfg.raw;
    rep["case"] = cfg.case_name;
    rep["mode"] = mode == Mode::run ? "run" : mode == Mode::check ? "check" : mode == Mode::classify ? "classify" : "solve";
    rep["ambient"] = to_json(cfg.ambient);
    rep["signs"] = signs_json(cfg.signs);
    rep["grid"] = grid_json(cfg);
    rep["timestamp"] = timestamp();

    stage("export", [&] {
        std::filesystem::create_directories(cfg.out_dir);
        return 0;
    });

    const Solved solved = stage("solve", [&] { return solve(cfg); });
    rep["solve"] = solved.info;

    if (mode == Mode::solve) {
        stage("export", [&] {
            if (solved.lambda) write_field(cfg.out_dir / "lambda.csv", *solved.lambda);
            if (solved.f1) write_field(cfg.out_dir / "f1.csv", *solved.f1);
            if (solved.f2) write_field(cfg.out_dir / "f2.csv", *solved.f2);
            return 0;
        });
        out.pass = true;
    } else {
        const FundamentalData data = stage("build", [&] { return perturbed(cfg, build(cfg, solved)); });
        if (cfg.perturb) rep["perturbation"] = json{{"field", cfg.perturb->field}, {"amount", cfg.perturb->amount}};

        const ResidualReport residuals = stage("residuals", [&] { return residual_report(data, cfg.tol); });
        rep["gauss_max"] = residuals.gauss.max;
        rep["codazzi_max"] = residuals.codazzi_max();
        rep["ricci_max"] = residuals.ricci.max;
        rep["compatibility_max"] = residuals.compatibility.max;
        rep["paraholomorphy_max"] = residuals.paraholomorphy ? json(residuals.paraholomorphy->max) : json(nullptr);
        rep["residuals"] = to_json(residuals);
        out.failing = residuals.failing();

        if (mode != Mode::check) {
            const ClassificationReport cls = stage("classify", [&] { return classify(data, cfg.tol); });
            rep["classification"] = to_json(cls);
            rep["expectations"] = check_expectations(cfg.expect, cls, out.failing);
        }

        if (mode == Mode::run && cfg.integrate_frame) {
            const FrameField ff = stage("frame", [&] { return integrate_frame(data); });
            const FrameResiduals fr = stage("frame", [&] { return frame_residuals(ff, data, cfg.tol.margin); });
            json f = to_json(fr);
            const double meanH_tol = scaled_tolerance(cfg.grid, fr.meanH_scale, cfg.tol);
            const double induced_tol = scaled_tolerance(cfg.grid, fr.induced_scale, cfg.tol);
            f["tolerance"] = cfg.frame_tolerance;
            f["meanH_tolerance"] = meanH_tol;
            f["induced_metric_tolerance"] = induced_tol;
            auto verdict = [&](const std::string& name, double value, double tol) {
                if (!(value <= tol)) out.failing.push_back("frame." + name);
            };
            verdict("holonomy", fr.holonomy, cfg.frame_tolerance);
            verdict("gram", fr.gram_max, cfg.frame_tolerance);
            if (fr.sphere) verdict("sphere", fr.sphere_max, cfg.frame_tolerance);
            verdict("meanH", fr.meanH_max, meanH_tol);
            verdict("induced_metric", fr.induced_max, induced_tol);
            rep["frame"] = f;

            if (cfg.export_files) {
                stage("export", [&] {
                    json side{{"case", cfg.case_name},
                              {"signs", signs_json(cfg.signs)},
                              {"residuals", {{"gauss_max", residuals.gauss.max},
                                             {"codazzi_max", residuals.codazzi_max()},
                                             {"ricci_max", residuals.ricci.max},
                                             {"compatibility_max", residuals.compatibility.max},
                                             {"frame", f}}}};
                    export_immersion(ff, cfg.out_dir / "immersion.csv", side.dump());
                    return 0;
                });
            }
        }
        if (cfg.export_files) {
            stage("export", [&] {
                std::filesystem::create_directories(cfg.out_dir / "fields");
                for (const auto name : kFundamentalFieldNames)
                    write_field(cfg.out_dir / "fields" / (std::string(name) + ".csv"), data.field(name));
                return 0;
            });
        }
        out.pass = out.failing.empty();
    }
    rep["failing"] = out.failing;
    rep["pass"] = out.pass;
    stage("export", [&] {
        write_text(cfg.out_dir / "report.json", rep.dump(2) + "\n");
        return 0;
    });
    return out;
}

} // namespace tlsurf
