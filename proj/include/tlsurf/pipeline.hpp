#ifndef TLSURF_PIPELINE_HPP
#define TLSURF_PIPELINE_HPP

#include "tlsurf/constructors.hpp"
#include "tlsurf/error.hpp"
#include "tlsurf/io.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tlsurf {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPipeline = 3;

/// Failure inside one pipeline stage ("solve", "build", "residuals", "classify", "frame", "export").
class StageError : public Error
{
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

enum class Mode { run, check, classify, solve };

struct Overrides
{
    std::optional<int> grid_n;
    std::optional<double> tol;
    std::optional<std::filesystem::path> out_dir;
};

/// How the conformal factor (or the pair f1, f2 for one_lift) is obtained.
struct FieldSource
{
    enum class Kind { expression, liouville, goursat } kind = Kind::expression;
    std::map<std::string, std::string> text; // expression strings by key
};

struct Perturbation
{
    std::string field;
    double amount = 0.0;
};

/// Validated contents of a schema_version 1 config; see docs/config.md.
struct RunConfig
{
    json raw;
    std::string case_name;
    AmbientSpec ambient;
    SignChoice signs;
    Grid grid;
    FieldSource source;
    std::map<std::string, std::string> functions;
    double c = 0.0;
    Tolerances tol;
    std::optional<Perturbation> perturb;
    json expect = json::object();
    bool integrate_frame = false;
    bool export_files = false;
    double frame_tolerance = 1e-5;
    std::filesystem::path out_dir = "out";
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(const json& config, const Overrides& overrides = {});

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

struct PipelineOutcome
{
    json report;
    bool pass = false;
    std::vector<std::string> failing;
};

/// Runs the stages selected by `mode`, writes report.json (and exports) under cfg.out_dir.
/// Stage failures throw StageError.
PipelineOutcome run_pipeline(const RunConfig& cfg, Mode mode);

/// Builder output for a config, including the optional perturbation; exposed for tests.
FundamentalData build_from_config(const RunConfig& cfg);

} // namespace tlsurf

#endif // TLSURF_PIPELINE_HPP
