#pragma once

#include "lieadj/optimize.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace lieadj::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kConfigError = 2,
    kSolverFailure = 3,
    kOracleDisagreement = 4,
    kLineSearchFailure = 5,
    kAuditFailure = 6,
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProblemConfig {
    std::string problem_name;
    TrivializedVectorField vf;
    RetractionKind retraction = RetractionKind::exp;
    TimeGrid grid;
    GroupElem g0;
    std::optional<CostFunction> cost;
    std::optional<ParamVec> u0;
    SolverConfig solver;
    LineSearchConfig linesearch;
    std::uint64_t seed = 0;

    const GroupSpec& spec() const { return vf.spec; }
    ParamVec params() const { return u0.value_or(ParamVec{}); }
};

/// Throws ConfigError with a message naming the offending field.
ProblemConfig parse_config(const nlohmann::json& j);
ProblemConfig load_config(const std::filesystem::path& path);

enum class Mode { initial, parameter };

// Each command writes its artifacts into out_dir and returns an exit code.
int integrate(const ProblemConfig& cfg, const std::filesystem::path& out_dir);
int sensitivity(const ProblemConfig& cfg, Mode mode, const std::filesystem::path& out_dir);
int optimize(const ProblemConfig& cfg, Mode mode, const std::filesystem::path& out_dir);
int audit(const ProblemConfig& cfg, const std::filesystem::path& out_dir);

/// Full command-line entry point; diagnostics go to err.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lieadj::cli
