#pragma once

#include "fieldline/fieldline.h"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

/// Run configuration of the command-line front end: a JSON document with fixed keys,
/// overridable by the --method / --out / --plot flags.
namespace fieldline::cli {

/// error carrying the process exit code it should end with
class Failure : public std::runtime_error {
public:
    Failure(int exitCode, const std::string& what) : std::runtime_error(what), exitCode_(exitCode) {}
    int exitCode() const noexcept { return exitCode_; }
private:
    int exitCode_;
};

enum ExitCode { ExitOk = 0, ExitConfig = 2, ExitNumeric = 3, ExitInvariant = 4 };

/// exit code for a failed C API call
int exitCodeFor(fl_status status);

/// Failure(exitCodeFor(status), stage + ": " + fl_last_error()) unless status is FL_OK
void check(fl_status status, const std::string& stage);

struct ProfileSpec {
    std::string name;                      ///< built-in name; empty when a table is used
    std::optional<std::string> table;      ///< CSV "u,f"
    std::optional<std::string> fieldTable; ///< CSV "u,B", inverted to f
    std::optional<double> b0;
    double a = 0, b = 0;
    double c = 0, anchor = 0;
    std::optional<fl_axis> axis;
};

struct ConstantsSpec {
    fl_constants k{};
    double q = 1, m = 1;
    int sign = 1;
    std::optional<double> u0;
};

struct OutputSpec {
    std::filesystem::path dir = ".";
    std::string prefix;
    bool csv = true, json = true;
    bool plot = false;
};

struct FieldGrid {
    double uMin = NAN, uMax = NAN;
    size_t points = 101;
};

struct SusySpec {
    fl_susy_params params{};
    int levels = 6;
    fl_convention convention = FL_HALF_INTEGER;
    double rMin = 0.01, rMax = 10;
    size_t points = 200;
    bool spectrum = true;
};

struct PlottedLogForm {
    double l = 0.08, mAux = 0.1;
};

struct CompareSpec {
    std::vector<fl_method> methods;
    std::optional<PlottedLogForm> plotted;
};

enum class MethodChoice { Quadrature, ClosedForm, Ode, All };

MethodChoice parseMethod(const std::string& name);
std::string methodLabel(fl_method method);

struct RunConfig {
    std::string label;
    std::filesystem::path baseDir;  ///< relative table paths are resolved against this
    ProfileSpec profile;
    std::optional<fl_particle> particle;
    std::optional<ConstantsSpec> constants;
    MethodChoice method = MethodChoice::Quadrature;
    double tEnd = NAN;
    size_t samples = 1001;
    fl_solver_settings solver{};
    double energyInvariant = 1e-6;
    double momentumInvariant = 1e-6;
    OutputSpec output;
    std::optional<FieldGrid> fieldGrid;
    SusySpec susy;
    CompareSpec compare;
    std::vector<RunConfig> runs;  ///< independent sub-runs (each a complete configuration)

    /// methods selected by `method`, in the fixed order quadrature, closed-form, ode
    std::vector<fl_method> methods() const;
    /// output path prefix: dir / prefix
    std::filesystem::path outputStem() const;
};

/// parse a configuration document; unknown keys, wrong types and non-finite numbers raise Failure(2)
RunConfig parseRunConfig(const nlohmann::json& doc, const std::filesystem::path& baseDir,
                         const std::string& defaultPrefix);

/// read and parse a configuration file (prefix defaults to the file stem)
RunConfig loadRunConfig(const std::filesystem::path& path);

struct Overrides {
    std::optional<std::string> method;
    std::optional<std::filesystem::path> outDir;
    bool plot = false;
};

/// apply command-line overrides to a configuration and its sub-runs
void applyOverrides(RunConfig& config, const Overrides& overrides);

}  // namespace fieldline::cli
