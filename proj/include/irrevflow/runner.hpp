#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "irrevflow/states.hpp"
#include "irrevflow/time_observable.hpp"

namespace irrevflow {

inline constexpr const char* version = "0.1.0";

// Invalid configuration; the message names the offending field.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
    build_mf,
    trajectory,
    semigroup_check,
    intertwining,
    time_observable,
    convergence_sweep,
    validate_all
};

ExperimentKind parse_kind(const std::string& name);
std::string kind_name(ExperimentKind k);
const std::vector<std::string>& kind_names();

enum class MfConstruction { composed, cauchy };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::validate_all;
    int energy_n = 512;
    std::optional<double> e_max;    // default (n - 1) * spacing
    std::optional<double> spacing;  // default 16 pi / n
    QuadratureRule rule = QuadratureRule::trapezoid;
    double line_l_min = 200;
    int line_n = 0;  // 0: aligned with the energy grid
    double line_l = 0;
    Interpolation interpolation = Interpolation::nearest;
    MfConstruction construction = MfConstruction::composed;
    RegularizationPolicy regularization;
    SpectralCutoff cutoff;
    double projector_tolerance = 0.1;
    StateSpec state;
    int state_count = 1;
    std::uint64_t seed = 0;
    std::vector<double> times;
    std::vector<int> sweep_n{256, 512, 1024};
};

// Missing fields take defaults; times default per experiment kind.
ExperimentConfig parse_config(const nlohmann::json& j, ExperimentKind kind);
nlohmann::ordered_json config_echo(const ExperimentConfig& cfg);

struct CheckResult {
    std::string name;
    double value = 0;
    double tolerance = 0;
    std::string relation;  // "<=", ">=" or "=="
    bool pass = false;
    std::string note;
};

struct Residual {
    std::string name;
    int n = 0;
    double value = 0;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<CheckResult> checks;
    std::vector<Residual> residuals;
    std::vector<std::pair<double, double>> trajectory;
    double wall_time = 0;

    bool passed() const;
    nlohmann::ordered_json to_json() const;
};

// Throws config_error when the configuration cannot be realized (grid
// incompatibilities, invalid state parameters).
RunReport run(const ExperimentConfig& cfg);

// trajectory.csv (t,value), residuals.csv (name,n,value), report.json.
void write_outputs(const RunReport& report, const std::filesystem::path& dir);

std::string format_double(double x);

}  // namespace irrevflow
