#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "peelmap/eden.hpp"
#include "peelmap/layers.hpp"
#include "peelmap/model.hpp"
#include "peelmap/peel.hpp"
#include "peelmap/stats.hpp"

namespace peelmap {

enum class Mode { Peel, Layers, EdenDilute, Dfpp, Check, Constants, Oracle };

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

// Invalid or incomplete configuration; maps to exit status 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    std::optional<double> a;
    std::uint64_t seed = 1;
    std::int64_t replicas = 100;
    std::optional<std::int64_t> steps;  // peel; n_trunc for dfpp; largest n for oracle
    std::optional<std::int64_t> r_max;  // layers
    std::optional<double> t_max;        // eden-dilute
    double t_min = 1.0;                 // eden-dilute
    std::int64_t step_budget = std::int64_t{1} << 26;  // per replica, layers and eden-dilute
    Mode mode = Mode::Constants;
    std::string output_path = "peelmap_out";  // writes <path>.csv and <path>.json
    bool exact_volume = true;
    std::int64_t shortcut_threshold = 64;
    unsigned threads = 0;  // 0: all hardware threads
};

// Throws ConfigError when a mode is missing a field it needs or a value is out of range.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
// Fields present in `j` override those of `base`; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

VolumeOptions volume_options(const ExperimentConfig& config);

// Minimal CSV writer: reals with 17 significant digits, UNIX newlines.
class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header);
    CsvWriter& operator<<(std::int64_t v);
    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(const std::string& v);
    CsvWriter& operator<<(bool v);
    void end_row();
    const std::string& str() const { return out_; }

private:
    void sep();
    std::string out_;
    bool fresh_ = true;
};

std::string format_real(double v);

// Identifier of the source tree the binary was built from.
const char* build_id();

nlohmann::json constants_json(const Model& model);

// ---- summaries shared by the harness and the acceptance driver ----

struct CheckItem {
    std::string name;
    double a = 0;
    double value = 0;
    double tolerance = 0;
    bool pass = false;
};

// Exact identities: normalization of nu, nu(-1) = 2 kappa, harmonicity of h_up and h_down,
// the closed form of h_down, and the normalization of the peeling and layer kernels.
std::vector<CheckItem> identity_suite(const Model& model);

struct InvPerimeterRow {
    std::int64_t n = 0;
    MeanSe mc;
    double oracle = 0;
    double z = 0;  // (mc - oracle) / se
};

// Monte Carlo E[1/P_n] at the given checkpoints against the oracle.
std::vector<InvPerimeterRow> inverse_perimeter_check(const Model& model, const std::vector<PeelRun>& runs,
                                                     const std::vector<std::int64_t>& ns);

struct LogRatioSummary {
    std::int64_t n = 0;
    Quartiles log_p;  // log P_n / log n across replicas
    Quartiles log_v;  // log V_n / log n, replicas with V_n > 0
    double ref_p = 0, ref_v = 0;
    std::int64_t escaped = 0;
};

LogRatioSummary log_ratio_summary(const Model& model, const std::vector<PeelRun>& runs);

struct GrowthSlopes {
    double x_lo = 0, x_hi = 0;
    SlopeSummary perimeter, volume;
    double ref_perimeter = 0, ref_volume = 0;
    std::int64_t completed = 0, budget_exhausted = 0, escaped = 0;
};

// log-log slopes of P and V against the radius over [r_lo, r_hi], per replica
GrowthSlopes dilute_layer_slopes(const Model& model, const std::vector<LayerRun>& runs, double r_lo, double r_hi);
// the same against the FPP time
GrowthSlopes eden_slopes(const Model& model, const std::vector<EdenRun>& runs, double t_lo, double t_hi);

struct DenseLayerSummary {
    std::int64_t radius = 0;            // largest r reached by at least 90% of the replicas
    std::vector<double> rate;           // index r-1: median of log P_{theta_r} / r
    double last_quartile_variation = 0; // (max - min) / mean of rate over the last quarter of radii
    Quartiles perimeter_slope, volume_slope;  // semi-log slopes over the last half of the radii
    std::int64_t fitted = 0;
    double slope_ratio = 0;             // median volume slope / median perimeter slope
    std::vector<double> increment_m2;   // index r: mean of log^2(P_{theta_{r+1}} / P_{theta_r})
    std::int64_t completed = 0, budget_exhausted = 0, escaped = 0;
};

DenseLayerSummary dense_layer_summary(const std::vector<LayerRun>& runs);

// Every acceptance-style comparison is |x - ref| <= rel |ref|.
bool within(double x, double ref, double rel);

// ---- execution ----

struct Artifacts {
    std::string csv;
    nlohmann::json summary;
    bool pass = true;
};

// Runs the configured mode in memory. Throws ConfigError, std::domain_error (phase mismatch)
// or NumericalError.
Artifacts execute(const ExperimentConfig& config);

// execute() plus files on disk. Returns 0 on pass, 1 on usage errors, 2 when a pass flag is
// false and 3 on numerical-quality failures; diagnostics go to stderr.
int run(const ExperimentConfig& config);

}  // namespace peelmap
