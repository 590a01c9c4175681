#ifndef WSBF_PIPELINE_HPP
#define WSBF_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsbf/dataset.hpp"
#include "wsbf/evaluation.hpp"
#include "wsbf/metaheuristics.hpp"
#include "wsbf/shapley.hpp"
#include "wsbf/wsb.hpp"

namespace wsbf {

/// Declarative run configuration (JSON file). Defaults mirror the shipped
/// sample configs; --seed/--out on the CLI override `seed`/`out_dir`.
struct RunConfig {
    std::string input_csv;
    std::string dataset = "dataset";
    std::vector<int> lags = default_lags();
    int horizon = 12;
    int folds = 5;
    Period covid_start{2020, 3};
    Period covid_end{2022, 4};
    std::vector<std::string> climate_columns;

    // per-learner hyperparameter overrides; empty means tuned-file-or-default
    std::map<std::string, Hyperparams> learners;
    std::vector<std::string> features; // empty: all design-matrix features

    struct Tune {
        std::string optimizer = "ga"; // "ga" | "pso"
        int population = 30;
        int iterations = 25;
        double mutation_rate = 0.5;
        double inertia = 0.9;
        double cognitive = 0.5;
        double social = 0.3;
        std::vector<std::uint64_t> seeds = {1, 2, 3};
    } tune;

    struct Wsb {
        double w = kDefaultGlobalWeight;
        bool tune = true;
        int samples = 64;
        std::string strong = "lstm";
        std::vector<std::string> weak = {"rf", "svr", "gbt"};
        bool tune_on_test = false; // diagnostic mode; leaks test data by design
    } wsb;

    struct Shap {
        std::string method = "auto";
        int permutations = 100;
        int background_cap = 100;
        int elimination_cap = 40;
        int instances_cap = 64; // explained rows for cmd_explain
    } shap;

    std::string out_dir = "out";
    std::uint64_t seed = 42;
    int threads = 0;

    static RunConfig from_json_file(const std::string& path);
    static RunConfig from_json(const nlohmann::json& j, const std::string& origin = "<config>");

    /// Output directory for one command: <out_dir>/<dataset>/<command>/
    std::string command_dir(const std::string& command) const;
};

/// The standard input schema: date, consumption_kwh, then the climate columns.
std::vector<std::string> default_climate_columns();
std::vector<std::string> csv_schema(const RunConfig& config);

/// Loads, validates and imputes the configured dataset.
TimeSeriesDataset load_dataset(const RunConfig& config);

struct PreparedData {
    TimeSeriesDataset dataset;  // imputed
    DesignMatrix matrix;        // full feature set
};

PreparedData prepare(const RunConfig& config);

// ---- commands ----------------------------------------------------------------

struct StatsOutput {
    SummaryStats stats;
    std::string csv_path;
};

/// Summary statistics of the consumption series.
StatsOutput cmd_stats(const RunConfig& config);

struct DiagnoseOutput {
    DiagnosticsReport report;
    std::string dir;
};

/// ACF/PACF plus the stationarity/trend/seasonality test battery.
DiagnoseOutput cmd_diagnose(const RunConfig& config);

struct SelectFeaturesOutput {
    EliminationTrace trace;
    std::string dir;
};

/// Shapley-ranked backward feature elimination.
SelectFeaturesOutput cmd_select_features(const RunConfig& config);

struct TuneOutput {
    Hyperparams best;
    double best_fitness = 0.0;
    Campaign campaign;
    std::string dir;
};

/// GA/PSO hyperparameter search for one learner kind, multi-seed.
TuneOutput cmd_tune(const RunConfig& config, ModelKind kind);

struct ModelScore {
    std::string name;
    double mae_kwh = 0.0;
    double smape_pct = 0.0;
};

struct EvaluateOutput {
    std::vector<ModelScore> metrics;       // wsb, strong, weak..., baselines, esn
    WsbResult wsb_test;
    double chosen_w = 0.0;
    double val_smape_wsb = 0.0;            // on the tuning validation slice
    double val_smape_strong = 0.0;
    std::string dir;
};

/// Full 12-step evaluation: five learners, recursive forecasts, smoothing
/// baselines, WSB combination, metric and plot-data emission.
EvaluateOutput cmd_evaluate(const RunConfig& config);

struct ExplainOutput {
    AttributionReport report;
    ForcePlotData force_plot;
    std::string dir;
};

/// Shapley attribution of the RF model plus force-plot data.
ExplainOutput cmd_explain(const RunConfig& config);

/// Resolution order for a learner's hyperparameters: config override, then
/// tuned best_params.json under the output tree, then the built-in defaults.
Hyperparams resolve_hyperparams(const RunConfig& config, ModelKind kind);

} // namespace wsbf

#endif // WSBF_PIPELINE_HPP
