#ifndef WSBF_EVALUATION_HPP
#define WSBF_EVALUATION_HPP

#include <span>
#include <vector>

#include "wsbf/dataset.hpp"
#include "wsbf/model.hpp"

namespace wsbf {

/// Hybrid split: the final h rows are the test window, the remaining rows are
/// partitioned into k contiguous folds (earlier rows in earlier folds, sizes
/// differing by at most one).
struct SplitPlan {
    std::vector<std::size_t> test;
    std::vector<std::size_t> train;
    std::vector<std::vector<std::size_t>> folds;
};

SplitPlan hybrid_split(std::size_t n_rows, int horizon, int k_folds);

/// Mean absolute error, in the units of the series.
double mae(std::span<const double> actual, std::span<const double> predicted);

/// Symmetric MAPE as a fraction in [0, 2]; a term with |y|+|yhat| == 0
/// contributes 0. Multiply by 100 to report percent.
double smape(std::span<const double> actual, std::span<const double> predicted);

/// Exogenous rows for future periods (everything the model needs except lags).
struct ExogFrame {
    std::vector<Period> periods;
    std::vector<std::string> names;
    Matrix values; // one row per period

    static ExogFrame from_dataset(const TimeSeriesDataset& ds, std::size_t begin, std::size_t end);
};

/// Feature-engineering conventions the forecaster shares with
/// build_design_matrix.
struct ForecastSetup {
    std::vector<int> lags;
    Period covid_start;
    Period covid_end;
};

struct ForecastResult {
    int horizon = 0;
    std::vector<Period> periods;
    std::vector<double> predicted;       // kWh
    std::vector<double> actual;          // empty when unknown
    std::vector<std::string> feature_names;
    Matrix features;                     // rows as actually fed (lag feedback included)
    double mae_score = 0.0;              // set when actual is provided
    double smape_score = 0.0;

    void write_csv(const std::string& path) const;
};

/// Twelve-step-style recursive forecast: each step builds its feature vector
/// from the future exogenous row plus lag values taken from true history
/// where available and from the model's own earlier predictions otherwise.
/// Smoothing models bypass the feature path and use their native recursions.
ForecastResult recursive_forecast(const Model& model, const TimeSeriesDataset& history,
                                  const ExogFrame& future, int horizon, const ForecastSetup& setup);

/// Attaches actuals and metric scores to a forecast.
void score_forecast(ForecastResult& result, const std::vector<double>& actual);

// ---- diagnostics -----------------------------------------------------------

/// Sample autocorrelation (biased, divisor n) up to max_lag; acf[0] == 1.
std::vector<double> acf(const std::vector<double>& series, int max_lag);

/// Partial autocorrelation via Durbin-Levinson on the ACF; pacf[0] == 1.
std::vector<double> pacf_from_acf(const std::vector<double>& acf_values);

/// KPSS level-stationarity statistic with Bartlett-kernel long-run variance
/// and truncation lag floor(4 (n/100)^(1/4)).
double kpss_level_stat(const std::vector<double>& series);

struct MannKendallResult {
    double s = 0.0;
    double var_s = 0.0;
    double z = 0.0;
    double p = 1.0; // two-sided
};

/// Mann-Kendall trend test with tie correction and continuity correction.
MannKendallResult mann_kendall(const std::vector<double>& series);

struct KruskalWallisResult {
    double h = 0.0;
    int df = 0;
    double p = 1.0;
};

/// Kruskal-Wallis over groups, midranks for ties. All-tied input yields H = 0.
KruskalWallisResult kruskal_wallis(const std::vector<double>& values, const std::vector<int>& groups);

struct DiagnosticsReport {
    int n = 0;
    std::vector<double> acf_values;
    std::vector<double> pacf_values;
    double band = 0.0; // +-1.96/sqrt(n)
    double kpss_stat = 0.0;
    double kpss_critical = 0.146; // 10% level
    bool kpss_level_stationary = false;
    MannKendallResult mk;
    bool mk_trend = false; // p < 0.05
    KruskalWallisResult kw;
    bool kw_seasonal = false; // p < 0.05
};

/// Full per-dataset diagnostics: ACF/PACF to max_lag, KPSS vs 0.146,
/// Mann-Kendall vs 0.05, Kruskal-Wallis over the 12 month groups vs 0.05.
DiagnosticsReport diagnostics(const TimeSeriesDataset& ds, int max_lag, int period = 12);

struct FoldStats {
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
};

/// Mean / median / sample sd of per-fold errors (sd is 0 for a single fold).
FoldStats fold_stats(const std::vector<double>& fold_errors);

// ---- shared numeric helpers ------------------------------------------------

/// Two-sided normal tail probability 2 (1 - Phi(|z|)).
double normal_two_sided_p(double z);

/// Chi-square survival function P(X > x) with df degrees of freedom.
double chi2_sf(double x, int df);

} // namespace wsbf

#endif // WSBF_EVALUATION_HPP
