#ifndef WSBF_SHAPLEY_HPP
#define WSBF_SHAPLEY_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wsbf/dataset.hpp"
#include "wsbf/matrix.hpp"
#include "wsbf/model.hpp"

namespace wsbf {

/// Batch prediction interface; attribution is model-agnostic.
using PredictFn = std::function<std::vector<double>(const Matrix&)>;

/// Interventional coalition value: v(S) is the mean model output over the
/// background rows with the in-coalition features spliced from the instance.
double coalition_value(const PredictFn& predict, std::span<const double> instance,
                       const Matrix& background, std::uint32_t coalition_mask);

/// Exact Shapley values by coalition enumeration (feature count <= 15).
std::vector<double> exact_shapley(const PredictFn& predict, std::span<const double> instance,
                                  const Matrix& background, std::size_t feature_limit = 15);

struct SampledShapley {
    std::vector<double> phi;
    std::vector<double> std_error;
    std::size_t orderings_used = 0;
};

/// Antithetic permutation sampling: every sampled feature ordering is paired
/// with its reverse and marginal contributions are averaged. When
/// n_permutations covers all m! orderings (m <= 8) the sampler switches to
/// full enumeration and the estimate is exact.
SampledShapley sampled_shapley(const PredictFn& predict, std::span<const double> instance,
                               const Matrix& background, std::size_t n_permutations,
                               std::uint64_t seed);

struct AttributionReport {
    double base_value = 0.0;              // mean model output over the background
    Matrix phi;                           // instances x features
    Matrix std_errors;                    // same shape; zero in exact mode
    std::vector<std::string> feature_names;
    Matrix instances;
    std::vector<double> predictions;      // model output per explained instance
    std::string method;                   // "exact" | "sampled"
    std::size_t n_permutations = 0;
    std::uint64_t seed = 0;
    std::string background_note;

    void write_csv(const std::string& path) const;
};

/// Explains every row of `instances`; method "auto" picks exact for <= 15
/// features and sampling above.
AttributionReport attribute(const PredictFn& predict, const Matrix& instances,
                            const Matrix& background, const std::vector<std::string>& feature_names,
                            const std::string& method, std::size_t n_permutations,
                            std::uint64_t seed);

/// Mean |phi| per feature within each report, then mean across reports;
/// descending, ties alphabetical.
std::vector<std::pair<std::string, double>> mean_abs_importance(
    const std::vector<AttributionReport>& reports);

struct EliminationStep {
    std::string removed; // empty on the no-removal step
    std::size_t remaining = 0;
    double mae_rf = 0.0;
    double mae_gbt = 0.0;
    double mae_avg = 0.0;
};

struct EliminationTrace {
    std::vector<EliminationStep> steps;
    std::size_t chosen_step = 0; // minimum average MAE, earliest on ties
    std::vector<std::string> final_features;
    std::vector<std::pair<std::string, double>> ranking; // descending importance

    void write_csv(const std::string& path) const;
};

struct EliminationOptions {
    std::size_t validation_rows = 12; // held-out slice at the end of the matrix
    std::size_t n_permutations = 100; // sampled mode above 15 features
    std::size_t background_cap = 100;
};

/// Backward feature elimination: ranks once on the full feature set (RF and
/// GBT attributions averaged), then repeatedly drops the least important
/// remaining feature, retraining both models and scoring MAE on the held-out
/// validation slice. Stops after `cap` removals and keeps the step with the
/// lowest average MAE.
EliminationTrace backward_elimination(const DesignMatrix& dm, const Hyperparams& rf_hp,
                                      const Hyperparams& gbt_hp, std::size_t cap,
                                      std::uint64_t seed, const EliminationOptions& options = {});

struct ForcePlotEntry {
    std::string feature;
    double mean_phi = 0.0;
    double mean_value = 0.0;
};

struct ForcePlotData {
    double base_value = 0.0;
    double endpoint = 0.0; // base + sum of mean contributions
    std::vector<ForcePlotEntry> entries; // by |mean_phi| descending

    void write_csv(const std::string& path) const;
};

/// Averages phi across instances: the signed per-feature pushes of the force
/// plot, largest magnitude first.
ForcePlotData force_plot_data(const AttributionReport& report);

/// Uniform background subsample (without replacement) capped at `cap` rows.
Matrix subsample_background(const Matrix& rows, std::size_t cap, std::uint64_t seed);

} // namespace wsbf

#endif // WSBF_SHAPLEY_HPP
