#include "wsbf/wsb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsbf/csv.hpp"
#include "wsbf/errors.hpp"
#include "wsbf/rng.hpp"

namespace wsbf {

double weight_schedule(int step, const WsbConfig& config) {
    if (config.horizon < 1) throw ContractError("wsb: horizon must be >= 1");
    if (config.w < 0.0 || config.w > 1.0) throw ContractError("wsb: global weight must be in [0, 1]");
    if (step < 1 || step > config.horizon)
        throw ContractError("wsb: step " + std::to_string(step) + " outside 1.." +
                            std::to_string(config.horizon));
    const double half = config.horizon / 2.0;
    // the outer absolute value is redundant for in-range steps but kept so
    // the formula stays total
    return std::fabs(1.0 - std::fabs(static_cast<double>(step) - half) / half) * config.w;
}

WsbResult wsb_combine(const std::vector<double>& strong,
                      const std::vector<std::vector<double>>& weak, const WsbConfig& config) {
    const auto h = static_cast<std::size_t>(config.horizon);
    if (strong.size() != h) throw ContractError("wsb_combine: strong series length != horizon");
    if (weak.empty()) throw ContractError("wsb_combine: need at least one weak series");
    for (const auto& series : weak)
        if (series.size() != h)
            throw ContractError("wsb_combine: weak series length != horizon");

    WsbResult result;
    result.n_weak = weak.size();
    result.strong = strong;
    result.weak_mean.resize(h);
    result.weight.resize(h);
    result.booster.resize(h);
    result.combined.resize(h);
    for (std::size_t t = 0; t < h; ++t) {
        double acc = 0.0;
        for (const auto& series : weak) acc += series[t];
        result.weak_mean[t] = acc / static_cast<double>(weak.size());
        result.weight[t] = weight_schedule(static_cast<int>(t) + 1, config);
        result.booster[t] = (strong[t] - result.weak_mean[t]) * result.weight[t];
        result.combined[t] = strong[t] + result.booster[t];
    }
    return result;
}

double tune_global_weight(const std::function<double(double)>& eval_fn, std::size_t n_samples,
                          std::uint64_t seed) {
    if (n_samples < 1) throw ContractError("tune_global_weight: n_samples must be >= 1");
    std::vector<double> samples{0.0, kDefaultGlobalWeight, 1.0};
    Rng rng(derive_seed(seed, "wsb-weight"));
    for (std::size_t i = 0; i < n_samples; ++i) samples.push_back(rng.uniform01());

    double best_w = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    bool any_finite = false;
    for (const double w : samples) {
        const double score = eval_fn(w);
        if (!std::isfinite(score)) continue;
        any_finite = true;
        if (score < best_score || (score == best_score && w < best_w)) {
            best_score = score;
            best_w = w;
        }
    }
    if (!any_finite) throw NumericError("tune_global_weight: objective non-finite for every sample");
    return best_w;
}

void WsbResult::write_csv(const std::string& path) const {
    std::vector<std::string> header{"t", "strong", "weak_mean", "w_t", "b_t", "f_wsb"};
    std::vector<std::vector<std::string>> rows;
    for (std::size_t t = 0; t < combined.size(); ++t)
        rows.push_back({std::to_string(t + 1), csv::format_double(strong[t]),
                        csv::format_double(weak_mean[t]), csv::format_double(weight[t]),
                        csv::format_double(booster[t]), csv::format_double(combined[t])});
    csv::write_file(path, header, rows);
}

} // namespace wsbf
