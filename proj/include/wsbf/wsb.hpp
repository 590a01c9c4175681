#ifndef WSBF_WSB_HPP
#define WSBF_WSB_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace wsbf {

/// Weaker Separator Booster settings: the global weight w in [0, 1] and the
/// prediction horizon. Step indices are 1-based (t in 1..h).
struct WsbConfig {
    double w = 0.0833;
    int horizon = 12;
};

/// Per-step record of the combination: the booster pushes the strong
/// prediction away from the weak-model mean, scaled by the triangular
/// horizon weight.
struct WsbResult {
    std::vector<double> strong;     // F_s(t), kWh
    std::vector<double> weak_mean;  // mean of the weak predictors, kWh
    std::vector<double> weight;     // w(t)
    std::vector<double> booster;    // b(t) = (F_s - weak_mean) * w(t), kWh
    std::vector<double> combined;   // F_wsb(t) = F_s(t) + b(t), kWh
    std::size_t n_weak = 0;

    void write_csv(const std::string& path) const;
};

/// Triangular weight schedule: |1 - |t - h/2| / (h/2)| * w. Rises from near
/// zero, peaks at the midpoint with value w, and falls back to zero at t = h.
double weight_schedule(int step, const WsbConfig& config);

/// Combines the strong series with n >= 1 weak series of equal length h.
WsbResult wsb_combine(const std::vector<double>& strong,
                      const std::vector<std::vector<double>>& weak, const WsbConfig& config);

/// Random search for the global weight: n_samples uniform draws in [0, 1]
/// plus the fixed anchors {0, 0.0833, 1}; the sample minimizing eval_fn wins,
/// ties to the smaller w.
double tune_global_weight(const std::function<double(double)>& eval_fn, std::size_t n_samples,
                          std::uint64_t seed);

/// The default global weight when tuning is skipped.
inline constexpr double kDefaultGlobalWeight = 0.0833;

} // namespace wsbf

#endif // WSBF_WSB_HPP
