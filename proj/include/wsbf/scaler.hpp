#ifndef WSBF_SCALER_HPP
#define WSBF_SCALER_HPP

#include <span>
#include <vector>

#include <json.hpp>

#include "wsbf/matrix.hpp"

namespace wsbf {

/// Per-column z-score scaler using the training fold's mean and sample sd.
/// Columns with sd == 0 pass through unscaled.
class Scaler {
public:
    Scaler() = default;

    static Scaler fit(const Matrix& X);

    Matrix apply(const Matrix& X) const;
    std::vector<double> apply_row(std::span<const double> row) const;

    std::size_t cols() const { return means_.size(); }
    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& sds() const { return sds_; }

    nlohmann::json to_json() const;
    static Scaler from_json(const nlohmann::json& j);

private:
    std::vector<double> means_;
    std::vector<double> sds_; // 1.0 where the column was constant
};

/// z-score for the target series, with the same sd == 0 passthrough.
class TargetScaler {
public:
    TargetScaler() = default;

    static TargetScaler fit(const std::vector<double>& y);

    std::vector<double> apply(const std::vector<double>& y) const;
    double invert(double v) const { return v * sd_ + mean_; }
    std::vector<double> invert(const std::vector<double>& v) const;

    double mean() const { return mean_; }
    double sd() const { return sd_; }

    nlohmann::json to_json() const;
    static TargetScaler from_json(const nlohmann::json& j);

private:
    double mean_ = 0.0;
    double sd_ = 1.0;
};

} // namespace wsbf

#endif // WSBF_SCALER_HPP
