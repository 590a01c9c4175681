#include "wsbf/scaler.hpp"

#include <cmath>

#include "wsbf/dataset.hpp"
#include "wsbf/errors.hpp"

namespace wsbf {

Scaler Scaler::fit(const Matrix& X) {
    if (X.empty()) throw ContractError("Scaler::fit: empty matrix");
    Scaler s;
    s.means_.resize(X.cols());
    s.sds_.resize(X.cols());
    for (std::size_t c = 0; c < X.cols(); ++c) {
        const auto col = X.col(c);
        double mean = 0.0;
        for (const double v : col) mean += v;
        mean /= static_cast<double>(col.size());
        const double sd = sample_sd(col);
        s.means_[c] = sd == 0.0 ? 0.0 : mean;
        s.sds_[c] = sd == 0.0 ? 1.0 : sd;
    }
    return s;
}

Matrix Scaler::apply(const Matrix& X) const {
    if (X.cols() != cols()) throw ContractError("Scaler::apply: column count mismatch");
    Matrix out(X.rows(), X.cols());
    for (std::size_t r = 0; r < X.rows(); ++r)
        for (std::size_t c = 0; c < X.cols(); ++c)
            out(r, c) = (X(r, c) - means_[c]) / sds_[c];
    return out;
}

std::vector<double> Scaler::apply_row(std::span<const double> row) const {
    if (row.size() != cols()) throw ContractError("Scaler::apply_row: width mismatch");
    std::vector<double> out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) out[c] = (row[c] - means_[c]) / sds_[c];
    return out;
}

nlohmann::json Scaler::to_json() const {
    return {{"means", means_}, {"sds", sds_}};
}

Scaler Scaler::from_json(const nlohmann::json& j) {
    Scaler s;
    s.means_ = j.at("means").get<std::vector<double>>();
    s.sds_ = j.at("sds").get<std::vector<double>>();
    return s;
}

TargetScaler TargetScaler::fit(const std::vector<double>& y) {
    if (y.empty()) throw ContractError("TargetScaler::fit: empty target");
    TargetScaler s;
    double mean = 0.0;
    for (const double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    const double sd = sample_sd(y);
    s.mean_ = sd == 0.0 ? 0.0 : mean;
    s.sd_ = sd == 0.0 ? 1.0 : sd;
    return s;
}

std::vector<double> TargetScaler::apply(const std::vector<double>& y) const {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = (y[i] - mean_) / sd_;
    return out;
}

std::vector<double> TargetScaler::invert(const std::vector<double>& v) const {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = invert(v[i]);
    return out;
}

nlohmann::json TargetScaler::to_json() const {
    return {{"mean", mean_}, {"sd", sd_}};
}

TargetScaler TargetScaler::from_json(const nlohmann::json& j) {
    TargetScaler s;
    s.mean_ = j.at("mean").get<double>();
    s.sd_ = j.at("sd").get<double>();
    return s;
}

} // namespace wsbf
