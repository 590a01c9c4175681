#include "wsbf/smoothing.hpp"

#include <cmath>
#include <limits>

#include "wsbf/errors.hpp"

namespace wsbf {

namespace {

// One-step-ahead SSE of SES with the level seeded at y[0].
double ses_sse(const std::vector<double>& y, double alpha, double* level_out) {
    double level = y[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double err = y[t] - level;
        sse += err * err;
        level = alpha * y[t] + (1.0 - alpha) * level;
    }
    if (level_out) *level_out = level;
    return sse;
}

double des_sse(const std::vector<double>& y, double alpha, double beta, double* level_out,
               double* trend_out) {
    double level = y[0];
    double trend = y[1] - y[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double pred = level + trend;
        const double err = y[t] - pred;
        sse += err * err;
        const double prev_level = level;
        level = alpha * y[t] + (1.0 - alpha) * (prev_level + trend);
        trend = beta * (level - prev_level) + (1.0 - beta) * trend;
    }
    if (level_out) *level_out = level;
    if (trend_out) *trend_out = trend;
    return sse;
}

// Initial level/trend/seasonals from an OLS line over the whole series: the
// trend is the fitted slope, the seasonal indices are the mean residual
// (additive) or mean ratio (multiplicative) per season position.
void hw_initial(const std::vector<double>& y, int period, bool multiplicative, double& level0,
                double& trend0, std::vector<double>& seasonal0) {
    const std::size_t n = y.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        sx += static_cast<double>(t);
        sy += y[t];
        sxx += static_cast<double>(t) * static_cast<double>(t);
        sxy += static_cast<double>(t) * y[t];
    }
    const double nn = static_cast<double>(n);
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / nn;

    seasonal0.assign(static_cast<std::size_t>(period), multiplicative ? 1.0 : 0.0);
    std::vector<int> counts(static_cast<std::size_t>(period), 0);
    std::vector<double> acc(static_cast<std::size_t>(period), 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const double line = intercept + slope * static_cast<double>(t);
        const std::size_t s = t % static_cast<std::size_t>(period);
        acc[s] += multiplicative ? y[t] / line : y[t] - line;
        counts[s] += 1;
    }
    for (std::size_t s = 0; s < seasonal0.size(); ++s)
        if (counts[s] > 0) seasonal0[s] = acc[s] / counts[s];

    // level/trend describe the line at the end of the first season so the
    // recursion starts at t = period
    trend0 = slope;
    level0 = intercept + slope * static_cast<double>(period - 1);
}

double hw_sse(const std::vector<double>& y, int period, bool multiplicative, double alpha,
              double beta, double gamma, SmoothingModel::State* out) {
    const std::size_t m = static_cast<std::size_t>(period);
    double level, trend;
    std::vector<double> seasonal;
    hw_initial(y, period, multiplicative, level, trend, seasonal);

    double sse = 0.0;
    for (std::size_t t = m; t < y.size(); ++t) {
        const double s = seasonal[t % m];
        const double pred = multiplicative ? (level + trend) * s : level + trend + s;
        const double err = y[t] - pred;
        sse += err * err;
        const double prev_level = level;
        const double prev_trend = trend;
        if (multiplicative) {
            level = alpha * (y[t] / s) + (1.0 - alpha) * (prev_level + prev_trend);
            trend = beta * (level - prev_level) + (1.0 - beta) * prev_trend;
            seasonal[t % m] = gamma * (y[t] / (prev_level + prev_trend)) + (1.0 - gamma) * s;
        } else {
            level = alpha * (y[t] - s) + (1.0 - alpha) * (prev_level + prev_trend);
            trend = beta * (level - prev_level) + (1.0 - beta) * prev_trend;
            seasonal[t % m] = gamma * (y[t] - prev_level - prev_trend) + (1.0 - gamma) * s;
        }
    }
    if (out) {
        out->level = level;
        out->trend = trend;
        out->seasonal = seasonal;
    }
    return sse;
}

void check_preconditions(ModelKind kind, const std::vector<double>& y, int period) {
    switch (kind) {
        case ModelKind::Ses:
            if (y.size() < 2) throw ContractError("ses: need at least 2 observations");
            break;
        case ModelKind::Des:
            if (y.size() < 3) throw ContractError("des: need at least 3 observations");
            break;
        case ModelKind::HwAdditive:
        case ModelKind::HwMultiplicative:
            if (period < 2) throw ContractError("holt-winters: period must be >= 2");
            if (y.size() < 2 * static_cast<std::size_t>(period))
                throw ContractError("holt-winters: need at least two full seasons");
            if (kind == ModelKind::HwMultiplicative)
                for (const double v : y)
                    if (v <= 0.0)
                        throw ContractError(
                            "holt-winters multiplicative: series must be strictly positive");
            break;
        default:
            throw ContractError("fit_smoothing: not a smoothing model kind");
    }
}

} // namespace

std::unique_ptr<SmoothingModel> SmoothingModel::fit(ModelKind kind, const std::vector<double>& y,
                                                    int period) {
    check_preconditions(kind, y, period);
    State st;
    st.period = period;

    // 0.01-step grid on (0, 1]; the first strictly better point wins, so ties
    // resolve toward smaller coefficients
    switch (kind) {
        case ModelKind::Ses: {
            double best_sse = std::numeric_limits<double>::infinity();
            for (int a = 1; a <= 100; ++a) {
                const double sse = ses_sse(y, a / 100.0, nullptr);
                if (sse < best_sse) {
                    best_sse = sse;
                    st.alpha = a / 100.0;
                }
            }
            st.sse = ses_sse(y, st.alpha, &st.level);
            break;
        }
        case ModelKind::Des: {
            double best_sse = std::numeric_limits<double>::infinity();
            for (int a = 1; a <= 100; ++a)
                for (int b = 1; b <= 100; ++b) {
                    const double sse = des_sse(y, a / 100.0, b / 100.0, nullptr, nullptr);
                    if (sse < best_sse) {
                        best_sse = sse;
                        st.alpha = a / 100.0;
                        st.beta = b / 100.0;
                    }
                }
            st.sse = des_sse(y, st.alpha, st.beta, &st.level, &st.trend);
            break;
        }
        case ModelKind::HwAdditive:
        case ModelKind::HwMultiplicative: {
            const bool mult = kind == ModelKind::HwMultiplicative;
            double best_sse = std::numeric_limits<double>::infinity();
            for (int a = 1; a <= 100; ++a)
                for (int b = 1; b <= 100; ++b)
                    for (int g = 1; g <= 100; ++g) {
                        const double sse =
                            hw_sse(y, period, mult, a / 100.0, b / 100.0, g / 100.0, nullptr);
                        if (sse < best_sse) {
                            best_sse = sse;
                            st.alpha = a / 100.0;
                            st.beta = b / 100.0;
                            st.gamma = g / 100.0;
                        }
                    }
            st.sse = hw_sse(y, period, mult, st.alpha, st.beta, st.gamma, &st);
            break;
        }
        default:
            break; // unreachable, check_preconditions rejects
    }
    return std::make_unique<SmoothingModel>(kind, std::move(st), y);
}

std::unique_ptr<SmoothingModel> SmoothingModel::fit_fixed(ModelKind kind,
                                                          const std::vector<double>& y, int period,
                                                          double alpha, double beta, double gamma) {
    check_preconditions(kind, y, period);
    State st;
    st.period = period;
    st.alpha = alpha;
    st.beta = beta;
    st.gamma = gamma;
    switch (kind) {
        case ModelKind::Ses:
            st.sse = ses_sse(y, alpha, &st.level);
            break;
        case ModelKind::Des:
            st.sse = des_sse(y, alpha, beta, &st.level, &st.trend);
            break;
        default:
            st.sse = hw_sse(y, period, kind == ModelKind::HwMultiplicative, alpha, beta, gamma, &st);
            break;
    }
    return std::make_unique<SmoothingModel>(kind, std::move(st), y);
}

std::vector<double> SmoothingModel::forecast(int horizon) const {
    if (horizon < 0) throw ContractError("forecast: negative horizon");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (int h = 1; h <= horizon; ++h) {
        switch (kind()) {
            case ModelKind::Ses:
                out.push_back(state_.level);
                break;
            case ModelKind::Des:
                out.push_back(state_.level + h * state_.trend);
                break;
            case ModelKind::HwAdditive:
            case ModelKind::HwMultiplicative: {
                const std::size_t m = state_.seasonal.size();
                // season index continues the cycle where training stopped
                const std::size_t s = (series_.size() + static_cast<std::size_t>(h) - 1) % m;
                const double base = state_.level + h * state_.trend;
                out.push_back(kind() == ModelKind::HwAdditive ? base + state_.seasonal[s]
                                                              : base * state_.seasonal[s]);
                break;
            }
            default:
                throw ContractError("forecast: not a smoothing model");
        }
    }
    return out;
}

std::vector<double> SmoothingModel::predict_impl(const Matrix&) const {
    throw ContractError("smoothing models forecast from their own state; use forecast(h)");
}

void SmoothingModel::save_params(nlohmann::json& j) const {
    j["alpha"] = state_.alpha;
    j["beta"] = state_.beta;
    j["gamma"] = state_.gamma;
    j["level"] = state_.level;
    j["trend"] = state_.trend;
    j["seasonal"] = state_.seasonal;
    j["period"] = state_.period;
    j["sse"] = state_.sse;
    j["series"] = series_;
}

std::unique_ptr<Model> SmoothingModel::load(const nlohmann::json& j) {
    State st;
    st.alpha = j.at("alpha").get<double>();
    st.beta = j.at("beta").get<double>();
    st.gamma = j.at("gamma").get<double>();
    st.level = j.at("level").get<double>();
    st.trend = j.at("trend").get<double>();
    st.seasonal = j.at("seasonal").get<std::vector<double>>();
    st.period = j.at("period").get<int>();
    st.sse = j.at("sse").get<double>();
    return std::make_unique<SmoothingModel>(model_kind_from_name(j.at("kind").get<std::string>()),
                                            std::move(st),
                                            j.at("series").get<std::vector<double>>());
}

} // namespace wsbf
