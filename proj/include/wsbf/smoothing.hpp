#ifndef WSBF_SMOOTHING_HPP
#define WSBF_SMOOTHING_HPP

#include "wsbf/model.hpp"

namespace wsbf {

/// Exponential-smoothing family: simple (level), double (level + trend), and
/// Holt-Winters additive/multiplicative (level + trend + season). Smoothing
/// coefficients are picked by minimizing one-step-ahead in-sample squared
/// error over a 0.01-step grid on (0, 1].
class SmoothingModel : public Model {
public:
    struct State {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        double level = 0.0, trend = 0.0;
        std::vector<double> seasonal; // period entries, last cycle
        int period = 0;
        double sse = 0.0; // in-sample one-step squared error at the chosen grid point
    };

    SmoothingModel(ModelKind kind, State state, std::vector<double> series)
        : Model(kind, {}, {}, 0), state_(std::move(state)), series_(std::move(series)) {}

    const State& state() const { return state_; }

    bool is_smoothing() const override { return true; }
    std::vector<double> forecast(int horizon) const override;

    static std::unique_ptr<SmoothingModel> fit(ModelKind kind, const std::vector<double>& y,
                                               int period);

    /// Fit with pinned coefficients (no grid search).
    static std::unique_ptr<SmoothingModel> fit_fixed(ModelKind kind, const std::vector<double>& y,
                                                     int period, double alpha, double beta,
                                                     double gamma);

    static std::unique_ptr<Model> load(const nlohmann::json& j);

protected:
    std::vector<double> predict_impl(const Matrix& X) const override;
    void save_params(nlohmann::json& j) const override;

private:
    State state_;
    std::vector<double> series_;
};

} // namespace wsbf

#endif // WSBF_SMOOTHING_HPP
