#ifndef WSBF_LSTM_HPP
#define WSBF_LSTM_HPP

#include "wsbf/model.hpp"
#include "wsbf/scaler.hpp"

namespace wsbf {

enum class Activation { Linear, Mish, Sigmoid, Softmax, Softplus, Softsign, Tanh };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

/// Single LSTM layer with a linear output head, trained by Adam (step 1e-3)
/// on mean-squared error. Each tabular sample enters as a length-1 sequence,
/// so the initial hidden/cell state is zero for every sample. The configured
/// activation drives the cell candidate and the output transform; the gates
/// stay sigmoid.
class LstmModel : public Model {
public:
    struct Weights {
        std::size_t units = 0;
        std::size_t inputs = 0;
        bool use_bias = true;
        Activation activation = Activation::Tanh;
        // gate order: input, forget, candidate, output; each W block is
        // units x inputs, each U block units x units, each b block units
        std::vector<double> W, U, b;
        std::vector<double> w_out; // units
        double b_out = 0.0;
    };

    LstmModel(std::vector<std::string> feature_names, Hyperparams hp, std::uint64_t seed,
              Weights weights, Scaler scaler, TargetScaler target_scaler,
              std::vector<double> loss_history)
        : Model(ModelKind::Lstm, std::move(feature_names), std::move(hp), seed),
          weights_(std::move(weights)), scaler_(std::move(scaler)),
          target_scaler_(std::move(target_scaler)), loss_history_(std::move(loss_history)) {}

    /// Mean squared training loss per epoch (scaled units).
    const std::vector<double>& loss_history() const { return loss_history_; }

    static std::unique_ptr<LstmModel> fit(const Matrix& X, const std::vector<double>& y,
                                          const std::vector<std::string>& feature_names,
                                          const Hyperparams& hp, std::uint64_t seed);

    static std::unique_ptr<Model> load(const nlohmann::json& j);

protected:
    std::vector<double> predict_impl(const Matrix& X) const override;
    void save_params(nlohmann::json& j) const override;

private:
    Weights weights_;
    Scaler scaler_;
    TargetScaler target_scaler_;
    std::vector<double> loss_history_;
};

} // namespace wsbf

#endif // WSBF_LSTM_HPP
