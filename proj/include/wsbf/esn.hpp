#ifndef WSBF_ESN_HPP
#define WSBF_ESN_HPP

#include "wsbf/model.hpp"
#include "wsbf/scaler.hpp"

namespace wsbf {

/// Echo state network: a random sparse reservoir rescaled to the configured
/// spectral radius, tanh state updates driven in row order with additive
/// uniform training noise, and a ridge-regression readout (ridge 1e-6) on the
/// bias-extended states. Prediction replays rows from the stored
/// post-training state without noise, so repeated calls are identical.
class EsnModel : public Model {
public:
    struct Params {
        std::size_t reservoirs = 0;
        double sparsity = 0.0;
        double spectral_radius = 0.0;
        double noise = 0.0;
        std::uint64_t reservoir_seed = 0;   // the seed that produced W / W_in
        std::vector<double> readout;        // reservoirs + 1 (bias)
        std::vector<double> final_state;    // post-training reservoir state
    };

    EsnModel(std::vector<std::string> feature_names, Hyperparams hp, std::uint64_t seed,
             Params params, Scaler scaler, TargetScaler target_scaler);

    const Params& params() const { return params_; }

    /// Reservoir matrix after rescaling (reservoirs x reservoirs, row-major).
    const std::vector<double>& reservoir() const { return W_; }

    static std::unique_ptr<EsnModel> fit(const Matrix& X, const std::vector<double>& y,
                                         const std::vector<std::string>& feature_names,
                                         const Hyperparams& hp, std::uint64_t seed);

    static std::unique_ptr<Model> load(const nlohmann::json& j);

protected:
    std::vector<double> predict_impl(const Matrix& X) const override;
    void save_params(nlohmann::json& j) const override;

private:
    void regenerate_weights(std::size_t inputs);
    void advance(std::vector<double>& state, std::span<const double> input) const;

    Params params_;
    Scaler scaler_;
    TargetScaler target_scaler_;
    // Regenerated deterministically from reservoir_seed; not serialized.
    std::vector<double> W_;    // reservoirs x reservoirs
    std::vector<double> Win_;  // reservoirs x inputs
};

/// Largest |eigenvalue| of a dense row-major square matrix.
double spectral_radius(const std::vector<double>& m, std::size_t dim);

} // namespace wsbf

#endif // WSBF_ESN_HPP
