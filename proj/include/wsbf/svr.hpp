#ifndef WSBF_SVR_HPP
#define WSBF_SVR_HPP

#include "wsbf/model.hpp"
#include "wsbf/scaler.hpp"

namespace wsbf {

enum class SvrKernel { Poly, Rbf, Sigmoid };

SvrKernel svr_kernel_from_name(const std::string& name);
std::string svr_kernel_name(SvrKernel k);

/// Epsilon-insensitive SVR trained by SMO on the dual (maximal-violating-pair
/// working set selection, KKT tolerance 1e-3). Features and target are
/// z-scored internally; epsilon and C are in scaled units.
class SvrModel : public Model {
public:
    struct Params {
        SvrKernel kernel = SvrKernel::Rbf;
        double gamma = 1.0;
        double coef0 = 0.0;
        int degree = 3;
        Matrix support;               // scaled support vectors
        std::vector<double> beta;     // alpha - alpha* per support vector
        double bias = 0.0;
        bool converged = true;
        double kkt_gap = 0.0;         // final maximal KKT violation
    };

    SvrModel(std::vector<std::string> feature_names, Hyperparams hp, std::uint64_t seed,
             Params params, Scaler scaler, TargetScaler target_scaler)
        : Model(ModelKind::Svr, std::move(feature_names), std::move(hp), seed),
          params_(std::move(params)), scaler_(std::move(scaler)),
          target_scaler_(std::move(target_scaler)) {}

    bool converged() const { return params_.converged; }
    double kkt_gap() const { return params_.kkt_gap; }
    const Params& params() const { return params_; }

    static std::unique_ptr<SvrModel> fit(const Matrix& X, const std::vector<double>& y,
                                         const std::vector<std::string>& feature_names,
                                         const Hyperparams& hp, std::uint64_t seed);

    static std::unique_ptr<Model> load(const nlohmann::json& j);

protected:
    std::vector<double> predict_impl(const Matrix& X) const override;
    void save_params(nlohmann::json& j) const override;

private:
    Params params_;
    Scaler scaler_;
    TargetScaler target_scaler_;
};

} // namespace wsbf

#endif // WSBF_SVR_HPP
