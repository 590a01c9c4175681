#ifndef WSBF_GBT_HPP
#define WSBF_GBT_HPP

#include "wsbf/model.hpp"
#include "wsbf/tree.hpp"

namespace wsbf {

/// Squared-error gradient boosting with the regularized leaf formula
/// -soft_threshold(G, alpha) / (H + lambda). Base score is mean(y); the
/// shrinkage step is the optional "learning_rate" hyperparameter (0.3 when
/// absent).
class GradientBoostingModel : public Model {
public:
    GradientBoostingModel(std::vector<std::string> feature_names, Hyperparams hp, std::uint64_t seed,
                          double base_score, double learning_rate, std::vector<Tree> trees)
        : Model(ModelKind::Gbt, std::move(feature_names), std::move(hp), seed),
          base_score_(base_score), learning_rate_(learning_rate), trees_(std::move(trees)) {}

    double base_score() const { return base_score_; }
    const std::vector<Tree>& trees() const { return trees_; }

    static std::unique_ptr<GradientBoostingModel> fit(const Matrix& X, const std::vector<double>& y,
                                                      const std::vector<std::string>& feature_names,
                                                      const Hyperparams& hp, std::uint64_t seed);

    static std::unique_ptr<Model> load(const nlohmann::json& j);

protected:
    std::vector<double> predict_impl(const Matrix& X) const override;
    void save_params(nlohmann::json& j) const override;

private:
    double base_score_ = 0.0;
    double learning_rate_ = 0.3;
    std::vector<Tree> trees_;
};

} // namespace wsbf

#endif // WSBF_GBT_HPP
