#ifndef WSBF_RF_HPP
#define WSBF_RF_HPP

#include "wsbf/model.hpp"
#include "wsbf/tree.hpp"

namespace wsbf {

/// Bagged CART forest: each tree is grown on a bootstrap resample of the
/// training rows (same size, with replacement); the forest predicts the mean
/// of its trees.
class RandomForestModel : public Model {
public:
    RandomForestModel(std::vector<std::string> feature_names, Hyperparams hp, std::uint64_t seed,
                      std::vector<Tree> trees)
        : Model(ModelKind::Rf, std::move(feature_names), std::move(hp), seed),
          trees_(std::move(trees)) {}

    const std::vector<Tree>& trees() const { return trees_; }

    static std::unique_ptr<RandomForestModel> fit(const Matrix& X, const std::vector<double>& y,
                                                  const std::vector<std::string>& feature_names,
                                                  const Hyperparams& hp, std::uint64_t seed);

    static std::unique_ptr<Model> load(const nlohmann::json& j);

protected:
    std::vector<double> predict_impl(const Matrix& X) const override;
    void save_params(nlohmann::json& j) const override;

private:
    std::vector<Tree> trees_;
};

} // namespace wsbf

#endif // WSBF_RF_HPP
