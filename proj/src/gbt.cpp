#include "wsbf/gbt.hpp"

#include <numeric>

#include "wsbf/errors.hpp"
#include "wsbf/kernels.hpp"

namespace wsbf {

std::unique_ptr<GradientBoostingModel> GradientBoostingModel::fit(
    const Matrix& X, const std::vector<double>& y, const std::vector<std::string>& feature_names,
    const Hyperparams& hp, std::uint64_t seed) {
    if (X.rows() == 0 || X.rows() != y.size()) throw ContractError("gbt: bad training shape");
    const auto n_estimators = hp_int(hp, "n_estimators");
    if (n_estimators < 1) throw ContractError("gbt: n_estimators must be >= 1");
    if (hp.count("booster") && hp_string(hp, "booster") != "gbtree")
        throw ContractError("gbt: only the tree booster is supported");

    XgbTreeParams tp;
    tp.max_depth = static_cast<int>(hp_int(hp, "max_depth"));
    tp.lambda = hp_double(hp, "lambda");
    tp.alpha = hp_double(hp, "alpha");
    const double eta = hp_double_or(hp, "learning_rate", 0.3);

    const std::size_t n = X.rows();
    const double base = kernels::sum(y) / static_cast<double>(n);

    std::vector<double> preds(n, base);
    std::vector<double> grad(n), hess(n, 1.0);
    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);

    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(n_estimators));
    for (std::int64_t m = 0; m < n_estimators; ++m) {
        for (std::size_t i = 0; i < n; ++i) grad[i] = preds[i] - y[i];
        Tree tree = build_xgb_tree(X, grad, hess, all_rows, tp);
        for (std::size_t i = 0; i < n; ++i) preds[i] += eta * tree.predict_row(X.row(i));
        trees.push_back(std::move(tree));
    }
    return std::make_unique<GradientBoostingModel>(feature_names, hp, seed, base, eta,
                                                   std::move(trees));
}

std::vector<double> GradientBoostingModel::predict_impl(const Matrix& X) const {
    std::vector<double> out(X.rows(), base_score_);
    for (std::size_t r = 0; r < X.rows(); ++r)
        for (const auto& tree : trees_) out[r] += learning_rate_ * tree.predict_row(X.row(r));
    return out;
}

void GradientBoostingModel::save_params(nlohmann::json& j) const {
    j["base_score"] = base_score_;
    j["learning_rate"] = learning_rate_;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : trees_) arr.push_back(t.to_json());
    j["trees"] = std::move(arr);
}

std::unique_ptr<Model> GradientBoostingModel::load(const nlohmann::json& j) {
    std::vector<Tree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(Tree::from_json(t));
    return std::make_unique<GradientBoostingModel>(
        j.at("features").get<std::vector<std::string>>(),
        hyperparams_from_json(j.at("hyperparams")), j.at("seed").get<std::uint64_t>(),
        j.at("base_score").get<double>(), j.at("learning_rate").get<double>(), std::move(trees));
}

} // namespace wsbf
