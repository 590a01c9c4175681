#include "wsbf/rf.hpp"

#include "wsbf/errors.hpp"
#include "wsbf/rng.hpp"

namespace wsbf {

std::unique_ptr<RandomForestModel> RandomForestModel::fit(const Matrix& X, const std::vector<double>& y,
                                                          const std::vector<std::string>& feature_names,
                                                          const Hyperparams& hp, std::uint64_t seed) {
    if (X.rows() == 0 || X.rows() != y.size()) throw ContractError("rf: bad training shape");
    const auto n_estimators = hp_int(hp, "n_estimators");
    CartParams cart;
    cart.max_depth = static_cast<int>(hp_int(hp, "max_depth"));
    cart.min_samples_split = static_cast<int>(hp_int(hp, "min_samples_split"));
    cart.min_samples_leaf = static_cast<int>(hp_int(hp, "min_samples_leaf"));
    if (n_estimators < 1) throw ContractError("rf: n_estimators must be >= 1");

    const std::size_t n = X.rows();
    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(n_estimators));
    for (std::int64_t t = 0; t < n_estimators; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) r = rng.index(n);
        trees.push_back(build_cart(X, y, rows, cart));
    }
    return std::make_unique<RandomForestModel>(feature_names, hp, seed, std::move(trees));
}

std::vector<double> RandomForestModel::predict_impl(const Matrix& X) const {
    std::vector<double> out(X.rows(), 0.0);
    for (std::size_t r = 0; r < X.rows(); ++r) {
        double acc = 0.0;
        for (const auto& tree : trees_) acc += tree.predict_row(X.row(r));
        out[r] = acc / static_cast<double>(trees_.size());
    }
    return out;
}

void RandomForestModel::save_params(nlohmann::json& j) const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : trees_) arr.push_back(t.to_json());
    j["trees"] = std::move(arr);
}

std::unique_ptr<Model> RandomForestModel::load(const nlohmann::json& j) {
    std::vector<Tree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(Tree::from_json(t));
    return std::make_unique<RandomForestModel>(
        j.at("features").get<std::vector<std::string>>(),
        hyperparams_from_json(j.at("hyperparams")), j.at("seed").get<std::uint64_t>(),
        std::move(trees));
}

} // namespace wsbf
