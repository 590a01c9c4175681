#include "wsbf/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wsbf/errors.hpp"

namespace wsbf {

SearchSpace::SearchSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
    std::set<std::string> seen;
    for (const auto& d : dims_) {
        if (!seen.insert(d.name).second)
            throw ContractError("search space: duplicate dimension '" + d.name + "'");
        if (const auto* ir = std::get_if<IntRange>(&d.domain)) {
            if (ir->lo > ir->hi) throw ContractError("search space: empty int range " + d.name);
        } else if (const auto* fr = std::get_if<FloatRange>(&d.domain)) {
            if (fr->lo > fr->hi) throw ContractError("search space: empty float range " + d.name);
        } else if (const auto* cat = std::get_if<Categorical>(&d.domain)) {
            if (cat->tokens.empty())
                throw ContractError("search space: empty categorical " + d.name);
            std::set<std::string> toks(cat->tokens.begin(), cat->tokens.end());
            if (toks.size() != cat->tokens.size())
                throw ContractError("search space: duplicate tokens in " + d.name);
        }
    }
}

Hyperparams SearchSpace::sample(Rng& rng) const {
    Hyperparams hp;
    for (const auto& d : dims_) {
        if (const auto* ir = std::get_if<IntRange>(&d.domain))
            hp[d.name] = rng.uniform_int(ir->lo, ir->hi);
        else if (const auto* fr = std::get_if<FloatRange>(&d.domain))
            hp[d.name] = rng.uniform(fr->lo, fr->hi);
        else if (const auto* cat = std::get_if<Categorical>(&d.domain))
            hp[d.name] = cat->tokens[rng.index(cat->tokens.size())];
        else
            hp[d.name] = rng.coin();
    }
    return hp;
}

void SearchSpace::resample_dimension(Hyperparams& hp, std::size_t dim, Rng& rng) const {
    const auto& d = dims_.at(dim);
    if (const auto* ir = std::get_if<IntRange>(&d.domain))
        hp[d.name] = rng.uniform_int(ir->lo, ir->hi);
    else if (const auto* fr = std::get_if<FloatRange>(&d.domain))
        hp[d.name] = rng.uniform(fr->lo, fr->hi);
    else if (const auto* cat = std::get_if<Categorical>(&d.domain))
        hp[d.name] = cat->tokens[rng.index(cat->tokens.size())];
    else
        hp[d.name] = rng.coin();
}

bool SearchSpace::contains(const Hyperparams& hp) const {
    if (hp.size() != dims_.size()) return false;
    for (const auto& d : dims_) {
        const auto it = hp.find(d.name);
        if (it == hp.end()) return false;
        const HpValue& v = it->second;
        if (const auto* ir = std::get_if<IntRange>(&d.domain)) {
            const auto* i = std::get_if<std::int64_t>(&v);
            if (!i || *i < ir->lo || *i > ir->hi) return false;
        } else if (const auto* fr = std::get_if<FloatRange>(&d.domain)) {
            const auto* f = std::get_if<double>(&v);
            if (!f || *f < fr->lo || *f > fr->hi) return false;
        } else if (const auto* cat = std::get_if<Categorical>(&d.domain)) {
            const auto* s = std::get_if<std::string>(&v);
            if (!s || std::find(cat->tokens.begin(), cat->tokens.end(), *s) == cat->tokens.end())
                return false;
        } else {
            if (!std::get_if<bool>(&v)) return false;
        }
    }
    return true;
}

double SearchSpace::relaxed_lo(std::size_t dim) const {
    const auto& d = dims_.at(dim);
    if (const auto* ir = std::get_if<IntRange>(&d.domain)) return static_cast<double>(ir->lo);
    if (const auto* fr = std::get_if<FloatRange>(&d.domain)) return fr->lo;
    return 0.0;
}

double SearchSpace::relaxed_hi(std::size_t dim) const {
    const auto& d = dims_.at(dim);
    if (const auto* ir = std::get_if<IntRange>(&d.domain)) return static_cast<double>(ir->hi);
    if (const auto* fr = std::get_if<FloatRange>(&d.domain)) return fr->hi;
    if (const auto* cat = std::get_if<Categorical>(&d.domain))
        return static_cast<double>(cat->tokens.size() - 1);
    return 1.0;
}

Hyperparams SearchSpace::decode(const std::vector<double>& position) const {
    if (position.size() != dims_.size())
        throw ContractError("search space decode: dimension count mismatch");
    Hyperparams hp;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        const auto& d = dims_[k];
        const double x = std::clamp(position[k], relaxed_lo(k), relaxed_hi(k));
        if (const auto* ir = std::get_if<IntRange>(&d.domain)) {
            const auto i = static_cast<std::int64_t>(std::llround(x));
            hp[d.name] = std::clamp(i, ir->lo, ir->hi);
        } else if (std::get_if<FloatRange>(&d.domain)) {
            hp[d.name] = x;
        } else if (const auto* cat = std::get_if<Categorical>(&d.domain)) {
            auto i = static_cast<std::size_t>(std::llround(x));
            i = std::min(i, cat->tokens.size() - 1);
            hp[d.name] = cat->tokens[i];
        } else {
            hp[d.name] = x >= 0.5;
        }
    }
    return hp;
}

SearchSpace default_search_space(ModelKind kind) {
    switch (kind) {
        case ModelKind::Lstm:
            return SearchSpace({
                {"units", IntRange{1, 300}},
                {"epochs", IntRange{1, 100}},
                {"batch_size", IntRange{1, 300}},
                {"activation",
                 Categorical{{"linear", "mish", "sigmoid", "softmax", "softplus", "softsign",
                              "tanh"}}},
                {"bias", BooleanDim{}},
            });
        case ModelKind::Rf:
            return SearchSpace({
                {"n_estimators", IntRange{10, 300}},
                {"max_depth", IntRange{10, 300}},
                {"min_samples_split", IntRange{2, 50}},
                {"min_samples_leaf", IntRange{1, 50}},
            });
        case ModelKind::Svr:
            return SearchSpace({
                {"C", FloatRange{1e-5, 2e4}},
                {"epsilon", FloatRange{0.001, 1.0}},
                {"kernel", Categorical{{"poly", "rbf", "sigmoid"}}},
            });
        case ModelKind::Gbt:
            // the booster stays the tree booster, so it is not a dimension
            return SearchSpace({
                {"n_estimators", IntRange{1, 300}},
                {"max_depth", IntRange{1, 300}},
                {"lambda", FloatRange{0.0, 100.0}},
                {"alpha", FloatRange{0.0, 100.0}},
            });
        case ModelKind::Esn:
            return SearchSpace({
                {"reservoirs", IntRange{2, 1000}},
                {"sparsity", FloatRange{0.1, 0.5}},
                {"spectral_radius", FloatRange{0.1, 0.9}},
                {"noise", FloatRange{0.0001, 0.8}},
            });
        default:
            throw ContractError("no search space for model kind '" + model_kind_name(kind) + "'");
    }
}

Hyperparams default_hyperparams(ModelKind kind) {
    switch (kind) {
        case ModelKind::Lstm:
            return {{"units", std::int64_t{115}},
                    {"epochs", std::int64_t{98}},
                    {"batch_size", std::int64_t{117}},
                    {"activation", std::string{"tanh"}},
                    {"bias", true}};
        case ModelKind::Rf:
            return {{"n_estimators", std::int64_t{13}},
                    {"max_depth", std::int64_t{281}},
                    {"min_samples_split", std::int64_t{13}},
                    {"min_samples_leaf", std::int64_t{2}}};
        case ModelKind::Svr:
            return {{"C", 1465.0}, {"epsilon", 1.0}, {"kernel", std::string{"sigmoid"}}};
        case ModelKind::Gbt:
            return {{"n_estimators", std::int64_t{25}},
                    {"max_depth", std::int64_t{82}},
                    {"booster", std::string{"gbtree"}},
                    {"lambda", 0.151538},
                    {"alpha", 97.963749}};
        case ModelKind::Esn:
            return {{"reservoirs", std::int64_t{386}},
                    {"sparsity", 0.30},
                    {"spectral_radius", 0.54},
                    {"noise", 0.60}};
        default:
            throw ContractError("no default hyperparams for '" + model_kind_name(kind) + "'");
    }
}

} // namespace wsbf
