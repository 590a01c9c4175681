#include "wsbf/model.hpp"

#include <algorithm>
#include <fstream>

#include "wsbf/errors.hpp"
#include "wsbf/esn.hpp"
#include "wsbf/gbt.hpp"
#include "wsbf/lstm.hpp"
#include "wsbf/rf.hpp"
#include "wsbf/smoothing.hpp"
#include "wsbf/svr.hpp"

namespace wsbf {

std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::Lstm: return "lstm";
        case ModelKind::Rf: return "rf";
        case ModelKind::Svr: return "svr";
        case ModelKind::Gbt: return "gbt";
        case ModelKind::Esn: return "esn";
        case ModelKind::Ses: return "ses";
        case ModelKind::Des: return "des";
        case ModelKind::HwAdditive: return "hw_additive";
        case ModelKind::HwMultiplicative: return "hw_multiplicative";
    }
    return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "lstm") return ModelKind::Lstm;
    if (name == "rf") return ModelKind::Rf;
    if (name == "svr") return ModelKind::Svr;
    if (name == "gbt" || name == "xgboost") return ModelKind::Gbt;
    if (name == "esn") return ModelKind::Esn;
    if (name == "ses") return ModelKind::Ses;
    if (name == "des") return ModelKind::Des;
    if (name == "hw_additive") return ModelKind::HwAdditive;
    if (name == "hw_multiplicative") return ModelKind::HwMultiplicative;
    throw ContractError("unknown model kind '" + name + "'");
}

namespace {

const HpValue& hp_get(const Hyperparams& hp, const std::string& key) {
    const auto it = hp.find(key);
    if (it == hp.end()) throw ContractError("missing hyperparameter '" + key + "'");
    return it->second;
}

} // namespace

std::int64_t hp_int(const Hyperparams& hp, const std::string& key) {
    const auto& v = hp_get(hp, key);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* d = std::get_if<double>(&v)) {
        const auto r = static_cast<std::int64_t>(*d);
        if (static_cast<double>(r) == *d) return r; // integral-valued float
    }
    throw ContractError("hyperparameter '" + key + "' is not an integer");
}

double hp_double(const Hyperparams& hp, const std::string& key) {
    const auto& v = hp_get(hp, key);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    throw ContractError("hyperparameter '" + key + "' is not numeric");
}

std::string hp_string(const Hyperparams& hp, const std::string& key) {
    const auto& v = hp_get(hp, key);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw ContractError("hyperparameter '" + key + "' is not a string");
}

bool hp_bool(const Hyperparams& hp, const std::string& key) {
    const auto& v = hp_get(hp, key);
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    throw ContractError("hyperparameter '" + key + "' is not a boolean");
}

double hp_double_or(const Hyperparams& hp, const std::string& key, double fallback) {
    return hp.count(key) ? hp_double(hp, key) : fallback;
}

nlohmann::json hyperparams_to_json(const Hyperparams& hp) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : hp)
        std::visit([&](const auto& v) { j[key] = v; }, value);
    return j;
}

Hyperparams hyperparams_from_json(const nlohmann::json& j) {
    Hyperparams hp;
    for (const auto& [key, value] : j.items()) {
        if (value.is_boolean())
            hp[key] = value.get<bool>();
        else if (value.is_number_integer())
            hp[key] = value.get<std::int64_t>();
        else if (value.is_number_float())
            hp[key] = value.get<double>();
        else if (value.is_string())
            hp[key] = value.get<std::string>();
        else
            throw ContractError("hyperparameter '" + key + "' has unsupported JSON type");
    }
    return hp;
}

std::vector<double> Model::predict(const Matrix& X) const {
    if (X.rows() == 0) return {};
    if (X.cols() != feature_names_.size())
        throw ContractError("predict: expected " + std::to_string(feature_names_.size()) +
                            " feature columns, got " + std::to_string(X.cols()));
    return predict_impl(X);
}

std::vector<double> Model::predict_named(const Matrix& X,
                                         const std::vector<std::string>& columns) const {
    if (columns != feature_names_) {
        std::string missing, extra;
        for (const auto& f : feature_names_)
            if (std::find(columns.begin(), columns.end(), f) == columns.end())
                missing += (missing.empty() ? "" : ", ") + f;
        for (const auto& c : columns)
            if (std::find(feature_names_.begin(), feature_names_.end(), c) == feature_names_.end())
                extra += (extra.empty() ? "" : ", ") + c;
        if (!missing.empty() || !extra.empty())
            throw ContractError("predict: feature mismatch; missing [" + missing + "], extra [" +
                                extra + "]");
        // same names, different order: reorder columns to the stored list
        std::vector<std::size_t> idx;
        idx.reserve(feature_names_.size());
        for (const auto& f : feature_names_)
            idx.push_back(static_cast<std::size_t>(
                std::find(columns.begin(), columns.end(), f) - columns.begin()));
        return predict(X.select_cols(idx));
    }
    return predict(X);
}

std::vector<double> Model::forecast(int) const {
    throw ContractError("forecast: model kind '" + model_kind_name(kind_) +
                        "' predicts from feature rows");
}

nlohmann::json Model::to_json() const {
    nlohmann::json j;
    j["kind"] = model_kind_name(kind_);
    j["features"] = feature_names_;
    j["hyperparams"] = hyperparams_to_json(hp_);
    j["seed"] = seed_;
    save_params(j);
    return j;
}

std::unique_ptr<Model> Model::from_json(const nlohmann::json& j) {
    switch (model_kind_from_name(j.at("kind").get<std::string>())) {
        case ModelKind::Rf: return RandomForestModel::load(j);
        case ModelKind::Gbt: return GradientBoostingModel::load(j);
        case ModelKind::Svr: return SvrModel::load(j);
        case ModelKind::Lstm: return LstmModel::load(j);
        case ModelKind::Esn: return EsnModel::load(j);
        default: return SmoothingModel::load(j);
    }
}

void Model::save_json(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << to_json().dump(2) << '\n';
}

std::unique_ptr<Model> Model::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

std::unique_ptr<Model> fit_model(ModelKind kind, const Matrix& X, const std::vector<double>& y,
                                 const std::vector<std::string>& feature_names,
                                 const Hyperparams& hp, std::uint64_t seed) {
    if (X.cols() != feature_names.size())
        throw ContractError("fit_model: feature name list does not match matrix width");
    switch (kind) {
        case ModelKind::Rf: return RandomForestModel::fit(X, y, feature_names, hp, seed);
        case ModelKind::Gbt: return GradientBoostingModel::fit(X, y, feature_names, hp, seed);
        case ModelKind::Svr: return SvrModel::fit(X, y, feature_names, hp, seed);
        case ModelKind::Lstm: return LstmModel::fit(X, y, feature_names, hp, seed);
        case ModelKind::Esn: return EsnModel::fit(X, y, feature_names, hp, seed);
        default:
            throw ContractError("fit_model: '" + model_kind_name(kind) +
                                "' is a smoothing baseline; use fit_smoothing_model");
    }
}

std::unique_ptr<Model> fit_smoothing_model(ModelKind kind, const std::vector<double>& y, int period) {
    return SmoothingModel::fit(kind, y, period);
}

} // namespace wsbf
