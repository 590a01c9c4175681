#ifndef WSBF_MODEL_HPP
#define WSBF_MODEL_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wsbf/matrix.hpp"

namespace wsbf {

enum class ModelKind { Lstm, Rf, Svr, Gbt, Esn, Ses, Des, HwAdditive, HwMultiplicative };

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

using HpValue = std::variant<std::int64_t, double, std::string, bool>;
// std::map keeps keys ordered so serialization is deterministic
using Hyperparams = std::map<std::string, HpValue>;

std::int64_t hp_int(const Hyperparams& hp, const std::string& key);
double hp_double(const Hyperparams& hp, const std::string& key);
std::string hp_string(const Hyperparams& hp, const std::string& key);
bool hp_bool(const Hyperparams& hp, const std::string& key);
double hp_double_or(const Hyperparams& hp, const std::string& key, double fallback);

nlohmann::json hyperparams_to_json(const Hyperparams& hp);
Hyperparams hyperparams_from_json(const nlohmann::json& j);

/// A fitted model. Immutable after fit; predictions are repeatable.
class Model {
public:
    virtual ~Model() = default;

    ModelKind kind() const { return kind_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const Hyperparams& hyperparams() const { return hp_; }
    std::uint64_t seed() const { return seed_; }

    /// One prediction (kWh) per row. X columns must match feature_names() in
    /// width and order.
    std::vector<double> predict(const Matrix& X) const;

    /// Validating entry point: checks the column names against the stored
    /// feature list and reports any missing/extra names.
    std::vector<double> predict_named(const Matrix& X, const std::vector<std::string>& columns) const;

    /// Smoothing models ignore feature rows and forecast from their own state.
    virtual bool is_smoothing() const { return false; }
    virtual std::vector<double> forecast(int /*horizon*/) const;

    nlohmann::json to_json() const;
    static std::unique_ptr<Model> from_json(const nlohmann::json& j);

    void save_json(const std::string& path) const;
    static std::unique_ptr<Model> load_json(const std::string& path);

protected:
    Model(ModelKind kind, std::vector<std::string> feature_names, Hyperparams hp, std::uint64_t seed)
        : kind_(kind), feature_names_(std::move(feature_names)), hp_(std::move(hp)), seed_(seed) {}

    virtual std::vector<double> predict_impl(const Matrix& X) const = 0;
    virtual void save_params(nlohmann::json& j) const = 0;

private:
    ModelKind kind_;
    std::vector<std::string> feature_names_;
    Hyperparams hp_;
    std::uint64_t seed_;
};

/// Fits a feature-driven learner (lstm/rf/svr/gbt/esn). Scaling, where the
/// model kind needs it, happens inside; predictions always come back in kWh.
std::unique_ptr<Model> fit_model(ModelKind kind, const Matrix& X, const std::vector<double>& y,
                                 const std::vector<std::string>& feature_names,
                                 const Hyperparams& hp, std::uint64_t seed);

/// Fits a smoothing baseline on the raw series (kind: Ses, Des, HwAdditive,
/// HwMultiplicative).
std::unique_ptr<Model> fit_smoothing_model(ModelKind kind, const std::vector<double>& y, int period);

} // namespace wsbf

#endif // WSBF_MODEL_HPP
