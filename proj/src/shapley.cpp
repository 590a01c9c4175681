#include "wsbf/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "wsbf/csv.hpp"
#include "wsbf/errors.hpp"
#include "wsbf/evaluation.hpp"
#include "wsbf/kernels.hpp"
#include "wsbf/rng.hpp"

namespace wsbf {

namespace {

double mean_of(const std::vector<double>& v) {
    return kernels::sum(v) / static_cast<double>(v.size());
}

std::uint64_t factorial(std::size_t n) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

double coalition_value(const PredictFn& predict, std::span<const double> instance,
                       const Matrix& background, std::uint32_t coalition_mask) {
    Matrix spliced = background;
    for (std::size_t f = 0; f < instance.size(); ++f)
        if (coalition_mask & (1u << f))
            for (std::size_t r = 0; r < spliced.rows(); ++r) spliced(r, f) = instance[f];
    return mean_of(predict(spliced));
}

std::vector<double> exact_shapley(const PredictFn& predict, std::span<const double> instance,
                                  const Matrix& background, std::size_t feature_limit) {
    const std::size_t m = instance.size();
    if (background.rows() == 0) throw ContractError("exact_shapley: empty background");
    if (background.cols() != m) throw ContractError("exact_shapley: background width mismatch");
    if (m > feature_limit || m > 25)
        throw ContractError("exact_shapley: " + std::to_string(m) +
                            " features exceed the enumeration limit of " +
                            std::to_string(feature_limit) + "; use sampled_shapley");

    // v for every coalition, then the weighted marginal sums
    const std::uint32_t n_masks = 1u << m;
    std::vector<double> v(n_masks);
    for (std::uint32_t mask = 0; mask < n_masks; ++mask)
        v[mask] = coalition_value(predict, instance, background, mask);

    std::vector<double> weight(m); // weight[s] = s!(m-s-1)!/m!
    const double m_fact = static_cast<double>(factorial(m));
    for (std::size_t s = 0; s < m; ++s)
        weight[s] = static_cast<double>(factorial(s)) * static_cast<double>(factorial(m - s - 1)) /
                    m_fact;

    std::vector<double> phi(m, 0.0);
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
        const auto size = static_cast<std::size_t>(std::popcount(mask));
        for (std::size_t f = 0; f < m; ++f) {
            if (mask & (1u << f)) continue;
            phi[f] += weight[size] * (v[mask | (1u << f)] - v[mask]);
        }
    }
    return phi;
}

namespace {

// Walks one feature ordering, accumulating the marginal contribution of each
// feature as it joins the coalition. The spliced matrix mutates column by
// column, so each step costs one batch prediction.
void walk_ordering(const PredictFn& predict, std::span<const double> instance,
                   const Matrix& background, double v_empty, const std::vector<std::size_t>& order,
                   std::vector<double>& marginals) {
    Matrix spliced = background;
    double v_prev = v_empty;
    for (const std::size_t f : order) {
        for (std::size_t r = 0; r < spliced.rows(); ++r) spliced(r, f) = instance[f];
        const double v_now = mean_of(predict(spliced));
        marginals[f] = v_now - v_prev;
        v_prev = v_now;
    }
}

} // namespace

SampledShapley sampled_shapley(const PredictFn& predict, std::span<const double> instance,
                               const Matrix& background, std::size_t n_permutations,
                               std::uint64_t seed) {
    const std::size_t m = instance.size();
    if (n_permutations < 1) throw ContractError("sampled_shapley: n_permutations must be >= 1");
    if (background.rows() == 0 || background.cols() != m)
        throw ContractError("sampled_shapley: bad background shape");

    const double v_empty = coalition_value(predict, instance, background, 0u);

    SampledShapley out;
    out.phi.assign(m, 0.0);
    out.std_error.assign(m, 0.0);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> marg(m), marg_rev(m);

    // enumeration fast path: averaging over all m! orderings is the Shapley
    // value itself
    if (m <= 8 && n_permutations >= factorial(m)) {
        std::size_t count = 0;
        do {
            walk_ordering(predict, instance, background, v_empty, order, marg);
            for (std::size_t f = 0; f < m; ++f) out.phi[f] += marg[f];
            ++count;
        } while (std::next_permutation(order.begin(), order.end()));
        for (auto& p : out.phi) p /= static_cast<double>(count);
        out.orderings_used = count;
        return out;
    }

    Rng rng(derive_seed(seed, "sampled-shapley"));
    const std::size_t n_pairs = (n_permutations + 1) / 2;
    Matrix pair_means(n_pairs, m);
    std::size_t used = 0;
    for (std::size_t pair = 0; pair < n_pairs; ++pair) {
        for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        walk_ordering(predict, instance, background, v_empty, order, marg);
        ++used;
        const bool take_reverse = used < n_permutations;
        if (take_reverse) {
            std::vector<std::size_t> reversed(order.rbegin(), order.rend());
            walk_ordering(predict, instance, background, v_empty, reversed, marg_rev);
            ++used;
            for (std::size_t f = 0; f < m; ++f) pair_means(pair, f) = 0.5 * (marg[f] + marg_rev[f]);
        } else {
            for (std::size_t f = 0; f < m; ++f) pair_means(pair, f) = marg[f];
        }
    }
    out.orderings_used = used;
    for (std::size_t f = 0; f < m; ++f) {
        const auto col = pair_means.col(f);
        out.phi[f] = mean_of(col);
        out.std_error[f] = sample_sd(col) / std::sqrt(static_cast<double>(n_pairs));
    }
    return out;
}

AttributionReport attribute(const PredictFn& predict, const Matrix& instances,
                            const Matrix& background, const std::vector<std::string>& feature_names,
                            const std::string& method, std::size_t n_permutations,
                            std::uint64_t seed) {
    if (instances.cols() != feature_names.size())
        throw ContractError("attribute: instance width does not match feature names");
    const std::size_t m = feature_names.size();
    std::string chosen = method;
    if (chosen == "auto") chosen = m <= 15 ? "exact" : "sampled";
    if (chosen != "exact" && chosen != "sampled")
        throw ContractError("attribute: method must be exact, sampled or auto");

    AttributionReport rep;
    rep.feature_names = feature_names;
    rep.instances = instances;
    rep.method = chosen;
    rep.n_permutations = chosen == "sampled" ? n_permutations : 0;
    rep.seed = seed;
    rep.base_value = mean_of(predict(background));
    rep.phi = Matrix(instances.rows(), m);
    rep.std_errors = Matrix(instances.rows(), m);
    rep.predictions = predict(instances);
    rep.background_note = std::to_string(background.rows()) + " background rows";

    for (std::size_t r = 0; r < instances.rows(); ++r) {
        if (chosen == "exact") {
            const auto phi = exact_shapley(predict, instances.row(r), background);
            for (std::size_t f = 0; f < m; ++f) rep.phi(r, f) = phi[f];
        } else {
            const auto s = sampled_shapley(predict, instances.row(r), background, n_permutations,
                                           derive_seed(seed, r));
            for (std::size_t f = 0; f < m; ++f) {
                rep.phi(r, f) = s.phi[f];
                rep.std_errors(r, f) = s.std_error[f];
            }
        }
    }
    return rep;
}

void AttributionReport::write_csv(const std::string& path) const {
    std::vector<std::string> header{"instance", "prediction"};
    for (const auto& f : feature_names) header.push_back("phi_" + f);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < phi.rows(); ++r) {
        std::vector<std::string> row{std::to_string(r), csv::format_double(predictions[r])};
        for (std::size_t f = 0; f < phi.cols(); ++f) row.push_back(csv::format_double(phi(r, f)));
        rows.push_back(std::move(row));
    }
    csv::write_file(path, header, rows);
}

std::vector<std::pair<std::string, double>> mean_abs_importance(
    const std::vector<AttributionReport>& reports) {
    if (reports.empty()) throw ContractError("mean_abs_importance: no reports");
    const auto& names = reports.front().feature_names;
    for (const auto& rep : reports)
        if (rep.feature_names != names)
            throw ContractError("mean_abs_importance: reports disagree on feature names");

    std::vector<double> importance(names.size(), 0.0);
    for (const auto& rep : reports) {
        for (std::size_t f = 0; f < names.size(); ++f) {
            double acc = 0.0;
            for (std::size_t r = 0; r < rep.phi.rows(); ++r) acc += std::fabs(rep.phi(r, f));
            importance[f] += acc / static_cast<double>(rep.phi.rows());
        }
    }
    for (auto& v : importance) v /= static_cast<double>(reports.size());

    std::vector<std::pair<std::string, double>> ranking;
    ranking.reserve(names.size());
    for (std::size_t f = 0; f < names.size(); ++f) ranking.emplace_back(names[f], importance[f]);
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranking;
}

Matrix subsample_background(const Matrix& rows, std::size_t cap, std::uint64_t seed) {
    if (rows.rows() <= cap) return rows;
    Rng rng(derive_seed(seed, "shap-background"));
    std::vector<std::size_t> idx(rows.rows());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
    idx.resize(cap);
    std::sort(idx.begin(), idx.end()); // keep row order for reproducibility of reports
    return rows.select_rows(idx);
}

EliminationTrace backward_elimination(const DesignMatrix& dm, const Hyperparams& rf_hp,
                                      const Hyperparams& gbt_hp, std::size_t cap,
                                      std::uint64_t seed, const EliminationOptions& options) {
    const std::size_t m = dm.feature_names.size();
    if (cap >= m) throw ContractError("backward_elimination: cap must be below the feature count");
    if (dm.rows() <= options.validation_rows)
        throw ContractError("backward_elimination: need more rows than the validation slice");

    const std::size_t n_fit = dm.rows() - options.validation_rows;
    const DesignMatrix fit_dm = dm.slice_rows(0, n_fit);
    const DesignMatrix val_dm = dm.slice_rows(n_fit, dm.rows());

    const std::uint64_t rf_seed = derive_seed(seed, "elim-rf");
    const std::uint64_t gbt_seed = derive_seed(seed, "elim-gbt");

    // ranking computed once on the full feature set
    EliminationTrace trace;
    {
        const auto rf = fit_model(ModelKind::Rf, fit_dm.X, fit_dm.y, fit_dm.feature_names, rf_hp,
                                  rf_seed);
        const auto gbt = fit_model(ModelKind::Gbt, fit_dm.X, fit_dm.y, fit_dm.feature_names,
                                   gbt_hp, gbt_seed);
        const Matrix background = subsample_background(fit_dm.X, options.background_cap, seed);
        const std::string method = m <= 15 ? "exact" : "sampled";
        const auto explain = [&](const Model& model) {
            PredictFn fn = [&](const Matrix& X) { return model.predict(X); };
            return attribute(fn, fit_dm.X, background, fit_dm.feature_names, method,
                             options.n_permutations, derive_seed(seed, "elim-shap"));
        };
        const AttributionReport rf_rep = explain(*rf);
        const AttributionReport gbt_rep = explain(*gbt);
        trace.ranking = mean_abs_importance({rf_rep, gbt_rep});
    }

    auto evaluate = [&](const std::vector<std::string>& features) -> std::pair<double, double> {
        const DesignMatrix fit_sub = fit_dm.with_features(features);
        const DesignMatrix val_sub = val_dm.with_features(features);
        const auto rf = fit_model(ModelKind::Rf, fit_sub.X, fit_sub.y, features, rf_hp, rf_seed);
        const auto gbt = fit_model(ModelKind::Gbt, fit_sub.X, fit_sub.y, features, gbt_hp, gbt_seed);
        return {mae(val_sub.y, rf->predict(val_sub.X)), mae(val_sub.y, gbt->predict(val_sub.X))};
    };

    // keep design-matrix column order for the surviving features at each step
    std::vector<std::string> features = dm.feature_names;
    std::vector<std::vector<std::string>> feature_sets;
    for (std::size_t step = 0; step <= cap; ++step) {
        EliminationStep record;
        if (step > 0) {
            // least important remaining feature: walk the ranking from the tail
            const std::string& victim = trace.ranking[m - step].first;
            features.erase(std::remove(features.begin(), features.end(), victim), features.end());
            record.removed = victim;
        }
        record.remaining = features.size();
        const auto [rf_mae, gbt_mae] = evaluate(features);
        record.mae_rf = rf_mae;
        record.mae_gbt = gbt_mae;
        record.mae_avg = 0.5 * (rf_mae + gbt_mae);
        trace.steps.push_back(record);
        feature_sets.push_back(features);
    }

    trace.chosen_step = 0;
    for (std::size_t s = 1; s < trace.steps.size(); ++s)
        if (trace.steps[s].mae_avg < trace.steps[trace.chosen_step].mae_avg) trace.chosen_step = s;
    trace.final_features = feature_sets[trace.chosen_step];
    return trace;
}

void EliminationTrace::write_csv(const std::string& path) const {
    std::vector<std::string> header{"step", "removed", "remaining", "mae_rf", "mae_gbt", "mae_avg",
                                    "chosen"};
    std::vector<std::vector<std::string>> rows;
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const auto& st = steps[s];
        rows.push_back({std::to_string(s), st.removed, std::to_string(st.remaining),
                        csv::format_double(st.mae_rf), csv::format_double(st.mae_gbt),
                        csv::format_double(st.mae_avg), s == chosen_step ? "1" : "0"});
    }
    csv::write_file(path, header, rows);
}

ForcePlotData force_plot_data(const AttributionReport& report) {
    ForcePlotData data;
    data.base_value = report.base_value;
    const std::size_t m = report.feature_names.size();
    std::vector<ForcePlotEntry> entries(m);
    for (std::size_t f = 0; f < m; ++f) {
        entries[f].feature = report.feature_names[f];
        entries[f].mean_phi = mean_of(report.phi.col(f));
        entries[f].mean_value = mean_of(report.instances.col(f));
    }
    std::sort(entries.begin(), entries.end(), [](const ForcePlotEntry& a, const ForcePlotEntry& b) {
        const double ma = std::fabs(a.mean_phi), mb = std::fabs(b.mean_phi);
        if (ma != mb) return ma > mb;
        return a.feature < b.feature;
    });
    data.endpoint = data.base_value;
    for (const auto& e : entries) data.endpoint += e.mean_phi;
    data.entries = std::move(entries);
    return data;
}

void ForcePlotData::write_csv(const std::string& path) const {
    std::vector<std::string> header{"feature", "mean_phi", "mean_value", "base_value", "endpoint"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : entries)
        rows.push_back({e.feature, csv::format_double(e.mean_phi), csv::format_double(e.mean_value),
                        csv::format_double(base_value), csv::format_double(endpoint)});
    csv::write_file(path, header, rows);
}

} // namespace wsbf
