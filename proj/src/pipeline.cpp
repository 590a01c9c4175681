#include "wsbf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "wsbf/csv.hpp"
#include "wsbf/errors.hpp"
#include "wsbf/rng.hpp"

namespace wsbf {

namespace fs = std::filesystem;

std::vector<std::string> default_climate_columns() {
    return {"avg_temperature",
            "max_temperature_absolute",
            "max_temperature_avg",
            "max_temperature_avg_absolute",
            "min_temperature_absolute",
            "min_temperature_avg",
            "min_temperature_absolute_avg",
            "rain",
            "relative_humidity",
            "solar_radiation",
            "wind_max_speed",
            "wind_max_speed_absolute",
            "wind_max_speed_avg",
            "wind_max_speed_absolute_avg"};
}

namespace {

template <typename T>
T field(const nlohmann::json& j, const std::string& key, const T& fallback,
        const std::string& origin) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ContractError(origin + ": invalid value for field '" + key + "'");
    }
}

void require(bool ok, const std::string& origin, const std::string& message) {
    if (!ok) throw ContractError(origin + ": " + message);
}

} // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::string& origin) {
    RunConfig c;
    require(j.contains("input_csv"), origin, "missing required field 'input_csv'");
    c.input_csv = field<std::string>(j, "input_csv", "", origin);
    c.dataset = field<std::string>(j, "dataset", c.dataset, origin);
    c.lags = field<std::vector<int>>(j, "lags", c.lags, origin);
    c.horizon = field<int>(j, "horizon", c.horizon, origin);
    c.folds = field<int>(j, "folds", c.folds, origin);
    require(c.horizon >= 1, origin, "'horizon' must be >= 1");
    require(c.folds >= 1, origin, "'folds' must be >= 1");
    for (const int k : c.lags) require(k >= 1, origin, "'lags' entries must be positive");
    if (j.contains("covid_start")) c.covid_start = Period::parse(j.at("covid_start").get<std::string>());
    if (j.contains("covid_end")) c.covid_end = Period::parse(j.at("covid_end").get<std::string>());
    c.climate_columns =
        field<std::vector<std::string>>(j, "climate_columns", default_climate_columns(), origin);
    c.features = field<std::vector<std::string>>(j, "features", c.features, origin);

    if (j.contains("learners")) {
        require(j.at("learners").is_object(), origin, "'learners' must be an object");
        for (const auto& [name, params] : j.at("learners").items()) {
            model_kind_from_name(name); // validates the key
            c.learners[name] = hyperparams_from_json(params);
        }
    }

    if (j.contains("tune")) {
        const auto& t = j.at("tune");
        c.tune.optimizer = field<std::string>(t, "optimizer", c.tune.optimizer, origin);
        require(c.tune.optimizer == "ga" || c.tune.optimizer == "pso", origin,
                "'tune.optimizer' must be 'ga' or 'pso'");
        c.tune.population = field<int>(t, "population", c.tune.population, origin);
        c.tune.iterations = field<int>(t, "iterations", c.tune.iterations, origin);
        require(c.tune.population >= 2, origin, "'tune.population' must be >= 2");
        require(c.tune.iterations >= 1, origin, "'tune.iterations' must be >= 1");
        c.tune.mutation_rate = field<double>(t, "mutation_rate", c.tune.mutation_rate, origin);
        c.tune.inertia = field<double>(t, "inertia", c.tune.inertia, origin);
        c.tune.cognitive = field<double>(t, "cognitive", c.tune.cognitive, origin);
        c.tune.social = field<double>(t, "social", c.tune.social, origin);
        c.tune.seeds = field<std::vector<std::uint64_t>>(t, "seeds", c.tune.seeds, origin);
        require(!c.tune.seeds.empty(), origin, "'tune.seeds' must be nonempty");
    }

    if (j.contains("wsb")) {
        const auto& w = j.at("wsb");
        c.wsb.w = field<double>(w, "w", c.wsb.w, origin);
        require(c.wsb.w >= 0.0 && c.wsb.w <= 1.0, origin, "'wsb.w' must be in [0, 1]");
        c.wsb.tune = field<bool>(w, "tune", c.wsb.tune, origin);
        c.wsb.samples = field<int>(w, "samples", c.wsb.samples, origin);
        require(c.wsb.samples >= 1, origin, "'wsb.samples' must be >= 1");
        c.wsb.strong = field<std::string>(w, "strong", c.wsb.strong, origin);
        c.wsb.weak = field<std::vector<std::string>>(w, "weak", c.wsb.weak, origin);
        require(!c.wsb.weak.empty(), origin, "'wsb.weak' must name at least one model");
        c.wsb.tune_on_test = field<bool>(w, "tune_on_test", c.wsb.tune_on_test, origin);
        model_kind_from_name(c.wsb.strong);
        for (const auto& name : c.wsb.weak) model_kind_from_name(name);
    }

    if (j.contains("shap")) {
        const auto& s = j.at("shap");
        c.shap.method = field<std::string>(s, "method", c.shap.method, origin);
        require(c.shap.method == "auto" || c.shap.method == "exact" || c.shap.method == "sampled",
                origin, "'shap.method' must be auto, exact or sampled");
        c.shap.permutations = field<int>(s, "permutations", c.shap.permutations, origin);
        c.shap.background_cap = field<int>(s, "background_cap", c.shap.background_cap, origin);
        c.shap.elimination_cap = field<int>(s, "elimination_cap", c.shap.elimination_cap, origin);
        c.shap.instances_cap = field<int>(s, "instances_cap", c.shap.instances_cap, origin);
        require(c.shap.permutations >= 1, origin, "'shap.permutations' must be >= 1");
        require(c.shap.background_cap >= 1, origin, "'shap.background_cap' must be >= 1");
        require(c.shap.elimination_cap >= 0, origin, "'shap.elimination_cap' must be >= 0");
    }

    c.out_dir = field<std::string>(j, "out_dir", c.out_dir, origin);
    c.seed = field<std::uint64_t>(j, "seed", c.seed, origin);
    c.threads = field<int>(j, "threads", c.threads, origin);
    return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return from_json(j, path);
}

std::string RunConfig::command_dir(const std::string& command) const {
    return (fs::path(out_dir) / dataset / command).string();
}

std::vector<std::string> csv_schema(const RunConfig& config) {
    std::vector<std::string> schema{"date", "consumption_kwh"};
    schema.insert(schema.end(), config.climate_columns.begin(), config.climate_columns.end());
    return schema;
}

TimeSeriesDataset load_dataset(const RunConfig& config) {
    auto ds = load_csv(config.input_csv, csv_schema(config));
    ds.meta = config.dataset;
    return impute_same_month_mean(ds);
}

PreparedData prepare(const RunConfig& config) {
    PreparedData data;
    data.dataset = load_dataset(config);
    data.matrix = build_design_matrix(data.dataset, config.lags, config.covid_start,
                                      config.covid_end);
    return data;
}

namespace {

std::string ensure_dir(const RunConfig& config, const std::string& command) {
    const std::string dir = config.command_dir(command);
    fs::create_directories(dir);
    return dir;
}

std::string join_path(const std::string& dir, const std::string& file) {
    return (fs::path(dir) / file).string();
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << j.dump(2) << '\n';
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// Dataset restricted to its first n periods.
TimeSeriesDataset truncate_dataset(const TimeSeriesDataset& ds, std::size_t n) {
    TimeSeriesDataset out;
    out.meta = ds.meta;
    out.exog_names = ds.exog_names;
    out.periods.assign(ds.periods.begin(), ds.periods.begin() + static_cast<std::ptrdiff_t>(n));
    out.target.assign(ds.target.begin(), ds.target.begin() + static_cast<std::ptrdiff_t>(n));
    out.exog.resize(ds.exog.size());
    for (std::size_t c = 0; c < ds.exog.size(); ++c)
        out.exog[c].assign(ds.exog[c].begin(), ds.exog[c].begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

} // namespace

Hyperparams resolve_hyperparams(const RunConfig& config, ModelKind kind) {
    const std::string name = model_kind_name(kind);
    const auto it = config.learners.find(name);
    if (it != config.learners.end()) {
        // overrides sit on top of the defaults so partial configs work
        Hyperparams hp = default_hyperparams(kind);
        for (const auto& [key, value] : it->second) hp[key] = value;
        return hp;
    }
    const std::string tuned = join_path(config.command_dir("tune-" + name), "best_params.json");
    if (fs::exists(tuned)) {
        std::ifstream in(tuned);
        nlohmann::json j;
        in >> j;
        return hyperparams_from_json(j.at("hyperparams"));
    }
    return default_hyperparams(kind);
}

StatsOutput cmd_stats(const RunConfig& config) {
    const auto ds = load_dataset(config);
    StatsOutput out;
    out.stats = summary_stats(ds.target);
    const std::string dir = ensure_dir(config, "stats");
    out.csv_path = join_path(dir, "stats.csv");
    csv::write_file(out.csv_path, {"n", "min", "max", "median", "mean", "sd"},
                    {{std::to_string(out.stats.n), csv::format_double(out.stats.min),
                      csv::format_double(out.stats.max), csv::format_double(out.stats.median),
                      format_fixed(out.stats.mean, 2), format_fixed(out.stats.sd, 2)}});
    return out;
}

DiagnoseOutput cmd_diagnose(const RunConfig& config) {
    const auto ds = load_dataset(config);
    const int max_lag = std::min<int>(24, static_cast<int>(ds.size()) - 1);
    DiagnoseOutput out;
    out.report = diagnostics(ds, max_lag);
    out.dir = ensure_dir(config, "diagnose");

    {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < out.report.acf_values.size(); ++k)
            rows.push_back({std::to_string(k), csv::format_double(out.report.acf_values[k]),
                            csv::format_double(out.report.band)});
        csv::write_file(join_path(out.dir, "acf.csv"), {"lag", "acf", "band"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < out.report.pacf_values.size(); ++k)
            rows.push_back({std::to_string(k), csv::format_double(out.report.pacf_values[k]),
                            csv::format_double(out.report.band)});
        csv::write_file(join_path(out.dir, "pacf.csv"), {"lag", "pacf", "band"}, rows);
    }
    {
        // conclusions follow the standard conventions: KPSS statistic vs the
        // 10% critical value, p-values vs 0.05
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"kpss", csv::format_double(out.report.kpss_stat),
                        csv::format_double(out.report.kpss_critical),
                        out.report.kpss_level_stationary ? "level stationarity not rejected"
                                                         : "level stationarity rejected"});
        rows.push_back({"mann_kendall", csv::format_double(out.report.mk.z),
                        csv::format_double(out.report.mk.p),
                        out.report.mk_trend ? "monotonic trend detected" : "no significant trend"});
        rows.push_back({"kruskal_wallis", csv::format_double(out.report.kw.h),
                        csv::format_double(out.report.kw.p),
                        out.report.kw_seasonal ? "seasonal month effect detected"
                                               : "no significant month effect"});
        csv::write_file(join_path(out.dir, "tests.csv"),
                        {"test", "statistic", "reference", "conclusion"}, rows);
    }
    nlohmann::json j{{"n", out.report.n},
                     {"kpss_stat", out.report.kpss_stat},
                     {"kpss_critical", out.report.kpss_critical},
                     {"kpss_level_stationary", out.report.kpss_level_stationary},
                     {"mann_kendall_s", out.report.mk.s},
                     {"mann_kendall_z", out.report.mk.z},
                     {"mann_kendall_p", out.report.mk.p},
                     {"trend", out.report.mk_trend},
                     {"kruskal_wallis_h", out.report.kw.h},
                     {"kruskal_wallis_df", out.report.kw.df},
                     {"kruskal_wallis_p", out.report.kw.p},
                     {"seasonal", out.report.kw_seasonal}};
    write_json_file(join_path(out.dir, "diagnostics.json"), j);
    return out;
}

SelectFeaturesOutput cmd_select_features(const RunConfig& config) {
    const PreparedData data = prepare(config);
    const SplitPlan split = hybrid_split(data.matrix.rows(), config.horizon, config.folds);
    const DesignMatrix train = data.matrix.slice_rows(0, split.train.size());

    EliminationOptions options;
    options.validation_rows = static_cast<std::size_t>(config.horizon);
    options.n_permutations = static_cast<std::size_t>(config.shap.permutations);
    options.background_cap = static_cast<std::size_t>(config.shap.background_cap);

    SelectFeaturesOutput out;
    out.trace = backward_elimination(train, resolve_hyperparams(config, ModelKind::Rf),
                                     resolve_hyperparams(config, ModelKind::Gbt),
                                     static_cast<std::size_t>(config.shap.elimination_cap),
                                     derive_seed(config.seed, "select-features"), options);
    out.dir = ensure_dir(config, "select-features");
    out.trace.write_csv(join_path(out.dir, "elimination.csv"));
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& [feature, importance] : out.trace.ranking)
            rows.push_back({feature, csv::format_double(importance)});
        csv::write_file(join_path(out.dir, "importance.csv"), {"feature", "mean_abs_shap"}, rows);
    }
    write_json_file(join_path(out.dir, "selected_features.json"),
                    nlohmann::json{{"features", out.trace.final_features},
                                   {"chosen_step", out.trace.chosen_step}});
    return out;
}

TuneOutput cmd_tune(const RunConfig& config, ModelKind kind) {
    const PreparedData data = prepare(config);
    DesignMatrix matrix = data.matrix;
    if (!config.features.empty()) matrix = matrix.with_features(config.features);
    const SplitPlan split = hybrid_split(matrix.rows(), config.horizon, config.folds);
    const DesignMatrix train = matrix.slice_rows(0, split.train.size());

    const SearchSpace space = default_search_space(kind);
    const Objective objective = cv_objective_for_model(
        kind, train, config.folds, derive_seed(config.seed, "cv-" + model_kind_name(kind)));

    const auto run = [&](std::uint64_t seed) {
        if (config.tune.optimizer == "pso") {
            PsoConfig pc;
            pc.particles = config.tune.population;
            pc.iterations = config.tune.iterations;
            pc.inertia = config.tune.inertia;
            pc.cognitive = config.tune.cognitive;
            pc.social = config.tune.social;
            pc.threads = config.threads;
            return pso_optimize(objective, space, pc, seed);
        }
        GaConfig gc;
        gc.population = config.tune.population;
        gc.iterations = config.tune.iterations;
        gc.mutation_rate = config.tune.mutation_rate;
        gc.threads = config.threads;
        return ga_optimize(objective, space, gc, seed);
    };

    TuneOutput out;
    out.campaign = multi_seed_campaign(run, config.tune.seeds);

    std::size_t best_run = 0;
    for (std::size_t r = 1; r < out.campaign.runs.size(); ++r)
        if (out.campaign.runs[r].best.fitness < out.campaign.runs[best_run].best.fitness)
            best_run = r;
    out.best = out.campaign.runs[best_run].best.values;
    out.best_fitness = out.campaign.runs[best_run].best.fitness;

    const std::string name = model_kind_name(kind);
    out.dir = ensure_dir(config, "tune-" + name);
    std::vector<FitnessTrace> traces;
    for (const auto& r : out.campaign.runs) traces.push_back(r.trace);
    write_traces_csv(join_path(out.dir, "trace.csv"), traces);
    {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < out.campaign.mean_best_so_far.size(); ++i)
            rows.push_back({std::to_string(i + 1),
                            csv::format_double(out.campaign.mean_best_so_far[i])});
        csv::write_file(join_path(out.dir, "trace_mean.csv"), {"iteration", "mean_best_so_far"},
                        rows);
    }
    write_json_file(join_path(out.dir, "best_params.json"),
                    nlohmann::json{{"model", name},
                                   {"fitness_mae_kwh", out.best_fitness},
                                   {"optimizer", config.tune.optimizer},
                                   {"hyperparams", hyperparams_to_json(out.best)}});
    return out;
}

namespace {

struct FittedSet {
    std::vector<std::string> names; // model kinds, fixed order
    std::vector<std::unique_ptr<Model>> models;

    const Model& by_name(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return *models[i];
        throw ContractError("no fitted model named '" + name + "'");
    }
};

// The five feature-driven learners, fitted on the given design matrix rows.
FittedSet fit_learners(const RunConfig& config, const DesignMatrix& train, const std::string& tag) {
    static const std::vector<std::string> kinds{"lstm", "rf", "svr", "gbt", "esn"};
    FittedSet set;
    for (const auto& name : kinds) {
        const ModelKind kind = model_kind_from_name(name);
        const Hyperparams hp = resolve_hyperparams(config, kind);
        const std::uint64_t seed = derive_seed(config.seed, "fit-" + tag + "-" + name);
        set.names.push_back(name);
        set.models.push_back(fit_model(kind, train.X, train.y, train.feature_names, hp, seed));
    }
    return set;
}

} // namespace

EvaluateOutput cmd_evaluate(const RunConfig& config) {
    const PreparedData data = prepare(config);
    DesignMatrix matrix = data.matrix;
    if (!config.features.empty()) matrix = matrix.with_features(config.features);

    const SplitPlan split = hybrid_split(matrix.rows(), config.horizon, config.folds);
    const std::size_t n_train = split.train.size();
    const auto h = static_cast<std::size_t>(config.horizon);
    const std::size_t max_lag = data.dataset.size() - matrix.rows();

    const DesignMatrix train = matrix.slice_rows(0, n_train);
    const ForecastSetup setup{config.lags, config.covid_start, config.covid_end};

    // ---- validation phase: fit before the last h training rows, forecast them
    if (n_train <= h)
        throw ContractError("cmd_evaluate: training window too small for the validation slice");
    const std::size_t n_val_fit = n_train - h;
    const DesignMatrix val_fit = matrix.slice_rows(0, n_val_fit);
    const std::size_t val_start_ds = n_val_fit + max_lag; // dataset index of first validation row
    const TimeSeriesDataset val_history = truncate_dataset(data.dataset, val_start_ds);
    const ExogFrame val_future =
        ExogFrame::from_dataset(data.dataset, val_start_ds, val_start_ds + h);
    std::vector<double> val_actual(data.dataset.target.begin() + static_cast<std::ptrdiff_t>(val_start_ds),
                                   data.dataset.target.begin() +
                                       static_cast<std::ptrdiff_t>(val_start_ds + h));

    const FittedSet val_models = fit_learners(config, val_fit, "val");
    std::map<std::string, std::vector<double>> val_forecasts;
    for (std::size_t i = 0; i < val_models.names.size(); ++i)
        val_forecasts[val_models.names[i]] =
            recursive_forecast(*val_models.models[i], val_history, val_future, config.horizon, setup)
                .predicted;

    const std::vector<double>& val_strong = val_forecasts.at(config.wsb.strong);
    std::vector<std::vector<double>> val_weak;
    for (const auto& name : config.wsb.weak) val_weak.push_back(val_forecasts.at(name));

    const auto val_eval = [&](double w) {
        const WsbResult r = wsb_combine(val_strong, val_weak, WsbConfig{w, config.horizon});
        return smape(val_actual, r.combined);
    };

    EvaluateOutput out;
    out.chosen_w = config.wsb.tune ? tune_global_weight(val_eval,
                                                        static_cast<std::size_t>(config.wsb.samples),
                                                        derive_seed(config.seed, "wsb-tune"))
                                   : config.wsb.w;
    out.val_smape_wsb = val_eval(out.chosen_w);
    out.val_smape_strong = smape(val_actual, val_strong);

    // ---- test phase: fit on the full training window, forecast the test rows
    const std::size_t test_start_ds = n_train + max_lag;
    const TimeSeriesDataset test_history = truncate_dataset(data.dataset, test_start_ds);
    const ExogFrame test_future =
        ExogFrame::from_dataset(data.dataset, test_start_ds, test_start_ds + h);
    std::vector<double> test_actual(
        data.dataset.target.begin() + static_cast<std::ptrdiff_t>(test_start_ds),
        data.dataset.target.begin() + static_cast<std::ptrdiff_t>(test_start_ds + h));

    const FittedSet test_models = fit_learners(config, train, "test");
    std::map<std::string, ForecastResult> forecasts;
    for (std::size_t i = 0; i < test_models.names.size(); ++i) {
        ForecastResult r = recursive_forecast(*test_models.models[i], test_history, test_future,
                                              config.horizon, setup);
        score_forecast(r, test_actual);
        forecasts[test_models.names[i]] = std::move(r);
    }

    // smoothing baselines train on the raw series up to the test window
    for (const auto& name : {"ses", "des", "hw_additive", "hw_multiplicative"}) {
        const auto model = fit_smoothing_model(model_kind_from_name(name), test_history.target, 12);
        ForecastResult r =
            recursive_forecast(*model, test_history, test_future, config.horizon, setup);
        score_forecast(r, test_actual);
        forecasts[name] = std::move(r);
    }

    double test_w = out.chosen_w;
    if (config.wsb.tune_on_test) {
        std::vector<std::vector<double>> test_weak_series;
        for (const auto& name : config.wsb.weak)
            test_weak_series.push_back(forecasts.at(name).predicted);
        const auto test_eval = [&](double w) {
            const WsbResult r = wsb_combine(forecasts.at(config.wsb.strong).predicted,
                                            test_weak_series, WsbConfig{w, config.horizon});
            return smape(test_actual, r.combined);
        };
        test_w = tune_global_weight(test_eval, static_cast<std::size_t>(config.wsb.samples),
                                    derive_seed(config.seed, "wsb-tune-test"));
        out.chosen_w = test_w;
    }

    std::vector<std::vector<double>> test_weak;
    for (const auto& name : config.wsb.weak) test_weak.push_back(forecasts.at(name).predicted);
    out.wsb_test = wsb_combine(forecasts.at(config.wsb.strong).predicted, test_weak,
                               WsbConfig{test_w, config.horizon});

    // ---- metric table
    out.metrics.push_back({"wsb", mae(test_actual, out.wsb_test.combined),
                           100.0 * smape(test_actual, out.wsb_test.combined)});
    auto push_metrics = [&](const std::string& name) {
        const auto& r = forecasts.at(name);
        out.metrics.push_back({name, r.mae_score, 100.0 * r.smape_score});
    };
    push_metrics(config.wsb.strong);
    for (const auto& name : config.wsb.weak) push_metrics(name);
    for (const auto& name : {"ses", "des", "hw_additive", "hw_multiplicative"}) push_metrics(name);
    if (std::find(config.wsb.weak.begin(), config.wsb.weak.end(), "esn") == config.wsb.weak.end() &&
        config.wsb.strong != "esn")
        push_metrics("esn");

    // ---- 5-fold CV statistics on the training window (per tunable learner)
    std::vector<std::vector<std::string>> cv_rows;
    for (const auto& name : {"lstm", "rf", "svr", "gbt", "esn"}) {
        const ModelKind kind = model_kind_from_name(name);
        const Hyperparams hp = resolve_hyperparams(config, kind);
        const auto folds = contiguous_folds(train.rows(), config.folds);
        std::vector<double> fold_maes;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            std::vector<std::size_t> fit_rows;
            for (std::size_t r = 0; r < train.rows(); ++r)
                if (r < folds[f].front() || r > folds[f].back()) fit_rows.push_back(r);
            const Matrix Xtr = train.X.select_rows(fit_rows);
            const Matrix Xte = train.X.select_rows(folds[f]);
            std::vector<double> ytr, yte;
            for (const auto r : fit_rows) ytr.push_back(train.y[r]);
            for (const auto r : folds[f]) yte.push_back(train.y[r]);
            const auto model =
                fit_model(kind, Xtr, ytr, train.feature_names, hp,
                          derive_seed(config.seed, "cv-stats-" + std::string(name), f));
            fold_maes.push_back(mae(yte, model->predict(Xte)));
        }
        const FoldStats fs = fold_stats(fold_maes);
        cv_rows.push_back({name, format_fixed(fs.mean, 2), format_fixed(fs.median, 2),
                           format_fixed(fs.sd, 2)});
    }

    // ---- emission
    out.dir = ensure_dir(config, "evaluate");
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& m : out.metrics)
            rows.push_back({m.name, format_fixed(m.mae_kwh, 2), format_fixed(m.smape_pct, 2)});
        csv::write_file(join_path(out.dir, "metrics.csv"), {"model", "mae_kwh", "smape_pct"}, rows);
    }
    {
        std::vector<std::string> header{"period", "actual", "wsb"};
        std::vector<std::string> model_order{config.wsb.strong};
        for (const auto& name : config.wsb.weak) model_order.push_back(name);
        for (const auto& name : {"esn", "ses", "des", "hw_additive", "hw_multiplicative"})
            if (std::find(model_order.begin(), model_order.end(), name) == model_order.end())
                model_order.push_back(name);
        header.insert(header.end(), model_order.begin(), model_order.end());
        std::vector<std::vector<std::string>> rows;
        const auto& periods = forecasts.at(config.wsb.strong).periods;
        for (std::size_t t = 0; t < h; ++t) {
            std::vector<std::string> row{periods[t].str(), csv::format_double(test_actual[t]),
                                         csv::format_double(out.wsb_test.combined[t])};
            for (const auto& name : model_order)
                row.push_back(csv::format_double(forecasts.at(name).predicted[t]));
            rows.push_back(std::move(row));
        }
        csv::write_file(join_path(out.dir, "forecast_vs_actual.csv"), header, rows);
    }
    out.wsb_test.write_csv(join_path(out.dir, "wsb.csv"));
    csv::write_file(join_path(out.dir, "cv_stats.csv"),
                    {"model", "mae_mean", "mae_median", "mae_sd"}, cv_rows);
    write_json_file(join_path(out.dir, "wsb_summary.json"),
                    nlohmann::json{{"w", out.chosen_w},
                                   {"tuned", config.wsb.tune},
                                   {"tuned_on_test", config.wsb.tune_on_test},
                                   {"strong", config.wsb.strong},
                                   {"weak", config.wsb.weak},
                                   {"val_smape_wsb", out.val_smape_wsb},
                                   {"val_smape_strong", out.val_smape_strong}});
    {
        const std::string model_dir = join_path(out.dir, "models");
        fs::create_directories(model_dir);
        for (std::size_t i = 0; i < test_models.names.size(); ++i)
            test_models.models[i]->save_json(
                join_path(model_dir, test_models.names[i] + ".json"));
    }
    return out;
}

ExplainOutput cmd_explain(const RunConfig& config) {
    const PreparedData data = prepare(config);
    DesignMatrix matrix = data.matrix;
    if (!config.features.empty()) matrix = matrix.with_features(config.features);
    const SplitPlan split = hybrid_split(matrix.rows(), config.horizon, config.folds);
    const DesignMatrix train = matrix.slice_rows(0, split.train.size());

    const auto rf = fit_model(ModelKind::Rf, train.X, train.y, train.feature_names,
                              resolve_hyperparams(config, ModelKind::Rf),
                              derive_seed(config.seed, "explain-rf"));
    const Matrix background = subsample_background(
        train.X, static_cast<std::size_t>(config.shap.background_cap), config.seed);
    Matrix instances = train.X;
    if (instances.rows() > static_cast<std::size_t>(config.shap.instances_cap))
        instances = subsample_background(instances,
                                         static_cast<std::size_t>(config.shap.instances_cap),
                                         derive_seed(config.seed, "explain-instances"));

    PredictFn fn = [&](const Matrix& X) { return rf->predict(X); };
    ExplainOutput out;
    out.report = attribute(fn, instances, background, train.feature_names, config.shap.method,
                           static_cast<std::size_t>(config.shap.permutations),
                           derive_seed(config.seed, "explain-shap"));
    out.force_plot = force_plot_data(out.report);
    out.dir = ensure_dir(config, "explain");
    out.report.write_csv(join_path(out.dir, "shap.csv"));
    out.force_plot.write_csv(join_path(out.dir, "force_plot.csv"));
    return out;
}

} // namespace wsbf
