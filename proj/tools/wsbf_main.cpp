#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wsbf/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "Master seed override");
    cmd->add_option("--out", args.out_dir, "Output directory override");
}

wsbf::RunConfig load_config(const CommonArgs& args) {
    wsbf::RunConfig config = wsbf::RunConfig::from_json_file(args.config_path);
    if (args.seed) config.seed = *args.seed;
    if (args.out_dir) config.out_dir = *args.out_dir;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electricity-consumption forecasting toolkit"};
    app.require_subcommand(1);

    CommonArgs stats_args, diagnose_args, select_args, tune_args, evaluate_args, explain_args;
    std::string tune_model = "lstm";

    auto* stats = app.add_subcommand("stats", "Summary statistics of the consumption series");
    add_common(stats, stats_args);
    auto* diagnose = app.add_subcommand("diagnose", "ACF/PACF and hypothesis tests");
    add_common(diagnose, diagnose_args);
    auto* select = app.add_subcommand("select-features", "Shapley-ranked backward elimination");
    add_common(select, select_args);
    auto* tune = app.add_subcommand("tune", "Metaheuristic hyperparameter search");
    add_common(tune, tune_args);
    tune->add_option("--model", tune_model, "Learner to tune (lstm|rf|svr|gbt|esn)");
    auto* evaluate = app.add_subcommand("evaluate", "12-step forecasts, WSB and metric tables");
    add_common(evaluate, evaluate_args);
    auto* explain = app.add_subcommand("explain", "Shapley attribution and force-plot data");
    add_common(explain, explain_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (stats->parsed()) {
            const auto out = wsbf::cmd_stats(load_config(stats_args));
            std::printf("stats: n=%zu min=%.0f max=%.0f median=%.0f mean=%.2f sd=%.2f kWh -> %s\n",
                        out.stats.n, out.stats.min, out.stats.max, out.stats.median, out.stats.mean,
                        out.stats.sd, out.csv_path.c_str());
        } else if (diagnose->parsed()) {
            const auto out = wsbf::cmd_diagnose(load_config(diagnose_args));
            std::printf("diagnose: kpss=%.4f (crit %.3f) mk_p=%.4f kw_p=%.4f -> %s\n",
                        out.report.kpss_stat, out.report.kpss_critical, out.report.mk.p,
                        out.report.kw.p, out.dir.c_str());
        } else if (select->parsed()) {
            const auto out = wsbf::cmd_select_features(load_config(select_args));
            std::printf("select-features: kept %zu of %zu features (step %zu) -> %s\n",
                        out.trace.final_features.size(), out.trace.ranking.size(),
                        out.trace.chosen_step, out.dir.c_str());
        } else if (tune->parsed()) {
            const auto config = load_config(tune_args);
            const auto out = wsbf::cmd_tune(config, wsbf::model_kind_from_name(tune_model));
            std::printf("tune %s: best cv mae=%.2f kWh over %zu seeds -> %s\n", tune_model.c_str(),
                        out.best_fitness, out.campaign.runs.size(), out.dir.c_str());
        } else if (evaluate->parsed()) {
            const auto out = wsbf::cmd_evaluate(load_config(evaluate_args));
            const auto& wsb = out.metrics.front();
            std::printf("evaluate: wsb mae=%.2f kWh smape=%.2f%% (w=%.4f) -> %s\n", wsb.mae_kwh,
                        wsb.smape_pct, out.chosen_w, out.dir.c_str());
        } else if (explain->parsed()) {
            const auto out = wsbf::cmd_explain(load_config(explain_args));
            std::printf("explain: base=%.2f kWh, top feature %s -> %s\n", out.report.base_value,
                        out.force_plot.entries.empty() ? "-"
                                                       : out.force_plot.entries.front().feature.c_str(),
                        out.dir.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
