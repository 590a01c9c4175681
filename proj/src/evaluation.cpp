#include "wsbf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "wsbf/csv.hpp"
#include "wsbf/errors.hpp"
#include "wsbf/kernels.hpp"

namespace wsbf {

SplitPlan hybrid_split(std::size_t n_rows, int horizon, int k_folds) {
    if (horizon < 1) throw ContractError("hybrid_split: horizon must be >= 1");
    if (k_folds < 1) throw ContractError("hybrid_split: fold count must be >= 1");
    const auto h = static_cast<std::size_t>(horizon);
    if (n_rows <= h)
        throw ContractError("hybrid_split: " + std::to_string(n_rows) +
                            " rows leave no training data for horizon " + std::to_string(horizon));
    const std::size_t n_train = n_rows - h;
    if (n_train < static_cast<std::size_t>(k_folds))
        throw ContractError("hybrid_split: fewer training rows than folds");

    SplitPlan plan;
    plan.train.resize(n_train);
    std::iota(plan.train.begin(), plan.train.end(), 0);
    plan.test.resize(h);
    std::iota(plan.test.begin(), plan.test.end(), n_train);

    // earlier folds take the extra row when n_train % k != 0
    const std::size_t base = n_train / static_cast<std::size_t>(k_folds);
    const std::size_t extra = n_train % static_cast<std::size_t>(k_folds);
    std::size_t next = 0;
    for (int f = 0; f < k_folds; ++f) {
        const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        std::vector<std::size_t> fold(size);
        std::iota(fold.begin(), fold.end(), next);
        next += size;
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty() || actual.size() != predicted.size())
        throw ContractError("mae: series must be nonempty and of equal length");
    return kernels::sum_abs_diff(actual, predicted) / static_cast<double>(actual.size());
}

double smape(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty() || actual.size() != predicted.size())
        throw ContractError("smape: series must be nonempty and of equal length");
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double denom = std::fabs(actual[i]) + std::fabs(predicted[i]);
        if (denom > 0.0) acc += 2.0 * std::fabs(actual[i] - predicted[i]) / denom;
    }
    return acc / static_cast<double>(actual.size());
}

ExogFrame ExogFrame::from_dataset(const TimeSeriesDataset& ds, std::size_t begin, std::size_t end) {
    if (begin > end || end > ds.size()) throw ContractError("ExogFrame: bad range");
    ExogFrame frame;
    frame.names = ds.exog_names;
    frame.values = Matrix(end - begin, ds.exog_names.size());
    for (std::size_t t = begin; t < end; ++t) {
        frame.periods.push_back(ds.periods[t]);
        for (std::size_t c = 0; c < ds.exog.size(); ++c) {
            if (!ds.exog[c][t])
                throw ContractError("ExogFrame: missing value in column " + ds.exog_names[c]);
            frame.values(t - begin, c) = *ds.exog[c][t];
        }
    }
    return frame;
}

namespace {

const char* kMonthNames[12] = {"jan", "feb", "mar", "apr", "may", "jun",
                               "jul", "aug", "sep", "oct", "nov", "dec"};

int month_from_token(const std::string& token) {
    for (int m = 0; m < 12; ++m)
        if (token == kMonthNames[m]) return m + 1;
    return -1;
}

// Fills one feature vector for period p. Lag cells read from `target_so_far`
// (true history extended by earlier predictions).
void build_feature_row(const std::vector<std::string>& names, const Period& p,
                       const Period& series_start, const std::vector<double>& target_so_far,
                       const ExogFrame& future, std::size_t future_row, const ForecastSetup& setup,
                       std::span<double> out) {
    for (std::size_t j = 0; j < names.size(); ++j) {
        const std::string& name = names[j];
        if (name.rfind("lag_", 0) == 0) {
            const int k = std::stoi(name.substr(4));
            const int pos = p.months_since(series_start) - k;
            if (pos < 0 || static_cast<std::size_t>(pos) >= target_so_far.size())
                throw ContractError("recursive_forecast: lag " + std::to_string(k) +
                                    " reaches before available history at " + p.str());
            out[j] = target_so_far[static_cast<std::size_t>(pos)];
        } else if (name.rfind("month_", 0) == 0) {
            const int m = month_from_token(name.substr(6));
            if (m < 0) throw ContractError("recursive_forecast: bad month feature '" + name + "'");
            out[j] = p.month == m ? 1.0 : 0.0;
        } else if (name.rfind("year_", 0) == 0) {
            out[j] = p.year == std::stoi(name.substr(5)) ? 1.0 : 0.0;
        } else if (name == "covid") {
            const bool in = !(p < setup.covid_start) && !(setup.covid_end < p);
            out[j] = in ? 1.0 : 0.0;
        } else {
            const auto it = std::find(future.names.begin(), future.names.end(), name);
            if (it == future.names.end())
                throw ContractError("recursive_forecast: exogenous column '" + name +
                                    "' missing from the future frame");
            out[j] = future.values(future_row,
                                   static_cast<std::size_t>(it - future.names.begin()));
        }
    }
}

} // namespace

ForecastResult recursive_forecast(const Model& model, const TimeSeriesDataset& history,
                                  const ExogFrame& future, int horizon,
                                  const ForecastSetup& setup) {
    if (horizon < 0) throw ContractError("recursive_forecast: negative horizon");
    ForecastResult result;
    result.horizon = horizon;
    if (horizon == 0) return result;

    if (model.is_smoothing()) {
        result.predicted = model.forecast(horizon);
        Period p = history.periods.empty() ? Period{2000, 1} : history.periods.back();
        for (int t = 0; t < horizon; ++t) {
            p = p.next();
            result.periods.push_back(p);
        }
        return result;
    }

    if (future.periods.size() < static_cast<std::size_t>(horizon))
        throw ContractError("recursive_forecast: future frame shorter than horizon");
    if (history.periods.empty()) throw ContractError("recursive_forecast: empty history");

    result.feature_names = model.feature_names();
    result.features = Matrix(static_cast<std::size_t>(horizon), result.feature_names.size());

    std::vector<double> target_so_far = history.target;
    const Period start = history.periods.front();
    Period expected = history.periods.back().next();
    // the feature matrix grows one row per step; the model sees the prefix so
    // state-bearing kinds evolve through the forecast window
    Matrix fed;
    for (int t = 0; t < horizon; ++t) {
        const Period p = future.periods[static_cast<std::size_t>(t)];
        if (p != expected)
            throw ContractError("recursive_forecast: future periods must continue history (" +
                                p.str() + " != " + expected.str() + ")");
        expected = expected.next();

        build_feature_row(result.feature_names, p, start, target_so_far, future,
                          static_cast<std::size_t>(t), setup,
                          result.features.row(static_cast<std::size_t>(t)));
        fed.append_row(result.features.row(static_cast<std::size_t>(t)));
        const std::vector<double> preds = model.predict(fed);
        const double pred = preds.back();
        if (!std::isfinite(pred))
            throw NumericError("recursive_forecast: non-finite prediction at step " +
                               std::to_string(t + 1));
        result.predicted.push_back(pred);
        target_so_far.push_back(pred);
        result.periods.push_back(p);
    }
    return result;
}

void score_forecast(ForecastResult& result, const std::vector<double>& actual) {
    if (actual.size() != result.predicted.size())
        throw ContractError("score_forecast: actual length differs from horizon");
    result.actual = actual;
    result.mae_score = mae(actual, result.predicted);
    result.smape_score = smape(actual, result.predicted);
}

void ForecastResult::write_csv(const std::string& path) const {
    std::vector<std::string> header{"step", "period", "predicted"};
    if (!actual.empty()) header.push_back("actual");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t t = 0; t < predicted.size(); ++t) {
        std::vector<std::string> row{std::to_string(t + 1), periods[t].str(),
                                     csv::format_double(predicted[t])};
        if (!actual.empty()) row.push_back(csv::format_double(actual[t]));
        rows.push_back(std::move(row));
    }
    csv::write_file(path, header, rows);
}

// ---- diagnostics ------------------------------------------------------------

std::vector<double> acf(const std::vector<double>& series, int max_lag) {
    const std::size_t n = series.size();
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n)
        throw ContractError("acf: max_lag must satisfy 0 <= max_lag < n");
    const double mean = kernels::sum(series) / static_cast<double>(n);
    double denom = 0.0;
    for (const double v : series) denom += (v - mean) * (v - mean);
    if (denom == 0.0) throw NumericError("acf: constant series has undefined correlations");
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t)
            acc += (series[t] - mean) * (series[t - static_cast<std::size_t>(k)] - mean);
        out[static_cast<std::size_t>(k)] = acc / denom;
    }
    return out;
}

std::vector<double> pacf_from_acf(const std::vector<double>& r) {
    if (r.empty()) throw ContractError("pacf: empty acf");
    const std::size_t max_lag = r.size() - 1;
    std::vector<double> pacf(max_lag + 1, 1.0);
    if (max_lag == 0) return pacf;

    std::vector<double> phi_prev(max_lag + 1, 0.0), phi(max_lag + 1, 0.0);
    pacf[1] = r[1];
    phi_prev[1] = r[1];
    for (std::size_t k = 2; k <= max_lag; ++k) {
        double num = r[k];
        double den = 1.0;
        for (std::size_t j = 1; j < k; ++j) {
            num -= phi_prev[j] * r[k - j];
            den -= phi_prev[j] * r[j];
        }
        const double phi_kk = den != 0.0 ? num / den : 0.0;
        for (std::size_t j = 1; j < k; ++j) phi[j] = phi_prev[j] - phi_kk * phi_prev[k - j];
        phi[k] = phi_kk;
        pacf[k] = phi_kk;
        phi_prev = phi;
    }
    return pacf;
}

double kpss_level_stat(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 2) throw ContractError("kpss: need at least 2 observations");
    const double nn = static_cast<double>(n);
    const double mean = kernels::sum(series) / nn;

    std::vector<double> e(n);
    for (std::size_t t = 0; t < n; ++t) e[t] = series[t] - mean;

    double partial = 0.0, num = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        partial += e[t];
        num += partial * partial;
    }
    num /= nn * nn;

    const int l = static_cast<int>(std::floor(4.0 * std::pow(nn / 100.0, 0.25)));
    double s2 = 0.0;
    for (std::size_t t = 0; t < n; ++t) s2 += e[t] * e[t];
    s2 /= nn;
    for (int s = 1; s <= l; ++s) {
        const double w = 1.0 - static_cast<double>(s) / (l + 1.0);
        double gamma = 0.0;
        for (std::size_t t = static_cast<std::size_t>(s); t < n; ++t)
            gamma += e[t] * e[t - static_cast<std::size_t>(s)];
        s2 += 2.0 * w * gamma / nn;
    }
    if (s2 <= 0.0) throw NumericError("kpss: nonpositive long-run variance");
    return num / s2;
}

MannKendallResult mann_kendall(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 3) throw ContractError("mann_kendall: need at least 3 observations");
    MannKendallResult r;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = series[j] - series[i];
            r.s += d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        }

    // tie correction
    std::map<double, std::size_t> counts;
    for (const double v : series) counts[v] += 1;
    double tie_term = 0.0;
    for (const auto& [value, t] : counts) {
        (void)value;
        if (t > 1) {
            const double td = static_cast<double>(t);
            tie_term += td * (td - 1.0) * (2.0 * td + 5.0);
        }
    }
    const double nn = static_cast<double>(n);
    r.var_s = (nn * (nn - 1.0) * (2.0 * nn + 5.0) - tie_term) / 18.0;
    if (r.var_s <= 0.0) {
        r.z = 0.0;
        r.p = 1.0;
        return r;
    }
    const double sigma = std::sqrt(r.var_s);
    if (r.s > 0.0)
        r.z = (r.s - 1.0) / sigma;
    else if (r.s < 0.0)
        r.z = (r.s + 1.0) / sigma;
    else
        r.z = 0.0;
    r.p = normal_two_sided_p(r.z);
    return r;
}

KruskalWallisResult kruskal_wallis(const std::vector<double>& values, const std::vector<int>& groups) {
    if (values.size() != groups.size() || values.empty())
        throw ContractError("kruskal_wallis: values and groups must be nonempty and aligned");
    const std::size_t n = values.size();

    // midranks
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    double tie_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) tie_sum += t * t * t - t;
        i = j + 1;
    }

    std::map<int, std::pair<double, std::size_t>> group_ranks; // sum, count
    for (std::size_t k = 0; k < n; ++k) {
        auto& g = group_ranks[groups[k]];
        g.first += ranks[k];
        g.second += 1;
    }
    KruskalWallisResult r;
    r.df = static_cast<int>(group_ranks.size()) - 1;
    if (r.df < 1) {
        r.h = 0.0;
        r.p = 1.0;
        return r;
    }

    const double nn = static_cast<double>(n);
    double h = 0.0;
    for (const auto& [g, sums] : group_ranks) {
        (void)g;
        h += sums.first * sums.first / static_cast<double>(sums.second);
    }
    h = 12.0 / (nn * (nn + 1.0)) * h - 3.0 * (nn + 1.0);

    const double correction = 1.0 - tie_sum / (nn * nn * nn - nn);
    if (correction <= 0.0) {
        // every value tied: identical distributions by construction
        r.h = 0.0;
        r.p = 1.0;
        return r;
    }
    r.h = h / correction;
    if (r.h < 0.0) r.h = 0.0;
    r.p = chi2_sf(r.h, r.df);
    return r;
}

DiagnosticsReport diagnostics(const TimeSeriesDataset& ds, int max_lag, int period) {
    if (ds.size() < 2 * static_cast<std::size_t>(period))
        throw ContractError("diagnostics: need at least two full periods");
    DiagnosticsReport rep;
    rep.n = static_cast<int>(ds.size());
    rep.acf_values = acf(ds.target, max_lag);
    rep.pacf_values = pacf_from_acf(rep.acf_values);
    rep.band = 1.96 / std::sqrt(static_cast<double>(ds.size()));
    rep.kpss_stat = kpss_level_stat(ds.target);
    rep.kpss_level_stationary = rep.kpss_stat <= rep.kpss_critical;
    rep.mk = mann_kendall(ds.target);
    rep.mk_trend = rep.mk.p < 0.05;
    std::vector<int> month_groups;
    month_groups.reserve(ds.size());
    for (const auto& p : ds.periods) month_groups.push_back(p.month);
    rep.kw = kruskal_wallis(ds.target, month_groups);
    rep.kw_seasonal = rep.kw.p < 0.05;
    return rep;
}

FoldStats fold_stats(const std::vector<double>& fold_errors) {
    if (fold_errors.empty()) throw ContractError("fold_stats: empty list");
    FoldStats s;
    s.mean = kernels::sum(fold_errors) / static_cast<double>(fold_errors.size());
    s.median = median_of(fold_errors);
    s.sd = sample_sd(fold_errors);
    return s;
}

// ---- numeric helpers --------------------------------------------------------

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

namespace {

// Regularized lower incomplete gamma P(a, x): series for x < a+1, Lentz
// continued fraction otherwise.
double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw ContractError("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    const double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

} // namespace

double chi2_sf(double x, int df) {
    if (df < 1) throw ContractError("chi2_sf: df must be >= 1");
    if (x <= 0.0) return 1.0;
    return 1.0 - gamma_p(static_cast<double>(df) / 2.0, x / 2.0);
}

} // namespace wsbf
