#include "wsbf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "wsbf/csv.hpp"
#include "wsbf/errors.hpp"
#include "wsbf/kernels.hpp"

namespace wsbf {

namespace {

const char* kMonthNames[12] = {"jan", "feb", "mar", "apr", "may", "jun",
                               "jul", "aug", "sep", "oct", "nov", "dec"};

bool parse_number(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e;
}

bool is_missing_cell(const std::string& s) { return s.empty() || s == "NA"; }

} // namespace

std::string Period::str() const {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    return buf;
}

Period Period::parse(const std::string& s) {
    if (s.size() != 7 || s[4] != '-')
        throw ParseError("bad period '" + s + "', expected YYYY-MM");
    int y = 0, m = 0;
    auto r1 = std::from_chars(s.data(), s.data() + 4, y);
    auto r2 = std::from_chars(s.data() + 5, s.data() + 7, m);
    if (r1.ec != std::errc() || r2.ec != std::errc() || m < 1 || m > 12)
        throw ParseError("bad period '" + s + "', expected YYYY-MM");
    return {y, m};
}

bool TimeSeriesDataset::has_missing() const {
    for (const auto& col : exog)
        for (const auto& cell : col)
            if (!cell) return true;
    return false;
}

void TimeSeriesDataset::validate() const {
    const std::size_t n = periods.size();
    if (target.size() != n) throw ValidationError(meta + ": target length differs from periods");
    for (std::size_t i = 1; i < n; ++i) {
        if (periods[i] == periods[i - 1])
            throw ValidationError(meta + ": duplicate period " + periods[i].str());
        if (periods[i] != periods[i - 1].next())
            throw ValidationError(meta + ": non-consecutive months " + periods[i - 1].str() +
                                  " -> " + periods[i].str());
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!(target[i] > 0.0))
            throw ValidationError(meta + ": nonpositive consumption at " + periods[i].str());
    for (const auto& col : exog)
        if (col.size() != n) throw ValidationError(meta + ": exog column length differs from periods");
}

TimeSeriesDataset load_csv_string(const std::string& text, const std::vector<std::string>& schema,
                                  const std::string& origin) {
    if (schema.size() < 2) throw ContractError("load_csv: schema needs date and target columns");
    const csv::Table t = csv::read_string(text, origin);
    if (t.header.size() != schema.size()) {
        for (const auto& col : t.header)
            if (std::find(schema.begin(), schema.end(), col) == schema.end())
                throw SchemaError(origin + ": unknown column '" + col + "'");
        throw SchemaError(origin + ": expected " + std::to_string(schema.size()) +
                          " columns, got " + std::to_string(t.header.size()));
    }
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (t.header[i] != schema[i])
            throw SchemaError(origin + ": column " + std::to_string(i + 1) + " is '" +
                              t.header[i] + "', expected '" + schema[i] + "'");

    struct Row {
        Period period;
        double target;
        std::vector<std::optional<double>> exog;
    };
    std::vector<Row> rows;
    rows.reserve(t.rows.size());
    std::size_t line = 1;
    for (const auto& cells : t.rows) {
        ++line;
        Row row;
        try {
            row.period = Period::parse(cells[0]);
        } catch (const ParseError& e) {
            throw ParseError(origin + " row " + std::to_string(line) + ": " + e.what());
        }
        if (!parse_number(cells[1], row.target))
            throw ParseError(origin + " row " + std::to_string(line) + ": bad target '" +
                             cells[1] + "'");
        for (std::size_t c = 2; c < cells.size(); ++c) {
            if (is_missing_cell(cells[c])) {
                row.exog.emplace_back(std::nullopt);
            } else {
                double v;
                if (!parse_number(cells[c], v))
                    throw ParseError(origin + " row " + std::to_string(line) + ": bad value '" +
                                     cells[c] + "' in column " + schema[c]);
                row.exog.emplace_back(v);
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw SchemaError(origin + ": no data rows");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.period < b.period; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].period == rows[i - 1].period)
            throw ValidationError(origin + ": duplicate period " + rows[i].period.str());

    TimeSeriesDataset ds;
    ds.meta = origin;
    ds.exog_names.assign(schema.begin() + 2, schema.end());
    ds.exog.resize(ds.exog_names.size());
    for (const auto& row : rows) {
        ds.periods.push_back(row.period);
        ds.target.push_back(row.target);
        for (std::size_t c = 0; c < ds.exog.size(); ++c) ds.exog[c].push_back(row.exog[c]);
    }
    ds.validate();
    return ds;
}

TimeSeriesDataset load_csv(const std::string& path, const std::vector<std::string>& schema) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto ds = load_csv_string(buf.str(), schema, path);
    return ds;
}

TimeSeriesDataset impute_same_month_mean(const TimeSeriesDataset& ds) {
    TimeSeriesDataset out = ds;
    for (std::size_t c = 0; c < out.exog.size(); ++c) {
        // per calendar month: sum and count of observed values
        double sums[13] = {0};
        int counts[13] = {0};
        for (std::size_t t = 0; t < out.size(); ++t) {
            if (out.exog[c][t]) {
                sums[out.periods[t].month] += *out.exog[c][t];
                counts[out.periods[t].month] += 1;
            }
        }
        for (std::size_t t = 0; t < out.size(); ++t) {
            if (!out.exog[c][t]) {
                const int m = out.periods[t].month;
                if (counts[m] == 0)
                    throw NumericError("imputation impossible: column '" + out.exog_names[c] +
                                       "' has no observed value for month " + std::to_string(m));
                out.exog[c][t] = sums[m] / counts[m];
            }
        }
    }
    return out;
}

std::vector<int> default_lags() {
    std::vector<int> lags(12);
    std::iota(lags.begin(), lags.end(), 1);
    return lags;
}

DesignMatrix build_design_matrix(const TimeSeriesDataset& ds, const std::vector<int>& lags,
                                 const Period& covid_start, const Period& covid_end) {
    ds.validate();
    if (ds.has_missing())
        throw ContractError("build_design_matrix: dataset has missing cells, impute first");
    for (const int k : lags)
        if (k <= 0) throw ContractError("build_design_matrix: lags must be positive");

    const std::size_t n = ds.size();
    std::vector<int> sorted_lags = lags;
    std::sort(sorted_lags.begin(), sorted_lags.end());
    sorted_lags.erase(std::unique(sorted_lags.begin(), sorted_lags.end()), sorted_lags.end());
    const int max_lag = sorted_lags.empty() ? 0 : sorted_lags.back();
    if (static_cast<std::size_t>(max_lag) >= n)
        throw ContractError("build_design_matrix: max lag " + std::to_string(max_lag) +
                            " leaves no usable rows for series of length " + std::to_string(n));

    std::set<int> years;
    for (const auto& p : ds.periods) years.insert(p.year);

    DesignMatrix dm;
    for (const int k : sorted_lags) dm.feature_names.push_back("lag_" + std::to_string(k));
    for (const auto& name : ds.exog_names) dm.feature_names.push_back(name);
    for (const auto* m : kMonthNames) dm.feature_names.push_back(std::string("month_") + m);
    for (const int y : years) dm.feature_names.push_back("year_" + std::to_string(y));
    dm.feature_names.push_back("covid");

    const std::size_t first_row = static_cast<std::size_t>(max_lag);
    dm.X = Matrix(n - first_row, dm.feature_names.size());
    for (std::size_t t = first_row; t < n; ++t) {
        const std::size_t r = t - first_row;
        std::size_t j = 0;
        for (const int k : sorted_lags) dm.X(r, j++) = ds.target[t - static_cast<std::size_t>(k)];
        for (std::size_t c = 0; c < ds.exog.size(); ++c) dm.X(r, j++) = *ds.exog[c][t];
        for (int m = 1; m <= 12; ++m) dm.X(r, j++) = ds.periods[t].month == m ? 1.0 : 0.0;
        for (const int y : years) dm.X(r, j++) = ds.periods[t].year == y ? 1.0 : 0.0;
        const bool in_covid = !(ds.periods[t] < covid_start) && !(covid_end < ds.periods[t]);
        dm.X(r, j++) = in_covid ? 1.0 : 0.0;
        dm.y.push_back(ds.target[t]);
        dm.periods.push_back(ds.periods[t]);
    }
    return dm;
}

std::size_t DesignMatrix::feature_index(const std::string& name) const {
    const auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end())
        throw ContractError("unknown feature '" + name + "'");
    return static_cast<std::size_t>(it - feature_names.begin());
}

DesignMatrix DesignMatrix::with_features(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& name : names) idx.push_back(feature_index(name));
    DesignMatrix out;
    out.feature_names = names;
    out.X = X.select_cols(idx);
    out.y = y;
    out.periods = periods;
    return out;
}

DesignMatrix DesignMatrix::slice_rows(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows()) throw ContractError("DesignMatrix::slice_rows: bad range");
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    DesignMatrix out;
    out.feature_names = feature_names;
    out.X = X.select_rows(idx);
    out.y.assign(y.begin() + static_cast<std::ptrdiff_t>(begin),
                 y.begin() + static_cast<std::ptrdiff_t>(end));
    out.periods.assign(periods.begin() + static_cast<std::ptrdiff_t>(begin),
                       periods.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

void DesignMatrix::write_csv(const std::string& path) const {
    std::vector<std::string> header;
    header.push_back("period");
    header.insert(header.end(), feature_names.begin(), feature_names.end());
    header.push_back("target");
    std::vector<std::vector<std::string>> out_rows;
    out_rows.reserve(rows());
    for (std::size_t r = 0; r < rows(); ++r) {
        std::vector<std::string> row;
        row.push_back(periods[r].str());
        for (std::size_t c = 0; c < cols(); ++c) row.push_back(csv::format_double(X(r, c)));
        row.push_back(csv::format_double(y[r]));
        out_rows.push_back(std::move(row));
    }
    csv::write_file(path, header, out_rows);
}

double median_of(std::vector<double> values) {
    if (values.empty()) throw ContractError("median of empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double sample_sd(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n == 0) throw ContractError("sd of empty list");
    if (n == 1) return 0.0;
    const double mean = kernels::sum(values) / static_cast<double>(n);
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

SummaryStats summary_stats(const std::vector<double>& values) {
    if (values.empty()) throw ContractError("summary_stats: empty list");
    SummaryStats s;
    s.n = values.size();
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    s.median = median_of(values);
    s.mean = kernels::sum(values) / static_cast<double>(values.size());
    s.sd = sample_sd(values);
    return s;
}

} // namespace wsbf
