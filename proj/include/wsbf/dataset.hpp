#ifndef WSBF_DATASET_HPP
#define WSBF_DATASET_HPP

#include <optional>
#include <string>
#include <vector>

#include "wsbf/matrix.hpp"

namespace wsbf {

/// Calendar month, serialized as "YYYY-MM".
struct Period {
    int year = 0;
    int month = 0; // 1..12

    auto operator<=>(const Period&) const = default;

    Period next() const { return month == 12 ? Period{year + 1, 1} : Period{year, month + 1}; }

    /// Months elapsed since `other` (negative if this is earlier).
    int months_since(const Period& other) const {
        return (year - other.year) * 12 + (month - other.month);
    }

    std::string str() const;
    static Period parse(const std::string& s);
};

/// Monthly series: strictly consecutive periods, positive kWh target, and
/// named exogenous columns whose cells may be missing until imputation.
struct TimeSeriesDataset {
    std::vector<Period> periods;
    std::vector<double> target;
    std::vector<std::string> exog_names;
    // exog[c][t] is column c at period t
    std::vector<std::vector<std::optional<double>>> exog;
    std::string meta;

    std::size_t size() const { return periods.size(); }
    bool has_missing() const;

    /// Throws ValidationError if any invariant is broken.
    void validate() const;
};

/// Fully numeric supervised table: one row per usable period.
struct DesignMatrix {
    std::vector<std::string> feature_names;
    Matrix X;
    std::vector<double> y;
    std::vector<Period> periods; // aligned with rows of X

    std::size_t rows() const { return X.rows(); }
    std::size_t cols() const { return X.cols(); }

    std::size_t feature_index(const std::string& name) const;

    /// Rows in original order with only the named features kept.
    DesignMatrix with_features(const std::vector<std::string>& names) const;

    DesignMatrix slice_rows(std::size_t begin, std::size_t end) const;

    void write_csv(const std::string& path) const;
};

struct SummaryStats {
    std::size_t n = 0;
    double min = 0, max = 0, median = 0, mean = 0, sd = 0;
};

/// Loads and validates the raw monthly CSV. `schema` is the exact expected
/// header; the first two columns must be the date and the target. Missing
/// numeric cells are empty or the literal "NA".
TimeSeriesDataset load_csv(const std::string& path, const std::vector<std::string>& schema);

TimeSeriesDataset load_csv_string(const std::string& text, const std::vector<std::string>& schema,
                                  const std::string& origin = "<string>");

/// Replaces each missing exogenous cell with the arithmetic mean of the
/// observed values of the same column in the same calendar month across all
/// years. Throws NumericError if a (column, month) has no observed value.
TimeSeriesDataset impute_same_month_mean(const TimeSeriesDataset& ds);

/// Builds the supervised table: lag columns (ascending), exogenous columns in
/// dataset order, one dummy per calendar month (always all 12), one dummy per
/// observed year (ascending), and the pandemic flag. Rows whose lag cells
/// would reach before the start of the series are dropped.
DesignMatrix build_design_matrix(const TimeSeriesDataset& ds, const std::vector<int>& lags,
                                 const Period& covid_start, const Period& covid_end);

std::vector<int> default_lags(); // 1..12

SummaryStats summary_stats(const std::vector<double>& values);

/// Sample median (even length: mean of the two central order statistics).
double median_of(std::vector<double> values);

/// Sample standard deviation (divisor n-1; 0 for n==1).
double sample_sd(const std::vector<double>& values);

} // namespace wsbf

#endif // WSBF_DATASET_HPP
