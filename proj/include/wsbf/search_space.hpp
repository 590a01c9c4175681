#ifndef WSBF_SEARCH_SPACE_HPP
#define WSBF_SEARCH_SPACE_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "wsbf/model.hpp"
#include "wsbf/rng.hpp"

namespace wsbf {

struct IntRange {
    std::int64_t lo = 0, hi = 0;
};
struct FloatRange {
    double lo = 0.0, hi = 0.0;
};
struct Categorical {
    std::vector<std::string> tokens;
};
struct BooleanDim {};

struct Dimension {
    std::string name;
    std::variant<IntRange, FloatRange, Categorical, BooleanDim> domain;
};

/// Ordered, typed hyperparameter domains.
class SearchSpace {
public:
    SearchSpace() = default;
    explicit SearchSpace(std::vector<Dimension> dims);

    const std::vector<Dimension>& dimensions() const { return dims_; }
    std::size_t size() const { return dims_.size(); }

    /// Uniform sample of every dimension.
    Hyperparams sample(Rng& rng) const;

    /// Resample one dimension of `hp` in place.
    void resample_dimension(Hyperparams& hp, std::size_t dim, Rng& rng) const;

    /// True when every value lies inside its dimension's domain and no extra
    /// keys are present.
    bool contains(const Hyperparams& hp) const;

    // Continuous relaxation used by PSO: every dimension maps to a double
    // interval (ints and floats to their range, categoricals to [0, K-1],
    // booleans to [0, 1]); decode() rounds back to a valid assignment.
    double relaxed_lo(std::size_t dim) const;
    double relaxed_hi(std::size_t dim) const;
    Hyperparams decode(const std::vector<double>& position) const;

private:
    std::vector<Dimension> dims_;
};

/// A concrete assignment plus its fitness once evaluated (mean fold MAE, kWh).
struct Candidate {
    Hyperparams values;
    double fitness = std::numeric_limits<double>::infinity();
    bool evaluated = false;
};

/// Hyperparameter domains for the tunable learners.
SearchSpace default_search_space(ModelKind kind);

/// The per-model selected values used when tuning is skipped.
Hyperparams default_hyperparams(ModelKind kind);

} // namespace wsbf

#endif // WSBF_SEARCH_SPACE_HPP
