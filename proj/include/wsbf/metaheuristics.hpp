#ifndef WSBF_METAHEURISTICS_HPP
#define WSBF_METAHEURISTICS_HPP

#include <functional>
#include <string>
#include <vector>

#include "wsbf/dataset.hpp"
#include "wsbf/search_space.hpp"

namespace wsbf {

/// Objective over a concrete assignment. `eval_index` is the global
/// evaluation counter; implementations use it to derive per-candidate seeds so
/// concurrent and serial evaluation produce identical results.
using Objective = std::function<double(const Hyperparams&, std::size_t eval_index)>;

struct FitnessTrace {
    std::string optimizer;
    std::uint64_t seed = 0;
    std::vector<double> best_so_far;    // one entry per iteration, non-increasing
    std::vector<double> iteration_best; // best fitness in that iteration's population
    std::size_t evaluations = 0;
};

struct OptResult {
    Candidate best;
    FitnessTrace trace;
    std::vector<Candidate> evaluation_log; // every candidate ever scored, in order
};

struct GaConfig {
    int population = 30;
    int iterations = 25;
    double mutation_rate = 0.5; // per-offspring probability of resampling one gene
    int tournament = 3;
    int threads = 0; // 0: hardware concurrency
};

/// Tournament-selection GA with uniform crossover, single-gene mutation and
/// elitism of one. The initial population counts as iteration 1, so the
/// budget is exactly population x iterations evaluations.
OptResult ga_optimize(const Objective& objective, const SearchSpace& space, const GaConfig& config,
                      std::uint64_t seed);

struct PsoConfig {
    int particles = 30;
    int iterations = 25;
    double inertia = 0.9;
    double cognitive = 0.5;
    double social = 0.3;
    int threads = 0;
};

/// Global-best PSO over a continuous relaxation of the space; integer,
/// categorical and boolean dimensions are rounded at evaluation time only.
OptResult pso_optimize(const Objective& objective, const SearchSpace& space, const PsoConfig& config,
                       std::uint64_t seed);

/// Contiguous near-equal folds over n rows (earlier rows in earlier folds).
std::vector<std::vector<std::size_t>> contiguous_folds(std::size_t n, int k);

/// Pluggable fit-and-predict: train on (Xtr, ytr), return predictions on Xte.
using FitPredictFn =
    std::function<std::vector<double>(const Matrix& Xtr, const std::vector<double>& ytr,
                                      const Matrix& Xte, const Hyperparams& hp, std::uint64_t seed)>;

/// k-fold cross-validated MAE objective (mean of the per-fold MAEs, kWh).
/// Fitting seeds derive from (seed, eval index, fold index); a learner that
/// throws NumericError scores +infinity.
Objective cv_objective(FitPredictFn fit, const DesignMatrix& dm, int k, std::uint64_t seed);

/// cv_objective specialised to a built-in learner kind.
Objective cv_objective_for_model(ModelKind kind, const DesignMatrix& dm, int k, std::uint64_t seed);

struct Campaign {
    std::vector<OptResult> runs;            // one per seed
    std::vector<double> mean_best_so_far;   // per-iteration mean across seeds
};

/// Runs the optimizer once per seed and averages the best-so-far traces.
Campaign multi_seed_campaign(const std::function<OptResult(std::uint64_t)>& run,
                             const std::vector<std::uint64_t>& seeds);

/// trace rows: iteration,best_so_far,iteration_best,seed,optimizer
void write_traces_csv(const std::string& path, const std::vector<FitnessTrace>& traces);

} // namespace wsbf

#endif // WSBF_METAHEURISTICS_HPP
