#include "wsbf/metaheuristics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "wsbf/csv.hpp"
#include "wsbf/errors.hpp"
#include "wsbf/evaluation.hpp"
#include "wsbf/rng.hpp"

namespace wsbf {

namespace {

// Evaluates one wave of candidates. Work is distributed over threads but
// results land by index and the log order is fixed, so the outcome matches
// serial execution exactly.
std::vector<double> evaluate_wave(const Objective& objective, const std::vector<Hyperparams>& wave,
                                  std::size_t base_index, int threads) {
    std::vector<double> fitness(wave.size());
    std::size_t n_threads = threads > 0 ? static_cast<std::size_t>(threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, wave.size());
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < wave.size(); ++i) fitness[i] = objective(wave[i], base_index + i);
        return fitness;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(wave.size());
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= wave.size()) return;
                try {
                    fitness[i] = objective(wave[i], base_index + i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return fitness;
}

void log_wave(std::vector<Candidate>& log, const std::vector<Hyperparams>& wave,
              const std::vector<double>& fitness) {
    for (std::size_t i = 0; i < wave.size(); ++i)
        log.push_back(Candidate{wave[i], fitness[i], true});
}

// index of the strictly smallest fitness; earlier index wins ties
std::size_t argmin(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

} // namespace

OptResult ga_optimize(const Objective& objective, const SearchSpace& space, const GaConfig& config,
                      std::uint64_t seed) {
    if (config.population < 2 || config.iterations < 1)
        throw ContractError("ga: population must be >= 2 and iterations >= 1");
    const std::size_t pop_size = static_cast<std::size_t>(config.population);
    Rng rng(derive_seed(seed, "ga"));

    OptResult result;
    result.trace.optimizer = "ga";
    result.trace.seed = seed;

    // iteration 1: the initial population
    std::vector<Hyperparams> wave;
    wave.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) wave.push_back(space.sample(rng));
    std::vector<double> fitness = evaluate_wave(objective, wave, 0, config.threads);
    log_wave(result.evaluation_log, wave, fitness);

    std::vector<Candidate> population(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) population[i] = Candidate{wave[i], fitness[i], true};

    auto population_best = [&]() {
        std::size_t best = 0;
        for (std::size_t i = 1; i < population.size(); ++i)
            if (population[i].fitness < population[best].fitness) best = i;
        return best;
    };

    std::size_t best_idx = population_best();
    Candidate best_ever = population[best_idx];
    result.trace.best_so_far.push_back(best_ever.fitness);
    result.trace.iteration_best.push_back(best_ever.fitness);

    auto tournament = [&]() -> const Candidate& {
        std::size_t winner = rng.index(pop_size);
        for (int t = 1; t < config.tournament; ++t) {
            const std::size_t contender = rng.index(pop_size);
            if (population[contender].fitness < population[winner].fitness) winner = contender;
        }
        return population[winner];
    };

    for (int gen = 1; gen < config.iterations; ++gen) {
        wave.clear();
        for (std::size_t o = 0; o < pop_size; ++o) {
            const Candidate& a = tournament();
            const Candidate& b = tournament();
            Hyperparams child;
            for (const auto& dim : space.dimensions())
                child[dim.name] = rng.coin() ? a.values.at(dim.name) : b.values.at(dim.name);
            if (rng.uniform01() < config.mutation_rate)
                space.resample_dimension(child, rng.index(space.size()), rng);
            wave.push_back(std::move(child));
        }
        fitness =
            evaluate_wave(objective, wave, static_cast<std::size_t>(gen) * pop_size, config.threads);
        log_wave(result.evaluation_log, wave, fitness);

        // elite survives; the worst offspring makes room
        const Candidate elite = population[population_best()];
        std::vector<std::size_t> order(pop_size);
        for (std::size_t i = 0; i < pop_size; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return fitness[x] < fitness[y]; });
        std::vector<Candidate> next_pop;
        next_pop.reserve(pop_size);
        next_pop.push_back(elite);
        for (std::size_t i = 0; i + 1 < pop_size; ++i)
            next_pop.push_back(Candidate{wave[order[i]], fitness[order[i]], true});
        population = std::move(next_pop);

        const std::size_t wave_best = argmin(fitness);
        if (fitness[wave_best] < best_ever.fitness)
            best_ever = Candidate{wave[wave_best], fitness[wave_best], true};
        result.trace.best_so_far.push_back(best_ever.fitness);
        result.trace.iteration_best.push_back(population[population_best()].fitness);
    }

    result.best = best_ever;
    result.trace.evaluations = result.evaluation_log.size();
    return result;
}

OptResult pso_optimize(const Objective& objective, const SearchSpace& space, const PsoConfig& config,
                       std::uint64_t seed) {
    if (config.particles < 1 || config.iterations < 1)
        throw ContractError("pso: particles and iterations must be >= 1");
    const std::size_t n_particles = static_cast<std::size_t>(config.particles);
    const std::size_t dims = space.size();
    Rng rng(derive_seed(seed, "pso"));

    OptResult result;
    result.trace.optimizer = "pso";
    result.trace.seed = seed;

    std::vector<std::vector<double>> position(n_particles, std::vector<double>(dims));
    std::vector<std::vector<double>> velocity(n_particles, std::vector<double>(dims, 0.0));
    for (std::size_t p = 0; p < n_particles; ++p)
        for (std::size_t d = 0; d < dims; ++d)
            position[p][d] = rng.uniform(space.relaxed_lo(d), space.relaxed_hi(d));

    auto decode_wave = [&]() {
        std::vector<Hyperparams> wave;
        wave.reserve(n_particles);
        for (const auto& pos : position) wave.push_back(space.decode(pos));
        return wave;
    };

    std::vector<Hyperparams> wave = decode_wave();
    std::vector<double> fitness = evaluate_wave(objective, wave, 0, config.threads);
    log_wave(result.evaluation_log, wave, fitness);

    std::vector<std::vector<double>> pbest_pos = position;
    std::vector<double> pbest_fit = fitness;
    std::size_t g = argmin(fitness);
    std::vector<double> gbest_pos = position[g];
    Candidate gbest{wave[g], fitness[g], true};

    result.trace.best_so_far.push_back(gbest.fitness);
    result.trace.iteration_best.push_back(gbest.fitness);

    for (int iter = 1; iter < config.iterations; ++iter) {
        for (std::size_t p = 0; p < n_particles; ++p) {
            for (std::size_t d = 0; d < dims; ++d) {
                const double r1 = rng.uniform01();
                const double r2 = rng.uniform01();
                velocity[p][d] = config.inertia * velocity[p][d] +
                                 config.cognitive * r1 * (pbest_pos[p][d] - position[p][d]) +
                                 config.social * r2 * (gbest_pos[d] - position[p][d]);
                position[p][d] = std::clamp(position[p][d] + velocity[p][d], space.relaxed_lo(d),
                                            space.relaxed_hi(d));
            }
        }
        wave = decode_wave();
        fitness = evaluate_wave(objective, wave, static_cast<std::size_t>(iter) * n_particles,
                                config.threads);
        log_wave(result.evaluation_log, wave, fitness);

        for (std::size_t p = 0; p < n_particles; ++p) {
            if (fitness[p] < pbest_fit[p]) {
                pbest_fit[p] = fitness[p];
                pbest_pos[p] = position[p];
            }
            if (fitness[p] < gbest.fitness) {
                gbest = Candidate{wave[p], fitness[p], true};
                gbest_pos = position[p];
            }
        }
        result.trace.best_so_far.push_back(gbest.fitness);
        result.trace.iteration_best.push_back(fitness[argmin(fitness)]);
    }

    result.best = gbest;
    result.trace.evaluations = result.evaluation_log.size();
    return result;
}

std::vector<std::vector<std::size_t>> contiguous_folds(std::size_t n, int k) {
    if (k < 1 || n < static_cast<std::size_t>(k))
        throw ContractError("contiguous_folds: need at least one row per fold");
    std::vector<std::vector<std::size_t>> folds;
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t extra = n % static_cast<std::size_t>(k);
    std::size_t next = 0;
    for (int f = 0; f < k; ++f) {
        const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        std::vector<std::size_t> fold(size);
        for (std::size_t i = 0; i < size; ++i) fold[i] = next + i;
        next += size;
        folds.push_back(std::move(fold));
    }
    return folds;
}

Objective cv_objective(FitPredictFn fit, const DesignMatrix& dm, int k, std::uint64_t seed) {
    if (dm.rows() < static_cast<std::size_t>(k))
        throw ContractError("cv_objective: fewer rows than folds");
    const auto folds = contiguous_folds(dm.rows(), k);
    return [fit = std::move(fit), dm, folds, k, seed](const Hyperparams& hp,
                                                      std::size_t eval_index) -> double {
        double total = 0.0;
        for (int f = 0; f < k; ++f) {
            const auto& fold = folds[static_cast<std::size_t>(f)];
            std::vector<std::size_t> train_rows;
            train_rows.reserve(dm.rows() - fold.size());
            for (std::size_t r = 0; r < dm.rows(); ++r)
                if (r < fold.front() || r > fold.back()) train_rows.push_back(r);
            const Matrix Xtr = dm.X.select_rows(train_rows);
            const Matrix Xte = dm.X.select_rows(fold);
            std::vector<double> ytr, yte;
            ytr.reserve(train_rows.size());
            for (const auto r : train_rows) ytr.push_back(dm.y[r]);
            for (const auto r : fold) yte.push_back(dm.y[r]);
            const std::uint64_t fit_seed =
                derive_seed(seed, static_cast<std::uint64_t>(eval_index),
                            static_cast<std::uint64_t>(f));
            try {
                const std::vector<double> preds = fit(Xtr, ytr, Xte, hp, fit_seed);
                total += mae(yte, preds);
            } catch (const NumericError&) {
                return std::numeric_limits<double>::infinity();
            }
        }
        return total / static_cast<double>(k);
    };
}

Objective cv_objective_for_model(ModelKind kind, const DesignMatrix& dm, int k, std::uint64_t seed) {
    FitPredictFn fit = [kind, names = dm.feature_names](const Matrix& Xtr,
                                                        const std::vector<double>& ytr,
                                                        const Matrix& Xte, const Hyperparams& hp,
                                                        std::uint64_t fit_seed) {
        const auto model = fit_model(kind, Xtr, ytr, names, hp, fit_seed);
        return model->predict(Xte);
    };
    return cv_objective(std::move(fit), dm, k, seed);
}

Campaign multi_seed_campaign(const std::function<OptResult(std::uint64_t)>& run,
                             const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw ContractError("multi_seed_campaign: need at least one seed");
    Campaign campaign;
    for (const auto s : seeds) campaign.runs.push_back(run(s));
    const std::size_t iters = campaign.runs.front().trace.best_so_far.size();
    for (const auto& r : campaign.runs)
        if (r.trace.best_so_far.size() != iters)
            throw ContractError("multi_seed_campaign: runs disagree on iteration count");
    campaign.mean_best_so_far.assign(iters, 0.0);
    for (const auto& r : campaign.runs)
        for (std::size_t i = 0; i < iters; ++i)
            campaign.mean_best_so_far[i] += r.trace.best_so_far[i];
    for (auto& v : campaign.mean_best_so_far) v /= static_cast<double>(campaign.runs.size());
    return campaign;
}

void write_traces_csv(const std::string& path, const std::vector<FitnessTrace>& traces) {
    std::vector<std::string> header{"iteration", "best_so_far", "iteration_best", "seed",
                                    "optimizer"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& trace : traces)
        for (std::size_t i = 0; i < trace.best_so_far.size(); ++i)
            rows.push_back({std::to_string(i + 1), csv::format_double(trace.best_so_far[i]),
                            csv::format_double(trace.iteration_best[i]), std::to_string(trace.seed),
                            trace.optimizer});
    csv::write_file(path, header, rows);
}

} // namespace wsbf
