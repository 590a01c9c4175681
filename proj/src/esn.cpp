#include "wsbf/esn.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "wsbf/errors.hpp"
#include "wsbf/kernels.hpp"
#include "wsbf/rng.hpp"

namespace wsbf {

double spectral_radius(const std::vector<double>& m, std::size_t dim) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
        m.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    Eigen::EigenSolver<Eigen::MatrixXd> solver(M, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

// Sparse random reservoir: entries uniform in [-1, 1], kept with probability
// `sparsity`. Returns the raw (unscaled) matrix.
std::vector<double> random_reservoir(std::size_t dim, double sparsity, Rng& rng) {
    std::vector<double> W(dim * dim, 0.0);
    for (auto& v : W) {
        const double keep = rng.uniform01();
        const double value = rng.uniform(-1.0, 1.0);
        if (keep < sparsity) v = value;
    }
    return W;
}

} // namespace

void EsnModel::regenerate_weights(std::size_t inputs) {
    const std::size_t dim = params_.reservoirs;
    std::uint64_t seed = params_.reservoir_seed;
    for (int attempt = 0;; ++attempt) {
        Rng rng(seed);
        W_ = random_reservoir(dim, params_.sparsity, rng);
        Win_.resize(dim * inputs);
        for (auto& v : Win_) v = rng.uniform(-1.0, 1.0);
        const double rho = spectral_radius(W_, dim);
        if (rho > 1e-12) {
            const double scale = params_.spectral_radius / rho;
            for (auto& v : W_) v *= scale;
            params_.reservoir_seed = seed;
            return;
        }
        if (attempt >= 5)
            throw NumericError("esn: reservoir spectral radius is zero after 5 regenerations");
        seed = derive_seed(seed, "esn-retry");
    }
}

void EsnModel::advance(std::vector<double>& state, std::span<const double> input) const {
    const std::size_t dim = params_.reservoirs;
    std::vector<double> next(dim);
    for (std::size_t u = 0; u < dim; ++u) {
        const double rec = kernels::dot({W_.data() + u * dim, dim}, state);
        const double inj = kernels::dot({Win_.data() + u * input.size(), input.size()}, input);
        next[u] = std::tanh(rec + inj);
    }
    state = std::move(next);
}

EsnModel::EsnModel(std::vector<std::string> feature_names, Hyperparams hp, std::uint64_t seed,
                   Params params, Scaler scaler, TargetScaler target_scaler)
    : Model(ModelKind::Esn, std::move(feature_names), std::move(hp), seed),
      params_(std::move(params)), scaler_(std::move(scaler)),
      target_scaler_(std::move(target_scaler)) {
    regenerate_weights(scaler_.cols());
}

std::unique_ptr<EsnModel> EsnModel::fit(const Matrix& X, const std::vector<double>& y,
                                        const std::vector<std::string>& feature_names,
                                        const Hyperparams& hp, std::uint64_t seed) {
    if (X.rows() == 0 || X.rows() != y.size()) throw ContractError("esn: bad training shape");
    Params p;
    p.reservoirs = static_cast<std::size_t>(hp_int(hp, "reservoirs"));
    p.sparsity = hp_double(hp, "sparsity");
    p.spectral_radius = hp_double(hp, "spectral_radius");
    p.noise = hp_double(hp, "noise");
    if (p.reservoirs < 2) throw ContractError("esn: reservoirs must be >= 2");
    p.reservoir_seed = derive_seed(seed, "esn-reservoir");

    const Scaler scaler = Scaler::fit(X);
    const TargetScaler ts = TargetScaler::fit(y);
    const Matrix Xs = scaler.apply(X);
    const std::vector<double> ys = ts.apply(y);

    auto model = std::make_unique<EsnModel>(feature_names, hp, seed, std::move(p), scaler, ts);
    const std::size_t dim = model->params_.reservoirs;
    const std::size_t n = Xs.rows();

    // drive the reservoir in row order, with per-step additive uniform noise
    Rng noise_rng(derive_seed(seed, "esn-noise"));
    Matrix states(n, dim + 1);
    std::vector<double> state(dim, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        model->advance(state, Xs.row(t));
        for (std::size_t u = 0; u < dim; ++u)
            state[u] += model->params_.noise * (noise_rng.uniform01() - 0.5);
        for (std::size_t u = 0; u < dim; ++u) states(t, u) = state[u];
        states(t, dim) = 1.0;
    }

    // ridge readout: (S'S + 1e-6 I) w = S'y
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> S(
        states.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim + 1));
    Eigen::Map<const Eigen::VectorXd> yv(ys.data(), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd A = S.transpose() * S;
    A.diagonal().array() += 1e-6;
    const Eigen::VectorXd w = A.ldlt().solve(S.transpose() * yv);
    model->params_.readout.assign(w.data(), w.data() + w.size());
    model->params_.final_state = state;
    return model;
}

std::vector<double> EsnModel::predict_impl(const Matrix& X) const {
    std::vector<double> state = params_.final_state;
    if (state.empty()) state.assign(params_.reservoirs, 0.0);
    std::vector<double> out(X.rows());
    std::vector<double> extended(params_.reservoirs + 1);
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const auto xs = scaler_.apply_row(X.row(r));
        advance(state, xs);
        std::copy(state.begin(), state.end(), extended.begin());
        extended[params_.reservoirs] = 1.0;
        out[r] = target_scaler_.invert(kernels::dot(params_.readout, extended));
    }
    return out;
}

void EsnModel::save_params(nlohmann::json& j) const {
    j["reservoirs"] = params_.reservoirs;
    j["sparsity"] = params_.sparsity;
    j["spectral_radius"] = params_.spectral_radius;
    j["noise"] = params_.noise;
    j["reservoir_seed"] = params_.reservoir_seed;
    j["readout"] = params_.readout;
    j["final_state"] = params_.final_state;
    j["scaler"] = scaler_.to_json();
    j["target_scaler"] = target_scaler_.to_json();
}

std::unique_ptr<Model> EsnModel::load(const nlohmann::json& j) {
    Params p;
    p.reservoirs = j.at("reservoirs").get<std::size_t>();
    p.sparsity = j.at("sparsity").get<double>();
    p.spectral_radius = j.at("spectral_radius").get<double>();
    p.noise = j.at("noise").get<double>();
    p.reservoir_seed = j.at("reservoir_seed").get<std::uint64_t>();
    p.readout = j.at("readout").get<std::vector<double>>();
    p.final_state = j.at("final_state").get<std::vector<double>>();
    return std::make_unique<EsnModel>(
        j.at("features").get<std::vector<std::string>>(),
        hyperparams_from_json(j.at("hyperparams")), j.at("seed").get<std::uint64_t>(), std::move(p),
        Scaler::from_json(j.at("scaler")), TargetScaler::from_json(j.at("target_scaler")));
}

} // namespace wsbf
