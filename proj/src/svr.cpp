#include "wsbf/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsbf/errors.hpp"
#include "wsbf/kernels.hpp"

namespace wsbf {

namespace {

constexpr double kTol = 1e-3;
constexpr double kTau = 1e-12;
constexpr std::size_t kMaxPairUpdates = 500000;

double kernel_eval(SvrKernel kind, double gamma, double coef0, int degree,
                   std::span<const double> a, std::span<const double> b) {
    switch (kind) {
        case SvrKernel::Rbf:
            return std::exp(-gamma * kernels::squared_distance(a, b));
        case SvrKernel::Poly:
            return std::pow(gamma * kernels::dot(a, b) + coef0, degree);
        case SvrKernel::Sigmoid:
            return std::tanh(gamma * kernels::dot(a, b) + coef0);
    }
    return 0.0;
}

// The dual is solved over 2n variables lambda = [alpha; alpha*] with signs
// z = [+1...;-1...], box [0, C], and the coupling constraint z'lambda = 0.
// v_t = -z_t * grad_t is tracked through the cached uncentered predictions
// f_tilde = K beta.
struct Smo {
    const Matrix& K;
    const std::vector<double>& y;
    double C;
    double eps;

    std::size_t n;
    std::vector<double> lambda; // 2n
    std::vector<double> beta;   // n, alpha - alpha*
    std::vector<double> f;      // n, K beta

    bool converged = false;
    double gap = 0.0;
    double bias = 0.0;

    explicit Smo(const Matrix& K_, const std::vector<double>& y_, double C_, double eps_)
        : K(K_), y(y_), C(C_), eps(eps_), n(y_.size()), lambda(2 * n, 0.0), beta(n, 0.0),
          f(n, 0.0) {}

    double z_of(std::size_t t) const { return t < n ? 1.0 : -1.0; }
    std::size_t sample_of(std::size_t t) const { return t < n ? t : t - n; }
    double v_of(std::size_t t) const { return (y[sample_of(t)] - f[sample_of(t)]) - z_of(t) * eps; }

    bool in_up(std::size_t t) const {
        return t < n ? lambda[t] < C : lambda[t] > 0.0;
    }
    bool in_low(std::size_t t) const {
        return t < n ? lambda[t] > 0.0 : lambda[t] < C;
    }

    void solve() {
        for (std::size_t iter = 0; iter < kMaxPairUpdates; ++iter) {
            // maximal violating pair
            double v_up = -std::numeric_limits<double>::infinity();
            double v_low = std::numeric_limits<double>::infinity();
            std::size_t s = 2 * n, t = 2 * n;
            for (std::size_t u = 0; u < 2 * n; ++u) {
                const double v = v_of(u);
                if (in_up(u) && v > v_up) {
                    v_up = v;
                    s = u;
                }
                if (in_low(u) && v < v_low) {
                    v_low = v;
                    t = u;
                }
            }
            gap = v_up - v_low;
            if (s >= 2 * n || t >= 2 * n || gap <= kTol) {
                converged = true;
                break;
            }
            step(s, t, v_up, v_low);
        }
        compute_bias();
    }

    void step(std::size_t s, std::size_t t, double v_s, double v_t) {
        const std::size_t i = sample_of(s), j = sample_of(t);
        const double zs = z_of(s), zt = z_of(t);
        const double sign = zs * zt;
        double q = K(i, i) + K(j, j) - 2.0 * K(i, j);
        if (q < kTau) q = kTau; // indefinite kernels (sigmoid) can produce q <= 0
        // unconstrained optimum along the feasible direction, then box clamp
        double a = zs * (v_s - v_t) / q;
        double lo = -lambda[s], hi = C - lambda[s];
        if (sign > 0.0) {
            lo = std::max(lo, lambda[t] - C);
            hi = std::min(hi, lambda[t]);
        } else {
            lo = std::max(lo, -lambda[t]);
            hi = std::min(hi, C - lambda[t]);
        }
        a = std::clamp(a, lo, hi);
        if (a == 0.0) return;

        lambda[s] += a;
        lambda[t] -= sign * a;
        const double delta = zs * a; // change of beta_i; beta_j moves by -delta
        beta[i] += delta;
        beta[j] -= delta;
        for (std::size_t r = 0; r < n; ++r) f[r] += delta * (K(r, i) - K(r, j));
    }

    void compute_bias() {
        double interior_sum = 0.0;
        std::size_t interior_count = 0;
        double lb = -std::numeric_limits<double>::infinity();
        double ub = std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < 2 * n; ++u) {
            const double v = v_of(u);
            const bool at_zero = lambda[u] <= 0.0;
            const bool at_c = lambda[u] >= C;
            if (!at_zero && !at_c) {
                interior_sum += v;
                ++interior_count;
            } else if ((at_zero && z_of(u) > 0.0) || (at_c && z_of(u) < 0.0)) {
                lb = std::max(lb, v);
            } else {
                ub = std::min(ub, v);
            }
        }
        if (interior_count > 0)
            bias = interior_sum / static_cast<double>(interior_count);
        else
            bias = 0.5 * (lb + ub);
    }
};

} // namespace

SvrKernel svr_kernel_from_name(const std::string& name) {
    if (name == "poly") return SvrKernel::Poly;
    if (name == "rbf") return SvrKernel::Rbf;
    if (name == "sigmoid") return SvrKernel::Sigmoid;
    throw ContractError("svr: unknown kernel '" + name + "'");
}

std::string svr_kernel_name(SvrKernel k) {
    switch (k) {
        case SvrKernel::Poly: return "poly";
        case SvrKernel::Rbf: return "rbf";
        case SvrKernel::Sigmoid: return "sigmoid";
    }
    return "?";
}

std::unique_ptr<SvrModel> SvrModel::fit(const Matrix& X, const std::vector<double>& y,
                                        const std::vector<std::string>& feature_names,
                                        const Hyperparams& hp, std::uint64_t seed) {
    if (X.rows() == 0 || X.rows() != y.size()) throw ContractError("svr: bad training shape");
    const double C = hp_double(hp, "C");
    const double eps = hp_double(hp, "epsilon");
    if (C <= 0.0) throw ContractError("svr: C must be positive");
    if (eps < 0.0) throw ContractError("svr: epsilon must be nonnegative");

    const Scaler scaler = Scaler::fit(X);
    const TargetScaler ts = TargetScaler::fit(y);
    const Matrix Xs = scaler.apply(X);
    const std::vector<double> ys = ts.apply(y);

    Params p;
    p.kernel = svr_kernel_from_name(hp_string(hp, "kernel"));
    // gamma follows the "scale" convention: 1 / (n_features * Var[all cells])
    double cell_var = 0.0;
    {
        const double m = kernels::sum(Xs.data()) / static_cast<double>(Xs.data().size());
        for (const double v : Xs.data()) cell_var += (v - m) * (v - m);
        cell_var /= static_cast<double>(Xs.data().size());
    }
    p.gamma = cell_var > 0.0 ? 1.0 / (static_cast<double>(Xs.cols()) * cell_var) : 1.0;
    p.coef0 = 0.0;
    p.degree = 3;

    const std::size_t n = Xs.rows();
    Matrix K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            K(i, j) = K(j, i) = kernel_eval(p.kernel, p.gamma, p.coef0, p.degree, Xs.row(i), Xs.row(j));

    Smo smo(K, ys, C, eps);
    smo.solve();
    p.converged = smo.converged;
    p.kkt_gap = std::max(0.0, smo.gap);
    p.bias = smo.bias;
    for (std::size_t i = 0; i < n; ++i) {
        if (smo.beta[i] != 0.0) {
            p.support.append_row(Xs.row(i));
            p.beta.push_back(smo.beta[i]);
        }
    }
    (void)seed; // deterministic fit, kept in the model record for provenance
    return std::make_unique<SvrModel>(feature_names, hp, seed, std::move(p), scaler, ts);
}

std::vector<double> SvrModel::predict_impl(const Matrix& X) const {
    std::vector<double> out(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const auto xs = scaler_.apply_row(X.row(r));
        double acc = params_.bias;
        for (std::size_t s = 0; s < params_.beta.size(); ++s)
            acc += params_.beta[s] * kernel_eval(params_.kernel, params_.gamma, params_.coef0,
                                                 params_.degree, params_.support.row(s), xs);
        out[r] = target_scaler_.invert(acc);
    }
    return out;
}

void SvrModel::save_params(nlohmann::json& j) const {
    j["kernel"] = svr_kernel_name(params_.kernel);
    j["gamma"] = params_.gamma;
    j["coef0"] = params_.coef0;
    j["degree"] = params_.degree;
    j["bias"] = params_.bias;
    j["converged"] = params_.converged;
    j["kkt_gap"] = params_.kkt_gap;
    j["beta"] = params_.beta;
    nlohmann::json sv = nlohmann::json::array();
    for (std::size_t r = 0; r < params_.support.rows(); ++r) {
        const auto row = params_.support.row(r);
        sv.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["support"] = std::move(sv);
    j["scaler"] = scaler_.to_json();
    j["target_scaler"] = target_scaler_.to_json();
}

std::unique_ptr<Model> SvrModel::load(const nlohmann::json& j) {
    Params p;
    p.kernel = svr_kernel_from_name(j.at("kernel").get<std::string>());
    p.gamma = j.at("gamma").get<double>();
    p.coef0 = j.at("coef0").get<double>();
    p.degree = j.at("degree").get<int>();
    p.bias = j.at("bias").get<double>();
    p.converged = j.at("converged").get<bool>();
    p.kkt_gap = j.at("kkt_gap").get<double>();
    p.beta = j.at("beta").get<std::vector<double>>();
    for (const auto& row : j.at("support")) {
        const auto vals = row.get<std::vector<double>>();
        p.support.append_row(vals);
    }
    return std::make_unique<SvrModel>(
        j.at("features").get<std::vector<std::string>>(),
        hyperparams_from_json(j.at("hyperparams")), j.at("seed").get<std::uint64_t>(), std::move(p),
        Scaler::from_json(j.at("scaler")), TargetScaler::from_json(j.at("target_scaler")));
}

} // namespace wsbf
