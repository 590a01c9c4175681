#include "wsbf/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wsbf/errors.hpp"
#include "wsbf/kernels.hpp"
#include "wsbf/rng.hpp"

namespace wsbf {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

// Applies the activation to a pre-activation vector.
void apply_activation(Activation act, std::span<const double> pre, std::span<double> post) {
    const std::size_t n = pre.size();
    switch (act) {
        case Activation::Linear:
            std::copy(pre.begin(), pre.end(), post.begin());
            return;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < n; ++i) post[i] = sigmoid(pre[i]);
            return;
        case Activation::Tanh:
            for (std::size_t i = 0; i < n; ++i) post[i] = std::tanh(pre[i]);
            return;
        case Activation::Softplus:
            for (std::size_t i = 0; i < n; ++i) post[i] = softplus(pre[i]);
            return;
        case Activation::Softsign:
            for (std::size_t i = 0; i < n; ++i) post[i] = pre[i] / (1.0 + std::fabs(pre[i]));
            return;
        case Activation::Mish:
            for (std::size_t i = 0; i < n; ++i) post[i] = pre[i] * std::tanh(softplus(pre[i]));
            return;
        case Activation::Softmax: {
            double mx = pre[0];
            for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, pre[i]);
            double z = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                post[i] = std::exp(pre[i] - mx);
                z += post[i];
            }
            for (std::size_t i = 0; i < n; ++i) post[i] /= z;
            return;
        }
    }
}

// d(loss)/d(pre) from d(loss)/d(post). Softmax mixes components; the others
// are elementwise.
void activation_backward(Activation act, std::span<const double> pre, std::span<const double> post,
                         std::span<const double> dpost, std::span<double> dpre) {
    const std::size_t n = pre.size();
    switch (act) {
        case Activation::Linear:
            std::copy(dpost.begin(), dpost.end(), dpre.begin());
            return;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < n; ++i) dpre[i] = dpost[i] * post[i] * (1.0 - post[i]);
            return;
        case Activation::Tanh:
            for (std::size_t i = 0; i < n; ++i) dpre[i] = dpost[i] * (1.0 - post[i] * post[i]);
            return;
        case Activation::Softplus:
            for (std::size_t i = 0; i < n; ++i) dpre[i] = dpost[i] * sigmoid(pre[i]);
            return;
        case Activation::Softsign:
            for (std::size_t i = 0; i < n; ++i) {
                const double d = 1.0 + std::fabs(pre[i]);
                dpre[i] = dpost[i] / (d * d);
            }
            return;
        case Activation::Mish:
            for (std::size_t i = 0; i < n; ++i) {
                const double sp = softplus(pre[i]);
                const double t = std::tanh(sp);
                dpre[i] = dpost[i] * (t + pre[i] * (1.0 - t * t) * sigmoid(pre[i]));
            }
            return;
        case Activation::Softmax: {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += dpost[i] * post[i];
            for (std::size_t i = 0; i < n; ++i) dpre[i] = post[i] * (dpost[i] - dot);
            return;
        }
    }
}

struct Adam {
    std::vector<double> m, v;
    double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::size_t t = 0;

    explicit Adam(std::size_t size) : m(size, 0.0), v(size, 0.0) {}

    void begin_step() { ++t; }

    // Updates one parameter block; `offset` addresses this block's slice of
    // the moment buffers.
    void update(std::size_t offset, std::span<double> params, std::span<const double> grads) {
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            const std::size_t k = offset + i;
            m[k] = beta1 * m[k] + (1.0 - beta1) * grads[i];
            v[k] = beta2 * v[k] + (1.0 - beta2) * grads[i] * grads[i];
            params[i] -= lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + eps);
        }
    }
};

} // namespace

Activation activation_from_name(const std::string& name) {
    if (name == "linear") return Activation::Linear;
    if (name == "mish") return Activation::Mish;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "softmax") return Activation::Softmax;
    if (name == "softplus") return Activation::Softplus;
    if (name == "softsign") return Activation::Softsign;
    if (name == "tanh") return Activation::Tanh;
    throw ContractError("lstm: unknown activation '" + name + "'");
}

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Linear: return "linear";
        case Activation::Mish: return "mish";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Softmax: return "softmax";
        case Activation::Softplus: return "softplus";
        case Activation::Softsign: return "softsign";
        case Activation::Tanh: return "tanh";
    }
    return "?";
}

namespace {

// Forward pass for one sample (length-1 sequence, zero initial state).
// Scratch spans are unit-sized vectors owned by the caller.
struct GateScratch {
    std::vector<double> pre_i, pre_f, pre_g, pre_o;
    std::vector<double> gi, gf, gg, go;
    std::vector<double> c, hc, h;

    explicit GateScratch(std::size_t units)
        : pre_i(units), pre_f(units), pre_g(units), pre_o(units), gi(units), gf(units), gg(units),
          go(units), c(units), hc(units), h(units) {}
};

// Adds one sample's gate gradient to the W (and b) accumulators for gate
// block `gate` in {0: input, 2: candidate, 3: output}.
void accumulate_gate(std::span<double> gW, std::span<double> gb, const LstmModel::Weights& w,
                     std::size_t gate, std::span<const double> dgate, std::span<const double> x) {
    const std::size_t nu = w.units, ni = w.inputs;
    for (std::size_t u = 0; u < nu; ++u) {
        kernels::axpy(dgate[u], x, gW.subspan((gate * nu + u) * ni, ni));
        if (w.use_bias) gb[gate * nu + u] += dgate[u];
    }
}

double forward(const LstmModel::Weights& w, std::span<const double> x, GateScratch& s) {
    const std::size_t nu = w.units, ni = w.inputs;
    const double* Wp = w.W.data();
    for (std::size_t u = 0; u < nu; ++u) {
        s.pre_i[u] = kernels::dot({Wp + (0 * nu + u) * ni, ni}, x);
        s.pre_f[u] = kernels::dot({Wp + (1 * nu + u) * ni, ni}, x);
        s.pre_g[u] = kernels::dot({Wp + (2 * nu + u) * ni, ni}, x);
        s.pre_o[u] = kernels::dot({Wp + (3 * nu + u) * ni, ni}, x);
        if (w.use_bias) {
            s.pre_i[u] += w.b[0 * nu + u];
            s.pre_f[u] += w.b[1 * nu + u];
            s.pre_g[u] += w.b[2 * nu + u];
            s.pre_o[u] += w.b[3 * nu + u];
        }
    }
    for (std::size_t u = 0; u < nu; ++u) {
        s.gi[u] = sigmoid(s.pre_i[u]);
        s.gf[u] = sigmoid(s.pre_f[u]);
        s.go[u] = sigmoid(s.pre_o[u]);
    }
    apply_activation(w.activation, s.pre_g, s.gg);
    // zero previous cell state: c = i .* g
    for (std::size_t u = 0; u < nu; ++u) s.c[u] = s.gi[u] * s.gg[u];
    apply_activation(w.activation, s.c, s.hc);
    for (std::size_t u = 0; u < nu; ++u) s.h[u] = s.go[u] * s.hc[u];
    return kernels::dot(w.w_out, s.h) + w.b_out;
}

} // namespace

std::unique_ptr<LstmModel> LstmModel::fit(const Matrix& X, const std::vector<double>& y,
                                          const std::vector<std::string>& feature_names,
                                          const Hyperparams& hp, std::uint64_t seed) {
    if (X.rows() == 0 || X.rows() != y.size()) throw ContractError("lstm: bad training shape");
    const auto units = static_cast<std::size_t>(hp_int(hp, "units"));
    const auto epochs = hp_int(hp, "epochs");
    auto batch_size = static_cast<std::size_t>(hp_int(hp, "batch_size"));
    if (units < 1 || epochs < 1 || batch_size < 1)
        throw ContractError("lstm: units, epochs and batch_size must be >= 1");

    const Scaler scaler = Scaler::fit(X);
    const TargetScaler ts = TargetScaler::fit(y);
    const Matrix Xs = scaler.apply(X);
    const std::vector<double> ys = ts.apply(y);

    const std::size_t n = Xs.rows();
    const std::size_t ni = Xs.cols();
    batch_size = std::min(batch_size, n);

    Weights w;
    w.units = units;
    w.inputs = ni;
    w.use_bias = hp_bool(hp, "bias");
    w.activation = activation_from_name(hp_string(hp, "activation"));
    w.W.resize(4 * units * ni);
    w.U.resize(4 * units * units);
    w.b.assign(4 * units, 0.0);
    w.w_out.resize(units);

    Rng rng(derive_seed(seed, "lstm-init"));
    const double lim_w = std::sqrt(6.0 / static_cast<double>(ni + units));
    for (auto& v : w.W) v = rng.uniform(-lim_w, lim_w);
    const double lim_u = std::sqrt(6.0 / static_cast<double>(2 * units));
    for (auto& v : w.U) v = rng.uniform(-lim_u, lim_u);
    if (w.use_bias)
        for (std::size_t u = 0; u < units; ++u) w.b[1 * units + u] = 1.0; // forget-gate bias
    const double lim_out = std::sqrt(6.0 / static_cast<double>(units + 1));
    for (auto& v : w.w_out) v = rng.uniform(-lim_out, lim_out);
    w.b_out = 0.0;

    // With length-1 sequences the previous state is zero for every sample, so
    // the recurrent block U and the forget gate receive no gradient; they are
    // kept so the serialized cell is complete.
    const std::size_t n_params = w.W.size() + w.b.size() + w.w_out.size() + 1;
    const std::size_t off_b = w.W.size();
    const std::size_t off_out = off_b + w.b.size();
    const std::size_t off_bout = off_out + w.w_out.size();
    Adam adam(n_params);
    std::vector<double> gW(w.W.size()), gb(w.b.size()), gout(w.w_out.size());
    double gbout = 0.0;

    GateScratch s(units);
    std::vector<double> dh(units), dc(units), dpre(units), dgate(units);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> loss_history;
    loss_history.reserve(static_cast<std::size_t>(epochs));
    Rng shuffle_rng(derive_seed(seed, "lstm-shuffle"));

    for (std::int64_t epoch = 0; epoch < epochs; ++epoch) {
        // Fisher-Yates with the dedicated stream
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.index(i)]);
        double epoch_sse = 0.0;
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t end = std::min(start + batch_size, n);
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            std::fill(gW.begin(), gW.end(), 0.0);
            std::fill(gb.begin(), gb.end(), 0.0);
            std::fill(gout.begin(), gout.end(), 0.0);
            gbout = 0.0;

            for (std::size_t idx = start; idx < end; ++idx) {
                const auto x = Xs.row(order[idx]);
                const double target = ys[order[idx]];
                const double pred = forward(w, x, s);
                const double err = pred - target;
                epoch_sse += err * err;

                const double dy = 2.0 * err * inv_batch;
                gbout += dy;
                for (std::size_t u = 0; u < units; ++u) {
                    gout[u] += dy * s.h[u];
                    dh[u] = dy * w.w_out[u];
                }
                // h = o .* act(c)
                for (std::size_t u = 0; u < units; ++u) dgate[u] = dh[u] * s.hc[u]; // d(o)
                for (std::size_t u = 0; u < units; ++u) dc[u] = dh[u] * s.go[u];    // d(act(c))
                activation_backward(w.activation, s.c, s.hc, dc, dpre);             // d(c)
                std::swap(dc, dpre);

                // output gate (sigmoid)
                for (std::size_t u = 0; u < units; ++u) dgate[u] *= s.go[u] * (1.0 - s.go[u]);
                accumulate_gate(gW, gb, w, 3, dgate, x);

                // candidate: c = i .* g
                for (std::size_t u = 0; u < units; ++u) dgate[u] = dc[u] * s.gi[u];
                activation_backward(w.activation, s.pre_g, s.gg, dgate, dpre);
                accumulate_gate(gW, gb, w, 2, dpre, x);

                // input gate (sigmoid)
                for (std::size_t u = 0; u < units; ++u)
                    dgate[u] = dc[u] * s.gg[u] * s.gi[u] * (1.0 - s.gi[u]);
                accumulate_gate(gW, gb, w, 0, dgate, x);
            }

            adam.begin_step();
            adam.update(0, w.W, gW);
            adam.update(off_b, w.b, gb);
            adam.update(off_out, w.w_out, gout);
            adam.update(off_bout, {&w.b_out, 1}, {&gbout, 1});
        }
        const double epoch_loss = epoch_sse / static_cast<double>(n);
        if (!std::isfinite(epoch_loss))
            throw NumericError("lstm: training diverged (non-finite loss at epoch " +
                               std::to_string(epoch + 1) + ")");
        loss_history.push_back(epoch_loss);
    }

    return std::make_unique<LstmModel>(feature_names, hp, seed, std::move(w), scaler, ts,
                                       std::move(loss_history));
}

std::vector<double> LstmModel::predict_impl(const Matrix& X) const {
    GateScratch s(weights_.units);
    std::vector<double> out(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const auto xs = scaler_.apply_row(X.row(r));
        out[r] = target_scaler_.invert(forward(weights_, xs, s));
    }
    return out;
}

void LstmModel::save_params(nlohmann::json& j) const {
    j["units"] = weights_.units;
    j["inputs"] = weights_.inputs;
    j["use_bias"] = weights_.use_bias;
    j["activation"] = activation_name(weights_.activation);
    j["W"] = weights_.W;
    j["U"] = weights_.U;
    j["b"] = weights_.b;
    j["w_out"] = weights_.w_out;
    j["b_out"] = weights_.b_out;
    j["scaler"] = scaler_.to_json();
    j["target_scaler"] = target_scaler_.to_json();
    j["loss_history"] = loss_history_;
}

std::unique_ptr<Model> LstmModel::load(const nlohmann::json& j) {
    Weights w;
    w.units = j.at("units").get<std::size_t>();
    w.inputs = j.at("inputs").get<std::size_t>();
    w.use_bias = j.at("use_bias").get<bool>();
    w.activation = activation_from_name(j.at("activation").get<std::string>());
    w.W = j.at("W").get<std::vector<double>>();
    w.U = j.at("U").get<std::vector<double>>();
    w.b = j.at("b").get<std::vector<double>>();
    w.w_out = j.at("w_out").get<std::vector<double>>();
    w.b_out = j.at("b_out").get<double>();
    return std::make_unique<LstmModel>(
        j.at("features").get<std::vector<std::string>>(),
        hyperparams_from_json(j.at("hyperparams")), j.at("seed").get<std::uint64_t>(), std::move(w),
        Scaler::from_json(j.at("scaler")), TargetScaler::from_json(j.at("target_scaler")),
        j.at("loss_history").get<std::vector<double>>());
}

} // namespace wsbf
