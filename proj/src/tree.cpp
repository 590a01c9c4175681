#include "wsbf/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsbf/errors.hpp"

namespace wsbf {

namespace {

constexpr double kMinGain = 1e-12;

struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Shared split-search skeleton: sorts the node's rows per feature and walks
// the boundaries between distinct values. `score` maps a prefix (left side)
// to the split gain. First strictly-better gain wins, so the feature-
// ascending, threshold-ascending scan order implements the tie-break rule.
template <typename GainFn>
Split best_split(const Matrix& X, const std::vector<std::size_t>& rows, int min_leaf, GainFn gain_of) {
    Split best;
    const std::size_t n = rows.size();
    std::vector<std::pair<double, std::size_t>> order(n); // (feature value, row position)
    for (std::size_t f = 0; f < X.cols(); ++f) {
        for (std::size_t i = 0; i < n; ++i) order[i] = {X(rows[i], f), i};
        std::sort(order.begin(), order.end());
        if (order.front().first == order.back().first) continue; // constant feature
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (order[i].first == order[i + 1].first) continue;
            const std::size_t n_left = i + 1;
            if (n_left < static_cast<std::size_t>(min_leaf) ||
                n - n_left < static_cast<std::size_t>(min_leaf))
                continue;
            const double gain = gain_of(order, n_left);
            if (gain > best.gain + kMinGain || (!best.found && gain > kMinGain)) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (order[i].first + order[i + 1].first);
                best.gain = gain;
            }
        }
    }
    return best;
}

void partition_rows(const Matrix& X, const std::vector<std::size_t>& rows, int feature,
                    double threshold, std::vector<std::size_t>& left, std::vector<std::size_t>& right) {
    for (const std::size_t r : rows)
        (X(r, static_cast<std::size_t>(feature)) < threshold ? left : right).push_back(r);
}

struct CartBuilder {
    const Matrix& X;
    const std::vector<double>& y;
    const CartParams& params;
    Tree tree;

    int build(const std::vector<std::size_t>& rows, int depth) {
        const std::size_t n = rows.size();
        double sum = 0.0;
        for (const std::size_t r : rows) sum += y[r];
        const double mean = sum / static_cast<double>(n);

        const int node_idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{-1, 0.0, mean, -1, -1});

        if (depth >= params.max_depth || n < static_cast<std::size_t>(params.min_samples_split))
            return node_idx;

        // gain via the sum identity: SSE drop = (sum_L)^2/n_L + (sum_R)^2/n_R - (sum)^2/n
        const Split split = best_split(
            X, rows, params.min_samples_leaf,
            [&](const std::vector<std::pair<double, std::size_t>>& order, std::size_t n_left) {
                double sum_left = 0.0;
                for (std::size_t i = 0; i < n_left; ++i) sum_left += y[rows[order[i].second]];
                const double sum_right = sum - sum_left;
                const double nl = static_cast<double>(n_left);
                const double nr = static_cast<double>(n - n_left);
                return sum_left * sum_left / nl + sum_right * sum_right / nr -
                       sum * sum / static_cast<double>(n);
            });
        if (!split.found) return node_idx;

        std::vector<std::size_t> left, right;
        partition_rows(X, rows, split.feature, split.threshold, left, right);
        tree.nodes[static_cast<std::size_t>(node_idx)].feature = split.feature;
        tree.nodes[static_cast<std::size_t>(node_idx)].threshold = split.threshold;
        const int l = build(left, depth + 1);
        tree.nodes[static_cast<std::size_t>(node_idx)].left = l;
        const int r = build(right, depth + 1);
        tree.nodes[static_cast<std::size_t>(node_idx)].right = r;
        return node_idx;
    }
};

struct XgbBuilder {
    const Matrix& X;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const XgbTreeParams& params;
    Tree tree;

    double leaf_weight(double g_sum, double h_sum) const {
        return -soft_threshold(g_sum, params.alpha) / (h_sum + params.lambda);
    }

    double score(double g_sum, double h_sum) const {
        const double t = soft_threshold(g_sum, params.alpha);
        return t * t / (h_sum + params.lambda);
    }

    int build(const std::vector<std::size_t>& rows, int depth) {
        double g_sum = 0.0, h_sum = 0.0;
        for (const std::size_t r : rows) {
            g_sum += grad[r];
            h_sum += hess[r];
        }

        const int node_idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{-1, 0.0, leaf_weight(g_sum, h_sum), -1, -1});

        if (depth >= params.max_depth || rows.size() < 2) return node_idx;

        const double parent_score = score(g_sum, h_sum);
        const Split split = best_split(
            X, rows, /*min_leaf=*/1,
            [&](const std::vector<std::pair<double, std::size_t>>& order, std::size_t n_left) {
                double gl = 0.0, hl = 0.0;
                for (std::size_t i = 0; i < n_left; ++i) {
                    gl += grad[rows[order[i].second]];
                    hl += hess[rows[order[i].second]];
                }
                return 0.5 * (score(gl, hl) + score(g_sum - gl, h_sum - hl) - parent_score);
            });
        if (!split.found) return node_idx;

        std::vector<std::size_t> left, right;
        partition_rows(X, rows, split.feature, split.threshold, left, right);
        tree.nodes[static_cast<std::size_t>(node_idx)].feature = split.feature;
        tree.nodes[static_cast<std::size_t>(node_idx)].threshold = split.threshold;
        const int l = build(left, depth + 1);
        tree.nodes[static_cast<std::size_t>(node_idx)].left = l;
        const int r = build(right, depth + 1);
        tree.nodes[static_cast<std::size_t>(node_idx)].right = r;
        return node_idx;
    }
};

} // namespace

double soft_threshold(double g, double a) {
    if (g > a) return g - a;
    if (g < -a) return g + a;
    return 0.0;
}

Tree build_cart(const Matrix& X, const std::vector<double>& y, const std::vector<std::size_t>& rows,
                const CartParams& params) {
    if (rows.empty()) throw ContractError("build_cart: no rows");
    CartBuilder b{X, y, params, {}};
    b.build(rows, 0);
    return std::move(b.tree);
}

Tree build_xgb_tree(const Matrix& X, const std::vector<double>& grad, const std::vector<double>& hess,
                    const std::vector<std::size_t>& rows, const XgbTreeParams& params) {
    if (rows.empty()) throw ContractError("build_xgb_tree: no rows");
    if (grad.size() != hess.size()) throw ContractError("build_xgb_tree: grad/hess length mismatch");
    XgbBuilder b{X, grad, hess, params, {}};
    b.build(rows, 0);
    return std::move(b.tree);
}

nlohmann::json Tree::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& n : nodes)
        arr.push_back({{"f", n.feature}, {"t", n.threshold}, {"v", n.value}, {"l", n.left}, {"r", n.right}});
    return arr;
}

Tree Tree::from_json(const nlohmann::json& j) {
    Tree t;
    for (const auto& n : j)
        t.nodes.push_back(TreeNode{n.at("f").get<int>(), n.at("t").get<double>(),
                                   n.at("v").get<double>(), n.at("l").get<int>(),
                                   n.at("r").get<int>()});
    return t;
}

} // namespace wsbf
