#ifndef WSBF_TREE_HPP
#define WSBF_TREE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "wsbf/matrix.hpp"

namespace wsbf {

/// Binary regression tree stored as a flat node array. Rows with
/// feature value < threshold go left.
struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0; // leaf output
    int left = -1;
    int right = -1;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict_row(std::span<const double> row) const {
        int idx = 0;
        while (!nodes[idx].is_leaf())
            idx = row[static_cast<std::size_t>(nodes[idx].feature)] < nodes[idx].threshold
                      ? nodes[idx].left
                      : nodes[idx].right;
        return nodes[idx].value;
    }

    nlohmann::json to_json() const;
    static Tree from_json(const nlohmann::json& j);
};

struct CartParams {
    int max_depth = 0; // levels of splits allowed below the root
    int min_samples_split = 2;
    int min_samples_leaf = 1;
};

/// CART with the variance-reduction criterion; leaf value is the mean target.
/// `rows` may repeat indices (bootstrap multiset). Candidate thresholds are
/// midpoints between consecutive distinct sorted values; ties in gain resolve
/// to the lowest feature index, then the lowest threshold.
Tree build_cart(const Matrix& X, const std::vector<double>& y, const std::vector<std::size_t>& rows,
                const CartParams& params);

struct XgbTreeParams {
    int max_depth = 6;
    double lambda = 0.0; // L2 on leaf weights
    double alpha = 0.0;  // L1 on leaf weights (soft threshold on gradient sums)
};

/// One boosting tree on gradient/hessian pairs. Leaf weight is
/// -soft_threshold(G, alpha) / (H + lambda); split gain uses the same
/// regularized score and must be strictly positive. Threshold enumeration and
/// tie-breaking match build_cart.
Tree build_xgb_tree(const Matrix& X, const std::vector<double>& grad, const std::vector<double>& hess,
                    const std::vector<std::size_t>& rows, const XgbTreeParams& params);

/// max(|g| - a, 0) * sign(g)
double soft_threshold(double g, double a);

} // namespace wsbf

#endif // WSBF_TREE_HPP
