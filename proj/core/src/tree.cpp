#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ordpick/mlcore.hpp"

namespace ordpick {

namespace {

double impurity(const std::vector<std::size_t>& counts, std::size_t total,
                SplitCriterion criterion) {
    if (total == 0) return 0.0;
    double imp = criterion == SplitCriterion::gini ? 1.0 : 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        if (criterion == SplitCriterion::gini)
            imp -= p * p;
        else
            imp -= p * std::log2(p);
    }
    return imp;
}

struct TreeBuilder {
    const DtParams& params;
    const FeatureMatrix& x;
    const std::vector<int>& y;
    int n_labels;
    std::vector<TreeNode> nodes;

    int leaf(const std::vector<std::size_t>& rows) {
        std::vector<std::size_t> counts(static_cast<std::size_t>(n_labels), 0);
        for (std::size_t r : rows) ++counts[static_cast<std::size_t>(y[r])];
        TreeNode node;
        node.label = static_cast<int>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
        nodes.push_back(node);
        return static_cast<int>(nodes.size() - 1);
    }

    // Exhaustive best split: features in index order, thresholds at midpoints
    // of consecutive distinct values; first strict improvement wins ties.
    bool best_split(const std::vector<std::size_t>& rows, int& best_feature,
                    double& best_threshold) {
        std::size_t n = rows.size();
        std::vector<std::size_t> parent_counts(static_cast<std::size_t>(n_labels), 0);
        for (std::size_t r : rows) ++parent_counts[static_cast<std::size_t>(y[r])];
        double parent_imp = impurity(parent_counts, n, params.criterion);

        double best_gain = -std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, int>> column(n);
        std::vector<std::size_t> left_counts(static_cast<std::size_t>(n_labels));
        for (std::size_t f = 0; f < x.n_cols; ++f) {
            for (std::size_t i = 0; i < n; ++i) column[i] = {x.at(rows[i], f), y[rows[i]]};
            std::sort(column.begin(), column.end());
            std::fill(left_counts.begin(), left_counts.end(), 0);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                ++left_counts[static_cast<std::size_t>(column[i].second)];
                if (column[i].first == column[i + 1].first) continue;
                std::size_t nl = i + 1, nr = n - nl;
                std::vector<std::size_t> right_counts(parent_counts);
                for (std::size_t l = 0; l < right_counts.size(); ++l)
                    right_counts[l] -= left_counts[l];
                double gain = parent_imp -
                              (static_cast<double>(nl) / static_cast<double>(n)) *
                                  impurity(left_counts, nl, params.criterion) -
                              (static_cast<double>(nr) / static_cast<double>(n)) *
                                  impurity(right_counts, nr, params.criterion);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = (column[i].first + column[i + 1].first) / 2.0;
                }
            }
        }
        // Split on any valid threshold, even at zero gain; impure nodes with
        // distinct rows must keep splitting to reach purity.
        return best_feature >= 0;
    }

    int build(const std::vector<std::size_t>& rows, int depth) {
        bool pure = std::all_of(rows.begin(), rows.end(),
                                [&](std::size_t r) { return y[r] == y[rows.front()]; });
        bool depth_ok = params.max_depth <= 0 || depth < params.max_depth;
        if (pure || !depth_ok || rows.size() < static_cast<std::size_t>(params.min_samples_split))
            return leaf(rows);

        int feature = -1;
        double threshold = 0;
        if (!best_split(rows, feature, threshold)) return leaf(rows);

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows)
            (x.at(r, static_cast<std::size_t>(feature)) <= threshold ? left_rows : right_rows)
                .push_back(r);

        nodes.push_back(TreeNode{});
        int at = static_cast<int>(nodes.size() - 1);
        int left = build(left_rows, depth + 1);
        int right = build(right_rows, depth + 1);
        nodes[static_cast<std::size_t>(at)].feature = feature;
        nodes[static_cast<std::size_t>(at)].threshold = threshold;
        nodes[static_cast<std::size_t>(at)].left = left;
        nodes[static_cast<std::size_t>(at)].right = right;
        return at;
    }
};

}  // namespace

DtState dt_train(const DtParams& params, const FeatureMatrix& x, const std::vector<int>& y,
                 int n_labels) {
    TreeBuilder builder{params, x, y, n_labels, {}};
    std::vector<std::size_t> rows(x.n_rows);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    // The root's slot is pushed before any recursion, so it is node 0.
    int root = builder.build(rows, 0);
    (void)root;
    DtState state;
    state.nodes = std::move(builder.nodes);
    return state;
}

std::vector<int> dt_predict(const DtState& state, const FeatureMatrix& x) {
    std::vector<int> out;
    out.reserve(x.n_rows);
    for (std::size_t r = 0; r < x.n_rows; ++r) {
        int at = 0;
        while (state.nodes[static_cast<std::size_t>(at)].feature >= 0) {
            const TreeNode& node = state.nodes[static_cast<std::size_t>(at)];
            at = x.at(r, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left
                                                                                   : node.right;
        }
        out.push_back(state.nodes[static_cast<std::size_t>(at)].label);
    }
    return out;
}

}  // namespace ordpick
