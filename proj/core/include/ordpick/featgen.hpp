#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ordpick/polysys.hpp"

namespace ordpick {

enum class PreOp { identity, sign };
enum class AggOp { max, sum, av };

// One degree-based feature: read the exponent of `variable` in every
// monomial, then apply pre_mono / agg_mono (per polynomial) / pre_poly /
// agg_poly (across polynomials) / post.
// Canonical text form: post(aggP_p(preP(aggM_m(preM(d_K))))) with identity
// slots omitted, K 1-based; e.g. "av_p(max_m(d_1))".
struct FeatureDescriptor {
    int variable = 0;
    PreOp pre_mono = PreOp::identity;
    AggOp agg_mono = AggOp::max;
    PreOp pre_poly = PreOp::identity;
    AggOp agg_poly = AggOp::max;
    PreOp post = PreOp::identity;
};

bool operator==(const FeatureDescriptor& a, const FeatureDescriptor& b);

using DescriptorSet = std::vector<FeatureDescriptor>;

struct FeatureMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;  // row-major

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols)
        : n_rows(rows), n_cols(cols), values(rows * cols, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return values[r * n_cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
};

// Full grammar product: per variable, 2 x 3 x 2 x 3 x 2 = 72 descriptors,
// variable-major, outer slots varying slowest.
DescriptorSet generate_raw_descriptors(int n_vars);

// Total on any non-empty system; a zero polynomial contributes one all-zero
// exponent row. sign maps to {-1,0,1}, av is the arithmetic mean.
double evaluate_descriptor(const FeatureDescriptor& d, const PolySystem& s);

FeatureMatrix evaluate_matrix(const DescriptorSet& ds, const std::vector<PolySystem>& problems);

// Drops descriptors whose evaluated column is constant across all rows, and
// all but the first of every group with bitwise-identical columns.
DescriptorSet simplify_descriptors(const DescriptorSet& ds, const FeatureMatrix& m);

FeatureDescriptor parse_descriptor(std::string_view text, int n_vars);
std::string serialize_descriptor(const FeatureDescriptor& d);

}  // namespace ordpick
