#include "ordpick/featgen.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

namespace ordpick {

bool operator==(const FeatureDescriptor& a, const FeatureDescriptor& b) {
    return a.variable == b.variable && a.pre_mono == b.pre_mono && a.agg_mono == b.agg_mono &&
           a.pre_poly == b.pre_poly && a.agg_poly == b.agg_poly && a.post == b.post;
}

namespace {

constexpr PreOp kPreOps[] = {PreOp::identity, PreOp::sign};
constexpr AggOp kAggOps[] = {AggOp::max, AggOp::sum, AggOp::av};

double apply_pre(PreOp op, double x) {
    if (op == PreOp::identity) return x;
    return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
}

double apply_agg(AggOp op, const std::vector<double>& xs) {
    assert(!xs.empty());
    switch (op) {
        case AggOp::max:
            return *std::max_element(xs.begin(), xs.end());
        case AggOp::sum: {
            double s = 0;
            for (double x : xs) s += x;
            return s;
        }
        case AggOp::av: {
            double s = 0;
            for (double x : xs) s += x;
            return s / static_cast<double>(xs.size());
        }
    }
    return 0;
}

const char* agg_name(AggOp op) {
    switch (op) {
        case AggOp::max: return "max";
        case AggOp::sum: return "sum";
        case AggOp::av: return "av";
    }
    return "";
}

}  // namespace

DescriptorSet generate_raw_descriptors(int n_vars) {
    if (n_vars < 1) throw std::invalid_argument("generate_raw_descriptors: n_vars must be >= 1");
    DescriptorSet out;
    out.reserve(static_cast<std::size_t>(72 * n_vars));
    for (int v = 0; v < n_vars; ++v)
        for (PreOp post : kPreOps)
            for (AggOp agg_poly : kAggOps)
                for (PreOp pre_poly : kPreOps)
                    for (AggOp agg_mono : kAggOps)
                        for (PreOp pre_mono : kPreOps)
                            out.push_back(
                                FeatureDescriptor{v, pre_mono, agg_mono, pre_poly, agg_poly, post});
    return out;
}

double evaluate_descriptor(const FeatureDescriptor& d, const PolySystem& s) {
    if (d.variable < 0 || d.variable >= s.n_vars)
        throw std::invalid_argument("evaluate_descriptor: variable index out of range");
    if (s.polys.empty()) throw std::invalid_argument("evaluate_descriptor: empty system");
    std::vector<double> per_poly;
    per_poly.reserve(s.polys.size());
    std::vector<double> row;
    for (const Polynomial& p : s.polys) {
        row.clear();
        if (p.is_zero()) {
            row.push_back(0.0);
        } else {
            for (const Monomial& m : p.terms())
                row.push_back(static_cast<double>(m.exponents[static_cast<std::size_t>(d.variable)]));
        }
        for (double& x : row) x = apply_pre(d.pre_mono, x);
        per_poly.push_back(apply_agg(d.agg_mono, row));
    }
    for (double& x : per_poly) x = apply_pre(d.pre_poly, x);
    return apply_pre(d.post, apply_agg(d.agg_poly, per_poly));
}

FeatureMatrix evaluate_matrix(const DescriptorSet& ds, const std::vector<PolySystem>& problems) {
    for (const PolySystem& s : problems)
        for (const FeatureDescriptor& d : ds)
            if (d.variable >= s.n_vars)
                throw std::invalid_argument("evaluate_matrix: descriptor/problem arity mismatch");
    FeatureMatrix m(problems.size(), ds.size());
    for (std::size_t r = 0; r < problems.size(); ++r)
        for (std::size_t c = 0; c < ds.size(); ++c)
            m.at(r, c) = evaluate_descriptor(ds[c], problems[r]);
    return m;
}

DescriptorSet simplify_descriptors(const DescriptorSet& ds, const FeatureMatrix& m) {
    if (m.n_rows == 0) throw std::invalid_argument("simplify_descriptors: empty matrix");
    if (m.n_cols != ds.size())
        throw std::invalid_argument("simplify_descriptors: matrix/descriptor size mismatch");
    DescriptorSet kept;
    std::vector<std::vector<double>> kept_columns;
    std::vector<double> col(m.n_rows);
    for (std::size_t c = 0; c < m.n_cols; ++c) {
        for (std::size_t r = 0; r < m.n_rows; ++r) col[r] = m.at(r, c);
        bool constant = std::all_of(col.begin(), col.end(),
                                    [&col](double x) { return x == col.front(); });
        if (constant) continue;
        if (std::find(kept_columns.begin(), kept_columns.end(), col) != kept_columns.end())
            continue;
        kept.push_back(ds[c]);
        kept_columns.push_back(col);
    }
    return kept;
}

std::string serialize_descriptor(const FeatureDescriptor& d) {
    std::string out = "d_" + std::to_string(d.variable + 1);
    int closes = 0;
    if (d.pre_mono == PreOp::sign) {
        out = "sign(" + out;
        ++closes;
    }
    out = std::string(agg_name(d.agg_mono)) + "_m(" + out;
    ++closes;
    if (d.pre_poly == PreOp::sign) {
        out = "sign(" + out;
        ++closes;
    }
    out = std::string(agg_name(d.agg_poly)) + "_p(" + out;
    ++closes;
    if (d.post == PreOp::sign) {
        out = "sign(" + out;
        ++closes;
    }
    out.append(static_cast<std::size_t>(closes), ')');
    return out;
}

namespace {

struct DescriptorScanner {
    std::string_view text;
    std::size_t pos = 0;

    bool eat(std::string_view token) {
        if (text.substr(pos, token.size()) == token) {
            pos += token.size();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("descriptor: " + what, pos);
    }
};

AggOp parse_agg(DescriptorScanner& sc, char level) {
    for (AggOp op : kAggOps) {
        std::string token = std::string(agg_name(op)) + "_" + level + "(";
        if (sc.eat(token)) return op;
    }
    sc.fail(std::string("expected aggregation function over '") + level + "'");
}

}  // namespace

FeatureDescriptor parse_descriptor(std::string_view text, int n_vars) {
    // Strict canonical shape: post( aggP_p( preP( aggM_m( preM( d_K )))))
    std::size_t begin = text.find_first_not_of(" \t");
    std::size_t last = text.find_last_not_of(" \t\r\n");
    if (begin == std::string_view::npos) throw ParseError("descriptor: empty text", 0);
    DescriptorScanner sc{text.substr(begin, last - begin + 1)};

    FeatureDescriptor d;
    int closes = 0;
    if (sc.eat("sign(")) {
        d.post = PreOp::sign;
        ++closes;
    }
    d.agg_poly = parse_agg(sc, 'p');
    ++closes;
    if (sc.eat("sign(")) {
        d.pre_poly = PreOp::sign;
        ++closes;
    }
    d.agg_mono = parse_agg(sc, 'm');
    ++closes;
    if (sc.eat("sign(")) {
        d.pre_mono = PreOp::sign;
        ++closes;
    }
    if (!sc.eat("d_")) sc.fail("expected base measure d_K");
    std::size_t digits = 0;
    long index = 0;
    while (sc.pos < sc.text.size() && sc.text[sc.pos] >= '0' && sc.text[sc.pos] <= '9') {
        index = index * 10 + (sc.text[sc.pos] - '0');
        ++sc.pos;
        ++digits;
        if (index > 1'000'000) sc.fail("variable index too large");
    }
    if (digits == 0) sc.fail("expected variable number after d_");
    if (index < 1 || index > n_vars) sc.fail("variable index out of range");
    d.variable = static_cast<int>(index - 1);
    for (int i = 0; i < closes; ++i)
        if (!sc.eat(")")) sc.fail("expected ')'");
    if (sc.pos != sc.text.size()) sc.fail("trailing characters");
    return d;
}

}  // namespace ordpick
