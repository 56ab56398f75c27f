#include "ordpick/projection.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <stdexcept>
#include <tuple>

namespace ordpick {

namespace {

using PolyMatrix = std::vector<std::vector<Polynomial>>;

// Sylvester matrix of p (degree m in v) and q (degree l in v): l shifted
// rows of p's coefficients followed by m shifted rows of q's.
PolyMatrix sylvester_matrix(const Polynomial& p, const Polynomial& q, int v) {
    int m = p.degree_in(v);
    int l = q.degree_in(v);
    int size = m + l;
    PolyMatrix mat(static_cast<std::size_t>(size),
                   std::vector<Polynomial>(static_cast<std::size_t>(size)));
    auto pc = p.coefficients_in(v);  // pc[d] = coefficient of v^d
    auto qc = q.coefficients_in(v);
    for (int row = 0; row < l; ++row)
        for (int j = 0; j <= m; ++j)
            mat[static_cast<std::size_t>(row)][static_cast<std::size_t>(row + j)] =
                pc[static_cast<std::size_t>(m - j)];
    for (int row = 0; row < m; ++row)
        for (int j = 0; j <= l; ++j)
            mat[static_cast<std::size_t>(l + row)][static_cast<std::size_t>(row + j)] =
                qc[static_cast<std::size_t>(l - j)];
    return mat;
}

// Fraction-free Gaussian elimination (Bareiss). Every division is exact over
// the polynomial ring; a failed division indicates a logic error upstream.
Polynomial bareiss_determinant(PolyMatrix mat, int n_vars) {
    std::size_t n = mat.size();
    if (n == 0) return Polynomial::constant(1, n_vars);
    int sign = 1;
    Polynomial prev = Polynomial::constant(1, n_vars);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (mat[k][k].is_zero()) {
            std::size_t pivot = k + 1;
            while (pivot < n && mat[pivot][k].is_zero()) ++pivot;
            if (pivot == n) return Polynomial{};
            std::swap(mat[k], mat[pivot]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Polynomial num = mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j];
                auto quotient = num.exact_divide(prev);
                if (!quotient)
                    throw std::logic_error("bareiss: non-exact division");
                mat[i][j] = std::move(*quotient);
            }
            mat[i][k] = Polynomial{};
        }
        prev = mat[k][k];
    }
    Polynomial det = mat[n - 1][n - 1];
    return sign < 0 ? -det : det;
}

}  // namespace

Polynomial resultant(const Polynomial& p, const Polynomial& q, int v) {
    if (p.is_zero() || q.is_zero())
        throw std::invalid_argument("resultant: zero input polynomial");
    int m = p.degree_in(v);
    int l = q.degree_in(v);
    if (m == 0 && l == 0)
        throw std::invalid_argument("resultant: both inputs constant in the variable");
    int n_vars = p.n_vars();
    if (m == 0) return pow(p, l, n_vars);
    if (l == 0) return pow(q, m, n_vars);
    return bareiss_determinant(sylvester_matrix(p, q, v), n_vars);
}

Polynomial discriminant(const Polynomial& p, int v) {
    int d = p.degree_in(v);
    if (d < 2) throw std::invalid_argument("discriminant: degree in variable must be >= 2");
    Polynomial res = resultant(p, p.derivative(v), v);
    if ((d * (d - 1) / 2) % 2 != 0) res = -res;
    auto quotient = res.exact_divide(p.leading_coefficient_in(v));
    if (!quotient) throw std::logic_error("discriminant: division by leading coefficient not exact");
    return *quotient;
}

std::vector<Polynomial> project_once(const std::vector<Polynomial>& polys, int v) {
    std::vector<Polynomial> out;
    auto add = [&out](Polynomial p) {
        if (p.is_constant()) return;
        p = p.primitive_part().sign_normalized();
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
    };

    for (const Polynomial& p : polys) {
        if (p.is_zero()) continue;
        for (Polynomial& c : p.coefficients_in(v)) add(std::move(c));
        if (p.degree_in(v) >= 2) add(discriminant(p, v));
    }
    std::vector<const Polynomial*> with_v;
    for (const Polynomial& p : polys)
        if (!p.is_zero() && p.degree_in(v) >= 1) with_v.push_back(&p);
    for (std::size_t i = 0; i < with_v.size(); ++i)
        for (std::size_t j = i + 1; j < with_v.size(); ++j)
            add(resultant(*with_v[i], *with_v[j], v));
    return out;
}

namespace {

std::vector<Polynomial> normalize_input_level(const PolySystem& s) {
    std::vector<Polynomial> level;
    for (const Polynomial& p : s.polys) {
        if (p.is_constant()) continue;
        Polynomial q = p.primitive_part().sign_normalized();
        if (std::find(level.begin(), level.end(), q) == level.end())
            level.push_back(std::move(q));
    }
    return level;
}

bool exceeds_caps(const std::vector<Polynomial>& level, const ProjectionCaps& caps) {
    if (level.size() > caps.max_polys) return true;
    for (const Polynomial& p : level)
        if (p.total_degree() > caps.max_tdeg) return true;
    return false;
}

}  // namespace

std::optional<ProjectionSet> full_projection(const PolySystem& s, const VariableOrdering& o,
                                             const ProjectionCaps& caps) {
    assert(static_cast<int>(o.perm.size()) == s.n_vars);
    ProjectionSet ps;
    ps.levels.reserve(static_cast<std::size_t>(s.n_vars));
    ps.levels.push_back(normalize_input_level(s));
    if (exceeds_caps(ps.levels.back(), caps)) return std::nullopt;
    for (int level = 1; level < s.n_vars; ++level) {
        ps.levels.push_back(project_once(ps.levels.back(), o.perm[static_cast<std::size_t>(level - 1)]));
        if (exceeds_caps(ps.levels.back(), caps)) return std::nullopt;
    }
    return ps;
}

std::optional<std::int64_t> sotd_score(const PolySystem& s, const VariableOrdering& o,
                                       const ProjectionCaps& caps) {
    auto ps = full_projection(s, o, caps);
    if (!ps) return std::nullopt;
    std::int64_t total = 0;
    for (const auto& level : ps->levels)
        for (const Polynomial& p : level) total += p.total_degree();
    return total;
}

HeuristicChoice sotd_choose(const PolySystem& s, const ProjectionCaps& caps, int ordering_cap) {
    auto start = std::chrono::steady_clock::now();
    auto orderings = enumerate_orderings(s.n_vars, ordering_cap);
    std::optional<std::int64_t> best_score;
    std::size_t best_at = 0;
    for (std::size_t i = 0; i < orderings.size(); ++i) {
        auto score = sotd_score(s, orderings[i], caps);
        if (score && (!best_score || *score < *best_score)) {
            best_score = score;
            best_at = i;
        }
    }
    HeuristicChoice choice;
    choice.ordering = orderings[best_at];
    choice.score = best_score.value_or(0);
    choice.all_blowup = !best_score.has_value();
    choice.prediction_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return choice;
}

HeuristicChoice brown_choose(const PolySystem& s) {
    auto start = std::chrono::steady_clock::now();
    int n = s.n_vars;
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);
    std::vector<int> perm;
    perm.reserve(static_cast<std::size_t>(n));
    for (int step = 0; step < n; ++step) {
        std::tuple<int, int, int> best_key;
        int best_v = -1;
        for (int v = 0; v < n; ++v) {
            if (chosen[static_cast<std::size_t>(v)]) continue;
            int degree = 0, max_tdeg = 0, count = 0;
            for (const Polynomial& p : s.polys) {
                for (const Monomial& m : p.terms()) {
                    if (m.exponents[static_cast<std::size_t>(v)] == 0) continue;
                    degree = std::max(degree, m.exponents[static_cast<std::size_t>(v)]);
                    int tdeg = 0;  // over remaining variables only
                    for (int w = 0; w < n; ++w)
                        if (!chosen[static_cast<std::size_t>(w)])
                            tdeg += m.exponents[static_cast<std::size_t>(w)];
                    max_tdeg = std::max(max_tdeg, tdeg);
                    ++count;
                }
            }
            std::tuple<int, int, int> key{degree, max_tdeg, count};
            if (best_v < 0 || key < best_key) {
                best_key = key;
                best_v = v;
            }
        }
        perm.push_back(best_v);
        chosen[static_cast<std::size_t>(best_v)] = true;
    }
    HeuristicChoice choice;
    choice.ordering = VariableOrdering{perm, ordering_index(perm)};
    choice.prediction_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return choice;
}

}  // namespace ordpick
