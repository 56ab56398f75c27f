#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ordpick/polynomial.hpp"
#include "ordpick/polysys.hpp"

namespace ordpick {

// Growth limits for the projection phase; exceeding either signals Blowup
// (reported as an empty optional by the functions below).
struct ProjectionCaps {
    std::size_t max_polys = 512;
    int max_tdeg = 64;
};

// levels[0] is the normalized input system, levels[l] the result of
// eliminating perm[l-1]. Every level is primitive, sign-normalized,
// deduplicated and free of constants.
struct ProjectionSet {
    std::vector<std::vector<Polynomial>> levels;
};

struct HeuristicChoice {
    VariableOrdering ordering;
    std::int64_t score = 0;     // sotd: sum of total degrees over the projection set
    bool all_blowup = false;    // sotd: every ordering exceeded the caps
    double prediction_seconds = 0.0;
};

// Determinant of the Sylvester matrix of p and q with respect to variable v,
// computed by fraction-free (Bareiss) elimination over the polynomial ring.
// Throws std::invalid_argument when both inputs are constant in v.
Polynomial resultant(const Polynomial& p, const Polynomial& q, int v);

// (-1)^(d(d-1)/2) * Res_v(p, dp/dv) exactly divided by the leading
// coefficient of p in v. Requires deg_v(p) >= 2.
Polynomial discriminant(const Polynomial& p, int v);

// McCallum-style reduced projection: coefficients in v, discriminants of
// polys with deg_v >= 2, pairwise resultants of polys with deg_v >= 1.
// Outputs are primitive, sign-normalized, deduplicated; constants dropped.
std::vector<Polynomial> project_once(const std::vector<Polynomial>& polys, int v);

std::optional<ProjectionSet> full_projection(const PolySystem& s, const VariableOrdering& o,
                                             const ProjectionCaps& caps);

// Sum of total degrees of every polynomial in the full projection set,
// input level included. nullopt on Blowup.
std::optional<std::int64_t> sotd_score(const PolySystem& s, const VariableOrdering& o,
                                       const ProjectionCaps& caps);

// Exhaustive argmin of sotd_score over all orderings; Blowup ranks worse
// than any finite score, ties go to the lowest ordering index.
HeuristicChoice sotd_choose(const PolySystem& s, const ProjectionCaps& caps,
                            int ordering_cap = kDefaultOrderingCap);

// Brown's greedy ordering: next eliminated variable minimizes the key
// (degree in s, max total degree among remaining-variable parts of monomials
// containing it, count of monomials containing it); ties by variable index.
HeuristicChoice brown_choose(const PolySystem& s);

}  // namespace ordpick
