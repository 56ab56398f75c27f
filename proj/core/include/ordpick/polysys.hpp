#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ordpick/polynomial.hpp"

namespace ordpick {

// One training/testing problem: a set of polynomials over x1..xn.
struct PolySystem {
    int n_vars = 0;
    std::vector<Polynomial> polys;
};

bool operator==(const PolySystem& a, const PolySystem& b);

// Elimination order over {0..n-1}: perm[0] is projected first. `index` is
// the 0-based rank of perm among all permutations in lexicographic order.
struct VariableOrdering {
    std::vector<int> perm;
    std::int64_t index = 0;
};

bool operator==(const VariableOrdering& a, const VariableOrdering& b);

inline constexpr int kDefaultOrderingCap = 6;

std::int64_t factorial(int n);

// All n! orderings in lexicographic order of perm. Throws when n exceeds
// the cap (factorial blow-up guard).
std::vector<VariableOrdering> enumerate_orderings(int n, int cap = kDefaultOrderingCap);

VariableOrdering ordering_from_index(int n, std::int64_t index);
std::int64_t ordering_index(const std::vector<int>& perm);

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)),
          position(position) {}
    std::size_t position;
};

// Terms format, one problem per line:
//   problem := '[' poly (',' poly)* ']'
//   poly    := '[' mono (',' mono)* ']'
//   mono    := '(' '(' int (',' int)* ')' ',' int ')'
// Whitespace between tokens is ignored. An empty poly '[]' denotes the zero
// polynomial. Parsing normalizes: like monomials merge, zero terms drop.
PolySystem parse_problem(std::string_view line);

// Canonical inverse of parse_problem: sorted monomials, no whitespace.
std::string serialize_problem(const PolySystem& s);

// Semicolon-separated polynomials in + - * ^ infix over the named variables,
// e.g. "235*x1 + 42*x2^2; 2*x1^2*x3 - 1".
PolySystem parse_infix(std::string_view text, const std::vector<std::string>& var_names);

// Random problem generator: all counts and degrees are drawn from rounded
// truncated normals, clamped to [1, cap] for counts and [0, cap] for
// degrees; coefficient magnitudes are clamped to [0, cap] with zero draws
// redrawn, sign by fair coin. Deterministic given seed.
struct GenConfig {
    int n_vars = 3;
    double degree_mean = 0.8, degree_stddev = 0.8;
    int degree_cap = 2;
    double coeff_mean = 20.0, coeff_stddev = 40.0;
    int coeff_cap = 1000;
    double terms_mean = 2.5, terms_stddev = 1.5;
    int terms_cap = 6;
    double polys_mean = 2.0, polys_stddev = 1.0;
    int polys_cap = 3;
    std::uint64_t seed = 0;
};

std::vector<PolySystem> generate_random_dataset(const GenConfig& cfg, int count);

}  // namespace ordpick
