#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ordpick {

using BigInt = mpz_class;

// One term of a multivariate integer polynomial. `exponents` holds one
// non-negative entry per ambient variable.
struct Monomial {
    std::vector<int> exponents;
    BigInt coefficient;

    int total_degree() const;
};

bool operator==(const Monomial& a, const Monomial& b);

// Three-way graded-lexicographic comparison of exponent vectors:
// higher total degree first, ties by lexicographic comparison.
int grlex_compare(const std::vector<int>& a, const std::vector<int>& b);

// Multivariate polynomial over Z, kept in canonical form: terms sorted
// graded-lex descending, distinct exponent vectors, no zero coefficients.
// The zero polynomial has no terms and carries no arity of its own.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Monomial> terms);

    static Polynomial constant(BigInt c, int n_vars);
    static Polynomial variable(int v, int n_vars);

    const std::vector<Monomial>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    int n_vars() const {
        return terms_.empty() ? 0 : static_cast<int>(terms_.front().exponents.size());
    }

    // Max exponent of variable v over all terms; 0 for the zero polynomial.
    int degree_in(int v) const;
    // Max term total degree; 0 for zero or constant polynomials.
    int total_degree() const;

    Polynomial operator-() const;
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Polynomial& o);

    friend bool operator==(const Polynomial& a, const Polynomial& b);

    // gcd of |coefficients|; 0 for the zero polynomial.
    BigInt content() const;
    Polynomial primitive_part() const;
    // Negates the whole polynomial if the leading coefficient is negative.
    Polynomial sign_normalized() const;
    Polynomial derivative(int v) const;

    // Coefficient polynomials of p viewed as univariate in v; entry d is the
    // coefficient of v^d, with v's exponent slot zeroed. A polynomial with
    // degree 0 in v yields a single entry equal to itself.
    std::vector<Polynomial> coefficients_in(int v) const;
    Polynomial leading_coefficient_in(int v) const;

    // Quotient of an exact division, or nullopt when the division does not
    // come out exact over Z[x1..xn].
    std::optional<Polynomial> exact_divide(const Polynomial& divisor) const;
    std::optional<Polynomial> exact_divide(const BigInt& divisor) const;

    // Human-readable form, mainly for diagnostics and tests.
    std::string to_string() const;

private:
    std::vector<Monomial> terms_;
    void normalize();
};

// p^e in an ambient ring with n_vars variables (handles p == 0, e == 0).
Polynomial pow(const Polynomial& p, int e, int n_vars);

}  // namespace ordpick
