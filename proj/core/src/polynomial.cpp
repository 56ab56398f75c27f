#include "ordpick/polynomial.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace ordpick {

int Monomial::total_degree() const {
    int d = 0;
    for (int e : exponents) d += e;
    return d;
}

bool operator==(const Monomial& a, const Monomial& b) {
    return a.exponents == b.exponents && a.coefficient == b.coefficient;
}

int grlex_compare(const std::vector<int>& a, const std::vector<int>& b) {
    assert(a.size() == b.size());
    int da = 0, db = 0;
    for (int e : a) da += e;
    for (int e : b) db += e;
    if (da != db) return da < db ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

Polynomial::Polynomial(std::vector<Monomial> terms) : terms_(std::move(terms)) {
    normalize();
}

void Polynomial::normalize() {
    for (const Monomial& m : terms_) {
        if (m.exponents.size() != terms_.front().exponents.size())
            throw std::invalid_argument("polynomial terms differ in variable count");
        for (int e : m.exponents)
            if (e < 0) throw std::invalid_argument("negative exponent in monomial");
    }
    std::sort(terms_.begin(), terms_.end(), [](const Monomial& a, const Monomial& b) {
        return grlex_compare(a.exponents, b.exponents) > 0;
    });
    std::vector<Monomial> merged;
    for (Monomial& m : terms_) {
        if (!merged.empty() && merged.back().exponents == m.exponents) {
            merged.back().coefficient += m.coefficient;
        } else {
            merged.push_back(std::move(m));
        }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Monomial& m) { return m.coefficient == 0; }),
                 merged.end());
    terms_ = std::move(merged);
}

Polynomial Polynomial::constant(BigInt c, int n_vars) {
    if (c == 0) return Polynomial{};
    return Polynomial{{Monomial{std::vector<int>(n_vars, 0), std::move(c)}}};
}

Polynomial Polynomial::variable(int v, int n_vars) {
    assert(v >= 0 && v < n_vars);
    std::vector<int> exps(n_vars, 0);
    exps[v] = 1;
    return Polynomial{{Monomial{std::move(exps), BigInt(1)}}};
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.front().total_degree() == 0);
}

int Polynomial::degree_in(int v) const {
    int d = 0;
    for (const Monomial& m : terms_) {
        assert(v >= 0 && v < static_cast<int>(m.exponents.size()));
        d = std::max(d, m.exponents[v]);
    }
    return d;
}

int Polynomial::total_degree() const {
    int d = 0;
    for (const Monomial& m : terms_) d = std::max(d, m.total_degree());
    return d;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (Monomial& m : r.terms_) m.coefficient = -m.coefficient;
    return r;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    std::vector<Monomial> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return Polynomial(std::move(terms));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial{};
    std::vector<Monomial> terms;
    terms.reserve(a.terms_.size() * b.terms_.size());
    for (const Monomial& ma : a.terms_) {
        for (const Monomial& mb : b.terms_) {
            Monomial m;
            m.exponents.resize(ma.exponents.size());
            for (std::size_t i = 0; i < m.exponents.size(); ++i)
                m.exponents[i] = ma.exponents[i] + mb.exponents[i];
            m.coefficient = ma.coefficient * mb.coefficient;
            terms.push_back(std::move(m));
        }
    }
    return Polynomial(std::move(terms));
}

Polynomial& Polynomial::operator+=(const Polynomial& o) { return *this = *this + o; }
Polynomial& Polynomial::operator-=(const Polynomial& o) { return *this = *this - o; }
Polynomial& Polynomial::operator*=(const Polynomial& o) { return *this = *this * o; }

bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

BigInt Polynomial::content() const {
    BigInt g = 0;
    for (const Monomial& m : terms_) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), m.coefficient.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

Polynomial Polynomial::primitive_part() const {
    if (is_zero()) return *this;
    BigInt c = content();
    Polynomial r = *this;
    for (Monomial& m : r.terms_) m.coefficient /= c;
    return r;
}

Polynomial Polynomial::sign_normalized() const {
    if (is_zero() || terms_.front().coefficient > 0) return *this;
    return -*this;
}

Polynomial Polynomial::derivative(int v) const {
    std::vector<Monomial> terms;
    for (const Monomial& m : terms_) {
        if (m.exponents[v] == 0) continue;
        Monomial d = m;
        d.coefficient *= d.exponents[v];
        d.exponents[v] -= 1;
        terms.push_back(std::move(d));
    }
    return Polynomial(std::move(terms));
}

std::vector<Polynomial> Polynomial::coefficients_in(int v) const {
    if (is_zero()) return {Polynomial{}};
    int d = degree_in(v);
    std::vector<std::vector<Monomial>> buckets(d + 1);
    for (const Monomial& m : terms_) {
        Monomial stripped = m;
        int e = stripped.exponents[v];
        stripped.exponents[v] = 0;
        buckets[e].push_back(std::move(stripped));
    }
    std::vector<Polynomial> coeffs;
    coeffs.reserve(buckets.size());
    for (auto& b : buckets) coeffs.emplace_back(std::move(b));
    return coeffs;
}

Polynomial Polynomial::leading_coefficient_in(int v) const {
    auto coeffs = coefficients_in(v);
    return coeffs.back();
}

std::optional<Polynomial> Polynomial::exact_divide(const Polynomial& divisor) const {
    if (divisor.is_zero()) return std::nullopt;
    if (is_zero()) return Polynomial{};
    std::vector<Monomial> quotient;
    Polynomial rem = *this;
    const Monomial& lead_d = divisor.terms_.front();
    while (!rem.is_zero()) {
        const Monomial& lead_r = rem.terms_.front();
        Monomial q;
        q.exponents.resize(lead_r.exponents.size());
        for (std::size_t i = 0; i < q.exponents.size(); ++i) {
            int e = lead_r.exponents[i] - lead_d.exponents[i];
            if (e < 0) return std::nullopt;
            q.exponents[i] = e;
        }
        if (!mpz_divisible_p(lead_r.coefficient.get_mpz_t(), lead_d.coefficient.get_mpz_t()))
            return std::nullopt;
        q.coefficient = lead_r.coefficient / lead_d.coefficient;
        rem -= divisor * Polynomial{{q}};
        quotient.push_back(std::move(q));
    }
    return Polynomial(std::move(quotient));
}

std::optional<Polynomial> Polynomial::exact_divide(const BigInt& divisor) const {
    if (divisor == 0) return std::nullopt;
    Polynomial r = *this;
    for (Monomial& m : r.terms_) {
        if (!mpz_divisible_p(m.coefficient.get_mpz_t(), divisor.get_mpz_t()))
            return std::nullopt;
        m.coefficient /= divisor;
    }
    return r;
}

std::string Polynomial::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const Monomial& m : terms_) {
        BigInt c = m.coefficient;
        if (first) {
            if (c < 0) out << "-";
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        first = false;
        BigInt a = abs(c);
        bool has_vars = m.total_degree() > 0;
        if (a != 1 || !has_vars) out << a.get_str();
        bool star = a != 1;
        for (std::size_t v = 0; v < m.exponents.size(); ++v) {
            if (m.exponents[v] == 0) continue;
            if (star) out << "*";
            out << "x" << (v + 1);
            if (m.exponents[v] > 1) out << "^" << m.exponents[v];
            star = true;
        }
    }
    return out.str();
}

Polynomial pow(const Polynomial& p, int e, int n_vars) {
    assert(e >= 0);
    Polynomial r = Polynomial::constant(1, n_vars);
    for (int i = 0; i < e; ++i) r *= p;
    return r;
}

}  // namespace ordpick
