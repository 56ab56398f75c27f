#include "ordpick/polysys.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

namespace ordpick {

bool operator==(const PolySystem& a, const PolySystem& b) {
    return a.n_vars == b.n_vars && a.polys == b.polys;
}

bool operator==(const VariableOrdering& a, const VariableOrdering& b) {
    return a.perm == b.perm && a.index == b.index;
}

std::int64_t factorial(int n) {
    std::int64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

std::vector<VariableOrdering> enumerate_orderings(int n, int cap) {
    if (n < 1) throw std::invalid_argument("enumerate_orderings: n must be >= 1");
    if (n > cap)
        throw std::invalid_argument("enumerate_orderings: n=" + std::to_string(n) +
                                    " exceeds ordering cap " + std::to_string(cap));
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::vector<VariableOrdering> out;
    out.reserve(static_cast<std::size_t>(factorial(n)));
    std::int64_t idx = 0;
    do {
        out.push_back(VariableOrdering{perm, idx++});
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

VariableOrdering ordering_from_index(int n, std::int64_t index) {
    assert(index >= 0 && index < factorial(n));
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> perm;
    perm.reserve(static_cast<std::size_t>(n));
    std::int64_t rem = index;
    for (int k = n - 1; k >= 0; --k) {
        std::int64_t f = factorial(k);
        auto pos = static_cast<std::size_t>(rem / f);
        rem %= f;
        perm.push_back(pool[pos]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    return VariableOrdering{std::move(perm), index};
}

std::int64_t ordering_index(const std::vector<int>& perm) {
    int n = static_cast<int>(perm.size());
    std::int64_t idx = 0;
    for (int i = 0; i < n; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < n; ++j)
            if (perm[j] < perm[i]) ++smaller;
        idx += smaller * factorial(n - 1 - i);
    }
    return idx;
}

namespace {

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool done() {
        skip_ws();
        return pos_ >= text_.size();
    }

    // Next non-whitespace character without consuming it.
    char peek() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        return text_[pos_];
    }

    void advance() { ++pos_; }

    void expect(char c) {
        char found = peek();
        if (found != c)
            throw ParseError(std::string("expected '") + c + "', found '" + found + "'", pos_);
        ++pos_;
    }

    bool accept(char c) {
        if (!done() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    BigInt integer() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        std::size_t digits = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
            ++digits;
        }
        if (digits == 0) throw ParseError("expected integer", start);
        return BigInt(std::string(text_.substr(start, pos_ - start)), 10);
    }

    std::string identifier() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) throw ParseError("expected identifier", start);
        return std::string(text_.substr(start, pos_ - start));
    }

    std::size_t position() const { return pos_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

Monomial parse_mono(Scanner& sc) {
    sc.expect('(');
    sc.expect('(');
    Monomial m;
    while (true) {
        std::size_t at = sc.position();
        BigInt e = sc.integer();
        if (e < 0) throw ParseError("negative exponent", at);
        if (!e.fits_sint_p()) throw ParseError("exponent too large", at);
        m.exponents.push_back(static_cast<int>(e.get_si()));
        if (!sc.accept(',')) break;
    }
    sc.expect(')');
    sc.expect(',');
    m.coefficient = sc.integer();
    sc.expect(')');
    return m;
}

}  // namespace

PolySystem parse_problem(std::string_view line) {
    Scanner sc(line);
    sc.expect('[');
    if (sc.accept(']')) throw ParseError("empty problem", sc.position());
    PolySystem s;
    int arity = -1;
    while (true) {
        sc.expect('[');
        std::vector<Monomial> terms;
        if (!sc.accept(']')) {
            while (true) {
                std::size_t at = sc.position();
                Monomial m = parse_mono(sc);
                if (arity < 0) arity = static_cast<int>(m.exponents.size());
                if (static_cast<int>(m.exponents.size()) != arity)
                    throw ParseError("inconsistent exponent tuple length", at);
                terms.push_back(std::move(m));
                if (!sc.accept(',')) break;
            }
            sc.expect(']');
        }
        s.polys.emplace_back(std::move(terms));
        if (!sc.accept(',')) break;
    }
    sc.expect(']');
    if (!sc.done()) throw ParseError("trailing characters after problem", sc.position());
    if (arity < 0) throw ParseError("problem contains no monomials", 0);
    s.n_vars = arity;
    return s;
}

std::string serialize_problem(const PolySystem& s) {
    std::ostringstream out;
    out << '[';
    for (std::size_t p = 0; p < s.polys.size(); ++p) {
        if (p) out << ',';
        out << '[';
        const auto& terms = s.polys[p].terms();
        for (std::size_t t = 0; t < terms.size(); ++t) {
            if (t) out << ',';
            out << "((";
            for (std::size_t v = 0; v < terms[t].exponents.size(); ++v) {
                if (v) out << ',';
                out << terms[t].exponents[v];
            }
            out << ")," << terms[t].coefficient.get_str() << ')';
        }
        out << ']';
    }
    out << ']';
    return out.str();
}

namespace {

// expr := ('+'|'-')* term (('+'|'-') term)*
// term := factor ('*' factor)*
// factor := atom ('^' uint)?
// atom := uint | identifier | '(' expr ')' | '-' atom
class InfixParser {
public:
    InfixParser(std::string_view text, const std::vector<std::string>& var_names)
        : sc_(text), vars_(var_names), n_(static_cast<int>(var_names.size())) {}

    Polynomial expression() {
        Polynomial acc = signed_term();
        while (!sc_.done()) {
            if (sc_.accept('+')) {
                acc += term();
            } else if (sc_.accept('-')) {
                acc -= term();
            } else {
                break;
            }
        }
        return acc;
    }

    Scanner& scanner() { return sc_; }

private:
    Polynomial signed_term() {
        bool negate = false;
        while (true) {
            char c = sc_.peek();
            if (c == '-') {
                sc_.advance();
                negate = !negate;
            } else if (c == '+') {
                sc_.advance();
            } else {
                break;
            }
        }
        Polynomial t = term();
        return negate ? -t : t;
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (!sc_.done() && sc_.accept('*')) acc *= factor();
        return acc;
    }

    Polynomial factor() {
        Polynomial base = atom();
        if (!sc_.done() && sc_.accept('^')) {
            std::size_t at = sc_.position();
            BigInt e = sc_.integer();
            if (e < 0 || !e.fits_sint_p()) throw ParseError("invalid exponent", at);
            return pow(base, static_cast<int>(e.get_si()), n_);
        }
        return base;
    }

    Polynomial atom() {
        char c = sc_.peek();
        if (c == '(') {
            sc_.advance();
            Polynomial inner = expression();
            sc_.expect(')');
            return inner;
        }
        if (c == '-') {
            sc_.advance();
            return -atom();
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return Polynomial::constant(sc_.integer(), n_);
        std::size_t at = sc_.position();
        std::string name = sc_.identifier();
        for (int v = 0; v < n_; ++v)
            if (vars_[static_cast<std::size_t>(v)] == name) return Polynomial::variable(v, n_);
        throw ParseError("unknown identifier '" + name + "'", at);
    }

    Scanner sc_;
    const std::vector<std::string>& vars_;
    int n_;
};

}  // namespace

PolySystem parse_infix(std::string_view text, const std::vector<std::string>& var_names) {
    if (var_names.empty()) throw std::invalid_argument("parse_infix: no variables named");
    PolySystem s;
    s.n_vars = static_cast<int>(var_names.size());
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find(';', begin);
        std::string_view piece = text.substr(
            begin, end == std::string_view::npos ? std::string_view::npos : end - begin);
        bool blank = piece.find_first_not_of(" \t\r\n") == std::string_view::npos;
        if (!blank) {
            InfixParser parser(piece, var_names);
            Polynomial p = parser.expression();
            if (!parser.scanner().done())
                throw ParseError("trailing characters in expression",
                                 parser.scanner().position());
            s.polys.push_back(std::move(p));
        }
        if (end == std::string_view::npos) break;
        begin = end + 1;
    }
    if (s.polys.empty()) throw std::invalid_argument("parse_infix: empty problem");
    return s;
}

namespace {

int draw_clamped(std::mt19937_64& rng, double mean, double stddev, int lo, int hi) {
    double v = mean;
    if (stddev > 0) {
        std::normal_distribution<double> dist(mean, stddev);
        v = dist(rng);
    }
    long r = std::lround(v);
    if (r < lo) r = lo;
    if (r > hi) r = hi;
    return static_cast<int>(r);
}

}  // namespace

std::vector<PolySystem> generate_random_dataset(const GenConfig& cfg, int count) {
    if (cfg.n_vars < 1 || count < 0) throw std::invalid_argument("invalid generator config");
    if (cfg.degree_stddev < 0 || cfg.coeff_stddev < 0 || cfg.terms_stddev < 0 ||
        cfg.polys_stddev < 0)
        throw std::invalid_argument("generator stddevs must be >= 0");
    if (cfg.degree_cap < 1 || cfg.coeff_cap < 1 || cfg.terms_cap < 1 || cfg.polys_cap < 1)
        throw std::invalid_argument("generator caps must be >= 1");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> coin(0, 1);

    auto draw_coefficient = [&]() -> BigInt {
        int magnitude = 0;
        for (int attempt = 0; attempt < 64 && magnitude == 0; ++attempt)
            magnitude = draw_clamped(rng, cfg.coeff_mean, cfg.coeff_stddev, 0, cfg.coeff_cap);
        if (magnitude == 0) magnitude = 1;
        return coin(rng) ? BigInt(magnitude) : BigInt(-magnitude);
    };

    auto draw_polynomial = [&]() -> Polynomial {
        for (int attempt = 0; attempt < 64; ++attempt) {
            int n_terms = draw_clamped(rng, cfg.terms_mean, cfg.terms_stddev, 1, cfg.terms_cap);
            std::vector<Monomial> terms;
            terms.reserve(static_cast<std::size_t>(n_terms));
            for (int t = 0; t < n_terms; ++t) {
                Monomial m;
                m.exponents.resize(static_cast<std::size_t>(cfg.n_vars));
                for (int v = 0; v < cfg.n_vars; ++v)
                    m.exponents[static_cast<std::size_t>(v)] =
                        draw_clamped(rng, cfg.degree_mean, cfg.degree_stddev, 0, cfg.degree_cap);
                m.coefficient = draw_coefficient();
                terms.push_back(std::move(m));
            }
            Polynomial p(std::move(terms));
            if (!p.is_zero()) return p;
        }
        return Polynomial::constant(1, cfg.n_vars);
    };

    std::vector<PolySystem> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        PolySystem s;
        s.n_vars = cfg.n_vars;
        int n_polys = draw_clamped(rng, cfg.polys_mean, cfg.polys_stddev, 1, cfg.polys_cap);
        s.polys.reserve(static_cast<std::size_t>(n_polys));
        for (int p = 0; p < n_polys; ++p) s.polys.push_back(draw_polynomial());
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace ordpick
