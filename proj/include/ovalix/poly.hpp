#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ovalix/rational.hpp"

namespace ovalix {

struct Monomial {
    int x = 0;  // exponent of x
    int y = 0;  // exponent of y

    int total() const { return x + y; }
    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.x == b.x && a.y == b.y;
    }
};

/// Graded lexicographic order with x > y, ascending. The leading term of a
/// polynomial stored under this order is the last map entry.
struct GradedLex {
    bool operator()(const Monomial& a, const Monomial& b) const {
        if (a.total() != b.total()) return a.total() < b.total();
        return a.x < b.x;
    }
};

enum class Var { X, Y };

/// Sparse bivariate polynomial with exact rational coefficients.
/// Invariant: no zero coefficients are stored; degree of the zero
/// polynomial is -1.
class Poly2 {
public:
    using TermMap = std::map<Monomial, Rat, GradedLex>;

    Poly2() = default;
    explicit Poly2(const Rat& c) { add_term({0, 0}, c); }
    explicit Poly2(long c) : Poly2(Rat(c)) {}

    static Poly2 monomial(int i, int j, Rat c = Rat(1)) {
        Poly2 p;
        p.add_term({i, j}, std::move(c));
        return p;
    }
    static Poly2 x() { return monomial(1, 0); }
    static Poly2 y() { return monomial(0, 1); }

    bool is_zero() const { return terms_.empty(); }
    int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.total(); }
    std::size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    Rat coeff(int i, int j) const {
        auto it = terms_.find({i, j});
        return it == terms_.end() ? Rat(0) : it->second;
    }

    void add_term(const Monomial& m, const Rat& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    std::pair<Monomial, Rat> leading() const {
        if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
        return *terms_.rbegin();
    }

    Poly2& operator+=(const Poly2& o) {
        if (this == &o) {
            for (auto& [m, c] : terms_) c *= 2;
            return *this;
        }
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly2& operator-=(const Poly2& o) {
        if (this == &o) {
            terms_.clear();
            return *this;
        }
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
    friend Poly2 operator-(Poly2 a, const Poly2& b) { return a -= b; }
    Poly2 operator-() const {
        Poly2 r;
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }

    friend Poly2 operator*(const Poly2& a, const Poly2& b) {
        Poly2 r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_)
                r.add_term({ma.x + mb.x, ma.y + mb.y}, ca * cb);
        return r;
    }
    Poly2& operator*=(const Poly2& o) { return *this = *this * o; }
    friend Poly2 operator*(const Rat& c, const Poly2& p) {
        Poly2 r;
        if (c == 0) return r;
        for (const auto& [m, pc] : p.terms_) r.terms_.emplace(m, c * pc);
        return r;
    }

    friend bool operator==(const Poly2& a, const Poly2& b) { return a.terms_ == b.terms_; }

    /// Formal partial derivative.
    Poly2 partial(Var v) const {
        Poly2 r;
        for (const auto& [m, c] : terms_) {
            if (v == Var::X && m.x > 0) r.add_term({m.x - 1, m.y}, c * m.x);
            if (v == Var::Y && m.y > 0) r.add_term({m.x, m.y - 1}, c * m.y);
        }
        return r;
    }

    /// Horner evaluation: terms are grouped by x-exponent, each group is a
    /// Horner pass in y, the groups feed an outer Horner pass in x.
    template <class T>
    T eval_with(const T& xv, const T& yv) const {
        std::map<int, std::map<int, Rat>> rows;  // i -> (j -> c)
        for (const auto& [m, c] : terms_) rows[m.x][m.y] = c;
        T acc(0);
        int prev_i = -1;
        for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
            if (prev_i >= 0)
                for (int k = 0; k < prev_i - it->first; ++k) acc *= xv;
            T racc(0);
            int prev_j = -1;
            for (auto jt = it->second.rbegin(); jt != it->second.rend(); ++jt) {
                if (prev_j >= 0)
                    for (int k = 0; k < prev_j - jt->first; ++k) racc *= yv;
                racc += convert<T>(jt->second);
                prev_j = jt->first;
            }
            for (int k = 0; k < prev_j; ++k) racc *= yv;
            acc += racc;
            prev_i = it->first;
        }
        for (int k = 0; k < prev_i; ++k) acc *= xv;
        return acc;
    }

    Rat eval(const Rat& xv, const Rat& yv) const { return eval_with<Rat>(xv, yv); }
    double eval_f64(double xv, double yv) const { return eval_with<double>(xv, yv); }

    /// Returns p(x - dx, y - dy), expanded.
    Poly2 shift(const Rat& dx, const Rat& dy) const {
        int d = degree();
        if (d <= 0) return *this;
        std::vector<Poly2> px(d + 1), py(d + 1);
        px[0] = Poly2(Rat(1));
        py[0] = Poly2(Rat(1));
        Poly2 xs = x() - Poly2(dx);
        Poly2 ys = y() - Poly2(dy);
        for (int k = 1; k <= d; ++k) {
            px[k] = px[k - 1] * xs;
            py[k] = py[k - 1] * ys;
        }
        Poly2 r;
        for (const auto& [m, c] : terms_) r += c * (px[m.x] * py[m.y]);
        return r;
    }

private:
    template <class T>
    static T convert(const Rat& c) {
        if constexpr (std::is_same_v<T, Rat>)
            return c;
        else
            return to_double(c);
    }

    TermMap terms_;
};

/// Coefficients lowered to doubles once, for grid sweeps and integration
/// inner loops. Evaluation uses power tables (degree is small and bounded).
struct CompiledPoly {
    struct Term {
        int i, j;
        double c;
    };
    std::vector<Term> terms;
    int max_i = 0;
    int max_j = 0;

    static CompiledPoly from(const Poly2& p) {
        CompiledPoly cp;
        for (const auto& [m, c] : p.terms()) {
            cp.terms.push_back({m.x, m.y, to_double(c)});
            cp.max_i = std::max(cp.max_i, m.x);
            cp.max_j = std::max(cp.max_j, m.y);
        }
        if (cp.max_i >= 64 || cp.max_j >= 64)
            throw std::invalid_argument("CompiledPoly: degree too large");
        return cp;
    }

    double eval(double x, double y) const {
        double px[64], py[64];
        px[0] = py[0] = 1.0;
        for (int k = 1; k <= max_i; ++k) px[k] = px[k - 1] * x;
        for (int k = 1; k <= max_j; ++k) py[k] = py[k - 1] * y;
        double acc = 0.0;
        for (const auto& t : terms) acc += t.c * px[t.i] * py[t.j];
        return acc;
    }

    /// Collapses y to obtain univariate coefficients in x (for row sweeps).
    void x_coeffs_at_y(double y, std::vector<double>& out) const {
        out.assign(max_i + 1, 0.0);
        double py[64];
        py[0] = 1.0;
        for (int k = 1; k <= max_j; ++k) py[k] = py[k - 1] * y;
        for (const auto& t : terms) out[t.i] += t.c * py[t.j];
    }

    static double eval_x(const std::vector<double>& xc, double x) {
        double acc = 0.0;
        for (auto it = xc.rbegin(); it != xc.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
};

/// Exact quotient num/den, or nullopt when den does not divide num.
/// Multivariate division under graded lex: whenever the remainder's leading
/// monomial is not divisible by den's, no exact quotient exists (for a
/// single divisor the leading monomial of any multiple of den is a multiple
/// of den's leading monomial), so the division stops early.
inline std::optional<Poly2> try_div_exact(const Poly2& num, const Poly2& den) {
    if (den.is_zero()) throw std::domain_error("try_div_exact: zero divisor");
    Poly2 q;
    Poly2 r = num;
    const auto [dm, dc] = den.leading();
    while (!r.is_zero()) {
        const auto [rm, rc] = r.leading();
        if (rm.x < dm.x || rm.y < dm.y) return std::nullopt;
        Monomial m{rm.x - dm.x, rm.y - dm.y};
        Rat c = rc / dc;
        q.add_term(m, c);
        r -= Poly2::monomial(m.x, m.y, c) * den;
    }
    return q;
}

// ---------------------------------------------------------------------------
// Text format. Terms joined by +/-, coefficients as integers or p/q,
// monomials as x^i y^j with ^1 and unit coefficients omitted, e.g.
//   16 x^4 + 39 x^2 y^2 + 16 y^4 - 25 x^2 - 25 y^2 + 9
// Whitespace-insensitive on input; printing is canonical (descending
// graded lex), so parse(print(p)) == p exactly.
// ---------------------------------------------------------------------------

class PolyFormatError : public std::runtime_error {
public:
    PolyFormatError(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

inline std::string to_string(const Poly2& p) {
    if (p.is_zero()) return "0";
    std::string out;
    const auto& t = p.terms();
    for (auto it = t.rbegin(); it != t.rend(); ++it) {
        const auto& [m, c] = *it;
        bool neg = c < 0;
        Rat mag = neg ? Rat(-c) : c;
        if (out.empty())
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        bool unit = mag == 1 && m.total() > 0;
        if (!unit) {
            out += to_string(mag);
            if (m.total() > 0) out += ' ';
        }
        if (m.x > 0) {
            out += 'x';
            if (m.x > 1) out += '^' + std::to_string(m.x);
            if (m.y > 0) out += ' ';
        }
        if (m.y > 0) {
            out += 'y';
            if (m.y > 1) out += '^' + std::to_string(m.y);
        }
    }
    return out;
}

inline Poly2 parse_poly(std::string_view s) {
    Poly2 p;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    };
    auto parse_uint = [&]() -> BigInt {
        std::size_t start = i;
        BigInt acc = 0;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
            acc = acc * 10 + (s[i] - '0');
            ++i;
        }
        if (i == start) throw PolyFormatError("expected digits", i);
        return acc;
    };
    skip();
    if (i == s.size()) throw PolyFormatError("empty polynomial", i);
    bool first = true;
    while (true) {
        skip();
        if (i == s.size()) {
            if (first) throw PolyFormatError("empty polynomial", i);
            break;
        }
        bool neg = false;
        if (s[i] == '+' || s[i] == '-') {
            neg = s[i] == '-';
            ++i;
            skip();
        } else if (!first) {
            throw PolyFormatError("expected '+' or '-' between terms", i);
        }
        // term: [coefficient] [x[^i]] [y[^j]] with at least one part present
        Rat coef(1);
        bool have_coef = false;
        if (i < s.size() && s[i] >= '0' && s[i] <= '9') {
            BigInt n = parse_uint();
            skip();
            if (i < s.size() && s[i] == '/') {
                ++i;
                skip();
                BigInt d = parse_uint();
                if (d == 0) throw PolyFormatError("zero denominator", i);
                coef = Rat(n) / Rat(d);
            } else {
                coef = Rat(n);
            }
            have_coef = true;
            skip();
        }
        int ex = 0, ey = 0;
        bool have_var = false;
        while (i < s.size() && (s[i] == 'x' || s[i] == 'X' || s[i] == 'y' || s[i] == 'Y')) {
            bool is_x = s[i] == 'x' || s[i] == 'X';
            ++i;
            skip();
            int e = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                skip();
                BigInt b = parse_uint();
                if (b > 1000) throw PolyFormatError("exponent too large", i);
                e = static_cast<int>(b);
                skip();
            }
            if (is_x) {
                if (ex) throw PolyFormatError("repeated variable x in term", i);
                ex = e;
            } else {
                if (ey) throw PolyFormatError("repeated variable y in term", i);
                ey = e;
            }
            have_var = true;
        }
        if (!have_coef && !have_var) throw PolyFormatError("expected term", i);
        p.add_term({ex, ey}, neg ? Rat(-coef) : coef);
        first = false;
    }
    return p;
}

}  // namespace ovalix
