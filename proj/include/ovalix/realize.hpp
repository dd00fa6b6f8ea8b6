#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ovalix/network.hpp"

namespace ovalix {

struct CoeffViolation {
    char which;  // 'a' = coefficient of f, 'b' = coefficient of g
    int i;
    int j;
    Rat value;
};

/// Result of an S_n / M_n membership test. Only the flag(s) computed by the
/// operation are set; violating_coefficients is empty exactly when the
/// requested membership holds.
struct ClassReport {
    int n = 0;
    int degree = -1;
    std::optional<bool> in_s_n;
    std::optional<bool> in_m_n;
    std::vector<CoeffViolation> violating_coefficients;
};

class NotInClass : public std::runtime_error {
public:
    explicit NotInClass(ClassReport r)
        : std::runtime_error("system is not in the requested network class"),
          report(std::move(r)) {}
    ClassReport report;
};

class EmptyRealization : public std::runtime_error {
public:
    EmptyRealization() : std::runtime_error("realization of the zero system is empty") {}
};

namespace detail {

inline void collect_s_violations(const PlanarSystem& sys, int n, ClassReport& rep) {
    for (const auto& [m, c] : sys.f.terms())
        if (m.total() > n) rep.violating_coefficients.push_back({'a', m.x, m.y, c});
    for (const auto& [m, c] : sys.g.terms())
        if (m.total() > n) rep.violating_coefficients.push_back({'b', m.x, m.y, c});
    for (int i = 0; i <= n; ++i) {
        if (Rat a = sys.f.coeff(0, i); a < 0)
            rep.violating_coefficients.push_back({'a', 0, i, a});
        if (Rat b = sys.g.coeff(i, 0); b < 0)
            rep.violating_coefficients.push_back({'b', i, 0, b});
    }
}

}  // namespace detail

/// Membership in S_n: degree(f), degree(g) <= n and the inflow coefficients
/// a_{0,i}, b_{i,0} nonnegative for i = 0..n.
inline ClassReport is_S_n(const PlanarSystem& sys, int n) {
    if (n < 1) throw std::invalid_argument("is_S_n: n must be >= 1");
    ClassReport rep;
    rep.n = n;
    rep.degree = sys.degree();
    detail::collect_s_violations(sys, n, rep);
    rep.in_s_n = rep.violating_coefficients.empty();
    return rep;
}

/// Membership in M_n: S_n membership plus a_{i,n-i} + b_{i,n-i} <= 0 for the
/// full top-degree row i = 0..n.
inline ClassReport is_M_n(const PlanarSystem& sys, int n) {
    if (n < 1) throw std::invalid_argument("is_M_n: n must be >= 1");
    ClassReport rep;
    rep.n = n;
    rep.degree = sys.degree();
    detail::collect_s_violations(sys, n, rep);
    rep.in_s_n = rep.violating_coefficients.empty();
    for (int i = 0; i <= n; ++i) {
        Rat a = sys.f.coeff(i, n - i);
        Rat b = sys.g.coeff(i, n - i);
        if (a + b > 0) {
            rep.violating_coefficients.push_back({'a', i, n - i, a});
            rep.violating_coefficients.push_back({'b', i, n - i, b});
        }
    }
    rep.in_m_n = rep.violating_coefficients.empty();
    return rep;
}

namespace detail {

/// One reaction per monomial: a positive f-term a x^i y^j becomes
/// iX + jY -> (i+1)X + jY at rate a, a negative one steps X down; g-terms
/// step Y instead.
inline void realize_monomial_s(Network& net, char which, int i, int j, const Rat& c) {
    if (c == 0) return;
    Reaction r;
    r.alpha = i;
    r.beta = j;
    r.rate = c > 0 ? c : Rat(-c);
    int step = c > 0 ? 1 : -1;
    r.gamma = i + (which == 'a' ? step : 0);
    r.delta = j + (which == 'b' ? step : 0);
    net.reactions.push_back(r);
}

}  // namespace detail

/// Constructive realization of a system satisfying (condO): one reaction per
/// monomial. derive_mass_action(realize_S_n(sys)) == sys exactly.
inline Network realize_S_n(const PlanarSystem& sys) {
    int n = std::max(1, sys.degree());
    ClassReport rep = is_S_n(sys, n);
    if (!rep.in_s_n.value()) throw NotInClass(rep);
    Network net;
    for (const auto& [m, c] : sys.f.terms()) detail::realize_monomial_s(net, 'a', m.x, m.y, c);
    for (const auto& [m, c] : sys.g.terms()) detail::realize_monomial_s(net, 'b', m.x, m.y, c);
    if (net.reactions.empty()) throw EmptyRealization();
    return net;
}

/// Realization with molecularity bound n for systems satisfying (condO) and
/// (condM). Monomials of total degree < n use the S_n scheme; each top-degree
/// coefficient pair (a, b) = (a_{i,n-i}, b_{i,n-i}) is realized by a
/// two-reaction scheme from the same reactant complex, with zero-rate
/// reactions dropped. When a == b both schemes coincide after dropping; the
/// (i+1, n-i-1)/(i-1, n-i-1) branch is used.
inline Network realize_M_n(const PlanarSystem& sys, int n) {
    ClassReport rep = is_M_n(sys, n);
    if (!rep.in_m_n.value()) throw NotInClass(rep);
    Network net;
    auto push = [&](int ia, int ib, int ga, int gd, const Rat& rate) {
        if (rate == 0) return;
        net.reactions.push_back({ia, ib, ga, gd, rate});
    };
    for (const auto& [m, c] : sys.f.terms())
        if (m.total() < n) detail::realize_monomial_s(net, 'a', m.x, m.y, c);
    for (const auto& [m, c] : sys.g.terms())
        if (m.total() < n) detail::realize_monomial_s(net, 'b', m.x, m.y, c);
    for (int i = 0; i <= n; ++i) {
        int j = n - i;
        Rat a = sys.f.coeff(i, j);
        Rat b = sys.g.coeff(i, j);
        if (a == 0 && b == 0) continue;
        if (i == 0) {
            push(0, n, 1, n - 1, a);
            push(0, n, 0, n - 1, -a - b);
        } else if (i == n) {
            push(n, 0, n - 1, 1, b);
            push(n, 0, n - 1, 0, -a - b);
        } else if (a >= b) {
            push(i, j, i + 1, j - 1, (a - b) / 2);
            push(i, j, i - 1, j - 1, (-a - b) / 2);
        } else {
            push(i, j, i - 1, j + 1, (b - a) / 2);
            push(i, j, i - 1, j - 1, (-a - b) / 2);
        }
    }
    if (net.reactions.empty()) throw EmptyRealization();
    return net;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline std::string to_text(const ClassReport& rep) {
    std::string out = "degree " + std::to_string(rep.degree) + ", n " + std::to_string(rep.n);
    if (rep.in_s_n) out += std::string(", S_n: ") + (*rep.in_s_n ? "yes" : "no");
    if (rep.in_m_n) out += std::string(", M_n: ") + (*rep.in_m_n ? "yes" : "no");
    out += '\n';
    for (const auto& v : rep.violating_coefficients) {
        out += "  violating ";
        out += v.which;
        out += "[" + std::to_string(v.i) + "," + std::to_string(v.j) + "] = " + to_string(v.value) +
               '\n';
    }
    return out;
}

inline std::string to_kv(const ClassReport& rep) {
    std::string out = "degree=" + std::to_string(rep.degree) + "\nn=" + std::to_string(rep.n) + '\n';
    if (rep.in_s_n) out += std::string("in_s_n=") + (*rep.in_s_n ? "true" : "false") + '\n';
    if (rep.in_m_n) out += std::string("in_m_n=") + (*rep.in_m_n ? "true" : "false") + '\n';
    std::string vs;
    for (const auto& v : rep.violating_coefficients) {
        if (!vs.empty()) vs += ';';
        vs += v.which;
        vs += '[' + std::to_string(v.i) + ',' + std::to_string(v.j) + "]=" + to_string(v.value);
    }
    out += "violations=" + vs + '\n';
    return out;
}

}  // namespace ovalix
