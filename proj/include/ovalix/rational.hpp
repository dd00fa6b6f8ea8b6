#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace ovalix {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational scalar. cpp_rational keeps the canonical form required
/// here: lowest terms, denominator > 0, zero stored as 0/1.
using Rat = boost::multiprecision::cpp_rational;

inline BigInt numerator(const Rat& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator(const Rat& r) { return boost::multiprecision::denominator(r); }

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rat& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) {
        s += '/';
        s += denominator(r).str();
    }
    return s;
}

/// Parses "p", "-p" or "p/q" (q > 0 after normalization). Surrounding
/// whitespace is ignored. Returns nullopt on malformed input.
inline std::optional<Rat> parse_rat(std::string_view s) {
    auto trim = [](std::string_view v) {
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
        return v;
    };
    auto parse_int = [&](std::string_view v) -> std::optional<BigInt> {
        v = trim(v);
        if (v.empty()) return std::nullopt;
        bool neg = false;
        if (v.front() == '+' || v.front() == '-') {
            neg = v.front() == '-';
            v.remove_prefix(1);
        }
        if (v.empty()) return std::nullopt;
        BigInt acc = 0;
        for (char c : v) {
            if (c < '0' || c > '9') return std::nullopt;
            acc = acc * 10 + (c - '0');
        }
        return neg ? -acc : acc;
    };
    s = trim(s);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) {
        auto n = parse_int(s);
        if (!n) return std::nullopt;
        return Rat(*n);
    }
    auto n = parse_int(s.substr(0, slash));
    auto d = parse_int(s.substr(slash + 1));
    if (!n || !d || *d == 0) return std::nullopt;
    return Rat(*n) / Rat(*d);
}

}  // namespace ovalix
