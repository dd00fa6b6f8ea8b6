#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ovalix/curves.hpp"
#include "ovalix/system.hpp"

namespace ovalix {

class DegreeError : public std::runtime_error {
public:
    explicit DegreeError(const std::string& what) : std::runtime_error(what) {}
};

class ZeroCurve : public std::runtime_error {
public:
    ZeroCurve() : std::runtime_error("invariant-curve check against the zero polynomial") {}
};

class EmptyOvalSet : public std::runtime_error {
public:
    EmptyOvalSet() : std::runtime_error("classification requires at least one oval") {}
};

class DuplicateDelta : public std::runtime_error {
public:
    DuplicateDelta() : std::runtime_error("product curve deltas must be mutually distinct") {}
};

class NonpositiveDelta : public std::runtime_error {
public:
    NonpositiveDelta() : std::runtime_error("product curve deltas must be positive") {}
};

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// f = h f0 - eps x y dh/dy,  g = h g0 + eps x y dh/dx.
/// The curve h = 0 is invariant for every eps; the rotational eps-term drops
/// out of the invariance identity.
inline PlanarSystem build_general(const Poly2& h, const Poly2& f0, const Poly2& g0,
                                  const Rat& eps) {
    Poly2 xy = Poly2::monomial(1, 1);
    PlanarSystem sys;
    sys.f = h * f0 - eps * (xy * h.partial(Var::Y));
    sys.g = h * g0 + eps * (xy * h.partial(Var::X));
    sys.meta = ConstructionMeta{h, f0, g0, eps};
    return sys;
}

/// The gradient-descent construction: f0 = -x y dh/dx, g0 = -x y dh/dy.
/// Every oval of h = 0 in the open positive quadrant with nonvanishing
/// gradient becomes a stable limit cycle; the system has degree at most
/// 2 deg(h) + 1 and satisfies (condO) trivially (every monomial carries xy).
inline PlanarSystem build_gradient(const Poly2& h, const Rat& eps) {
    Poly2 xy = Poly2::monomial(1, 1);
    return build_general(h, -(xy * h.partial(Var::X)), -(xy * h.partial(Var::Y)), eps);
}

/// f = h + line h_y,  g = h - line h_x  for a polynomial line of degree <= 1.
inline PlanarSystem build_christopher(const Poly2& h, const Poly2& line) {
    if (line.degree() > 1)
        throw DegreeError("build_christopher: line factor must have degree <= 1");
    PlanarSystem sys;
    sys.f = h + line * h.partial(Var::Y);
    sys.g = h - line * h.partial(Var::X);
    return sys;
}

/// Product of the quartic factors h_i (one disjoint oval per distinct
/// positive delta); degree 4N.
inline Poly2 product_curve(const std::vector<Rat>& deltas) {
    Poly2 p(Rat(1));
    for (std::size_t a = 0; a < deltas.size(); ++a) {
        if (deltas[a] <= 0) throw NonpositiveDelta();
        for (std::size_t b = a + 1; b < deltas.size(); ++b)
            if (deltas[a] == deltas[b]) throw DuplicateDelta();
        p *= detail::hi_poly(deltas[a]);
    }
    return p;
}

/// CurveSpec wrapper for the product family, windowed by the outermost oval.
inline CurveSpec product_curve_spec(const std::vector<Rat>& deltas) {
    CurveSpec spec;
    spec.name = "product";
    spec.poly = product_curve(deltas);
    double dmax = 0;
    for (std::size_t a = 0; a < deltas.size(); ++a) {
        spec.params["delta" + std::to_string(a + 1)] = deltas[a];
        dmax = std::max(dmax, to_double(deltas[a]));
    }
    spec.windows = {detail::hi_window(dmax)};
    spec.expected_ovals = static_cast<int>(deltas.size());
    return spec;
}

/// Substitutes (x - dx, y - dy) into both right-hand sides, then multiplies
/// by the factor. Shifting moves cycles into the positive quadrant; a
/// positive-coefficient factor preserves them up to time rescaling.
inline PlanarSystem shift_and_multiply(const PlanarSystem& sys, const Rat& dx, const Rat& dy,
                                       const Poly2& factor) {
    return {sys.f.shift(dx, dy) * factor, sys.g.shift(dx, dy) * factor, std::nullopt};
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

struct CofactorResult {
    bool is_invariant = false;
    Poly2 cofactor;  // meaningful iff is_invariant
};

/// Exact Darboux test: h is an invariant algebraic curve of (f, g) iff
/// h_x f + h_y g is divisible by h; the quotient is the cofactor.
inline CofactorResult check_invariant_curve(const Poly2& h, const PlanarSystem& sys) {
    if (h.is_zero()) throw ZeroCurve();
    Poly2 lie = h.partial(Var::X) * sys.f + h.partial(Var::Y) * sys.g;
    if (lie.is_zero()) return {true, Poly2()};
    auto q = try_div_exact(lie, h);
    if (!q) return {false, Poly2()};
    return {true, *q};
}

enum class OvalStability { Stable, Unstable, Mixed };

inline const char* to_cstr(OvalStability s) {
    switch (s) {
        case OvalStability::Stable: return "stable";
        case OvalStability::Unstable: return "unstable";
        default: return "mixed";
    }
}

/// Per-oval verdict; transversality values T = f0 h_x + g0 h_y sampled at
/// the oval polyline vertices.
struct StabilityVerdict {
    std::vector<OvalStability> per_oval;
    std::vector<std::vector<double>> samples;
};

/// Classifies each extracted oval by the sign of T = f0 h_x + g0 h_y at its
/// vertices. tau is compared against T normalized by the oval's max |T|,
/// guarding float evaluation on polyline vertices that sit near but not on
/// the curve.
inline StabilityVerdict classify_transversality(const Poly2& h, const Poly2& f0, const Poly2& g0,
                                                const OvalSet& ovals, double tau = 1e-9) {
    if (ovals.ovals.empty()) throw EmptyOvalSet();
    CompiledPoly cf0 = CompiledPoly::from(f0);
    CompiledPoly cg0 = CompiledPoly::from(g0);
    CompiledPoly chx = CompiledPoly::from(h.partial(Var::X));
    CompiledPoly chy = CompiledPoly::from(h.partial(Var::Y));
    StabilityVerdict verdict;
    for (const auto& oval : ovals.ovals) {
        std::vector<double> ts;
        ts.reserve(oval.pts.size());
        double tmax = 0.0;
        for (const auto& p : oval.pts) {
            double t = cf0.eval(p[0], p[1]) * chx.eval(p[0], p[1]) +
                       cg0.eval(p[0], p[1]) * chy.eval(p[0], p[1]);
            ts.push_back(t);
            tmax = std::max(tmax, std::abs(t));
        }
        OvalStability tag = OvalStability::Mixed;
        if (tmax > 0.0) {
            bool all_neg = true, all_pos = true;
            for (double t : ts) {
                all_neg &= t / tmax < -tau;
                all_pos &= t / tmax > tau;
            }
            if (all_neg)
                tag = OvalStability::Stable;
            else if (all_pos)
                tag = OvalStability::Unstable;
        }
        verdict.per_oval.push_back(tag);
        verdict.samples.push_back(std::move(ts));
    }
    return verdict;
}

}  // namespace ovalix
