#pragma once

#include <optional>

#include "ovalix/poly.hpp"

namespace ovalix {

/// Construction record kept by the curve-based builders. When present,
/// f = h*f0 - eps*x*y*dh/dy and g = h*g0 + eps*x*y*dh/dx hold exactly.
struct ConstructionMeta {
    Poly2 h;
    Poly2 f0;
    Poly2 g0;
    Rat eps;
};

/// A planar polynomial vector field dx/dt = f(x,y), dy/dt = g(x,y).
struct PlanarSystem {
    Poly2 f;
    Poly2 g;
    std::optional<ConstructionMeta> meta;

    int degree() const { return std::max(f.degree(), g.degree()); }
};

inline bool same_field(const PlanarSystem& a, const PlanarSystem& b) {
    return a.f == b.f && a.g == b.g;
}

}  // namespace ovalix
