#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "ovalix/construct.hpp"
#include "ovalix/system.hpp"

namespace ovalix {

/// Named (f0, g0) pairs for the curve-based builders.
///   unit-square : the reversible unit-square relaxation, fixed point (1,1)
///   linear      : the linear chain relaxation 1-x, x-y
///   ones        : constant field (1, 1)
inline std::pair<Poly2, Poly2> f0g0_preset(std::string_view name) {
    if (name == "unit-square")
        return {parse_poly("1 - x + y - x y"), parse_poly("1 + x - y - x y")};
    if (name == "linear") return {parse_poly("1 - x"), parse_poly("x - y")};
    if (name == "ones") return {Poly2(Rat(1)), Poly2(Rat(1))};
    throw std::invalid_argument("unknown f0/g0 preset: " + std::string(name));
}

/// Quadratic system with the ellipse 10x^2-12xy+4y^2+20x-16y+19 = 0 as its
/// algebraic limit cycle (cofactor x - 2).
inline PlanarSystem escher_system() {
    return {parse_poly("2 x^2 - x y + 3/2"), parse_poly("5/2 x^2 - x y - y + 17/4"), std::nullopt};
}

/// Quadratic system with an invariant algebraic limit cycle for c in (0,1/4);
/// not itself mass-action (the -14 c x term).
inline PlanarSystem chavarriga_quadratic(const Rat& c) {
    PlanarSystem sys;
    sys.f = parse_poly("2 + 4 x + 12 x y");
    sys.f.add_term({2, 0}, -4 * c);
    sys.g = parse_poly("8 - 8 y^2");
    sys.g.add_term({0, 0}, -3 * c);
    sys.g.add_term({1, 0}, -14 * c);
    sys.g.add_term({1, 1}, -2 * c);
    return sys;
}

/// The cubic mass-action instance: quadratic Chavarriga system at c = 1/8,
/// shifted one unit up in y and multiplied by y.
inline PlanarSystem chavarriga_cubic() {
    return shift_and_multiply(chavarriga_quadratic(Rat(1) / 8), Rat(0), Rat(1), Poly2::y());
}

}  // namespace ovalix
