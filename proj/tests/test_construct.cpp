#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ovalix/construct.hpp"
#include "ovalix/presets.hpp"
#include "ovalix/realize.hpp"

using namespace ovalix;

namespace {

std::mt19937 rng(550211);

Rat random_rat() {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
    return Rat(num(rng)) / Rat(den(rng));
}

Poly2 random_poly(int max_deg, double density = 0.4) {
    std::uniform_real_distribution<double> u(0, 1);
    Poly2 p;
    for (int i = 0; i <= max_deg; ++i)
        for (int j = 0; i + j <= max_deg; ++j)
            if (u(rng) < density) p.add_term({i, j}, random_rat());
    return p;
}

const Poly2 kCommfach = parse_poly("x^2 + x y^2 + y - 4 x y");
const Poly2 kXY = Poly2::monomial(1, 1);

}  // namespace

TEST_CASE("build_general") {
    SECTION("commfach with the linear relaxation at eps=1") {
        auto [f0, g0] = f0g0_preset("linear");
        PlanarSystem sys = build_general(kCommfach, f0, g0, Rat(1));
        CHECK(sys.f == parse_poly("x^2 + x y^2 + y - 6 x y + 8 x^2 y - 3 x^2 y^2 - x^3"));
        CHECK(sys.g == parse_poly("x^3 + x^2 y^2 + x y - 3 x^2 y - y^2"));
        REQUIRE(sys.meta.has_value());
        CHECK(sys.meta->h == kCommfach);
        CHECK(sys.meta->eps == 1);
    }
    SECTION("eps=0 is the curve-of-equilibria system") {
        auto [f0, g0] = f0g0_preset("linear");
        PlanarSystem sys = build_general(kCommfach, f0, g0, Rat(0));
        CHECK(sys.f == kCommfach * f0);
        CHECK(sys.g == kCommfach * g0);
    }
    SECTION("h9 with the unit-square relaxation against the printed partials") {
        Poly2 h9 = catalog("h9").poly;
        auto [f0, g0] = f0g0_preset("unit-square");
        Rat eps = Rat(1) / 10;
        PlanarSystem sys = build_general(h9, f0, g0, eps);
        Poly2 hy = parse_poly("2 x^2 y + x^2 + 2 x y + 2 y + 1 - 9 x");
        Poly2 hx = parse_poly("2 x y^2 + y^2 + 2 x y + 2 x + 1 - 9 y");
        CHECK(sys.f == h9 * f0 - eps * (kXY * hy));
        CHECK(sys.g == h9 * g0 + eps * (kXY * hx));
    }
    SECTION("meta satisfies the construction identity") {
        for (int it = 0; it < 20; ++it) {
            Poly2 h = random_poly(3), f0 = random_poly(2), g0 = random_poly(2);
            Rat eps = random_rat();
            PlanarSystem sys = build_general(h, f0, g0, eps);
            REQUIRE(sys.meta.has_value());
            CHECK(sys.f == sys.meta->h * sys.meta->f0 -
                               sys.meta->eps * (kXY * sys.meta->h.partial(Var::Y)));
            CHECK(sys.g == sys.meta->h * sys.meta->g0 +
                               sys.meta->eps * (kXY * sys.meta->h.partial(Var::X)));
        }
    }
}

TEST_CASE("build_gradient") {
    SECTION("degree bound and gradient form") {
        Poly2 h = catalog("qshift", {{"mu", Rat(39)}}).poly;
        PlanarSystem sys = build_gradient(h, Rat(1));
        CHECK(sys.degree() == 9);  // 2 deg(h) + 1
        PlanarSystem general =
            build_general(h, -(kXY * h.partial(Var::X)), -(kXY * h.partial(Var::Y)), Rat(1));
        CHECK(same_field(sys, general));
    }
    SECTION("zero curve gives the zero system") {
        PlanarSystem sys = build_gradient(Poly2(), Rat(1));
        CHECK(sys.f.is_zero());
        CHECK(sys.g.is_zero());
    }
    SECTION("cofactor is -x y |grad h|^2") {
        Poly2 h = product_curve({Rat(1), Rat(2)});
        PlanarSystem sys = build_gradient(h, Rat(1) / 10);
        CofactorResult res = check_invariant_curve(h, sys);
        REQUIRE(res.is_invariant);
        Poly2 hx = h.partial(Var::X), hy = h.partial(Var::Y);
        CHECK(res.cofactor == -(kXY * (hx * hx + hy * hy)));
    }
    SECTION("matrix form x y M grad h") {
        for (int it = 0; it < 20; ++it) {
            Poly2 h = random_poly(3);
            Rat eps = random_rat();
            PlanarSystem sys = build_gradient(h, eps);
            Poly2 hx = h.partial(Var::X), hy = h.partial(Var::Y);
            CHECK(sys.f == kXY * (-(h * hx) - eps * hy));
            CHECK(sys.g == kXY * (eps * hx - h * hy));
        }
    }
    SECTION("degree bound holds for random curves") {
        for (int it = 0; it < 50; ++it) {
            Poly2 h = random_poly(4);
            if (h.is_zero()) continue;
            CHECK(build_gradient(h, Rat(1)).degree() <= 2 * h.degree() + 1);
        }
    }
    SECTION("chemical realizability of the shifted quartic systems") {
        for (Rat mu : {Rat(0), Rat(39)}) {
            Poly2 h = catalog("qshift", {{"mu", mu}}).poly;
            for (Rat eps : {Rat(1) / 10, Rat(1)}) {
                PlanarSystem sys = build_gradient(h, eps);
                CHECK(is_S_n(sys, 9).in_s_n.value());
            }
        }
    }
}

TEST_CASE("build_christopher") {
    Poly2 h = catalog("threeoval").poly;
    Poly2 line = parse_poly("y - 7 x");
    PlanarSystem sys = build_christopher(h, line);
    CHECK(sys.degree() == 4);
    CHECK(is_S_n(sys, 4).in_s_n.value());

    SECTION("cofactor is h_x + h_y") {
        CofactorResult res = check_invariant_curve(h, sys);
        REQUIRE(res.is_invariant);
        CHECK(res.cofactor == h.partial(Var::X) + h.partial(Var::Y));
    }
    SECTION("zero line degenerates to (h, h)") {
        PlanarSystem degen = build_christopher(h, Poly2());
        CHECK(degen.f == h);
        CHECK(degen.g == h);
    }
    CHECK_THROWS_AS(build_christopher(h, parse_poly("x^2")), DegreeError);
}

TEST_CASE("product_curve") {
    CHECK(product_curve({Rat(1)}) == catalog("h9").poly);
    SECTION("degree and negative-monomial support") {
        Poly2 h0 = product_curve({Rat(1), Rat(2), Rat(3), Rat(4)});
        CHECK(h0.degree() == 16);
        for (const auto& [m, c] : h0.terms()) {
            if (c < 0) {
                CHECK(m.x >= 1);
                CHECK(m.x <= 15);
                CHECK(m.y >= 1);
                CHECK(m.y <= 15);
            }
        }
    }
    SECTION("the closed-form x extremes lie on each factor at height y=1") {
        for (Rat d : {Rat(1), Rat(3)}) {
            CompiledPoly hi = CompiledPoly::from(catalog("hi", {{"delta", d}}).poly);
            double dd = to_double(d);
            for (double sgn : {-1.0, 1.0}) {
                double x = 1.0 + (dd + sgn * std::sqrt(dd * (12.0 + dd))) / 6.0;
                CHECK(std::abs(hi.eval(x, 1.0)) < 1e-9);
            }
        }
    }
    CHECK_THROWS_AS(product_curve({Rat(1), Rat(1)}), DuplicateDelta);
    CHECK_THROWS_AS(product_curve({Rat(0)}), NonpositiveDelta);
    SECTION("spec wrapper windows the outermost oval") {
        CurveSpec spec = product_curve_spec({Rat(1), Rat(2)});
        CHECK(spec.poly == product_curve({Rat(1), Rat(2)}));
        CHECK(spec.expected_ovals == 2);
        OvalSet s = extract_ovals(spec, 256);
        CHECK(s.ovals.size() == 2);
    }
}

TEST_CASE("check_invariant_curve") {
    SECTION("the Escher ellipse has cofactor x - 2") {
        CofactorResult res = check_invariant_curve(catalog("ellipse").poly, escher_system());
        REQUIRE(res.is_invariant);
        CHECK(res.cofactor == parse_poly("x - 2"));
    }
    SECTION("non-invariant curve is rejected by exact division") {
        PlanarSystem lv{parse_poly("x - x y"), parse_poly("x y - y"), std::nullopt};
        CofactorResult res = check_invariant_curve(parse_poly("x - 1"), lv);
        CHECK_FALSE(res.is_invariant);
    }
    CHECK_THROWS_AS(check_invariant_curve(Poly2(), escher_system()), ZeroCurve);
}

TEST_CASE("eps-cancellation: cofactor of build_general is f0 h_x + g0 h_y") {
    int done = 0;
    while (done < 100) {
        Poly2 h = random_poly(4, 0.3);
        if (h.is_zero()) continue;
        Poly2 f0 = random_poly(3, 0.3), g0 = random_poly(3, 0.3);
        Rat eps = random_rat();
        PlanarSystem sys = build_general(h, f0, g0, eps);
        CofactorResult res = check_invariant_curve(h, sys);
        REQUIRE(res.is_invariant);
        CHECK(res.cofactor == f0 * h.partial(Var::X) + g0 * h.partial(Var::Y));
        ++done;
    }
}

TEST_CASE("classify_transversality") {
    SECTION("product family: delta 2 and 4 stable, 1 and 3 unstable") {
        CurveSpec spec = product_curve_spec({Rat(1), Rat(2), Rat(3), Rat(4)});
        spec.windows = {{0.0, 3.5, 0.0, 3.5}};
        OvalSet ovals = extract_ovals(spec, 512);
        REQUIRE(ovals.ovals.size() == 4);
        auto [f0, g0] = f0g0_preset("unit-square");
        StabilityVerdict v = classify_transversality(spec.poly, f0, g0, ovals);
        auto depth = nesting_depth(ovals);
        for (std::size_t k = 0; k < 4; ++k) {
            int delta = 4 - depth[k];
            OvalStability expect =
                delta % 2 == 0 ? OvalStability::Stable : OvalStability::Unstable;
            CHECK(v.per_oval[k] == expect);
        }
    }
    SECTION("three-oval curve with f0 = g0 = 1 is mixed on every oval") {
        CurveSpec spec = catalog("threeoval");
        OvalSet ovals = extract_ovals(spec, 1024);
        REQUIRE(ovals.ovals.size() == 3);
        auto [f0, g0] = f0g0_preset("ones");
        StabilityVerdict v = classify_transversality(spec.poly, f0, g0, ovals);
        for (auto tag : v.per_oval) CHECK(tag == OvalStability::Mixed);
    }
    SECTION("gradient construction is stable wherever x y |grad h|^2 stays positive") {
        Poly2 h = catalog("qshift", {{"mu", Rat(0)}}).poly;
        OvalSet ovals = extract_ovals(catalog("qshift", {{"mu", Rat(0)}}), 256);
        REQUIRE(ovals.ovals.size() == 2);
        Poly2 f0 = -(kXY * h.partial(Var::X)), g0 = -(kXY * h.partial(Var::Y));
        StabilityVerdict v = classify_transversality(h, f0, g0, ovals);
        CompiledPoly hx = CompiledPoly::from(h.partial(Var::X));
        CompiledPoly hy = CompiledPoly::from(h.partial(Var::Y));
        for (std::size_t k = 0; k < ovals.ovals.size(); ++k) {
            double mind = 1e300;
            for (const auto& p : ovals.ovals[k].pts) {
                double gx = hx.eval(p[0], p[1]), gy = hy.eval(p[0], p[1]);
                mind = std::min(mind, p[0] * p[1] * (gx * gx + gy * gy));
            }
            REQUIRE(mind > 0);
            CHECK(v.per_oval[k] == OvalStability::Stable);
        }
    }
    SECTION("empty oval set is rejected") {
        OvalSet empty;
        CHECK_THROWS_AS(classify_transversality(kCommfach, Poly2(Rat(1)), Poly2(Rat(1)), empty),
                        EmptyOvalSet);
    }
}

TEST_CASE("shift_and_multiply") {
    SECTION("Chavarriga cubic matches the hand expansion at c = 1/8") {
        PlanarSystem cubic = chavarriga_cubic();
        CHECK(cubic.f == parse_poly("2 y - 8 x y + 12 x y^2 - 1/2 x^2 y"));
        CHECK(cubic.g == parse_poly("-3/8 y + 16 y^2 - 8 y^3 - 3/2 x y - 1/4 x y^2"));
        CHECK(is_S_n(cubic, 3).in_s_n.value());
        CHECK(cubic.degree() == 3);
    }
    SECTION("zero shift and unit factor is the identity") {
        PlanarSystem sys{random_poly(3), random_poly(3), std::nullopt};
        CHECK(same_field(shift_and_multiply(sys, Rat(0), Rat(0), Poly2(Rat(1))), sys));
    }
    SECTION("multiplying by x y always lands in S_{n+2}") {
        for (int it = 0; it < 40; ++it) {
            PlanarSystem sys{random_poly(3), random_poly(3), std::nullopt};
            if (sys.f.is_zero() && sys.g.is_zero()) continue;
            PlanarSystem lifted = shift_and_multiply(sys, random_rat(), random_rat(), kXY);
            CHECK(is_S_n(lifted, sys.degree() + 2).in_s_n.value());
        }
    }
    SECTION("shift acts by substitution") {
        PlanarSystem sys{parse_poly("x^2"), parse_poly("y"), std::nullopt};
        PlanarSystem sh = shift_and_multiply(sys, Rat(1), Rat(2), Poly2(Rat(1)));
        CHECK(sh.f == parse_poly("x^2 - 2 x + 1"));
        CHECK(sh.g == parse_poly("y - 2"));
    }
}
