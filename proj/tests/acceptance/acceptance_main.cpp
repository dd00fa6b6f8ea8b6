// Acceptance suite: runs every headline reproduction at its stated
// tolerance and prints one pass/fail line per criterion. Exits with the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "ovalix/construct.hpp"
#include "ovalix/network.hpp"
#include "ovalix/presets.hpp"
#include "ovalix/realize.hpp"
#include "ovalix/sim.hpp"

using namespace ovalix;

namespace {

std::string g_cli, g_data, g_presets, g_out;

struct Shell {
    int exit_code = -1;
    std::string out;
};

Shell run_cli(const std::string& args) {
    Shell r;
    FILE* pipe = popen((g_cli + " " + args + " 2>/dev/null").c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::mt19937 rng(193939);

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

Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

PlanarSystem random_cond_o(int max_deg) {
    PlanarSystem sys{random_poly(max_deg), random_poly(max_deg), std::nullopt};
    for (int j = 0; j <= max_deg; ++j) {
        if (Rat a = sys.f.coeff(0, j); a < 0) sys.f.add_term({0, j}, -2 * a);
        if (Rat b = sys.g.coeff(j, 0); b < 0) sys.g.add_term({j, 0}, -2 * b);
    }
    return sys;
}

std::pair<PlanarSystem, int> random_cond_om(int max_deg) {
    PlanarSystem sys = random_cond_o(max_deg);
    int n = std::max(1, sys.degree());
    for (int i = 0; i <= n; ++i) {
        Rat a = sys.f.coeff(i, n - i), b = sys.g.coeff(i, n - i);
        Rat na = a, nb = b;
        if (i == 0) {
            na = rat_abs(a);
            nb = -na - rat_abs(b);
        } else if (i == n) {
            nb = rat_abs(b);
            na = -nb - rat_abs(a);
        } else if (a + b > 0) {
            nb = -rat_abs(a) - rat_abs(b);
        }
        sys.f.add_term({i, n - i}, na - a);
        sys.g.add_term({i, n - i}, nb - b);
    }
    return {sys, n};
}

bool weakly_reversible_oracle(const Network& net) {
    EGraph g = egraph(net);
    int n = static_cast<int>(g.nodes.size());
    std::set<int> covered;
    std::vector<int> path;
    std::vector<bool> on_path(n, false);
    std::function<void(int, int)> dfs = [&](int start, int v) {
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            auto [u, w] = g.edges[e];
            if (u != v) continue;
            if (w == start) {
                for (int pe : path) covered.insert(pe);
                covered.insert(static_cast<int>(e));
            } else if (!on_path[w]) {
                on_path[w] = true;
                path.push_back(static_cast<int>(e));
                dfs(start, w);
                path.pop_back();
                on_path[w] = false;
            }
        }
    };
    for (int s = 0; s < n; ++s) {
        on_path[s] = true;
        dfs(s, s);
        on_path[s] = false;
    }
    return covered.size() == g.edges.size();
}

// 5 x 4 lattice in [0.5,4.5]^2; the lower corner is chosen so that one
// start lands in the inner basin (so the mu=0 run reaches both ovals) while
// every start keeps a healthy initial |h|, which sizes the slack of the
// monotone residual check.
std::vector<std::array<double, 2>> grid_starts(int nx, int ny, double lo, double hi) {
    std::vector<std::array<double, 2>> out;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            out.push_back({lo + i * (hi - lo) / (nx - 1), lo + j * (hi - lo) / (ny - 1)});
    return out;
}

std::vector<std::array<double, 2>> fig5_starts() {
    std::vector<std::array<double, 2>> pts;
    double lo = 0.05, hi = 3.95, side = hi - lo;
    for (int k = 0; k < 15; ++k) {
        double t = 4.0 * side * k / 15;
        if (t < side) pts.push_back({lo + t, lo});
        else if (t < 2 * side) pts.push_back({hi, lo + (t - side)});
        else if (t < 3 * side) pts.push_back({hi - (t - 2 * side), hi});
        else pts.push_back({lo, hi - (t - 3 * side)});
    }
    pts.push_back({1.0, 1.2});
    pts.push_back({1.5, 2.0});
    pts.push_back({2.5, 2.5});
    return pts;
}

// ---------------------------------------------------------------------------

struct Criterion {
    int id;
    std::string name;
    double budget_ms;  // 0 = no stated budget
    std::function<bool(std::string&)> body;
};

bool expect(bool cond, std::string& why, const std::string& msg) {
    if (!cond && why.empty()) why = msg;
    return cond;
}

// 1. Escher cofactor, exact
bool c1(std::string& why) {
    CofactorResult res = check_invariant_curve(catalog("ellipse").poly, escher_system());
    return expect(res.is_invariant && res.cofactor == parse_poly("x - 2"), why,
                  "cofactor is not exactly x - 2");
}

// 2. gradient-construction cofactor and degree, exact
bool c2(std::string& why) {
    std::vector<Poly2> curves = {catalog("qshift", {{"mu", Rat(0)}}).poly,
                                 catalog("qshift", {{"mu", Rat(39)}}).poly,
                                 product_curve({Rat(1), Rat(2)})};
    Poly2 xy = Poly2::monomial(1, 1);
    for (const Poly2& h : curves) {
        for (Rat eps : {Rat(1) / 10, Rat(1)}) {
            PlanarSystem sys = build_gradient(h, eps);
            if (!expect(sys.degree() == 2 * h.degree() + 1, why, "degree != 2 deg(h) + 1"))
                return false;
            CofactorResult res = check_invariant_curve(h, sys);
            Poly2 hx = h.partial(Var::X), hy = h.partial(Var::Y);
            if (!expect(res.is_invariant && res.cofactor == -(xy * (hx * hx + hy * hy)), why,
                        "cofactor is not -x y |grad h|^2"))
                return false;
        }
    }
    return true;
}

// 3. eps-cancellation on 100 random constructions, exact
bool c3(std::string& why) {
    int done = 0;
    while (done < 100) {
        Poly2 h = random_poly(4, 0.3);
        if (h.is_zero()) continue;
        Poly2 f0 = random_poly(3, 0.3), g0 = random_poly(3, 0.3);
        PlanarSystem sys = build_general(h, f0, g0, random_rat());
        CofactorResult res = check_invariant_curve(h, sys);
        Poly2 want = f0 * h.partial(Var::X) + g0 * h.partial(Var::Y);
        if (!expect(res.is_invariant && res.cofactor == want, why,
                    "cofactor != f0 h_x + g0 h_y at case " + std::to_string(done)))
            return false;
        ++done;
    }
    return true;
}

// 4. Lotka-Volterra end to end through the CLI
bool c4(std::string& why) {
    Shell derive = run_cli("derive " + g_data + "/networks/lotka_volterra.crn");
    if (!expect(derive.exit_code == 0, why, "derive exited nonzero")) return false;
    Poly2 f, g;
    std::istringstream in(derive.out);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("f = ", 0) == 0) f = parse_poly(line.substr(4));
        if (line.rfind("g = ", 0) == 0) g = parse_poly(line.substr(4));
    }
    if (!expect(f == parse_poly("x - x y") && g == parse_poly("x y - y"), why,
                "derived field is not (x - xy, xy - y)"))
        return false;
    PlanarSystem sys{f, g, std::nullopt};
    if (!expect(is_M_n(sys, 2).in_m_n.value(), why, "M_2 membership fails")) return false;
    Network lv = parse_network(
        "X -> 2X @ 1\n"
        "X + Y -> 2Y @ 1\n"
        "Y -> 0 @ 1\n");
    if (!expect(!is_weakly_reversible(lv), why, "LV must not be weakly reversible")) return false;
    Shell check_m = run_cli("check --network " + g_data +
                            "/networks/lotka_volterra.crn --class m --n 2");
    Shell check_wr =
        run_cli("check --network " + g_data + "/networks/lotka_volterra.crn --weakly-reversible");
    if (!expect(check_m.exit_code == 0 && check_wr.exit_code == 1, why,
                "CLI exit codes: class " + std::to_string(check_m.exit_code) +
                    ", weak reversibility " + std::to_string(check_wr.exit_code)))
        return false;
    Shell empty = run_cli("derive /dev/null");
    return expect(empty.exit_code == 2, why,
                  "empty network file should exit 2, got " + std::to_string(empty.exit_code));
}

// 5. realization round-trips, exact, with molecularity bound
bool c5(std::string& why) {
    for (int it = 0; it < 200; ++it) {
        PlanarSystem sys = random_cond_o(5);
        if (sys.f.is_zero() && sys.g.is_zero()) continue;
        if (!expect(same_field(derive_mass_action(realize_S_n(sys)), sys), why,
                    "S_n round-trip broke at case " + std::to_string(it)))
            return false;
    }
    for (int it = 0; it < 200; ++it) {
        auto [sys, n] = random_cond_om(5);
        if (sys.f.is_zero() && sys.g.is_zero()) continue;
        Network net = realize_M_n(sys, n);
        if (!expect(same_field(derive_mass_action(net), sys), why,
                    "M_n round-trip broke at case " + std::to_string(it)))
            return false;
        if (!expect(molecularity(net) <= n, why,
                    "molecularity bound broke at case " + std::to_string(it)))
            return false;
    }
    return true;
}

// 6. weak reversibility of the named networks + oracle agreement
bool c6(std::string& why) {
    auto file = [&](const std::string& name) {
        std::ifstream in(g_data + "/networks/" + name);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_network(ss.str());
    };
    Network chain = file("linear_chain.crn");
    Network both = file("chain_with_copies.crn");
    Network lv = file("lotka_volterra.crn");
    Network square = file("unit_square.crn");
    if (!expect(is_weakly_reversible(chain), why, "linear chain must be weakly reversible"))
        return false;
    if (!expect(is_weakly_reversible(both), why, "chain + copies must be weakly reversible"))
        return false;
    if (!expect(!is_weakly_reversible(lv), why, "LV must not be weakly reversible")) return false;
    std::vector<Network> corpus{chain, both, lv, square, reversibilize(lv, Rat(1) / 100)};
    std::uniform_int_distribution<int> coeff(0, 3), m(1, 8), rate(1, 9);
    for (int it = 0; it < 120; ++it) {
        Network net;
        std::set<std::tuple<int, int, int, int>> seen;
        int count = m(rng);
        for (int k = 0; k < count; ++k) {
            Reaction r{coeff(rng), coeff(rng), coeff(rng), coeff(rng), Rat(rate(rng))};
            if (r.alpha == r.gamma && r.beta == r.delta) continue;
            if (!seen.insert(r.complexes()).second) continue;
            net.reactions.push_back(r);
        }
        if (!net.reactions.empty()) corpus.push_back(net);
    }
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        if (corpus[k].reactions.size() > 8) continue;
        if (!expect(is_weakly_reversible(corpus[k]) == weakly_reversible_oracle(corpus[k]), why,
                    "SCC method disagrees with cycle-cover oracle on network " +
                        std::to_string(k)))
            return false;
    }
    return true;
}

// 7. quartic family oval census
bool c7(std::string& why) {
    const std::pair<int, int> cases[] = {{-100, 1}, {-32, 1}, {-28, 2}, {0, 2},
                                         {20, 2},   {32, 2},  {39, 4},  {100, 4}};
    for (auto [mu, count] : cases) {
        CurveSpec spec = catalog("q", {{"mu", Rat(mu)}});
        OvalSet s512 = extract_ovals(spec, 512);
        if (!expect(static_cast<int>(s512.ovals.size()) == count, why,
                    "mu=" + std::to_string(mu) + ": got " + std::to_string(s512.ovals.size()) +
                        " ovals at 512, want " + std::to_string(count)))
            return false;
        OvalSet s1024 = extract_ovals(spec, 1024);
        if (!expect(s1024.ovals.size() == s512.ovals.size(), why,
                    "mu=" + std::to_string(mu) + ": count changed at 1024"))
            return false;
    }
    CurveSpec circles = catalog("q", {{"mu", Rat(32)}});
    OvalSet s = extract_ovals(circles, 512);
    for (const auto& oval : s.ovals)
        for (const auto& p : oval.pts) {
            double r = std::hypot(p[0], p[1]);
            double dev = std::min(std::abs(r - 0.75), std::abs(r - 1.0));
            if (!expect(dev <= 2 * s.cell_size, why, "mu=32 vertex radius off by " +
                                                         std::to_string(dev)))
                return false;
        }
    for (Rat mu : {Rat(-100), Rat(0), Rat(39)}) {
        CurveSpec spec = catalog("q", {{"mu", mu}});
        auto pts = axis_intersections(spec);
        if (!expect(pts.size() == 8, why, "need 8 axis intersections")) return false;
        for (const auto& [x, y] : pts)
            if (!expect(spec.poly.eval(x, y) == 0, why, "axis intersection not exact"))
                return false;
    }
    return true;
}

// 8. figure 8 reproduction: all trajectories converge, all ovals hit
bool c8(std::string& why) {
    SimConfig cfg;
    cfg.converge_tol = 1e-6;
    for (auto [mu, expect_ovals] : {std::pair<int, int>{39, 4}, std::pair<int, int>{0, 2}}) {
        CurveSpec spec = catalog("qshift", {{"mu", Rat(mu)}});
        PlanarSystem sys = build_gradient(spec.poly, Rat(1));
        CurveTarget target{spec.poly, extract_ovals(spec, 512)};
        auto trajs = sweep(sys, grid_starts(5, 4, 0.75, 4.5), cfg, &target);
        std::set<int> hit;
        for (std::size_t k = 0; k < trajs.size(); ++k) {
            const auto& t = trajs[k];
            if (!expect(t.status == TerminalStatus::ConvergedToCurve, why,
                        "mu=" + std::to_string(mu) + " trajectory " + std::to_string(k) +
                            " status " + to_cstr(t.status)))
                return false;
            if (!expect(t.samples.back().t <= 200.0 && t.h_residuals.back() < 1e-6, why,
                        "trajectory " + std::to_string(k) + " missed |h| < 1e-6 by t = 200"))
                return false;
            if (!expect(monotone_residual_check(t), why,
                        "mu=" + std::to_string(mu) + " trajectory " + std::to_string(k) +
                            " residuals not monotone"))
                return false;
            for (const auto& s : t.samples)
                if (!expect(std::min(s.x, s.y) > -cfg.abs_tol, why,
                            "trajectory " + std::to_string(k) + " left the closed quadrant"))
                    return false;
            hit.insert(t.oval_index);
        }
        if (!expect(static_cast<int>(hit.size()) == expect_ovals, why,
                    "mu=" + std::to_string(mu) + ": " + std::to_string(hit.size()) +
                        " ovals hit, want " + std::to_string(expect_ovals)))
            return false;
    }
    return true;
}

// 9. figure 6 reproduction: stability split and corner convergence
bool c9(std::string& why) {
    CurveSpec spec = product_curve_spec({Rat(1), Rat(2), Rat(3), Rat(4)});
    spec.windows = {{0.0, 3.5, 0.0, 3.5}};
    OvalSet ovals = extract_ovals(spec, 512);
    if (!expect(ovals.ovals.size() == 4, why, "expected 4 product ovals")) return false;
    auto [f0, g0] = f0g0_preset("unit-square");
    StabilityVerdict v = classify_transversality(spec.poly, f0, g0, ovals, 1e-9);
    auto depth = nesting_depth(ovals);
    int delta4_index = -1;
    for (std::size_t k = 0; k < 4; ++k) {
        int delta = 4 - depth[k];
        if (delta == 4) delta4_index = static_cast<int>(k);
        OvalStability want = delta % 2 == 0 ? OvalStability::Stable : OvalStability::Unstable;
        if (!expect(v.per_oval[k] == want, why,
                    "delta=" + std::to_string(delta) + " classified " + to_cstr(v.per_oval[k])))
            return false;
    }
    PlanarSystem sys = build_general(spec.poly, f0, g0, Rat(1) / 10);
    CurveTarget target{spec.poly, ovals};
    SimConfig cfg;
    std::vector<std::array<double, 2>> corners{{0.0, 0.0}, {0.0, 3.5}, {3.5, 0.0}, {3.5, 3.5}};
    auto trajs = sweep(sys, corners, cfg, &target);
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        if (!expect(trajs[k].status == TerminalStatus::ConvergedToCurve, why,
                    "corner " + std::to_string(k) + " status " + to_cstr(trajs[k].status)))
            return false;
        if (!expect(trajs[k].oval_index == delta4_index, why,
                    "corner " + std::to_string(k) + " converged to oval " +
                        std::to_string(trajs[k].oval_index) + " not delta=4"))
            return false;
    }
    return true;
}

// 10. figure 5 pair: equilibria on the curve at eps=0, limit cycle at eps=1
bool c10(std::string& why) {
    auto [f0, g0] = f0g0_preset("linear");
    Poly2 h = catalog("commfach").poly;
    CurveTarget target{h, extract_ovals(catalog("commfach"), 512)};
    auto starts = fig5_starts();

    PlanarSystem rest = build_general(h, f0, g0, Rat(0));
    SimConfig cfg;
    cfg.converge_tol = 1e-9;
    auto trajs = sweep(rest, starts, cfg, &target);
    CompiledPoly cf = CompiledPoly::from(rest.f), cg = CompiledPoly::from(rest.g);
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        const auto& last = trajs[k].samples.back();
        double field = std::hypot(cf.eval(last.x, last.y), cg.eval(last.x, last.y));
        if (!expect(field < 1e-8, why, "eps=0 trajectory " + std::to_string(k) +
                                           " field norm " + std::to_string(field)))
            return false;
        if (!expect(trajs[k].h_residuals.back() < 1e-6, why,
                    "eps=0 trajectory " + std::to_string(k) + " |h| too large"))
            return false;
    }

    PlanarSystem cycle = build_general(h, f0, g0, Rat(1));
    SimConfig cfg1;
    auto trajs1 = sweep(cycle, starts, cfg1, &target);
    for (std::size_t k = 0; k < trajs1.size(); ++k)
        if (!expect(trajs1[k].status == TerminalStatus::ConvergedToCurve, why,
                    "eps=1 trajectory " + std::to_string(k) + " status " +
                        to_cstr(trajs1[k].status)))
            return false;
    return true;
}

// 11. Christopher construction: class, cofactor, mixed transversality
bool c11(std::string& why) {
    CurveSpec spec = catalog("threeoval");
    PlanarSystem sys = build_christopher(spec.poly, parse_poly("y - 7 x"));
    if (!expect(is_S_n(sys, 4).in_s_n.value(), why, "system not in S_4")) return false;
    CofactorResult res = check_invariant_curve(spec.poly, sys);
    Poly2 want = spec.poly.partial(Var::X) + spec.poly.partial(Var::Y);
    if (!expect(res.is_invariant && res.cofactor == want, why, "cofactor is not h_x + h_y"))
        return false;
    OvalSet ovals = extract_ovals(spec, 1024);
    if (!expect(ovals.ovals.size() == 3, why,
                "expected 3 ovals, got " + std::to_string(ovals.ovals.size())))
        return false;
    auto [f0, g0] = f0g0_preset("ones");
    StabilityVerdict v = classify_transversality(spec.poly, f0, g0, ovals, 1e-9);
    for (std::size_t k = 0; k < v.per_oval.size(); ++k)
        if (!expect(v.per_oval[k] == OvalStability::Mixed, why,
                    "oval " + std::to_string(k) + " classified " + to_cstr(v.per_oval[k])))
            return false;
    return true;
}

// 12. h_i oval geometry against the closed form
bool c12(std::string& why) {
    for (int d = 1; d <= 4; ++d) {
        CurveSpec spec = catalog("hi", {{"delta", Rat(d)}});
        OvalSet s = extract_ovals(spec, 512);
        if (!expect(s.ovals.size() == 1, why, "delta=" + std::to_string(d) + ": need one oval"))
            return false;
        double xmin = 1e300, xmax = -1e300;
        for (const auto& p : s.ovals[0].pts) {
            xmin = std::min(xmin, p[0]);
            xmax = std::max(xmax, p[0]);
        }
        auto [lo, hi] = hi_x_range(Rat(d));
        if (!expect(std::abs(xmin - lo) <= 2 * s.cell_size &&
                        std::abs(xmax - hi) <= 2 * s.cell_size,
                    why, "delta=" + std::to_string(d) + ": extent off by " +
                             std::to_string(std::max(std::abs(xmin - lo), std::abs(xmax - hi)))))
            return false;
    }
    auto [lo1, hi1] = hi_x_range(Rat(1));
    return expect(std::abs(lo1 - (7.0 - std::sqrt(13.0)) / 6.0) < 1e-12 &&
                      std::abs(hi1 - (7.0 + std::sqrt(13.0)) / 6.0) < 1e-12,
                  why, "delta=1 endpoints differ from (7 +- sqrt 13)/6");
}

}  // namespace

int main(int argc, char** argv) {
    for (int k = 1; k + 1 < argc; k += 2) {
        std::string flag = argv[k];
        if (flag == "--cli") g_cli = argv[k + 1];
        else if (flag == "--data") g_data = argv[k + 1];
        else if (flag == "--presets") g_presets = argv[k + 1];
        else if (flag == "--out") g_out = argv[k + 1];
    }
    if (g_cli.empty() || g_data.empty()) {
        std::cerr << "usage: acceptance --cli PATH --data DIR [--presets DIR] [--out DIR]\n";
        return 64;
    }

    std::vector<Criterion> criteria{
        {1, "Escher ellipse cofactor x - 2, exact", 1, c1},
        {2, "gradient-construction cofactor and degree, exact", 1000, c2},
        {3, "eps-cancellation on 100 random constructions", 5000, c3},
        {4, "Lotka-Volterra derivation through the CLI", 0, c4},
        {5, "realization round-trips (200 + 200 random systems)", 10000, c5},
        {6, "weak reversibility vs cycle-cover oracle", 0, c6},
        {7, "quartic family oval census and axis points", 20000, c7},
        {8, "four and two stable cycles from grid starts", 30000, c8},
        {9, "product family stability split and corner runs", 30000, c9},
        {10, "equilibria on the curve vs limit cycle", 20000, c10},
        {11, "three hyperbolic cycles of the quartic system", 2000, c11},
        {12, "h_i oval extents against the closed form", 0, c12},
    };

    int failed = 0;
    for (auto& c : criteria) {
        std::string why;
        auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.body(why);
        } catch (const std::exception& e) {
            why = std::string("exception: ") + e.what();
        }
        double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start)
                        .count();
        if (ok && c.budget_ms > 0 && ms > c.budget_ms) {
            ok = false;
            why = "time budget exceeded: " + std::to_string(ms) + " ms > " +
                  std::to_string(c.budget_ms) + " ms";
        }
        std::printf("criterion %2d %s (%8.1f ms)  %s%s%s\n", c.id, ok ? "PASS" : "FAIL", ms,
                    c.name.c_str(), why.empty() ? "" : " -- ", why.c_str());
        if (!ok) ++failed;
    }
    return failed;
}
