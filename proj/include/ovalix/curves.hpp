#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ovalix/poly.hpp"

namespace ovalix {

struct Window {
    double x0, x1, y0, y1;
};

/// A catalog curve: polynomial, parameter values and the axis-aligned
/// window(s) its bounded components live in. Curves whose ovals sit in
/// well-separated regions carry one window per region.
struct CurveSpec {
    std::string name;
    Poly2 poly;
    std::map<std::string, Rat> params;
    std::vector<Window> windows;
    std::optional<int> expected_ovals;
    // set when the catalog knows the curve is singular (crunodes): the
    // extractor then reports whatever the grid resolves, tagged degenerate
    bool known_degenerate = false;
};

class UnknownCurve : public std::runtime_error {
public:
    explicit UnknownCurve(const std::string& name)
        : std::runtime_error("unknown curve: " + name) {}
};

class BadParams : public std::runtime_error {
public:
    explicit BadParams(const std::string& what) : std::runtime_error("bad params: " + what) {}
};

// ---------------------------------------------------------------------------
// Catalog polynomials
// ---------------------------------------------------------------------------

namespace detail {

inline Poly2 ellipse_poly() {
    return parse_poly("10 x^2 - 12 x y + 4 y^2 + 20 x - 16 y + 19");
}

inline Poly2 threeoval_poly() {
    return parse_poly(
        "x^2 y^2 - 9/1000 x^3 y - 9/1000 x y^3 + 6/10000 x^3 + 6/10000 y^3"
        " + 2/50 x^2 y + 2/50 x y^2 - 2 x y + 934/1000");
}

inline Poly2 commfach_poly() { return parse_poly("x^2 + x y^2 + y - 4 x y"); }

inline Poly2 hi_poly(const Rat& delta) {
    Poly2 p = parse_poly("x^2 y^2 + x^2 y + x y^2 + x^2 + y^2 + x + y + 1");
    p.add_term({1, 1}, -(Rat(8) + delta));
    return p;
}

inline Poly2 q_poly(const Rat& mu) {
    Poly2 p = parse_poly("16 x^4 + 16 y^4 - 25 x^2 - 25 y^2 + 9");
    p.add_term({2, 2}, mu);
    return p;
}

/// x-extent of the oval of h_i: 1 + (delta +- sqrt(delta (12 + delta))) / 6.
inline std::pair<double, double> hi_extent(double d) {
    double r = std::sqrt(d * (12.0 + d));
    return {1.0 + (d - r) / 6.0, 1.0 + (d + r) / 6.0};
}

/// Diagonal extent of the outer oval of q for -32 < mu < 337/9; the outer
/// oval blows up as mu -> -32+, so the q window must widen with it.
inline double q_outer_diagonal(double mu) {
    return std::sqrt((25.0 + std::sqrt(337.0 - 9.0 * mu)) / (32.0 + mu));
}

inline Window q_window(const Rat& mu) {
    double m = to_double(mu);
    double w = 1.5;
    if (m > -32.0 && m <= -9.0) w = 1.15 * q_outer_diagonal(m);
    return {-w, w, -w, w};
}

inline Window hi_window(double dmax) {
    auto [lo, hi] = hi_extent(dmax);
    double a = std::min(0.3, std::max(0.02, lo - 0.1));
    double b = std::max(4.0, hi + 0.2);
    return {a, b, a, b};
}

inline Rat require_param(const std::map<std::string, Rat>& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw BadParams("missing parameter " + key);
    return it->second;
}

}  // namespace detail

inline CurveSpec catalog(std::string_view name, const std::map<std::string, Rat>& params = {}) {
    CurveSpec spec;
    spec.name = std::string(name);
    spec.params = params;
    auto no_params = [&] {
        if (!params.empty()) throw BadParams(spec.name + " takes no parameters");
    };
    if (name == "ellipse") {
        no_params();
        spec.poly = detail::ellipse_poly();
        spec.windows = {{0.5, 3.5, 3.0, 7.0}};
        spec.expected_ovals = 1;
    } else if (name == "threeoval") {
        no_params();
        spec.poly = detail::threeoval_poly();
        // one window per oval: the diagonal oval plus the two thin mirror
        // ovals hugging x y ~ 1; a single uniform grid cannot resolve all
        // three at a workable resolution
        spec.windows = {{0.35, 2.40, 0.35, 2.40},
                        {3.20, 12.70, 0.08, 0.32},
                        {0.08, 0.32, 3.20, 12.70}};
        spec.expected_ovals = 3;
    } else if (name == "commfach") {
        no_params();
        spec.poly = detail::commfach_poly();
        spec.windows = {{0.0, 4.0, 0.0, 4.0}};
        spec.expected_ovals = 1;
    } else if (name == "h9") {
        no_params();
        spec.poly = detail::hi_poly(Rat(1));
        spec.windows = {detail::hi_window(1.0)};
        spec.expected_ovals = 1;
    } else if (name == "hi") {
        Rat delta = detail::require_param(params, "delta");
        if (params.size() != 1) throw BadParams("hi takes only delta");
        if (delta <= 0) throw BadParams("delta must be positive");
        spec.poly = detail::hi_poly(delta);
        spec.windows = {detail::hi_window(to_double(delta))};
        spec.expected_ovals = 1;
    } else if (name == "q" || name == "qshift") {
        Rat mu = detail::require_param(params, "mu");
        if (params.size() != 1) throw BadParams(spec.name + " takes only mu");
        spec.poly = detail::q_poly(mu);
        Window w = detail::q_window(mu);
        if (name == "qshift") {
            spec.poly = spec.poly.shift(Rat(2), Rat(2));
            w = {w.x0 + 2, w.x1 + 2, w.y0 + 2, w.y1 + 2};
        }
        spec.windows = {w};
        if (mu <= -32)
            spec.expected_ovals = 1;
        else if (mu < Rat(337) / 9)
            spec.expected_ovals = 2;
        else if (mu > Rat(337) / 9)
            spec.expected_ovals = 4;
        else
            spec.known_degenerate = true;  // four crunodes on the diagonals
    } else {
        throw UnknownCurve(spec.name);
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Closed-form facts for the q and h_i families
// ---------------------------------------------------------------------------

/// The eight axis intersections of q(x,y) = 0, independent of mu; for the
/// shifted curve the same points offset by (2,2).
inline std::vector<std::pair<Rat, Rat>> axis_intersections(const CurveSpec& spec) {
    if (spec.name != "q" && spec.name != "qshift")
        throw std::invalid_argument("axis_intersections: only defined for the q family");
    Rat s = spec.name == "qshift" ? Rat(2) : Rat(0);
    std::vector<std::pair<Rat, Rat>> pts;
    for (Rat v : {Rat(-1), Rat(-3) / 4, Rat(3) / 4, Rat(1)}) {
        pts.push_back({v + s, s});
        pts.push_back({s, v + s});
    }
    return pts;
}

/// Real roots of q(x,x) = (32+mu) x^4 - 50 x^2 + 9, sorted ascending.
inline std::vector<double> diagonal_roots(const Rat& mu) {
    std::vector<double> roots;
    double m = to_double(mu);
    if (mu == -32) {
        double r = 3.0 / (5.0 * std::sqrt(2.0));
        return {-r, r};
    }
    if (mu == Rat(337) / 9) {
        return {-0.6, 0.6};
    }
    if (mu > Rat(337) / 9) return {};
    double disc = std::sqrt(337.0 - 9.0 * m);
    for (double sgn : {+1.0, -1.0}) {
        double t = (25.0 + sgn * disc) / (32.0 + m);
        if (t > 0) {
            double r = std::sqrt(t);
            roots.push_back(-r);
            roots.push_back(r);
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// x-extent of the single oval of h_i for delta > 0.
inline std::pair<double, double> hi_x_range(const Rat& delta) {
    if (delta <= 0) throw std::invalid_argument("hi_x_range: delta must be positive");
    return detail::hi_extent(to_double(delta));
}

/// Harnack's bound on the number of connected components of a real
/// algebraic curve of the given degree: 1 + (n-1)(n-2)/2. A quartic can
/// carry at most 4 ovals; curves attaining the bound are M-curves.
constexpr int harnack_component_bound(int curve_degree) {
    return 1 + (curve_degree - 1) * (curve_degree - 2) / 2;
}

// ---------------------------------------------------------------------------
// Oval extraction: marching squares on a sign grid
// ---------------------------------------------------------------------------

struct Polyline {
    std::vector<std::array<double, 2>> pts;
    bool closed = false;
};

struct OvalSet {
    std::vector<Polyline> ovals;             // closed components, first == last point
    std::vector<Polyline> open_components;   // components hitting a window boundary
    bool degenerate = false;
    double cell_size = 0.0;                  // max cell edge length actually used
};

class ResolutionTooCoarse : public std::runtime_error {
public:
    explicit ResolutionTooCoarse(const std::string& what)
        : std::runtime_error("resolution too coarse: " + what) {}
};

struct ExtractOptions {
    // Crunodal curves keep ambiguous saddle cells at every resolution; with
    // this flag the extraction resolves them by the cell-center sign and
    // tags the result degenerate instead of erroring.
    bool allow_degenerate = false;
};

namespace detail {

struct MarchResult {
    std::vector<Polyline> closed;
    std::vector<Polyline> open;
    long ambiguous_cells = 0;
};

// Crossing graph on grid edges: each crossed cell edge is a node of the
// contour graph with at most two neighbors.
struct Crossing {
    double x, y;
    std::int64_t nb[2] = {-1, -1};
    int deg = 0;
};

inline MarchResult march_window(const CompiledPoly& cp, const Window& w, int res) {
    MarchResult out;
    const double dx = (w.x1 - w.x0) / res;
    const double dy = (w.y1 - w.y0) / res;
    const std::int64_t stride = 2 * (static_cast<std::int64_t>(res) + 2);
    auto hkey = [&](int i, int j) { return stride * j + 2 * i; };      // H(i,j): (i,j)-(i+1,j)
    auto vkey = [&](int i, int j) { return stride * j + 2 * i + 1; };  // V(i,j): (i,j)-(i,j+1)

    std::unordered_map<std::int64_t, Crossing> nodes;
    nodes.reserve(1024);
    auto crossing = [&](std::int64_t key, double va, double vb, double ax, double ay, double bx,
                        double by) {
        auto it = nodes.find(key);
        if (it != nodes.end()) return it;
        double t = va / (va - vb);
        return nodes.emplace(key, Crossing{ax + t * (bx - ax), ay + t * (by - ay)}).first;
    };
    auto link = [&](std::int64_t a, std::int64_t b) {
        auto& ca = nodes.at(a);
        auto& cb = nodes.at(b);
        ca.nb[ca.deg++] = b;
        cb.nb[cb.deg++] = a;
    };

    std::vector<double> xc;
    std::vector<double> lo(res + 1), hi(res + 1);
    auto fill_row = [&](int j, std::vector<double>& row) {
        double y = w.y0 + j * dy;
        cp.x_coeffs_at_y(y, xc);
        for (int i = 0; i <= res; ++i) row[i] = CompiledPoly::eval_x(xc, w.x0 + i * dx);
    };
    fill_row(0, lo);
    for (int j = 0; j < res; ++j) {
        fill_row(j + 1, hi);
        const double yb = w.y0 + j * dy, yt = yb + dy;
        for (int i = 0; i < res; ++i) {
            const double v00 = lo[i], v10 = lo[i + 1], v01 = hi[i], v11 = hi[i + 1];
            const bool b00 = v00 < 0, b10 = v10 < 0, b01 = v01 < 0, b11 = v11 < 0;
            int inside = b00 + b10 + b01 + b11;
            if (inside == 0 || inside == 4) continue;
            const double xl = w.x0 + i * dx, xr = xl + dx;
            std::int64_t bot = -1, top = -1, lef = -1, rig = -1;
            if (b00 != b10) bot = crossing(hkey(i, j), v00, v10, xl, yb, xr, yb)->first;
            if (b01 != b11) top = crossing(hkey(i, j + 1), v01, v11, xl, yt, xr, yt)->first;
            if (b00 != b01) lef = crossing(vkey(i, j), v00, v01, xl, yb, xl, yt)->first;
            if (b10 != b11) rig = crossing(vkey(i + 1, j), v10, v11, xr, yb, xr, yt)->first;
            int crossed = (bot >= 0) + (top >= 0) + (lef >= 0) + (rig >= 0);
            if (crossed == 2) {
                std::int64_t e[2];
                int k = 0;
                for (std::int64_t c : {bot, rig, top, lef})
                    if (c >= 0) e[k++] = c;
                link(e[0], e[1]);
            } else if (crossed == 4) {
                // ambiguous saddle cell: pair by the sign at the cell center
                ++out.ambiguous_cells;
                double vc = cp.eval(xl + 0.5 * dx, yb + 0.5 * dy);
                bool center_in = vc < 0;
                // inside corners are diagonal: either {00,11} or {10,01}
                bool diag00 = b00;  // b00 == b11, b10 == b01 = !b00 here
                if (center_in == diag00) {
                    link(bot, rig);
                    link(top, lef);
                } else {
                    link(bot, lef);
                    link(top, rig);
                }
            }
        }
        std::swap(lo, hi);
    }

    // deterministic tracing: sorted keys, open chains first, then loops
    std::vector<std::int64_t> keys;
    keys.reserve(nodes.size());
    for (const auto& [k, c] : nodes) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    std::unordered_map<std::int64_t, bool> used;
    used.reserve(nodes.size());
    auto walk = [&](std::int64_t start, bool closed_loop) {
        Polyline pl;
        pl.closed = closed_loop;
        std::int64_t prev = -1, cur = start;
        while (true) {
            used[cur] = true;
            const auto& c = nodes.at(cur);
            std::array<double, 2> p{c.x, c.y};
            if (pl.pts.empty() || pl.pts.back() != p) pl.pts.push_back(p);
            std::int64_t next = -1;
            for (int k = 0; k < c.deg; ++k)
                if (c.nb[k] != prev) next = c.nb[k];
            if (next < 0 && closed_loop && c.deg == 2) next = prev;  // two-crossing loop
            if (next < 0) break;
            if (next == start) {
                pl.pts.push_back({nodes.at(start).x, nodes.at(start).y});
                break;
            }
            prev = cur;
            cur = next;
        }
        return pl;
    };
    for (std::int64_t k : keys)
        if (!used[k] && nodes.at(k).deg == 1) out.open.push_back(walk(k, false));
    for (std::int64_t k : keys)
        if (!used[k]) out.closed.push_back(walk(k, true));
    return out;
}

}  // namespace detail

/// Marching squares over each window of the curve at resolution^2 cells.
/// Closed components are returned as ovals; components hitting a window
/// boundary are kept separately. When an ambiguous saddle cell appears the
/// window is re-run once at doubled resolution; a persistent saddle is a
/// crunodal (or under-resolved) curve and raises ResolutionTooCoarse unless
/// options.allow_degenerate is set.
inline OvalSet extract_ovals(const CurveSpec& spec, int resolution,
                             const ExtractOptions& options = {}) {
    if (resolution < 32) throw std::invalid_argument("extract_ovals: resolution must be >= 32");
    OvalSet out;
    out.degenerate = spec.known_degenerate;
    CompiledPoly cp = CompiledPoly::from(spec.poly);
    for (const auto& w : spec.windows) {
        if (!(w.x1 > w.x0) || !(w.y1 > w.y0))
            throw std::invalid_argument("extract_ovals: empty window");
        int res = resolution;
        detail::MarchResult mr = detail::march_window(cp, w, res);
        if (mr.ambiguous_cells > 0) {
            res = 2 * resolution;
            mr = detail::march_window(cp, w, res);
            if (mr.ambiguous_cells > 0) {
                if (!options.allow_degenerate && !spec.known_degenerate)
                    throw ResolutionTooCoarse(std::to_string(mr.ambiguous_cells) +
                                              " ambiguous cells after refinement");
                out.degenerate = true;
            }
        }
        for (auto& pl : mr.closed) out.ovals.push_back(std::move(pl));
        for (auto& pl : mr.open) out.open_components.push_back(std::move(pl));
        out.cell_size = std::max(out.cell_size, std::max((w.x1 - w.x0) / res, (w.y1 - w.y0) / res));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Polyline geometry
// ---------------------------------------------------------------------------

inline double polyline_area(const Polyline& pl) {
    double a = 0.0;
    const auto& p = pl.pts;
    for (std::size_t k = 0; k + 1 < p.size(); ++k)
        a += p[k][0] * p[k + 1][1] - p[k + 1][0] * p[k][1];
    return std::abs(a) / 2.0;
}

/// Even-odd crossing rule.
inline bool point_in_polyline(double x, double y, const Polyline& pl) {
    bool in = false;
    const auto& p = pl.pts;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        double x1 = p[k][0], y1 = p[k][1], x2 = p[k + 1][0], y2 = p[k + 1][1];
        if ((y1 > y) != (y2 > y)) {
            double xc = x1 + (y - y1) / (y2 - y1) * (x2 - x1);
            if (x < xc) in = !in;
        }
    }
    return in;
}

inline double distance_to_polyline(double x, double y, const Polyline& pl) {
    double best = std::numeric_limits<double>::infinity();
    const auto& p = pl.pts;
    if (p.size() == 1) return std::hypot(x - p[0][0], y - p[0][1]);
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        double ax = p[k][0], ay = p[k][1], bx = p[k + 1][0], by = p[k + 1][1];
        double vx = bx - ax, vy = by - ay;
        double len2 = vx * vx + vy * vy;
        double t = len2 > 0 ? ((x - ax) * vx + (y - ay) * vy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, std::hypot(x - (ax + t * vx), y - (ay + t * vy)));
    }
    return best;
}

/// Number of other ovals strictly containing each oval (containment tested
/// on the first vertex). Nested families get depth N-1 (innermost) .. 0.
inline std::vector<int> nesting_depth(const OvalSet& set) {
    std::vector<int> depth(set.ovals.size(), 0);
    for (std::size_t a = 0; a < set.ovals.size(); ++a)
        for (std::size_t b = 0; b < set.ovals.size(); ++b)
            if (a != b && !set.ovals[a].pts.empty() &&
                point_in_polyline(set.ovals[a].pts[0][0], set.ovals[a].pts[0][1], set.ovals[b]))
                ++depth[a];
    return depth;
}

// ---------------------------------------------------------------------------
// CSV serialization (shortest round-trip float formatting)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

}  // namespace detail

inline std::string write_ovals_csv(const OvalSet& set) {
    std::string out = "# ovalset cell_size=" + detail::fmt_double(set.cell_size) +
                      " degenerate=" + (set.degenerate ? std::string("1") : std::string("0")) +
                      "\n";
    int index = 0;
    auto block = [&](const Polyline& pl) {
        out += "component," + std::to_string(index++) + (pl.closed ? ",closed" : ",open");
        out += '\n';
        for (const auto& p : pl.pts)
            out += detail::fmt_double(p[0]) + "," + detail::fmt_double(p[1]) + "\n";
    };
    for (const auto& pl : set.ovals) block(pl);
    for (const auto& pl : set.open_components) block(pl);
    return out;
}

inline OvalSet parse_ovals_csv(std::string_view text) {
    OvalSet set;
    Polyline cur;
    bool have = false;
    auto flush = [&] {
        if (!have) return;
        (cur.closed ? set.ovals : set.open_components).push_back(cur);
        cur = Polyline{};
        have = false;
    };
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto cs = line.find("cell_size=");
            if (cs != std::string_view::npos)
                set.cell_size = std::strtod(std::string(line.substr(cs + 10)).c_str(), nullptr);
            if (line.find("degenerate=1") != std::string_view::npos) set.degenerate = true;
            continue;
        }
        if (line.rfind("component,", 0) == 0) {
            flush();
            have = true;
            cur.closed = line.find(",closed") != std::string_view::npos;
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string_view::npos || !have)
            throw std::invalid_argument("ovals csv: malformed line: " + std::string(line));
        double x = std::strtod(std::string(line.substr(0, comma)).c_str(), nullptr);
        double y = std::strtod(std::string(line.substr(comma + 1)).c_str(), nullptr);
        cur.pts.push_back({x, y});
    }
    flush();
    return set;
}

}  // namespace ovalix
