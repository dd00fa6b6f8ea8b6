// ovalix: derive mass-action ODEs from planar reaction networks, realize
// polynomial systems as networks, build systems with prescribed algebraic
// limit cycles, extract and classify curve ovals, and simulate trajectories.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ovalix/construct.hpp"
#include "ovalix/network.hpp"
#include "ovalix/presets.hpp"
#include "ovalix/realize.hpp"
#include "ovalix/sim.hpp"
#include "ovalix/svg.hpp"

namespace fs = std::filesystem;
using namespace ovalix;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitComputation = 1;
constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

// ---------------------------------------------------------------------------
// key = value config files (recipes, presets, --config overrides);
// '#' comments, unknown keys rejected by the consumer.
// ---------------------------------------------------------------------------

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_kv(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw InputError("config line " + std::to_string(line_no) + ": empty key or value");
        if (!kv.emplace(key, value).second)
            throw InputError("config line " + std::to_string(line_no) + ": duplicate key " + key);
    }
    return kv;
}

Rat kv_rat(const KeyValues& kv, const std::string& key) {
    auto r = parse_rat(kv.at(key));
    if (!r) throw InputError("bad rational for " + key + ": " + kv.at(key));
    return *r;
}

double kv_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw InputError("bad number for " + key + ": " + value);
    }
}

std::vector<double> kv_doubles(const std::string& value, const std::string& key, std::size_t n) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(kv_double(item, key));
    if (n != 0 && out.size() != n)
        throw InputError(key + " needs " + std::to_string(n) + " comma-separated numbers");
    return out;
}

// Run-level numeric settings; every subcommand takes --config overrides.
struct RunSettings {
    SimConfig sim;
    int resolution = 512;
    double tau = 1e-9;
    std::optional<Window> window;

    void apply(const KeyValues& kv) {
        for (const auto& [key, value] : kv) {
            if (key == "rel_tol") sim.rel_tol = kv_double(value, key);
            else if (key == "abs_tol") sim.abs_tol = kv_double(value, key);
            else if (key == "t_max") sim.t_max = kv_double(value, key);
            else if (key == "max_steps") sim.max_steps = static_cast<long>(kv_double(value, key));
            else if (key == "converge_tol") sim.converge_tol = kv_double(value, key);
            else if (key == "dwell_time") sim.dwell_time = kv_double(value, key);
            else if (key == "output_dt") sim.output_dt = kv_double(value, key);
            else if (key == "resolution") resolution = static_cast<int>(kv_double(value, key));
            else if (key == "tau") tau = kv_double(value, key);
            else if (key == "window") {
                auto w = kv_doubles(value, key, 4);
                window = Window{w[0], w[1], w[2], w[3]};
            } else {
                throw InputError("unknown config key: " + key);
            }
        }
        validate(sim);
        if (resolution < 32) throw InputError("resolution must be >= 32");
    }
};

// ---------------------------------------------------------------------------
// system files:  f = <poly>, g = <poly>, optional meta lines
// ---------------------------------------------------------------------------

std::string write_system_text(const PlanarSystem& sys) {
    std::string out = "f = " + to_string(sys.f) + "\ng = " + to_string(sys.g) + "\n";
    if (sys.meta) {
        out += "h = " + to_string(sys.meta->h) + "\n";
        out += "f0 = " + to_string(sys.meta->f0) + "\n";
        out += "g0 = " + to_string(sys.meta->g0) + "\n";
        out += "eps = " + to_string(sys.meta->eps) + "\n";
    }
    return out;
}

PlanarSystem parse_system_text(const std::string& text) {
    KeyValues kv = parse_kv(text);
    if (!kv.count("f") || !kv.count("g")) throw InputError("system file needs f = and g = lines");
    PlanarSystem sys{parse_poly(kv.at("f")), parse_poly(kv.at("g")), std::nullopt};
    if (kv.count("h")) {
        ConstructionMeta meta;
        meta.h = parse_poly(kv.at("h"));
        meta.f0 = parse_poly(kv.at("f0"));
        meta.g0 = parse_poly(kv.at("g0"));
        meta.eps = kv_rat(kv, "eps");
        sys.meta = meta;
    }
    return sys;
}

// ---------------------------------------------------------------------------
// curve sources shared by construct/ovals/classify/simulate/plot
// ---------------------------------------------------------------------------

struct CurveArgs {
    std::string curve;
    std::string mu, delta, deltas;
    std::string shift;  // "dx,dy"

    bool given() const { return !curve.empty(); }

    CurveSpec resolve() const {
        CurveSpec spec;
        if (curve == "product") {
            if (deltas.empty()) throw InputError("curve=product needs deltas");
            std::vector<Rat> ds;
            std::stringstream ss(deltas);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto r = parse_rat(item);
                if (!r) throw InputError("bad delta: " + item);
                ds.push_back(*r);
            }
            spec = product_curve_spec(ds);
        } else {
            std::map<std::string, Rat> params;
            if (!mu.empty()) params["mu"] = *parse_rat(mu);
            if (!delta.empty()) params["delta"] = *parse_rat(delta);
            spec = catalog(curve, params);
        }
        if (!shift.empty()) {
            std::vector<Rat> sh;
            std::stringstream ss(shift);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto r = parse_rat(item);
                if (!r) throw InputError("bad shift: " + shift);
                sh.push_back(*r);
            }
            if (sh.size() != 2) throw InputError("shift needs dx,dy");
            spec.poly = spec.poly.shift(sh[0], sh[1]);
            double dx = to_double(sh[0]), dy = to_double(sh[1]);
            for (auto& w : spec.windows) w = {w.x0 + dx, w.x1 + dx, w.y0 + dy, w.y1 + dy};
            spec.name += "+shift";
        }
        return spec;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--curve", curve, "catalog curve: ellipse|threeoval|commfach|h9|hi|q|qshift|product");
        cmd->add_option("--mu", mu, "q family parameter");
        cmd->add_option("--delta", delta, "h_i parameter");
        cmd->add_option("--deltas", deltas, "product deltas, comma separated");
        cmd->add_option("--shift", shift, "shift curve by dx,dy");
    }
};

std::pair<Poly2, Poly2> resolve_f0g0(const std::string& f0, const std::string& g0) {
    auto one = [](const std::string& s) {
        try {
            return f0g0_preset(s).first;  // probe preset name
        } catch (const std::invalid_argument&) {
            return parse_poly(s);
        }
    };
    if (f0 == "unit-square" || f0 == "linear" || f0 == "ones") {
        auto pair = f0g0_preset(f0);
        if (g0.empty() || g0 == f0) return pair;
        return {pair.first, one(g0)};
    }
    if (f0.empty() || g0.empty()) throw InputError("builder=general needs f0 and g0");
    return {parse_poly(f0), parse_poly(g0)};
}

// recipe -> constructed system
PlanarSystem construct_from_kv(const KeyValues& kv) {
    static const std::set<std::string> known{"curve", "mu",  "delta", "deltas", "shift",
                                             "builder", "f0", "g0",    "line",   "eps",
                                             "system"};
    for (const auto& [k, v] : kv)
        if (!known.count(k)) throw InputError("unknown recipe key: " + k);

    if (kv.count("system")) {
        const std::string& name = kv.at("system");
        if (name == "escher") return escher_system();
        if (name == "chavarriga-cubic") return chavarriga_cubic();
        throw InputError("unknown system preset: " + name);
    }

    CurveArgs ca;
    if (kv.count("curve")) ca.curve = kv.at("curve");
    if (kv.count("mu")) ca.mu = kv.at("mu");
    if (kv.count("delta")) ca.delta = kv.at("delta");
    if (kv.count("deltas")) ca.deltas = kv.at("deltas");
    if (kv.count("shift")) ca.shift = kv.at("shift");
    if (!ca.given()) throw InputError("recipe needs curve = ... (or system = ...)");
    CurveSpec spec = ca.resolve();

    std::string builder = kv.count("builder") ? kv.at("builder") : "gradient";
    Rat eps = kv.count("eps") ? kv_rat(kv, "eps") : Rat(1);
    if (builder == "gradient") return build_gradient(spec.poly, eps);
    if (builder == "general") {
        auto [f0, g0] = resolve_f0g0(kv.count("f0") ? kv.at("f0") : "",
                                     kv.count("g0") ? kv.at("g0") : "");
        return build_general(spec.poly, f0, g0, eps);
    }
    if (builder == "christopher") {
        if (!kv.count("line")) throw InputError("builder=christopher needs line");
        return build_christopher(spec.poly, parse_poly(kv.at("line")));
    }
    throw InputError("unknown builder: " + builder);
}

// ---------------------------------------------------------------------------
// start-point specs: point:x,y  grid:nx,ny,x0,x1,y0,y1  perimeter:n:lo,hi
// ---------------------------------------------------------------------------

std::vector<std::array<double, 2>> parse_starts(const std::string& spec) {
    std::vector<std::array<double, 2>> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        if (item.rfind("point:", 0) == 0) {
            auto v = kv_doubles(item.substr(6), "point", 2);
            out.push_back({v[0], v[1]});
        } else if (item.rfind("grid:", 0) == 0) {
            auto v = kv_doubles(item.substr(5), "grid", 6);
            int nx = static_cast<int>(v[0]), ny = static_cast<int>(v[1]);
            if (nx < 1 || ny < 1) throw InputError("grid needs nx, ny >= 1");
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j < ny; ++j)
                    out.push_back({nx == 1 ? v[2] : v[2] + i * (v[3] - v[2]) / (nx - 1),
                                   ny == 1 ? v[4] : v[4] + j * (v[5] - v[4]) / (ny - 1)});
        } else if (item.rfind("perimeter:", 0) == 0) {
            auto rest = item.substr(10);
            auto colon = rest.find(':');
            if (colon == std::string::npos) throw InputError("perimeter:n:lo,hi");
            int n = static_cast<int>(kv_double(rest.substr(0, colon), "perimeter count"));
            auto v = kv_doubles(rest.substr(colon + 1), "perimeter", 2);
            double lo = v[0], hi = v[1], side = hi - lo;
            for (int k = 0; k < n; ++k) {
                double t = 4.0 * side * k / n;
                if (t < side) out.push_back({lo + t, lo});
                else if (t < 2 * side) out.push_back({hi, lo + (t - side)});
                else if (t < 3 * side) out.push_back({hi - (t - 2 * side), hi});
                else out.push_back({lo, hi - (t - 3 * side)});
            }
        } else {
            throw InputError("bad starts item: " + item);
        }
    }
    if (out.empty()) throw InputError("no start points given");
    return out;
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int cmd_derive(const std::string& network_path, const std::string& out_path) {
    Network net = parse_network(read_file(network_path));
    PlanarSystem sys = derive_mass_action(net);
    std::string text = write_system_text(sys);
    std::cout << text;
    if (!out_path.empty()) write_file(out_path, text);
    return kExitOk;
}

int cmd_realize(const PlanarSystem& sys, const std::string& klass, int n,
                const std::string& out_path) {
    Network net;
    if (klass == "s") {
        net = realize_S_n(sys);
    } else if (klass == "m") {
        net = realize_M_n(sys, n > 0 ? n : std::max(1, sys.degree()));
    } else {
        throw InputError("--class must be s or m");
    }
    std::string text = print_network(net);
    std::cout << text;
    if (!out_path.empty()) write_file(out_path, text);
    return kExitOk;
}

int cmd_check(const std::optional<Network>& net, const std::optional<PlanarSystem>& sys_in,
              const std::string& klass, int n, bool weakly_reversible, bool kv_output) {
    bool all_pass = true;
    std::optional<PlanarSystem> sys = sys_in;
    if (net && !sys) sys = derive_mass_action(*net);
    if (!klass.empty()) {
        if (!sys) throw InputError("--class needs a system or network input");
        int nn = n > 0 ? n : std::max(1, sys->degree());
        ClassReport rep = klass == "s" ? is_S_n(*sys, nn)
                       : klass == "m" ? is_M_n(*sys, nn)
                                      : throw InputError("--class must be s or m");
        bool pass = klass == "s" ? rep.in_s_n.value() : rep.in_m_n.value();
        all_pass &= pass;
        std::cout << (kv_output ? to_kv(rep) : to_text(rep));
    }
    if (weakly_reversible) {
        if (!net) throw InputError("--weakly-reversible needs a network input");
        bool wr = is_weakly_reversible(*net);
        all_pass &= wr;
        std::cout << (kv_output ? std::string("weakly_reversible=") + (wr ? "true" : "false")
                                : std::string("weakly reversible: ") + (wr ? "yes" : "no"))
                  << "\n";
    }
    return all_pass ? kExitOk : kExitComputation;
}

int cmd_ovals(const CurveSpec& spec, const RunSettings& rs, const fs::path& out_dir,
              bool allow_degenerate) {
    CurveSpec s = spec;
    if (rs.window) s.windows = {*rs.window};
    ExtractOptions opt;
    opt.allow_degenerate = allow_degenerate;
    OvalSet set = extract_ovals(s, rs.resolution, opt);
    std::cout << "ovals: " << set.ovals.size() << "\nopen components: " << set.open_components.size()
              << "\n";
    if (set.degenerate) std::cout << "degenerate: yes\n";
    for (std::size_t k = 0; k < set.ovals.size(); ++k) {
        const auto& oval = set.ovals[k];
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300, r0 = 1e300, r1 = 0;
        for (const auto& p : oval.pts) {
            x0 = std::min(x0, p[0]);
            x1 = std::max(x1, p[0]);
            y0 = std::min(y0, p[1]);
            y1 = std::max(y1, p[1]);
            double r = std::hypot(p[0], p[1]);
            r0 = std::min(r0, r);
            r1 = std::max(r1, r);
        }
        std::cout << "oval " << k << ": x [" << x0 << ", " << x1 << "] y [" << y0 << ", " << y1
                  << "]";
        if (spec.name == "q") std::cout << " radius [" << r0 << ", " << r1 << "]";
        std::cout << "\n";
    }
    write_file(out_dir / "ovals.csv", write_ovals_csv(set));
    return kExitOk;
}

int cmd_classify(const CurveSpec& spec, const Poly2& f0, const Poly2& g0, const RunSettings& rs,
                 const std::string& ovals_csv, const fs::path& out_dir) {
    CurveSpec s = spec;
    if (rs.window) s.windows = {*rs.window};
    OvalSet set =
        ovals_csv.empty() ? extract_ovals(s, rs.resolution) : parse_ovals_csv(read_file(ovals_csv));
    StabilityVerdict v = classify_transversality(s.poly, f0, g0, set, rs.tau);
    auto depth = nesting_depth(set);
    std::string report;
    for (std::size_t k = 0; k < v.per_oval.size(); ++k) {
        report += "oval " + std::to_string(k) + " (depth " + std::to_string(depth[k]) + ")";
        // in the nested product family depth identifies the factor
        if (spec.name == "product")
            report += " delta=" + std::to_string(set.ovals.size() - depth[k]);
        report += std::string(": ") + to_cstr(v.per_oval[k]) + "\n";
    }
    std::cout << report;
    if (!out_dir.empty()) {
        write_file(out_dir / "ovals.csv", write_ovals_csv(set));
        write_file(out_dir / "classification.txt", report);
    }
    return kExitOk;
}

int cmd_simulate(const PlanarSystem& sys, const std::optional<CurveSpec>& curve,
                 const std::string& starts_spec, const RunSettings& rs, const fs::path& out_dir) {
    auto starts = parse_starts(starts_spec);
    std::optional<CurveTarget> target;
    if (curve) {
        CurveSpec s = *curve;
        if (rs.window) s.windows = {*rs.window};
        target = CurveTarget{s.poly, extract_ovals(s, rs.resolution)};
    }
    auto trajs = sweep(sys, starts, rs.sim, target ? &*target : nullptr);
    for (std::size_t k = 0; k < trajs.size(); ++k) {
        const auto& last = trajs[k].samples.back();
        std::cout << "trajectory " << k << ": " << to_cstr(trajs[k].status) << " t=" << last.t
                  << " end=(" << last.x << ", " << last.y << ")";
        if (trajs[k].oval_index >= 0) std::cout << " oval=" << trajs[k].oval_index;
        std::cout << "\n";
    }
    write_file(out_dir / "trajectories.csv", write_trajectories_csv(trajs));
    if (target) write_file(out_dir / "ovals.csv", write_ovals_csv(target->ovals));
    return kExitOk;
}

// figure reproduction presets: each preset file drives construct + ovals +
// simulate + classify + plot end to end.
int run_repro(const std::string& name, const fs::path& presets_dir, const fs::path& out_dir) {
    KeyValues kv = parse_kv(read_file(presets_dir / (name + ".cfg")));
    RunSettings rs;
    KeyValues run_kv;
    for (const char* key : {"rel_tol", "abs_tol", "t_max", "converge_tol", "dwell_time",
                            "output_dt", "resolution", "tau", "window"})
        if (kv.count(key)) {
            run_kv[key] = kv.at(key);
            kv.erase(key);
        }
    rs.apply(run_kv);

    std::string starts = kv.count("starts") ? kv.at("starts") : "";
    std::string plot_window = kv.count("plot_window") ? kv.at("plot_window") : "";
    bool logaxes = kv.count("log_axes") && kv.at("log_axes") == "true";
    bool classify = kv.count("classify") && kv.at("classify") == "true";
    std::string line = kv.count("plot_line") ? kv.at("plot_line") : "";
    for (const char* key : {"starts", "plot_window", "log_axes", "classify", "plot_line"})
        kv.erase(key);

    CurveArgs ca;
    if (kv.count("curve")) ca.curve = kv.at("curve");
    if (kv.count("mu")) ca.mu = kv.at("mu");
    if (kv.count("delta")) ca.delta = kv.at("delta");
    if (kv.count("deltas")) ca.deltas = kv.at("deltas");
    if (kv.count("shift")) ca.shift = kv.at("shift");
    CurveSpec spec = ca.resolve();

    OvalSet ovals = extract_ovals(spec, rs.resolution);
    write_file(out_dir / "ovals.csv", write_ovals_csv(ovals));

    SvgPlot::Options popt;
    if (!plot_window.empty()) {
        auto w = kv_doubles(plot_window, "plot_window", 4);
        popt.window = {w[0], w[1], w[2], w[3]};
    } else {
        popt.window = spec.windows[0];
        for (const auto& w : spec.windows) {
            popt.window.x0 = std::min(popt.window.x0, w.x0);
            popt.window.x1 = std::max(popt.window.x1, w.x1);
            popt.window.y0 = std::min(popt.window.y0, w.y0);
            popt.window.y1 = std::max(popt.window.y1, w.y1);
        }
    }
    popt.logx = popt.logy = logaxes;
    SvgPlot plot(popt);

    std::string summary = "preset " + name + "\novals " + std::to_string(ovals.ovals.size()) + "\n";

    bool has_builder = kv.count("builder") || kv.count("system");
    if (has_builder) {
        PlanarSystem sys = construct_from_kv(kv);
        write_file(out_dir / "system.txt", write_system_text(sys));
        if (classify && sys.meta) {
            StabilityVerdict v =
                classify_transversality(sys.meta->h, sys.meta->f0, sys.meta->g0, ovals, rs.tau);
            auto depth = nesting_depth(ovals);
            std::function<double(double, double)> shade = [&](double x, double y) {
                CompiledPoly f0 = CompiledPoly::from(sys.meta->f0);
                CompiledPoly g0 = CompiledPoly::from(sys.meta->g0);
                CompiledPoly hx = CompiledPoly::from(sys.meta->h.partial(Var::X));
                CompiledPoly hy = CompiledPoly::from(sys.meta->h.partial(Var::Y));
                return f0.eval(x, y) * hx.eval(x, y) + g0.eval(x, y) * hy.eval(x, y);
            };
            plot.add_shading(shade, 160);
            for (std::size_t k = 0; k < v.per_oval.size(); ++k)
                summary += "oval " + std::to_string(k) + " depth " + std::to_string(depth[k]) +
                           " " + to_cstr(v.per_oval[k]) + "\n";
        }
        if (!starts.empty()) {
            CurveTarget target{spec.poly, ovals};
            auto trajs = sweep(sys, parse_starts(starts), rs.sim, &target);
            write_file(out_dir / "trajectories.csv", write_trajectories_csv(trajs));
            for (const auto& t : trajs) plot.add_trajectory(t);
            std::map<std::string, int> by_status;
            std::set<int> hit;
            for (const auto& t : trajs) {
                by_status[to_cstr(t.status)]++;
                if (t.oval_index >= 0) hit.insert(t.oval_index);
            }
            for (const auto& [st, count] : by_status)
                summary += st + " " + std::to_string(count) + "\n";
            summary += "ovals hit " + std::to_string(hit.size()) + "\n";
        }
    }
    plot.add_curve(ovals);
    if (!line.empty()) {
        // straight reference line sampled over the window
        Poly2 lp = parse_poly(line);
        CompiledPoly cl = CompiledPoly::from(lp);
        Polyline pl;
        for (int k = 0; k <= 400; ++k) {
            double x = popt.window.x0 + k * (popt.window.x1 - popt.window.x0) / 400;
            // solve line(x, y) = 0 for y assuming degree 1 in y
            double c0 = cl.eval(x, 0), c1 = cl.eval(x, 1) - c0;
            if (c1 != 0) pl.pts.push_back({x, -c0 / c1});
        }
        plot.add_polyline(pl, "#c02020", false);
    }
    write_file(out_dir / (name + ".svg"), plot.str());
    write_file(out_dir / "summary.txt", summary);
    std::cout << summary;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar mass-action systems with algebraic limit cycles"};
    app.require_subcommand(0, 1);
    // top-level options (--out, --config, ...) may follow the subcommand
    app.fallthrough();

    std::string repro_name, presets_dir = "presets", out_dir, config_path;
    app.add_option("--repro", repro_name, "regenerate a figure preset: fig2a|fig5a|fig5b|fig6|fig8a|fig8b");
    app.add_option("--presets-dir", presets_dir, "directory with preset .cfg files");
    app.add_option("--out", out_dir, "output directory or file");
    app.add_option("--config", config_path, "key = value settings file");

    // derive
    auto* derive = app.add_subcommand("derive", "reaction network -> mass-action ODEs");
    std::string network_path;
    derive->add_option("network", network_path, "network DSL file")->required();

    // realize
    auto* realize = app.add_subcommand("realize", "polynomial system -> reaction network");
    std::string rf, rg, rsys_path, rclass = "s";
    int rn = 0;
    realize->add_option("--f", rf, "f polynomial text");
    realize->add_option("--g", rg, "g polynomial text");
    realize->add_option("--system", rsys_path, "system file (f =, g = lines)");
    realize->add_option("--class", rclass, "s (order) or m (molecularity)");
    realize->add_option("--n", rn, "class index n");

    // check
    auto* check = app.add_subcommand("check", "class membership / weak reversibility checks");
    std::string cnet_path, cf, cg, csys_path, cclass;
    int cn = 0;
    bool cwr = false, ckv = false;
    check->add_option("--network", cnet_path, "network DSL file");
    check->add_option("--f", cf, "f polynomial text");
    check->add_option("--g", cg, "g polynomial text");
    check->add_option("--system", csys_path, "system file");
    check->add_option("--class", cclass, "s or m");
    check->add_option("--n", cn, "class index n");
    check->add_flag("--weakly-reversible", cwr, "require weak reversibility");
    check->add_flag("--kv", ckv, "machine-readable key=value output");

    // construct
    auto* construct = app.add_subcommand("construct", "build a system from a recipe");
    std::string recipe_path;
    bool crealize = false;
    construct->add_option("recipe", recipe_path, "recipe file")->required();
    construct->add_flag("--realize", crealize, "also emit a realize_S_n network");

    // ovals
    auto* ovals = app.add_subcommand("ovals", "extract curve ovals");
    CurveArgs oca;
    oca.attach(ovals);
    bool oallow = false;
    ovals->add_flag("--allow-degenerate", oallow, "tolerate persistent saddle cells");

    // classify
    auto* classify = app.add_subcommand("classify", "stability of each oval");
    CurveArgs cca;
    cca.attach(classify);
    std::string clf0, clg0, clovals;
    classify->add_option("--f0", clf0, "f0 preset or polynomial")->required();
    classify->add_option("--g0", clg0, "g0 preset or polynomial");
    classify->add_option("--ovals", clovals, "read the oval set from a CSV instead of extracting");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "integrate trajectories");
    CurveArgs sca;
    sca.attach(simulate);
    std::string ssys_path, srecipe_path, sstarts;
    simulate->add_option("--system", ssys_path, "system file");
    simulate->add_option("--recipe", srecipe_path, "construct recipe file");
    simulate->add_option("--starts", sstarts, "point:x,y;grid:nx,ny,...;perimeter:n:lo,hi")
        ->required();

    // plot
    auto* plot = app.add_subcommand("plot", "render curve and trajectories to SVG");
    CurveArgs pca;
    pca.attach(plot);
    std::string precipe_path, pstarts, pwindow;
    bool plogx = false, plogy = false;
    plot->add_option("--recipe", precipe_path, "construct recipe for trajectories");
    plot->add_option("--starts", pstarts, "start points for trajectories");
    plot->add_option("--plot-window", pwindow, "x0,x1,y0,y1");
    plot->add_flag("--logx", plogx, "log-scale x axis");
    plot->add_flag("--logy", plogy, "log-scale y axis");

    CLI11_PARSE(app, argc, argv);

    try {
        RunSettings rs;
        if (!config_path.empty()) rs.apply(parse_kv(read_file(config_path)));

        if (!repro_name.empty())
            return run_repro(repro_name, presets_dir, out_dir.empty() ? "." : out_dir);

        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return kExitInput;
        }

        if (derive->parsed()) return cmd_derive(network_path, out_dir);

        if (realize->parsed()) {
            PlanarSystem sys = !rsys_path.empty()
                                   ? parse_system_text(read_file(rsys_path))
                                   : PlanarSystem{parse_poly(rf), parse_poly(rg), std::nullopt};
            return cmd_realize(sys, rclass, rn, out_dir);
        }

        if (check->parsed()) {
            std::optional<Network> net;
            std::optional<PlanarSystem> sys;
            if (!cnet_path.empty()) net = parse_network(read_file(cnet_path));
            if (!csys_path.empty()) sys = parse_system_text(read_file(csys_path));
            if (!cf.empty() && !cg.empty())
                sys = PlanarSystem{parse_poly(cf), parse_poly(cg), std::nullopt};
            if (!net && !sys) throw InputError("check needs --network, --system or --f/--g");
            return cmd_check(net, sys, cclass, cn, cwr, ckv);
        }

        const fs::path run_out = out_dir.empty() ? fs::path("ovalix-out") : fs::path(out_dir);

        if (construct->parsed()) {
            PlanarSystem sys = construct_from_kv(parse_kv(read_file(recipe_path)));
            if (sys.f.is_zero() && sys.g.is_zero())
                std::cerr << "warning: constructed system is identically zero\n";
            std::string text = write_system_text(sys);
            std::cout << text;
            fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
            if (!out_dir.empty()) write_file(dir / "system.txt", text);
            if (crealize) {
                std::string net = print_network(realize_S_n(sys));
                std::cout << net;
                if (!out_dir.empty()) write_file(dir / "network.crn", net);
            }
            return kExitOk;
        }

        if (ovals->parsed()) return cmd_ovals(oca.resolve(), rs, run_out, oallow);

        if (classify->parsed()) {
            auto [f0, g0] = resolve_f0g0(clf0, clg0);
            return cmd_classify(cca.resolve(), f0, g0, rs, clovals, run_out);
        }

        if (simulate->parsed()) {
            PlanarSystem sys;
            std::optional<CurveSpec> curve;
            if (!ssys_path.empty()) {
                sys = parse_system_text(read_file(ssys_path));
            } else if (!srecipe_path.empty()) {
                KeyValues kv = parse_kv(read_file(srecipe_path));
                sys = construct_from_kv(kv);
            } else {
                throw InputError("simulate needs --system or --recipe");
            }
            if (sca.given()) {
                curve = sca.resolve();
            } else if (sys.meta) {
                CurveSpec spec;
                spec.name = "target";
                spec.poly = sys.meta->h;
                spec.windows = {rs.window ? *rs.window : Window{0.0, 5.0, 0.0, 5.0}};
                curve = spec;
            }
            return cmd_simulate(sys, curve, sstarts, rs, run_out);
        }

        if (plot->parsed()) {
            CurveSpec spec = pca.resolve();
            OvalSet set = extract_ovals(spec, rs.resolution);
            SvgPlot::Options popt;
            popt.window = spec.windows[0];
            for (const auto& w : spec.windows) {
                popt.window.x0 = std::min(popt.window.x0, w.x0);
                popt.window.x1 = std::max(popt.window.x1, w.x1);
                popt.window.y0 = std::min(popt.window.y0, w.y0);
                popt.window.y1 = std::max(popt.window.y1, w.y1);
            }
            if (!pwindow.empty()) {
                auto w = kv_doubles(pwindow, "plot-window", 4);
                popt.window = {w[0], w[1], w[2], w[3]};
            }
            popt.logx = plogx;
            popt.logy = plogy;
            SvgPlot svg(popt);
            svg.add_curve(set);
            write_file(run_out / "ovals.csv", write_ovals_csv(set));
            if (!pstarts.empty()) {
                PlanarSystem sys = precipe_path.empty()
                                       ? build_gradient(spec.poly, Rat(1))
                                       : construct_from_kv(parse_kv(read_file(precipe_path)));
                CurveTarget target{spec.poly, set};
                auto trajs = sweep(sys, parse_starts(pstarts), rs.sim, &target);
                for (const auto& t : trajs) svg.add_trajectory(t);
                write_file(run_out / "trajectories.csv", write_trajectories_csv(trajs));
            }
            write_file(run_out / "plot.svg", svg.str());
            std::cout << "wrote " << (run_out / "plot.svg").string() << "\n";
            return kExitOk;
        }

        std::cerr << app.help();
        return kExitInput;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NetworkError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const PolyFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const UnknownCurve& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const BadParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    }
}
