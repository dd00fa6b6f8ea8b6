#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ovalix/curves.hpp"
#include "ovalix/system.hpp"

namespace ovalix {

struct SimConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double t_max = 200.0;
    long max_steps = 20'000'000;
    double converge_tol = 1e-6;   // on |h|
    double dwell_time = 5.0;      // how long |h| must stay below converge_tol
    double output_dt = 0.01;      // fixed output sampling interval
};

inline void validate(const SimConfig& cfg) {
    if (cfg.rel_tol < 1e-13) throw std::invalid_argument("rel_tol must be >= 1e-13");
    if (cfg.abs_tol <= 0 || cfg.t_max <= 0 || cfg.max_steps <= 0 || cfg.converge_tol <= 0 ||
        cfg.dwell_time <= 0 || cfg.output_dt <= 0)
        throw std::invalid_argument("SimConfig fields must be positive");
}

enum class TerminalStatus { ConvergedToCurve, ReachedTmax, LeftDomain, StepFailure };

inline const char* to_cstr(TerminalStatus s) {
    switch (s) {
        case TerminalStatus::ConvergedToCurve: return "converged";
        case TerminalStatus::ReachedTmax: return "tmax";
        case TerminalStatus::LeftDomain: return "left_domain";
        default: return "step_failure";
    }
}

struct TrajectorySample {
    double t, x, y;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<double> h_residuals;  // |h| at samples, present iff a target was attached
    TerminalStatus status = TerminalStatus::ReachedTmax;
    int oval_index = -1;              // nearest oval on convergence
    SimConfig config;
};

/// Convergence target: the invariant curve and its extracted ovals.
struct CurveTarget {
    Poly2 h;
    OvalSet ovals;
};

namespace detail {

struct CompiledSystem {
    CompiledPoly f, g;
    void eval(double x, double y, double& fx, double& fy) const {
        fx = f.eval(x, y);
        fy = g.eval(x, y);
    }
};

// Dormand-Prince 5(4) embedded pair (FSAL).
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const CompiledSystem& sys;
    double k1x, k1y;  // FSAL stage

    explicit Dopri5(const CompiledSystem& s, double x, double y) : sys(s) {
        sys.eval(x, y, k1x, k1y);
    }

    /// One trial step from (x,y) with size h. Returns the scaled error norm;
    /// on acceptance call commit() to reuse the last stage.
    double attempt(double x, double y, double h, double rel, double abs, double& nx, double& ny) {
        double k2x, k2y, k3x, k3y, k4x, k4y, k5x, k5y, k6x, k6y;
        sys.eval(x + h * a21 * k1x, y + h * a21 * k1y, k2x, k2y);
        sys.eval(x + h * (a31 * k1x + a32 * k2x), y + h * (a31 * k1y + a32 * k2y), k3x, k3y);
        sys.eval(x + h * (a41 * k1x + a42 * k2x + a43 * k3x),
                 y + h * (a41 * k1y + a42 * k2y + a43 * k3y), k4x, k4y);
        sys.eval(x + h * (a51 * k1x + a52 * k2x + a53 * k3x + a54 * k4x),
                 y + h * (a51 * k1y + a52 * k2y + a53 * k3y + a54 * k4y), k5x, k5y);
        sys.eval(x + h * (a61 * k1x + a62 * k2x + a63 * k3x + a64 * k4x + a65 * k5x),
                 y + h * (a61 * k1y + a62 * k2y + a63 * k3y + a64 * k4y + a65 * k5y), k6x, k6y);
        nx = x + h * (b1 * k1x + b3 * k3x + b4 * k4x + b5 * k5x + b6 * k6x);
        ny = y + h * (b1 * k1y + b3 * k3y + b4 * k4y + b5 * k5y + b6 * k6y);
        sys.eval(nx, ny, k7x_, k7y_);
        double ex = h * (e1 * k1x + e3 * k3x + e4 * k4x + e5 * k5x + e6 * k6x + e7 * k7x_);
        double ey = h * (e1 * k1y + e3 * k3y + e4 * k4y + e5 * k5y + e6 * k6y + e7 * k7y_);
        double sx = abs + rel * std::max(std::abs(x), std::abs(nx));
        double sy = abs + rel * std::max(std::abs(y), std::abs(ny));
        double err = std::sqrt(((ex / sx) * (ex / sx) + (ey / sy) * (ey / sy)) / 2.0);
        if (!std::isfinite(err) || !std::isfinite(nx) || !std::isfinite(ny))
            return std::numeric_limits<double>::infinity();
        return err;
    }

    void commit() {
        k1x = k7x_;
        k1y = k7y_;
    }

private:
    double k7x_ = 0, k7y_ = 0;
};

/// Hairer-style initial step guess.
inline double initial_step(const CompiledSystem& sys, double x, double y, const SimConfig& cfg) {
    double fx, fy;
    sys.eval(x, y, fx, fy);
    double sx = cfg.abs_tol + cfg.rel_tol * std::abs(x);
    double sy = cfg.abs_tol + cfg.rel_tol * std::abs(y);
    double d0 = std::sqrt(((x / sx) * (x / sx) + (y / sy) * (y / sy)) / 2.0);
    double d1 = std::sqrt(((fx / sx) * (fx / sx) + (fy / sy) * (fy / sy)) / 2.0);
    double h = (d0 < 1e-5 || d1 < 1e-5 || !std::isfinite(d1)) ? 1e-6 : 0.01 * d0 / d1;
    return std::min(h, cfg.output_dt);
}

/// Fixed-step driver used by the convergence-order tests.
inline std::pair<double, double> fixed_step_integrate(const PlanarSystem& psys, double x, double y,
                                                      double t_end, int n_steps) {
    CompiledSystem sys{CompiledPoly::from(psys.f), CompiledPoly::from(psys.g)};
    Dopri5 st(sys, x, y);
    double h = t_end / n_steps;
    for (int k = 0; k < n_steps; ++k) {
        double nx, ny;
        st.attempt(x, y, h, 1.0, 1.0, nx, ny);
        st.commit();
        x = nx;
        y = ny;
    }
    return {x, y};
}

}  // namespace detail

/// Adaptive integration of a planar system with fixed-interval output
/// sampling. With a target attached, terminates ConvergedToCurve once
/// |h| stays below converge_tol for dwell_time, recording the nearest oval.
inline Trajectory integrate(const PlanarSystem& psys, std::array<double, 2> start,
                            const SimConfig& cfg, const CurveTarget* target = nullptr) {
    validate(cfg);
    if (!std::isfinite(start[0]) || !std::isfinite(start[1]))
        throw std::invalid_argument("integrate: start must be finite");

    detail::CompiledSystem sys{CompiledPoly::from(psys.f), CompiledPoly::from(psys.g)};
    std::optional<CompiledPoly> ch;
    if (target) ch = CompiledPoly::from(target->h);

    Trajectory traj;
    traj.config = cfg;
    double t = 0.0, x = start[0], y = start[1];
    auto record = [&](double tt, double xx, double yy) {
        traj.samples.push_back({tt, xx, yy});
        if (ch) traj.h_residuals.push_back(std::abs(ch->eval(xx, yy)));
    };
    record(t, x, y);

    detail::Dopri5 stepper(sys, x, y);
    double h = detail::initial_step(sys, x, y, cfg);
    // the controller runs a factor below the requested tolerances; derived
    // quantities like the |h| residuals then wobble well inside the
    // 10 * (rel_tol * max + abs_tol) slack documented for
    // monotone_residual_check
    const double rtol_w = cfg.rel_tol / 16.0, atol_w = cfg.abs_tol / 16.0;
    const double safe = 0.9, beta = 0.04, expo = 0.2 - beta * 0.75;
    double facold = 1e-4;
    double below_since = -1.0;
    if (ch && std::abs(ch->eval(x, y)) < cfg.converge_tol) below_since = 0.0;
    double next_out = cfg.output_dt;
    long steps = 0;

    auto finish = [&](TerminalStatus st) {
        traj.status = st;
        if (!traj.samples.empty() &&
            (traj.samples.back().t != t || traj.samples.back().x != x))
            record(t, x, y);
        if (st == TerminalStatus::ConvergedToCurve && target && !target->ovals.ovals.empty()) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < target->ovals.ovals.size(); ++k) {
                double d = distance_to_polyline(x, y, target->ovals.ovals[k]);
                if (d < best) {
                    best = d;
                    traj.oval_index = static_cast<int>(k);
                }
            }
        }
        return traj;
    };

    const double t_end = cfg.t_max - 1e-12 * std::max(1.0, cfg.t_max);
    while (t < t_end) {
        if (++steps > cfg.max_steps) return finish(TerminalStatus::StepFailure);
        double t_cap = std::min(next_out, cfg.t_max);
        h = std::min(h, t_cap - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t))) return finish(TerminalStatus::StepFailure);
        double nx, ny;
        double err = stepper.attempt(x, y, h, rtol_w, atol_w, nx, ny);
        if (err <= 1.0) {
            stepper.commit();
            t += h;
            x = nx;
            y = ny;
            double fac11 = std::pow(std::max(err, 1e-12), expo);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(0.1, std::min(5.0, fac / safe));
            h = h / fac;
            facold = std::max(err, 1e-4);
            if (x < -cfg.abs_tol || y < -cfg.abs_tol) return finish(TerminalStatus::LeftDomain);
            if (ch) {
                if (std::abs(ch->eval(x, y)) < cfg.converge_tol) {
                    if (below_since < 0) below_since = t;
                    if (t - below_since >= cfg.dwell_time)
                        return finish(TerminalStatus::ConvergedToCurve);
                } else {
                    below_since = -1.0;
                }
            }
            if (t >= next_out - 1e-12 * std::max(1.0, std::abs(next_out))) {
                record(t, x, y);
                next_out += cfg.output_dt;
            }
        } else if (std::isfinite(err)) {
            double fac11 = std::pow(err, expo);
            h = h / std::min(5.0, fac11 / safe);
        } else {
            h *= 0.1;
        }
    }
    return finish(TerminalStatus::ReachedTmax);
}

/// Batch integration, one result per start, in order. Per-trajectory
/// failures are reported in the status, never by aborting the batch.
inline std::vector<Trajectory> sweep(const PlanarSystem& sys,
                                     const std::vector<std::array<double, 2>>& starts,
                                     const SimConfig& cfg, const CurveTarget* target = nullptr) {
    std::vector<Trajectory> out(starts.size());
    unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                       static_cast<unsigned>(starts.size())));
    std::vector<std::future<void>> futs;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [&] {
            for (std::size_t k = next.fetch_add(1); k < starts.size(); k = next.fetch_add(1)) {
                try {
                    out[k] = integrate(sys, starts[k], cfg, target);
                } catch (const std::exception&) {
                    out[k].status = TerminalStatus::StepFailure;
                    out[k].config = cfg;
                    out[k].samples = {{0.0, starts[k][0], starts[k][1]}};
                }
            }
        }));
    }
    for (auto& f : futs) f.get();
    return out;
}

/// True iff the recorded |h| residuals are non-increasing up to float slack.
/// Meaningful for gradient-construction trajectories in the open positive
/// quadrant, where dh/dt = -x y |grad h|^2 h forces monotone decay.
inline bool monotone_residual_check(const Trajectory& traj) {
    if (traj.h_residuals.empty())
        throw std::invalid_argument("monotone_residual_check: trajectory has no target residuals");
    double max_res = 0.0;
    for (double r : traj.h_residuals) max_res = std::max(max_res, r);
    double slack = 10.0 * (traj.config.rel_tol * max_res + traj.config.abs_tol);
    for (std::size_t k = 0; k + 1 < traj.h_residuals.size(); ++k)
        if (traj.h_residuals[k + 1] > traj.h_residuals[k] + slack) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Trajectory CSV
// ---------------------------------------------------------------------------

inline std::string write_trajectory_csv(const Trajectory& traj) {
    std::string out = "t,x,y,h_abs,status\n";
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        const auto& s = traj.samples[k];
        out += detail::fmt_double(s.t) + "," + detail::fmt_double(s.x) + "," +
               detail::fmt_double(s.y) + ",";
        if (k < traj.h_residuals.size()) out += detail::fmt_double(traj.h_residuals[k]);
        out += ",";
        out += to_cstr(traj.status);
        out += '\n';
    }
    return out;
}

inline std::string write_trajectories_csv(const std::vector<Trajectory>& trajs) {
    std::string out = "index,t,x,y,h_abs,status\n";
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        for (std::size_t k = 0; k < trajs[i].samples.size(); ++k) {
            const auto& s = trajs[i].samples[k];
            out += std::to_string(i) + "," + detail::fmt_double(s.t) + "," +
                   detail::fmt_double(s.x) + "," + detail::fmt_double(s.y) + ",";
            if (k < trajs[i].h_residuals.size()) out += detail::fmt_double(trajs[i].h_residuals[k]);
            out += ",";
            out += to_cstr(trajs[i].status);
            out += '\n';
        }
    }
    return out;
}

}  // namespace ovalix
