#pragma once

// Volume-preserving shape-gradient descent on star-shaped domains: radial
// update by the projected normal velocity, Fourier low-pass, exact rescaling
// to the reference area, and backtracking on strict energy decrease.

#include "insul/shape_derivative.hpp"

namespace insul {

struct FlowState {
    int step = 0;
    StarBoundary shape;
    EnergyBreakdown energy;
    double defect = 0.0;
    double tau = 0.0;           // accepted step size (0 for a no-op)
    double dist_to_ball = 0.0;  // Hausdorff distance to the equal-area disk
    double area = 0.0;
    double perimeter = 0.0;
};

struct FlowConfig {
    double h = 0.02;           // mesh size for the per-step solves
    double tau0 = 0.0;         // trial step size; 0 selects the stability-bound default
    double defect_tol = 2.5e-3;
    int max_steps = 200;
    double solver_tol = 1e-10;
    int kmax = 0;              // Fourier low-pass cap; 0 selects 2x the initial max mode
};

// Explicit descent is modally stable near the ball when tau Q_k / (pi R) < 2
// for every retained mode; the default trial step keeps a 30% margin at the
// cap.
inline double stable_step_bound(int kmax, double R, double m) {
    const double qk = (kPi * R * R / 4.0) * (1.0 - 1.0 / kmax) + m * (kmax * kmax - 1.0) / 8.0;
    return 1.4 * kPi * R / qk;
}

// Domain centroid and Hausdorff distance to the equal-area disk centered on
// it, from dense boundary sampling.
inline double distance_to_equal_area_disk(const StarBoundary& sb, int nsample = 2048) {
    double A = 0.0;
    Point2 c{0.0, 0.0};
    for (int i = 0; i < nsample; ++i) {
        const double th = 2.0 * kPi * i / nsample;
        const double r = sb.eval_radius(th).r;
        A += 0.5 * r * r;
        c.x += (r * r * r / 3.0) * std::cos(th);
        c.y += (r * r * r / 3.0) * std::sin(th);
    }
    A *= 2.0 * kPi / nsample;
    c = c * (2.0 * kPi / nsample / A);
    c = c + sb.center;
    const double R = std::sqrt(A / kPi);

    std::vector<Point2> bpts(nsample);
    for (int i = 0; i < nsample; ++i) bpts[i] = sb.point(2.0 * kPi * i / nsample);

    // sup over the shape of the distance to the disk.
    double d1 = 0.0;
    for (const auto& p : bpts) d1 = std::max(d1, dist(p, c) - R);
    d1 = std::max(d1, 0.0);

    // sup over the disk of the distance to the shape (boundary sampling).
    double d2 = 0.0;
    for (int i = 0; i < nsample; ++i) {
        const double th = 2.0 * kPi * i / nsample;
        const Point2 q{c.x + R * std::cos(th), c.y + R * std::sin(th)};
        const Point2 rel = q - sb.center;
        const double rho = rel.norm();
        if (rho <= sb.eval_radius(std::atan2(rel.y, rel.x)).r) continue;  // inside the shape
        double dq = 1e300;
        for (int j = 0; j < nsample; ++j) {
            const Point2 a = bpts[j], b = bpts[(j + 1) % nsample];
            const Point2 ab = b - a;
            const double t = clamp(((q - a).dot(ab)) / ab.dot(ab), 0.0, 1.0);
            dq = std::min(dq, dist(q, a + ab * t));
        }
        d2 = std::max(d2, dq);
    }
    return std::max(d1, d2);
}

namespace detail {

inline FlowState make_state(int step, const StarBoundary& shape, const ShapeEvaluation& ev,
                            double defect, double tau) {
    FlowState st;
    st.step = step;
    st.shape = shape;
    st.energy = ev.en;
    st.defect = defect;
    st.tau = tau;
    st.dist_to_ball = distance_to_equal_area_disk(shape);
    const DomainMetrics dm = metrics(ev.mesh, &shape);
    st.area = dm.area;
    st.perimeter = dm.perimeter;
    return st;
}

}  // namespace detail

// One accepted descent step (or a no-op when the defect is already at
// tolerance). Backtracking halves the trial step until the energy strictly
// decreases; a stall below 1e-8 tau0 raises StallDetected.
inline FlowState flow_step(const FlowState& state, double m, double tau0,
                           const FlowConfig& cfg = FlowConfig{}) {
    const double V0 = state.shape.analytic_area();
    const int kmax = cfg.kmax > 0 ? cfg.kmax
                                  : clamp(2 * state.shape.max_mode_order(), 4, 64);
    if (tau0 <= 0.0) tau0 = stable_step_bound(kmax, std::sqrt(V0 / kPi), m);
    const ShapeEvaluation ev = evaluate_shape(state.shape, m, cfg.h, std::nullopt, cfg.solver_tol);
    const ShapeGradient sg = shape_gradient(ev.mesh, ev.sol, state.shape, m);

    FlowState next = state;
    if (sg.defect <= cfg.defect_tol) {
        next.defect = sg.defect;
        next.tau = 0.0;
        return next;  // stationary at this resolution
    }

    // Piecewise-linear interpolant of the nodal velocity in theta.
    const auto& thetas = ev.mesh.boundary_theta;
    const auto& zv = sg.velocity.values;
    const std::size_t nb = zv.size();
    auto zeta_at = [&](double th) {
        th = std::fmod(th, 2.0 * kPi);
        if (th < 0) th += 2.0 * kPi;
        const auto it = std::upper_bound(thetas.begin(), thetas.end(), th);
        const std::size_t hi = static_cast<std::size_t>(it - thetas.begin()) % nb;
        const std::size_t lo = (hi + nb - 1) % nb;
        double t0 = thetas[lo], t1 = thetas[hi];
        double x = th;
        if (t1 <= t0) {  // wrap interval
            t1 += 2.0 * kPi;
            if (x < t0) x += 2.0 * kPi;
        }
        const double t = (x - t0) / (t1 - t0);
        return (1.0 - t) * zv[lo] + t * zv[hi];
    };

    double tau = tau0;
    while (true) {
        const StarBoundary trial = normal_flow_update(state.shape, zeta_at, tau, kmax, V0);
        ShapeEvaluation tev;
        try {
            tev = evaluate_shape(trial, m, cfg.h, std::nullopt, cfg.solver_tol);
        } catch (const MeshQualityFailure&) {
            tau *= 0.5;  // too aggressive for the mesher; shrink like a failed step
            if (tau < 1e-8 * tau0)
                throw StallDetected("flow: no meshable descent step at defect " +
                                    std::to_string(sg.defect));
            continue;
        }
        if (tev.en.total < state.energy.total) {
            const ShapeGradient tg = shape_gradient(tev.mesh, tev.sol, trial, m);
            FlowState accepted = detail::make_state(state.step + 1, trial, tev, tg.defect, tau);
            return accepted;
        }
        tau *= 0.5;
        if (tau < 1e-8 * tau0)
            throw StallDetected("flow: energy did not decrease at defect " +
                                std::to_string(sg.defect));
    }
}

enum class FlowStatus { Converged, MaxSteps, Stalled };

struct FlowResult {
    std::vector<FlowState> states;
    FlowStatus status = FlowStatus::MaxSteps;
};

inline FlowResult run_flow(const StarBoundary& sb0, double m, double V0, const FlowConfig& cfg0) {
    FlowResult res;
    FlowConfig cfg = cfg0;
    if (cfg.kmax <= 0) cfg.kmax = clamp(2 * sb0.max_mode_order(), 4, 64);
    StarBoundary shape = sb0.rescaled_to_area(V0);
    shape.require_positive();
    {
        const ShapeEvaluation ev = evaluate_shape(shape, m, cfg.h, std::nullopt, cfg.solver_tol);
        const ShapeGradient sg = shape_gradient(ev.mesh, ev.sol, shape, m);
        res.states.push_back(detail::make_state(0, shape, ev, sg.defect, 0.0));
    }
    while (true) {
        const FlowState& cur = res.states.back();
        if (cur.defect <= cfg.defect_tol) {
            res.status = FlowStatus::Converged;
            return res;
        }
        if (cur.step >= cfg.max_steps) {
            res.status = FlowStatus::MaxSteps;
            return res;
        }
        try {
            FlowState next = flow_step(cur, m, cfg.tau0, cfg);
            if (next.tau == 0.0 && next.step == cur.step) {
                res.status = FlowStatus::Converged;  // no-op step at tolerance
                return res;
            }
            res.states.push_back(std::move(next));
        } catch (const StallDetected&) {
            res.status = FlowStatus::Stalled;
            return res;
        }
    }
}

}  // namespace insul
