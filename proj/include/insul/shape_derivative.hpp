#pragma once

// Hadamard shape derivative of the insulation energy on star-shaped domains,
// finite-difference oracles for it, and the modal second variation at the
// ball.
//
// The boundary density is
//     g = 1/2 |grad_tan u|^2 - 1/2 (du/dnu)^2 - u - (du/dnu) u H,
// with du/dnu the nonlocal boundary-condition constant -(1/m) int u and H the
// analytic curvature of the Fourier shape; both choices remove the dominant
// discretization noise from the stationarity defect. The sign of the u term
// is fixed by the finite-difference pairing gate (the +u variant fails it by
// an order of magnitude).

#include "insul/energy.hpp"

namespace insul {

struct ShapeGradient {
    BoundaryField density;   // g at boundary nodes
    double mean = 0.0;       // arclength-weighted mean of g
    double defect = 0.0;     // max g - min g; zero exactly at stationary shapes
    BoundaryField velocity;  // zeta = -(g - mean); integrates to zero
};

inline ShapeGradient shape_gradient(const Mesh& mesh, const FemSolution& sol,
                                    const StarBoundary& sb, double m, double u_sign = -1.0) {
    if (mesh.boundary_loops.size() != 1)
        throw Error("shape_gradient: expected a single-loop star mesh");
    const auto& loop = mesh.boundary_loops[0];
    const std::size_t n = loop.size();
    if (sol.trace.values.size() != n)
        throw DimensionMismatch("shape_gradient: solution does not match mesh boundary");

    double tmin = 1e300;
    for (double v : sol.trace.values) tmin = std::min(tmin, v);
    if (tmin < -1e-8)
        throw NegativeTrace("shape_gradient: trace reaches " + std::to_string(tmin) +
                            "; the linear path is invalid here, use the eps solver");

    const double dun = sol.normal_derivative;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 prev = mesh.vertices[loop[(i + n - 1) % n]];
        const Point2 cur = mesh.vertices[loop[i]];
        const Point2 next = mesh.vertices[loop[(i + 1) % n]];
        const double dtan = (sol.trace.values[(i + 1) % n] - sol.trace.values[(i + n - 1) % n]) /
                            (dist(prev, cur) + dist(cur, next));
        const double u = sol.trace.values[i];
        const double H = sb.curvature(mesh.boundary_theta[i]);
        g[i] = 0.5 * dtan * dtan - 0.5 * dun * dun + u_sign * u - dun * u * H;
    }

    ShapeGradient sg;
    sg.density = make_boundary_field(mesh, g);
    sg.mean = sg.density.mean();
    sg.defect = *std::max_element(g.begin(), g.end()) - *std::min_element(g.begin(), g.end());
    std::vector<double> zeta(n);
    for (std::size_t i = 0; i < n; ++i) zeta[i] = -(g[i] - sg.mean);
    sg.velocity = make_boundary_field(mesh, zeta);
    return sg;
}

// Pairing of the gradient density against a normal speed: int (g - mean) zeta ds.
inline double gradient_pairing(const ShapeGradient& sg, const std::vector<double>& zeta) {
    if (zeta.size() != sg.density.values.size())
        throw DimensionMismatch("gradient_pairing: speed does not match boundary");
    double s = 0.0;
    for (std::size_t i = 0; i < zeta.size(); ++i)
        s += sg.density.weights[i] * (sg.density.values[i] - sg.mean) * zeta[i];
    return s;
}

// ---- normal-speed fields in modal form ----------------------------------------

struct ModalVelocity {
    std::vector<FourierMode> terms;  // zeta(theta) = sum a cos k theta + b sin k theta

    static ModalVelocity cosine(int k, double amplitude = 1.0) { return {{{k, amplitude, 0.0}}}; }
    static ModalVelocity sine(int k, double amplitude = 1.0) { return {{{k, 0.0, amplitude}}}; }

    double operator()(double theta) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.a * std::cos(t.k * theta) + t.b * std::sin(t.k * theta);
        return s;
    }

    int max_order() const {
        int k = 0;
        for (const auto& t : terms) k = std::max(k, t.k);
        return k;
    }
};

namespace detail {

// Fourier coefficients of a periodic function sampled on a fine uniform grid.
inline void fourier_project(const std::function<double(double)>& f, int kmax, double& c0,
                            std::vector<FourierMode>& modes, int ngrid = 4096) {
    std::vector<double> vals(ngrid);
    for (int i = 0; i < ngrid; ++i) vals[i] = f(2.0 * kPi * i / ngrid);
    c0 = std::accumulate(vals.begin(), vals.end(), 0.0) / ngrid;
    modes.clear();
    for (int k = 1; k <= kmax; ++k) {
        double a = 0.0, b = 0.0;
        for (int i = 0; i < ngrid; ++i) {
            const double th = 2.0 * kPi * i / ngrid;
            a += vals[i] * std::cos(k * th);
            b += vals[i] * std::sin(k * th);
        }
        modes.push_back({k, 2.0 * a / ngrid, 2.0 * b / ngrid});
    }
}

}  // namespace detail

// One normal-flow update of a star shape: the speed is arclength-mean-centered
// (so the volume rate vanishes at first order), converted to a radial speed by
// sqrt(r^2+r'^2)/r, low-pass projected onto Fourier modes <= kmax, and the
// result rescaled back to the reference area.
inline StarBoundary normal_flow_update(const StarBoundary& sb,
                                       const std::function<double(double)>& zeta, double t,
                                       int kmax, double V0) {
    // Arclength mean of the speed over the current boundary.
    const int ng = 4096;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < ng; ++i) {
        const double th = 2.0 * kPi * i / ng;
        const RadiusJet j = sb.eval_radius(th);
        const double ds = std::sqrt(j.r * j.r + j.rp * j.rp);
        num += zeta(th) * ds;
        den += ds;
    }
    const double zbar = num / den;

    double c0;
    std::vector<FourierMode> dmodes;
    detail::fourier_project(
        [&](double th) {
            const RadiusJet j = sb.eval_radius(th);
            return t * (zeta(th) - zbar) * std::sqrt(j.r * j.r + j.rp * j.rp) / j.r;
        },
        kmax, c0, dmodes);

    StarBoundary out = sb;
    out.a0 += c0;
    for (const auto& dm : dmodes) {
        if (dm.k > kmax) continue;
        out.set_mode(dm.k, out.mode_coefficient(dm.k, false) + dm.a,
                     out.mode_coefficient(dm.k, true) + dm.b);
    }
    // Drop negligible modes so shapes stay compact representations.
    std::vector<FourierMode> kept;
    for (const auto& mm : out.modes)
        if (std::abs(mm.a) + std::abs(mm.b) > 1e-14 * std::abs(out.a0)) kept.push_back(mm);
    out.modes = std::move(kept);
    out = out.rescaled_to_area(V0);
    out.require_positive();
    return out;
}

// Mesh + solve + energy for one shape; the budget pins mesh cardinalities so
// finite-difference stencils see topologically identical meshes.
struct ShapeEvaluation {
    Mesh mesh;
    RankOneSystem sys;
    FemSolution sol;
    EnergyBreakdown en;
};

inline ShapeEvaluation evaluate_shape(const StarBoundary& sb, double m, double h,
                                      std::optional<MeshBudget> budget = std::nullopt,
                                      double tol = 1e-10) {
    ShapeEvaluation ev;
    ev.mesh = triangulate(sb, h, budget);
    ev.sys = assemble(ev.mesh, m, SourceSpec::Constant(1.0));
    ev.sol = solve_insulation_linear(ev.mesh, ev.sys, tol);
    ev.en = energy(ev.mesh, ev.sol.nodal, m);
    return ev;
}

struct FdDerivative {
    double value = 0.0;       // central difference at dt/2
    double coarse = 0.0;      // central difference at dt
    double richardson = 0.0;  // (4 value - coarse) / 3
};

// d/dt of the minimized energy along the volume-preserving normal flow of
// the shape by a modal speed, by central differences.
inline FdDerivative fd_shape_derivative(const StarBoundary& sb, const ModalVelocity& zeta, double m,
                                        double dt, double h) {
    const double V0 = sb.analytic_area();
    const int kmax = clamp(2 * std::max(sb.max_mode_order(), zeta.max_order()), 8, 64);
    const MeshBudget budget = mesh_budget(sb, h);
    auto J = [&](double t) {
        const StarBoundary s = normal_flow_update(sb, [&](double th) { return zeta(th); }, t, kmax, V0);
        return evaluate_shape(s, m, h, budget).en.total;
    };
    FdDerivative out;
    out.coarse = (J(dt) - J(-dt)) / (2.0 * dt);
    out.value = (J(0.5 * dt) - J(-0.5 * dt)) / dt;
    out.richardson = (4.0 * out.value - out.coarse) / 3.0;
    return out;
}

// ---- second variation at the ball ----------------------------------------------

struct ModeStability {
    int k = 0;
    double amplitude = 1.0;
    double Q_closed = 0.0;
    double Q_quadrature = std::numeric_limits<double>::quiet_NaN();
};

struct ModalStability {
    int n = 2;
    double R = 1.0;
    double m = 1.0;
    std::vector<ModeStability> per_mode;
    double total = 0.0;  // sum amplitude^2 Q_k
    bool all_nonnegative = true;
};

// Closed form at n=2 for zeta = cos k theta of unit amplitude:
//   Q_k = (pi R^2/4)(1 - 1/k) + m (k^2 - 1)/8,
// assembled from int zeta^2 ds = pi R, int v zeta ds = pi R^2/(2k) with the
// harmonic field v = r^k cos(k theta)/(2k R^{k-1}), and
// int |grad_tan zeta|^2 ds = pi k^2/R.
inline double second_variation_mode_closed(double R, double m, int k) {
    if (k < 1) throw Error("second variation: mode order must be >= 1");
    return (kPi * R * R / 4.0) * (1.0 - 1.0 / k) + m * (k * k - 1.0) / 8.0;
}

// The n-dimensional quadratic form with caller-supplied boundary integrals
// (int zeta^2, int v zeta, int |grad_tan zeta|^2).
inline double second_variation_general(int n, double R, double m, double zeta_sq, double v_zeta,
                                       double tan_grad_sq) {
    if (n < 2) throw UnsupportedDimension("second variation: dimension must be at least 2");
    const double wn = unit_ball_volume(n);
    return R / (n * n) * zeta_sq - v_zeta / n +
           m / (n * n * n * wn * std::pow(R, n - 3)) * (tan_grad_sq - (n - 1.0) / (R * R) * zeta_sq);
}

// Quadrature recomputation of Q_k on a disk mesh: the velocity field comes
// from the FEM harmonic solve with Neumann data zeta/n, the boundary
// integrals from trapezoid quadrature with the analytic tangential
// derivative of the modal speed.
inline double second_variation_mode_quadrature(const Mesh& mesh, double R, double m, int k) {
    const auto& loop = mesh.boundary_loops.at(0);
    const std::size_t nb = loop.size();
    std::vector<double> zeta(nb), dzeta(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        const double th = mesh.boundary_theta[i];
        zeta[i] = std::cos(k * th);
        dzeta[i] = -k * std::sin(k * th) / R;  // d/ds on the circle of radius R
    }
    BoundaryField zf = make_boundary_field(mesh, zeta);
    BoundaryField data = zf;
    for (double& v : data.values) v *= 0.5;  // zeta / n at n = 2
    const FemSolution v = solve_harmonic_neumann(mesh, data);
    double zeta_sq = 0.0, v_zeta = 0.0, tan_sq = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        zeta_sq += zf.weights[i] * sq(zeta[i]);
        v_zeta += zf.weights[i] * v.trace.values[i] * zeta[i];
        tan_sq += zf.weights[i] * sq(dzeta[i]);
    }
    return second_variation_general(2, R, m, zeta_sq, v_zeta, tan_sq);
}

inline ModalStability second_variation_ball(int n, double R, double m,
                                            const std::vector<std::pair<int, double>>& modes,
                                            bool with_quadrature = false, double h = 0.02) {
    if (n != 2 && with_quadrature)
        throw UnsupportedDimension("second variation: quadrature path is available for n = 2 only");
    if (n != 2)
        throw UnsupportedDimension(
            "second variation: closed-form modal table is available for n = 2; use "
            "second_variation_general with supplied integrals otherwise");
    ModalStability ms;
    ms.n = n;
    ms.R = R;
    ms.m = m;
    Mesh mesh;
    if (with_quadrature) mesh = triangulate(StarBoundary::circle(R), h);
    for (const auto& [k, amp] : modes) {
        ModeStability mode;
        mode.k = k;
        mode.amplitude = amp;
        mode.Q_closed = second_variation_mode_closed(R, m, k);
        if (with_quadrature) mode.Q_quadrature = second_variation_mode_quadrature(mesh, R, m, k);
        ms.total += amp * amp * mode.Q_closed;
        if (mode.Q_closed < -1e-10) ms.all_nonnegative = false;
        ms.per_mode.push_back(mode);
    }
    return ms;
}

// d^2/dt^2 of the minimized energy through the volume-preserving normal flow
// of the disk, by a second central difference.
inline double second_variation_fd(double R, double m, const ModalVelocity& zeta, double dt,
                                  double h = 0.02) {
    const StarBoundary disk = StarBoundary::circle(R);
    const double V0 = disk.analytic_area();
    const int kmax = clamp(2 * zeta.max_order(), 8, 64);
    const MeshBudget budget = mesh_budget(disk, h);
    auto J = [&](double t) {
        const StarBoundary s = normal_flow_update(disk, [&](double th) { return zeta(th); }, t, kmax, V0);
        return evaluate_shape(s, m, h, budget).en.total;
    };
    return (J(dt) - 2.0 * J(0.0) + J(-dt)) / (dt * dt);
}

// Both sides of the Steklov trace inequality (1/n) int zeta v <= (R/n^2) int zeta^2
// for the harmonic field driven by zeta/n; the radius is inferred from the
// perimeter (the check targets disk meshes).
struct SteklovInequalityReport {
    double left = 0.0;
    double right = 0.0;
    double ratio = 0.0;
    bool holds = false;
};

inline SteklovInequalityReport steklov_inequality_check(const Mesh& mesh, const BoundaryField& zeta) {
    const double P = zeta.perimeter();
    const double R = P / (2.0 * kPi);
    if (std::abs(zeta.integral()) > 1e-8 * P * std::max(1.0, zeta.integral_abs() / P))
        throw IncompatibleData("steklov check: speed field must have zero boundary mean");
    BoundaryField data = zeta;
    for (double& v : data.values) v *= 0.5;
    const FemSolution v = solve_harmonic_neumann(mesh, data);
    SteklovInequalityReport rep;
    for (std::size_t i = 0; i < zeta.values.size(); ++i) {
        rep.left += 0.5 * zeta.weights[i] * zeta.values[i] * v.trace.values[i];
        rep.right += 0.25 * R * zeta.weights[i] * sq(zeta.values[i]);
    }
    rep.ratio = rep.left / rep.right;
    rep.holds = rep.left <= rep.right * 1.01;
    return rep;
}

}  // namespace insul
