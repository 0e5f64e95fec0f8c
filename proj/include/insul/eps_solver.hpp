#pragma once

// Minimization of the eps-regularized insulation energy by damped Newton
// with continuation: the boundary term (1/2m)(int sqrt(u^2+eps^2) ds)^2 is
// smooth and convex, each eps warm-starts from the previous minimizer, and
// the final iterate approximates the minimizer of the nonsmooth energy.
// This is the only path that remains valid when the trace vanishes on part
// of the boundary (the annulus regime) or the source changes sign.

#include "insul/energy.hpp"

namespace insul {

struct EpsSolution {
    FemSolution sol;
    std::vector<double> eps_values;
    std::vector<double> eps_energies;     // minimal regularized energy per eps (nonincreasing)
    double zero_trace_measure = 0.0;      // arclength of {trace < eps_final}
    double zero_set_flux_defect = 0.0;    // min of du/dnu + (1/m) int u over that set
};

inline std::vector<double> default_eps_schedule() {
    return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
}

namespace detail {

struct EpsEnergyModel {
    const RankOneSystem& sys;
    const std::vector<int>& bnd;
    const std::vector<double>& w;
    double eps;

    double S(const std::vector<double>& U) const {
        double s = 0.0;
        for (std::size_t i = 0; i < bnd.size(); ++i)
            s += w[i] * std::sqrt(sq(U[bnd[i]]) + sq(eps));
        return s;
    }

    double value(const std::vector<double>& U) const {
        std::vector<double> KU(sys.K.dim);
        sys.K.apply(U, KU);
        double quad = 0.0, lin = 0.0;
        for (int i = 0; i < sys.K.dim; ++i) {
            quad += U[i] * KU[i];
            lin += sys.F[i] * U[i];
        }
        return 0.5 * quad + 0.5 * sys.sigma * sq(S(U)) - lin;
    }

    void gradient(const std::vector<double>& U, std::vector<double>& g) const {
        sys.K.apply(U, g);
        const double s = S(U);
        for (std::size_t i = 0; i < bnd.size(); ++i) {
            const int v = bnd[i];
            g[v] += sys.sigma * s * w[i] * U[v] / std::sqrt(sq(U[v]) + sq(eps));
        }
        for (int i = 0; i < sys.K.dim; ++i) g[i] -= sys.F[i];
    }

    // Hessian action: K + sigma (S diag(w eps^2 / (u^2+eps^2)^{3/2}) + q q^T),
    // q_i = w_i u_i / sqrt(u_i^2+eps^2); positive definite for eps > 0.
    void hessian_apply(const std::vector<double>& U, const std::vector<double>& x,
                       std::vector<double>& y) const {
        sys.K.apply(x, y);
        const double s = S(U);
        double qx = 0.0;
        for (std::size_t i = 0; i < bnd.size(); ++i) {
            const int v = bnd[i];
            const double rad = std::sqrt(sq(U[v]) + sq(eps));
            qx += w[i] * U[v] / rad * x[v];
        }
        for (std::size_t i = 0; i < bnd.size(); ++i) {
            const int v = bnd[i];
            const double rad = std::sqrt(sq(U[v]) + sq(eps));
            const double q = w[i] * U[v] / rad;
            const double d = w[i] * sq(eps) / (rad * rad * rad);
            y[v] += sys.sigma * (s * d * x[v] + q * qx);
        }
    }

    std::vector<double> hessian_diag(const std::vector<double>& U) const {
        std::vector<double> d = sys.K.diagonal();
        const double s = S(U);
        for (std::size_t i = 0; i < bnd.size(); ++i) {
            const int v = bnd[i];
            const double rad = std::sqrt(sq(U[v]) + sq(eps));
            const double q = w[i] * U[v] / rad;
            d[v] += sys.sigma * (s * w[i] * sq(eps) / (rad * rad * rad) + sq(q));
        }
        return d;
    }
};

}  // namespace detail

inline EpsSolution solve_insulation_eps(const Mesh& mesh, double m, const SourceSpec& f,
                                        std::vector<double> eps_schedule = default_eps_schedule(),
                                        double tol = 1e-10) {
    if (eps_schedule.empty()) throw Error("eps solve: empty schedule");
    for (std::size_t i = 1; i < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] < eps_schedule[i - 1]))
            throw Error("eps solve: schedule must be strictly decreasing");
    if (eps_schedule.back() > 1e-6)
        throw Error("eps solve: final eps must not exceed 1e-6");

    const RankOneSystem sys = assemble(mesh, m, f);
    const auto bnd = mesh.boundary();
    const auto w = boundary_weights(mesh);
    const int n = sys.K.dim;

    double fnorm = 0.0;
    for (double v : sys.F) fnorm += v * v;
    fnorm = std::sqrt(fnorm);

    EpsSolution out;
    std::vector<double> U(n, 0.0), g(n), d, Ud(n);

    for (double eps : eps_schedule) {
        detail::EpsEnergyModel model{sys, bnd, w, eps};
        double E = model.value(U);
        for (int newton = 0;; ++newton) {
            if (newton >= 80)
                throw NoConvergence("eps solve: Newton did not converge at eps = " +
                                    std::to_string(eps));
            model.gradient(U, g);
            double gnorm = 0.0;
            for (double v : g) gnorm += v * v;
            gnorm = std::sqrt(gnorm);
            if (gnorm <= tol * fnorm) break;

            std::vector<double> rhs(n);
            for (int i = 0; i < n; ++i) rhs[i] = -g[i];
            conjugate_gradient(
                [&](const std::vector<double>& x, std::vector<double>& y) {
                    model.hessian_apply(U, x, y);
                },
                model.hessian_diag(U), rhs, d, std::min(1e-8, tol), 20 * n);

            double gd = 0.0;
            for (int i = 0; i < n; ++i) gd += g[i] * d[i];
            // Once the Newton decrement sinks below the roundoff floor of the
            // energy, descent can no longer be certified by comparing energies;
            // take the unguarded full step (local quadratic regime).
            if (-gd <= 1e-13 * (1.0 + std::abs(E))) {
                for (int i = 0; i < n; ++i) U[i] += d[i];
                E = model.value(U);
                continue;
            }
            double t = 1.0;
            for (;;) {
                for (int i = 0; i < n; ++i) Ud[i] = U[i] + t * d[i];
                const double Et = model.value(Ud);
                if (Et <= E + 1e-4 * t * gd) {
                    U.swap(Ud);
                    E = Et;
                    break;
                }
                t *= 0.5;
                if (t < 1e-14)
                    throw NonDescent("eps solve: line search failed at eps = " + std::to_string(eps));
            }
        }
        out.eps_values.push_back(eps);
        out.eps_energies.push_back(E);
    }

    FemSolution sol;
    sol.nodal = U;
    sol.grad = recover_gradients(mesh, sol.nodal);
    sol.trace = extract_trace(mesh, sol.nodal);
    double bU = 0.0;
    for (int i = 0; i < n; ++i) bU += sys.b[i] * sol.nodal[i];
    sol.normal_derivative = -sys.sigma * bU;
    {
        detail::EpsEnergyModel model{sys, bnd, w, eps_schedule.back()};
        model.gradient(U, g);
        double gnorm = 0.0;
        for (double v : g) gnorm += v * v;
        sol.residual = std::sqrt(gnorm) / fnorm;
    }
    sol.iterations = static_cast<int>(eps_schedule.size());

    // Obstacle-regime diagnostics: where the discrete trace sits below the
    // final eps, report the set size and the worst complementarity value of
    // the recovered flux.
    const double eps_final = eps_schedule.back();
    const std::vector<double> dn = recovered_normal_derivative(mesh, sol);
    double measure = 0.0, worst = 1e300;
    for (std::size_t i = 0; i < bnd.size(); ++i) {
        if (sol.trace.values[i] < eps_final) {
            measure += w[i];
            worst = std::min(worst, dn[i] + sys.sigma * bU);
        }
    }
    out.zero_trace_measure = measure;
    out.zero_set_flux_defect = measure > 0.0 ? worst : 0.0;
    out.sol = std::move(sol);
    return out;
}

}  // namespace insul
