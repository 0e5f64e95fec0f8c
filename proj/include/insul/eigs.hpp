#pragma once

// Smallest generalized eigenvalues by inverse iteration with inner CG solves
// and deflation of the constant mode: Steklov (boundary mass), Neumann
// Poincare (volume mass), and the signed surrogate of the boundary-coupled
// Poincare inequality.

#include "insul/fem.hpp"

namespace insul {

struct EigenResult {
    double value = 0.0;
    std::vector<double> vector;
    double residual = 0.0;  // ||A x - lambda B x|| / ||x||
    int iterations = 0;
};

namespace detail {

using ApplyFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

inline EigenResult inverse_iteration(int n, const ApplyFn& apply_A, const ApplyFn& apply_B,
                                     const std::vector<double>& precond_diag, double tol,
                                     bool deflate_constants, double cg_tol = 1e-12,
                                     int max_outer = 400) {
    std::vector<double> one_B(n);
    {
        std::vector<double> ones(n, 1.0);
        apply_B(ones, one_B);
    }
    const double oneB1 = std::accumulate(one_B.begin(), one_B.end(), 0.0);

    auto deflate = [&](std::vector<double>& x) {
        if (!deflate_constants) return;
        double xB1 = 0.0;
        for (int i = 0; i < n; ++i) xB1 += one_B[i] * x[i];
        const double c = xB1 / oneB1;
        for (double& v : x) v -= c;
    };

    auto b_norm = [&](const std::vector<double>& x) {
        std::vector<double> Bx(n);
        apply_B(x, Bx);
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += x[i] * Bx[i];
        return std::sqrt(s);
    };

    // Deterministic pseudo-random start with a nonzero B-component.
    std::vector<double> x(n);
    CounterRng rng(0x5E1F5EEDULL, 17);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    deflate(x);
    {
        const double nb = b_norm(x);
        for (double& v : x) v /= nb;
    }

    auto project_mean = [n](std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        for (double& u : v) u -= mean;
    };

    std::vector<double> Bx(n), y, Ax(n);
    EigenResult res;
    for (int it = 0; it < max_outer; ++it) {
        apply_B(x, Bx);
        if (deflate_constants) project_mean(Bx);  // keep the singular solve consistent
        conjugate_gradient(apply_A, precond_diag, Bx, y, cg_tol, 20 * n,
                           deflate_constants ? std::function<void(std::vector<double>&)>(project_mean)
                                             : nullptr);
        deflate(y);
        const double nb = b_norm(y);
        if (!(nb > 0.0)) throw NoConvergence("inverse iteration: collapsed onto the deflated space");
        for (double& v : y) v /= nb;
        x = y;

        apply_A(x, Ax);
        apply_B(x, Bx);
        double xAx = 0.0, xBx = 0.0;
        for (int i = 0; i < n; ++i) {
            xAx += x[i] * Ax[i];
            xBx += x[i] * Bx[i];
        }
        const double lambda = xAx / xBx;
        double rnorm = 0.0, xnorm = 0.0;
        for (int i = 0; i < n; ++i) {
            rnorm += sq(Ax[i] - lambda * Bx[i]);
            xnorm += sq(x[i]);
        }
        res.value = lambda;
        res.residual = std::sqrt(rnorm / xnorm);
        res.iterations = it + 1;
        if (res.residual <= tol) {
            res.vector = x;
            return res;
        }
    }
    throw NoConvergence("inverse iteration: residual " + std::to_string(res.residual) +
                        " after " + std::to_string(res.iterations) + " iterations");
}

}  // namespace detail

// Smallest nonzero eigenvalue of K x = lambda M_b x with the lumped boundary
// mass; 1/R on a disk of radius R.
inline EigenResult stekloff_min(const Mesh& mesh, double tol = 1e-8) {
    const SparseOperator K = assemble_stiffness(mesh);
    const std::vector<double> b = assemble_boundary_vector(mesh);
    const int n = K.dim;
    return detail::inverse_iteration(
        n, [&](const std::vector<double>& x, std::vector<double>& y) { K.apply(x, y); },
        [&](const std::vector<double>& x, std::vector<double>& y) {
            for (int i = 0; i < n; ++i) y[i] = b[i] * x[i];
        },
        K.diagonal(), tol, /*deflate_constants=*/true);
}

// C = 1/mu_1, mu_1 the smallest nonzero Neumann eigenvalue (K x = mu M x).
inline EigenResult neumann_poincare_min_eigenvalue(const Mesh& mesh, double tol = 1e-8) {
    const SparseOperator K = assemble_stiffness(mesh);
    const SparseOperator M = assemble_mass(mesh);
    return detail::inverse_iteration(
        K.dim, [&](const std::vector<double>& x, std::vector<double>& y) { K.apply(x, y); },
        [&](const std::vector<double>& x, std::vector<double>& y) { M.apply(x, y); }, K.diagonal(),
        tol, /*deflate_constants=*/true);
}

inline double neumann_poincare_constant(const Mesh& mesh, double tol = 1e-8) {
    return 1.0 / neumann_poincare_min_eigenvalue(mesh, tol).value;
}

// C = 1/lambda_min of (K + b b^T) x = lambda M x; the signed surrogate of the
// boundary-coupled Poincare inequality (a certified one-sided bound, since
// (int |u|)^2 >= (int u)^2).
inline EigenResult robust_poincare_min_eigenvalue(const Mesh& mesh, double tol = 1e-8) {
    const SparseOperator K = assemble_stiffness(mesh);
    const SparseOperator M = assemble_mass(mesh);
    const std::vector<double> b = assemble_boundary_vector(mesh);
    const int n = K.dim;
    std::vector<double> diag = K.diagonal();
    for (int i = 0; i < n; ++i) diag[i] += sq(b[i]);
    return detail::inverse_iteration(
        n,
        [&](const std::vector<double>& x, std::vector<double>& y) {
            K.apply(x, y);
            double bx = 0.0;
            for (int i = 0; i < n; ++i) bx += b[i] * x[i];
            for (int i = 0; i < n; ++i) y[i] += bx * b[i];
        },
        [&](const std::vector<double>& x, std::vector<double>& y) { M.apply(x, y); }, diag, tol,
        /*deflate_constants=*/false);
}

inline double robust_poincare_constant(const Mesh& mesh, double tol = 1e-8) {
    return 1.0 / robust_poincare_min_eigenvalue(mesh, tol).value;
}

}  // namespace insul
