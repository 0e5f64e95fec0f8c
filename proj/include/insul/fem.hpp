#pragma once

// P1 assembly and matrix-free conjugate-gradient solves. The insulation
// operator K + sigma b b^T (sigma = 1/m) is applied without forming the
// rank-one update; K alone is singular on constants, the combined operator
// is positive definite.

#include <functional>

#include "insul/mesh.hpp"

namespace insul {

struct SparseOperator {
    std::vector<int> row_offsets;
    std::vector<int> column_indices;
    std::vector<double> values;
    int dim = 0;

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        for (int i = 0; i < dim; ++i) {
            double s = 0.0;
            for (int p = row_offsets[i]; p < row_offsets[i + 1]; ++p)
                s += values[p] * x[column_indices[p]];
            y[i] = s;
        }
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(dim);
        apply(x, y);
        return y;
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(dim, 0.0);
        for (int i = 0; i < dim; ++i)
            for (int p = row_offsets[i]; p < row_offsets[i + 1]; ++p)
                if (column_indices[p] == i) d[i] += values[p];
        return d;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }
};

namespace detail {

class TripletAccumulator {
public:
    explicit TripletAccumulator(int dim) : dim_(dim), entries_(dim) {}

    void add(int i, int j, double v) {
        for (auto& [col, val] : entries_[i]) {
            if (col == j) {
                val += v;
                return;
            }
        }
        entries_[i].push_back({j, v});
    }

    SparseOperator build() {
        SparseOperator op;
        op.dim = dim_;
        op.row_offsets.resize(dim_ + 1, 0);
        for (int i = 0; i < dim_; ++i) {
            std::sort(entries_[i].begin(), entries_[i].end());
            op.row_offsets[i + 1] = op.row_offsets[i] + static_cast<int>(entries_[i].size());
        }
        op.column_indices.reserve(op.row_offsets[dim_]);
        op.values.reserve(op.row_offsets[dim_]);
        for (int i = 0; i < dim_; ++i) {
            for (auto& [col, val] : entries_[i]) {
                op.column_indices.push_back(col);
                op.values.push_back(val);
            }
        }
        return op;
    }

private:
    int dim_;
    std::vector<std::vector<std::pair<int, double>>> entries_;
};

}  // namespace detail

inline SparseOperator assemble_stiffness(const Mesh& mesh) {
    detail::TripletAccumulator acc(mesh.num_vertices());
    for (const auto& tr : mesh.triangles) {
        const Point2 p0 = mesh.vertices[tr[0]], p1 = mesh.vertices[tr[1]], p2 = mesh.vertices[tr[2]];
        const double det = (p1 - p0).cross(p2 - p0);
        const double area = 0.5 * det;
        // Constant P1 gradients: grad phi_a = (perp edge opposite a) / det.
        const Point2 g[3] = {{(p1.y - p2.y) / det, (p2.x - p1.x) / det},
                             {(p2.y - p0.y) / det, (p0.x - p2.x) / det},
                             {(p0.y - p1.y) / det, (p1.x - p0.x) / det}};
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c) acc.add(tr[a], tr[c], area * g[a].dot(g[c]));
    }
    return acc.build();
}

// Consistent P1 mass matrix.
inline SparseOperator assemble_mass(const Mesh& mesh) {
    detail::TripletAccumulator acc(mesh.num_vertices());
    for (const auto& tr : mesh.triangles) {
        const double area = 0.5 * (mesh.vertices[tr[1]] - mesh.vertices[tr[0]])
                                      .cross(mesh.vertices[tr[2]] - mesh.vertices[tr[0]]);
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c) acc.add(tr[a], tr[c], area / (a == c ? 6.0 : 12.0));
    }
    return acc.build();
}

// b_i = int_boundary phi_i ds (exact for P1 traces: trapezoid lumping).
inline std::vector<double> assemble_boundary_vector(const Mesh& mesh) {
    std::vector<double> b(mesh.num_vertices(), 0.0);
    const auto bnd = mesh.boundary();
    const auto w = boundary_weights(mesh);
    for (std::size_t i = 0; i < bnd.size(); ++i) b[bnd[i]] += w[i];
    return b;
}

struct SourceSpec {
    bool is_constant = true;
    double constant = 1.0;
    std::vector<double> nodal;  // used when !is_constant

    static SourceSpec Constant(double c) { return {true, c, {}}; }
    static SourceSpec Nodal(std::vector<double> v) { return {false, 0.0, std::move(v)}; }
};

inline std::vector<double> assemble_load(const Mesh& mesh, const SourceSpec& f) {
    const int n = mesh.num_vertices();
    if (!f.is_constant && static_cast<int>(f.nodal.size()) != n)
        throw DimensionMismatch("load: nodal source length does not match mesh");
    std::vector<double> F(n, 0.0);
    for (const auto& tr : mesh.triangles) {
        const double area = 0.5 * (mesh.vertices[tr[1]] - mesh.vertices[tr[0]])
                                      .cross(mesh.vertices[tr[2]] - mesh.vertices[tr[0]]);
        if (f.is_constant) {
            for (int a = 0; a < 3; ++a) F[tr[a]] += f.constant * area / 3.0;
        } else {
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c) F[tr[a]] += f.nodal[tr[c]] * area / (a == c ? 6.0 : 12.0);
        }
    }
    return F;
}

struct RankOneSystem {
    SparseOperator K;
    std::vector<double> b;
    double sigma = 1.0;  // 1/m
    std::vector<double> F;
    double m = 1.0;

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        K.apply(x, y);
        double bx = 0.0;
        for (int i = 0; i < K.dim; ++i) bx += b[i] * x[i];
        bx *= sigma;
        for (int i = 0; i < K.dim; ++i) y[i] += bx * b[i];
    }
};

inline RankOneSystem assemble(const Mesh& mesh, double m, const SourceSpec& f) {
    if (!(m > 0.0)) throw Error("assemble: mass must be positive");
    RankOneSystem sys;
    sys.K = assemble_stiffness(mesh);
    sys.b = assemble_boundary_vector(mesh);
    sys.F = assemble_load(mesh, f);
    sys.m = m;
    sys.sigma = 1.0 / m;
    return sys;
}

// ---- conjugate gradients -----------------------------------------------------

struct CgResult {
    int iterations = 0;
    double residual = 0.0;  // relative
};

// Preconditioned CG for an SPD operator given as a callback. The optional
// projector is applied to the preconditioned direction and keeps iterates in
// the complement of a known kernel (constants for pure Neumann operators).
inline CgResult conjugate_gradient(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply_A,
    const std::vector<double>& precond_diag, const std::vector<double>& rhs,
    std::vector<double>& x, double tol, int max_iter,
    const std::function<void(std::vector<double>&)>& project = nullptr) {
    const int n = static_cast<int>(rhs.size());
    x.assign(n, 0.0);
    std::vector<double> r = rhs;
    if (project) project(r);
    double rhs_norm = 0.0;
    for (double v : r) rhs_norm += v * v;
    rhs_norm = std::sqrt(rhs_norm);
    if (rhs_norm == 0.0) return {0, 0.0};

    std::vector<double> z(n), p(n), Ap(n);
    for (int i = 0; i < n; ++i) z[i] = r[i] / precond_diag[i];
    if (project) project(z);
    p = z;
    double rz = 0.0;
    for (int i = 0; i < n; ++i) rz += r[i] * z[i];

    CgResult res;
    for (int it = 0; it < max_iter; ++it) {
        apply_A(p, Ap);
        double pAp = 0.0;
        for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        const double alpha = rz / pAp;
        double rnorm = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
            rnorm += r[i] * r[i];
        }
        res.iterations = it + 1;
        res.residual = std::sqrt(rnorm) / rhs_norm;
        if (res.residual <= tol) return res;
        for (int i = 0; i < n; ++i) z[i] = r[i] / precond_diag[i];
        if (project) project(z);
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw NoConvergence("conjugate gradients: relative residual " + std::to_string(res.residual) +
                        " after " + std::to_string(max_iter) + " iterations");
}

// ---- solutions ----------------------------------------------------------------

struct FemSolution {
    std::vector<double> nodal;
    std::vector<Point2> grad;        // constant per triangle
    BoundaryField trace;
    double normal_derivative = 0.0;  // boundary-condition value -(1/m) b.U
    double residual = 0.0;
    int iterations = 0;
};

inline std::vector<Point2> recover_gradients(const Mesh& mesh, const std::vector<double>& U) {
    std::vector<Point2> g(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Point2 p0 = mesh.vertices[tr[0]], p1 = mesh.vertices[tr[1]], p2 = mesh.vertices[tr[2]];
        const double det = (p1 - p0).cross(p2 - p0);
        const Point2 gb[3] = {{(p1.y - p2.y) / det, (p2.x - p1.x) / det},
                              {(p2.y - p0.y) / det, (p0.x - p2.x) / det},
                              {(p0.y - p1.y) / det, (p1.x - p0.x) / det}};
        Point2 s{0.0, 0.0};
        for (int a = 0; a < 3; ++a) s = s + gb[a] * U[tr[a]];
        g[t] = s;
    }
    return g;
}

inline BoundaryField extract_trace(const Mesh& mesh, const std::vector<double>& U) {
    const auto bnd = mesh.boundary();
    std::vector<double> tr(bnd.size());
    for (std::size_t i = 0; i < bnd.size(); ++i) tr[i] = U[bnd[i]];
    return make_boundary_field(mesh, tr);
}

inline FemSolution solve_insulation_linear(const Mesh& mesh, const RankOneSystem& sys, double tol = 1e-10) {
    if (sys.K.dim != mesh.num_vertices())
        throw DimensionMismatch("solve: system dimension does not match mesh");
    std::vector<double> diag = sys.K.diagonal();
    for (int i = 0; i < sys.K.dim; ++i) diag[i] += sys.sigma * sq(sys.b[i]);
    std::vector<double> U;
    const CgResult cg = conjugate_gradient(
        [&](const std::vector<double>& x, std::vector<double>& y) { sys.apply(x, y); }, diag,
        sys.F, U, tol, 10 * sys.K.dim);

    FemSolution sol;
    sol.nodal = std::move(U);
    sol.grad = recover_gradients(mesh, sol.nodal);
    sol.trace = extract_trace(mesh, sol.nodal);
    double bU = 0.0, sumb = 0.0, sumF = 0.0;
    for (int i = 0; i < sys.K.dim; ++i) {
        bU += sys.b[i] * sol.nodal[i];
        sumb += sys.b[i];
        sumF += sys.F[i];
    }
    // Testing against the constant vector gives b.U = m (sum F)/(sum b)
    // identically for the discrete system; enforce it as a solve postcondition.
    const double target = sys.m * sumF / sumb;
    const double allowed = std::max(1e-8, 10.0 * tol);
    if (std::abs(bU - target) > allowed * std::max({std::abs(bU), std::abs(target), 1e-30}))
        throw NoConvergence("solve: conservation identity off by " + std::to_string(bU - target));
    sol.normal_derivative = -sys.sigma * bU;
    sol.residual = cg.residual;
    sol.iterations = cg.iterations;
    return sol;
}

// -Laplace v = 0 with du/dnu = g, gauge-fixed to zero boundary arclength mean.
inline FemSolution solve_harmonic_neumann(const Mesh& mesh, const BoundaryField& g, double tol = 1e-10) {
    const auto bnd = mesh.boundary();
    if (g.values.size() != bnd.size())
        throw DimensionMismatch("harmonic solve: boundary data does not match mesh boundary");
    const int n = mesh.num_vertices();
    std::vector<double> rhs(n, 0.0);
    double gmax = 0.0;
    for (std::size_t i = 0; i < bnd.size(); ++i) {
        rhs[bnd[i]] += g.weights[i] * g.values[i];
        gmax = std::max(gmax, std::abs(g.values[i]));
    }
    const double total = std::accumulate(rhs.begin(), rhs.end(), 0.0);
    const double perim = g.perimeter();
    if (std::abs(total) > 1e-8 * std::max(gmax, 1e-300) * perim)
        throw IncompatibleData("harmonic solve: boundary data integrates to " + std::to_string(total));
    // Consistency projection onto the range of the singular Neumann operator.
    for (double& v : rhs) v -= total / n;

    const SparseOperator K = assemble_stiffness(mesh);
    std::vector<double> diag = K.diagonal();
    auto project = [n](std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        for (double& x : v) x -= mean;
    };
    std::vector<double> V;
    const CgResult cg = conjugate_gradient(
        [&](const std::vector<double>& x, std::vector<double>& y) { K.apply(x, y); }, diag, rhs, V,
        tol, 10 * n, project);

    FemSolution sol;
    sol.nodal = std::move(V);
    // Zero boundary arclength mean.
    double bmean = 0.0;
    const auto w = boundary_weights(mesh);
    for (std::size_t i = 0; i < bnd.size(); ++i) bmean += w[i] * sol.nodal[bnd[i]];
    bmean /= perim;
    for (double& v : sol.nodal) v -= bmean;
    sol.grad = recover_gradients(mesh, sol.nodal);
    sol.trace = extract_trace(mesh, sol.nodal);
    sol.residual = cg.residual;
    sol.iterations = cg.iterations;
    return sol;
}

// Outward normal derivative at boundary vertices recovered from adjacent
// triangle gradients (area-weighted); O(h) accurate, used as a cross-check
// against the exact boundary-condition value.
inline std::vector<double> recovered_normal_derivative(const Mesh& mesh, const FemSolution& sol) {
    const auto bnd = mesh.boundary();
    std::vector<Point2> gavg(mesh.num_vertices(), {0.0, 0.0});
    std::vector<double> garea(mesh.num_vertices(), 0.0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const double area = mesh.triangle_area(static_cast<int>(t));
        for (int v : mesh.triangles[t]) {
            gavg[v] = gavg[v] + sol.grad[t] * area;
            garea[v] += area;
        }
    }
    std::vector<double> dn(bnd.size());
    for (std::size_t i = 0; i < bnd.size(); ++i) {
        const Point2 gv = gavg[bnd[i]] * (1.0 / garea[bnd[i]]);
        dn[i] = gv.dot(mesh.boundary_normals[i]);
    }
    return dn;
}

}  // namespace insul
