#pragma once

// The insulation energy and its decomposition, the closed-form optimal
// material distribution, and the two analytic reference solutions (ball and
// annulus) used as oracles throughout.

#include "insul/fem.hpp"

namespace insul {

struct EnergyBreakdown {
    double dirichlet = 0.0;  // (1/2) int |grad u|^2
    double boundary = 0.0;   // (1/2m) (int |trace| ds)^2
    double load = 0.0;       // int f u
    double total = 0.0;      // dirichlet + boundary - load
};

inline EnergyBreakdown energy(const Mesh& mesh, const std::vector<double>& U, double m,
                              const SourceSpec& f = SourceSpec::Constant(1.0)) {
    if (static_cast<int>(U.size()) != mesh.num_vertices())
        throw DimensionMismatch("energy: nodal vector does not match mesh");
    EnergyBreakdown e;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Point2 p0 = mesh.vertices[tr[0]], p1 = mesh.vertices[tr[1]], p2 = mesh.vertices[tr[2]];
        const double det = (p1 - p0).cross(p2 - p0);
        const Point2 g[3] = {{(p1.y - p2.y) / det, (p2.x - p1.x) / det},
                             {(p2.y - p0.y) / det, (p0.x - p2.x) / det},
                             {(p0.y - p1.y) / det, (p1.x - p0.x) / det}};
        Point2 gu{0.0, 0.0};
        for (int a = 0; a < 3; ++a) gu = gu + g[a] * U[tr[a]];
        e.dirichlet += 0.25 * det * gu.dot(gu);
    }
    const BoundaryField trace = extract_trace(mesh, U);
    e.boundary = sq(trace.integral_abs()) / (2.0 * m);
    const std::vector<double> F = assemble_load(mesh, f);
    for (std::size_t i = 0; i < U.size(); ++i) e.load += F[i] * U[i];
    e.total = e.dirichlet + e.boundary - e.load;
    return e;
}

struct MaterialDistribution {
    BoundaryField h;  // thickness density per arclength
    double mass = 0.0;
};

// h = m |u| / int_boundary |u| ds; zero-homogeneous in the trace.
inline MaterialDistribution optimal_h(const BoundaryField& trace, double m) {
    const double denom = trace.integral_abs();
    if (!(denom > 0.0)) throw ZeroTrace("optimal_h: boundary trace integrates to zero");
    MaterialDistribution md;
    md.mass = m;
    md.h.weights = trace.weights;
    md.h.values.resize(trace.values.size());
    for (std::size_t i = 0; i < trace.values.size(); ++i)
        md.h.values[i] = m * std::abs(trace.values[i]) / denom;
    return md;
}

// Energy in the pre-reduced form with an explicit material distribution:
// (1/2) int |grad u|^2 + (1/2) int u^2/h ds - int f u. Infinite where material
// is absent but the trace is not.
inline double material_energy(const Mesh& mesh, const std::vector<double>& U,
                              const MaterialDistribution& md,
                              const SourceSpec& f = SourceSpec::Constant(1.0)) {
    const EnergyBreakdown e = energy(mesh, U, /*m=*/1.0, f);
    const BoundaryField trace = extract_trace(mesh, U);
    double bterm = 0.0;
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        const double u = trace.values[i];
        const double h = md.h.values[i];
        if (h > 0.0)
            bterm += trace.weights[i] * u * u / h;
        else if (u != 0.0)
            return std::numeric_limits<double>::infinity();
    }
    return e.dirichlet + 0.5 * bterm - e.load;
}

inline double unit_ball_volume(int n) {
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

struct AnalyticSolution {
    enum class Kind { Ball, Annulus };
    Kind kind = Kind::Ball;
    int n = 2;
    double R = 1.0;
    double m = 1.0;
    double c1 = 0.0, c2 = 0.0;  // annulus only

    double value(Point2 x) const {
        const double r2 = x.dot(x);
        if (kind == Kind::Ball)
            return (R * R - r2) / (2.0 * n) + m / (n * n * unit_ball_volume(n) * std::pow(R, n - 2));
        const double r = std::sqrt(r2);
        return -0.25 * r2 + c1 * std::log(r) + c2;
    }

    Point2 gradient(Point2 x) const {
        if (kind == Kind::Ball) return x * (-1.0 / n);
        const double r2 = x.dot(x);
        return x * (c1 / r2 - 0.5);
    }

    double boundary_value() const {
        if (kind == Kind::Ball) return m / (n * n * unit_ball_volume(n) * std::pow(R, n - 2));
        throw Error("boundary_value: annulus has two boundary circles");
    }
};

inline AnalyticSolution analytic_ball(int n, double R, double m) {
    if (n < 2) throw UnsupportedDimension("analytic_ball: dimension must be at least 2");
    if (!(R > 0.0 && m > 0.0)) throw Error("analytic_ball: need R > 0 and m > 0");
    AnalyticSolution s;
    s.kind = AnalyticSolution::Kind::Ball;
    s.n = n;
    s.R = R;
    s.m = m;
    return s;
}

inline double annulus_mass_limit() { return 3.0 * kPi - 4.0 * kPi * std::log(2.0); }

// Radial solution on the annulus 1 < |x| < 2; the trace vanishes on the outer
// circle, so this sits in the obstacle regime of the boundary condition.
inline AnalyticSolution analytic_annulus(double m) {
    if (!(m > 0.0 && m < annulus_mass_limit()))
        throw MassOutOfRange("analytic_annulus: mass " + std::to_string(m) +
                             " outside (0, " + std::to_string(annulus_mass_limit()) + ")");
    AnalyticSolution s;
    s.kind = AnalyticSolution::Kind::Annulus;
    s.n = 2;
    s.m = m;
    const double ln2 = std::log(2.0);
    s.c1 = (m + 3.0 * kPi) / (2.0 * m + 4.0 * kPi * ln2);
    s.c2 = (2.0 * m - (m - kPi) * ln2) / (2.0 * m + 4.0 * kPi * ln2);
    return s;
}

// Residual of the discrete optimality system at a nodal field: relative
// algebraic residual plus the worst boundary-condition defect of the
// recovered normal derivative (O(h) recovery).
inline std::pair<double, double> el_residual(const Mesh& mesh, const std::vector<double>& U, double m,
                                             const SourceSpec& f = SourceSpec::Constant(1.0)) {
    const RankOneSystem sys = assemble(mesh, m, f);
    if (static_cast<int>(U.size()) != sys.K.dim)
        throw DimensionMismatch("el_residual: nodal vector does not match mesh");
    std::vector<double> r(sys.K.dim);
    sys.apply(U, r);
    double rn = 0.0, fn = 0.0, bU = 0.0;
    for (int i = 0; i < sys.K.dim; ++i) {
        rn += sq(r[i] - sys.F[i]);
        fn += sq(sys.F[i]);
        bU += sys.b[i] * U[i];
    }
    FemSolution tmp;
    tmp.nodal = U;
    tmp.grad = recover_gradients(mesh, U);
    const std::vector<double> dn = recovered_normal_derivative(mesh, tmp);
    double worst = 0.0;
    for (double v : dn) worst = std::max(worst, std::abs(v + bU / m));
    return {std::sqrt(rn / fn), worst};
}

}  // namespace insul
