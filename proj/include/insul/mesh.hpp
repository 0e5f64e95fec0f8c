#pragma once

// P1 triangulations with an oriented boundary loop. Star-shaped domains are
// meshed by polar-structured rings stitched by arclength fraction, followed
// by Laplacian smoothing; annuli and rectangles use structured templates.
// Loops are stored with the domain interior on the left, so the right-hand
// edge normal is the outward normal.

#include <array>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "insul/geometry.hpp"

namespace insul {

struct Mesh {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> triangles;          // counterclockwise
    std::vector<std::vector<int>> boundary_loops;       // interior on the left
    std::vector<Point2> boundary_normals;               // per boundary vertex, loop order
    std::vector<double> boundary_theta;                 // polar angle per boundary vertex (star meshes)
    double h_target = 0.0;

    int num_vertices() const { return static_cast<int>(vertices.size()); }

    // Flattened boundary vertex list in loop order.
    std::vector<int> boundary() const {
        std::vector<int> b;
        for (const auto& loop : boundary_loops) b.insert(b.end(), loop.begin(), loop.end());
        return b;
    }

    int num_boundary() const {
        std::size_t n = 0;
        for (const auto& loop : boundary_loops) n += loop.size();
        return static_cast<int>(n);
    }

    double triangle_area(int t) const {
        const auto& tr = triangles[t];
        const Point2 a = vertices[tr[0]], b = vertices[tr[1]], c = vertices[tr[2]];
        return 0.5 * (b - a).cross(c - a);
    }
};

struct BoundaryField {
    std::vector<double> values;   // per boundary vertex in loop order
    std::vector<double> weights;  // trapezoid arclength lumping; sums to the perimeter

    double integral() const {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * values[i];
        return s;
    }

    double integral_abs() const {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * std::abs(values[i]);
        return s;
    }

    double perimeter() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

    double mean() const { return integral() / perimeter(); }
};

struct DomainMetrics {
    double area = 0.0;
    double perimeter = 0.0;
    BoundaryField curvature;
};

// Arclength weights per boundary vertex (half the two adjacent loop edges).
inline std::vector<double> boundary_weights(const Mesh& mesh) {
    std::vector<double> w;
    w.reserve(mesh.num_boundary());
    for (const auto& loop : mesh.boundary_loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 prev = mesh.vertices[loop[(i + n - 1) % n]];
            const Point2 cur = mesh.vertices[loop[i]];
            const Point2 next = mesh.vertices[loop[(i + 1) % n]];
            w.push_back(0.5 * (dist(prev, cur) + dist(cur, next)));
        }
    }
    return w;
}

inline BoundaryField make_boundary_field(const Mesh& mesh, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != mesh.num_boundary())
        throw DimensionMismatch("boundary field: value count does not match boundary size");
    return BoundaryField{values, boundary_weights(mesh)};
}

inline double min_triangle_angle_deg(const Mesh& mesh) {
    double worst = 180.0;
    for (const auto& tr : mesh.triangles) {
        for (int v = 0; v < 3; ++v) {
            const Point2 a = mesh.vertices[tr[v]];
            const Point2 b = mesh.vertices[tr[(v + 1) % 3]];
            const Point2 c = mesh.vertices[tr[(v + 2) % 3]];
            const Point2 u = b - a, w = c - a;
            const double ang = std::atan2(std::abs(u.cross(w)), u.dot(w)) * 180.0 / kPi;
            worst = std::min(worst, ang);
        }
    }
    return worst;
}

// Structural invariants: positive areas, manifold edges, closed simple loops.
inline void validate_mesh(const Mesh& mesh, double min_angle_deg = 20.0) {
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        if (mesh.triangle_area(static_cast<int>(t)) <= 0.0)
            throw MeshQualityFailure("triangle " + std::to_string(t) + " has non-positive area");

    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tr : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int i = tr[e], j = tr[(e + 1) % 3];
            edge_count[{std::min(i, j), std::max(i, j)}]++;
        }
    }
    std::map<std::pair<int, int>, int> loop_edges;
    for (const auto& loop : mesh.boundary_loops) {
        const std::size_t n = loop.size();
        if (n < 3) throw MeshQualityFailure("boundary loop with fewer than 3 vertices");
        std::vector<int> sorted = loop;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw MeshQualityFailure("boundary loop revisits a vertex");
        for (std::size_t i = 0; i < n; ++i) {
            int a = loop[i], b = loop[(i + 1) % n];
            loop_edges[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    for (const auto& [e, c] : edge_count) {
        const bool on_boundary = loop_edges.count(e) > 0;
        if (on_boundary && c != 1)
            throw MeshQualityFailure("boundary edge shared by " + std::to_string(c) + " triangles");
        if (!on_boundary && c != 2)
            throw MeshQualityFailure("interior edge shared by " + std::to_string(c) + " triangles");
    }
    for (const auto& [e, c] : loop_edges)
        if (edge_count.find(e) == edge_count.end())
            throw MeshQualityFailure("boundary loop edge not present in any triangle");

    const double worst = min_triangle_angle_deg(mesh);
    if (worst < min_angle_deg)
        throw MeshQualityFailure("minimum triangle angle " + std::to_string(worst) +
                                 " deg below " + std::to_string(min_angle_deg));
}

namespace detail {

// Outward normals: right-hand normal of the loop traversal, averaged over
// the two adjacent edges.
inline void compute_boundary_normals(Mesh& mesh) {
    mesh.boundary_normals.clear();
    for (const auto& loop : mesh.boundary_loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 prev = mesh.vertices[loop[(i + n - 1) % n]];
            const Point2 cur = mesh.vertices[loop[i]];
            const Point2 next = mesh.vertices[loop[(i + 1) % n]];
            Point2 e0 = cur - prev, e1 = next - cur;
            const double l0 = e0.norm(), l1 = e1.norm();
            Point2 nrm{e0.y / l0 + e1.y / l1, -(e0.x / l0 + e1.x / l1)};
            const double ln = nrm.norm();
            mesh.boundary_normals.push_back({nrm.x / ln, nrm.y / ln});
        }
    }
}

// Stitch two concentric closed polylines (both counterclockwise) into a
// triangle strip, merging by arclength fraction.
inline void stitch_rings(std::vector<std::array<int, 3>>& tris,
                         const std::vector<int>& inner, const std::vector<int>& outer) {
    const int na = static_cast<int>(inner.size());
    const int nb = static_cast<int>(outer.size());
    int i = 0, j = 0;
    while (i < na || j < nb) {
        const double fa = static_cast<double>(i + 1) / na;
        const double fb = static_cast<double>(j + 1) / nb;
        if (j >= nb || (i < na && fa <= fb)) {
            tris.push_back({inner[i % na], outer[j % nb], inner[(i + 1) % na]});
            ++i;
        } else {
            tris.push_back({inner[i % na], outer[j % nb], outer[(j + 1) % nb]});
            ++j;
        }
    }
}

inline void laplacian_smooth(Mesh& mesh, const std::vector<bool>& fixed, int iterations, double relax) {
    const int n = mesh.num_vertices();
    std::vector<std::vector<int>> adj(n);
    for (const auto& tr : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            adj[tr[e]].push_back(tr[(e + 1) % 3]);
            adj[tr[e]].push_back(tr[(e + 2) % 3]);
        }
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    std::vector<Point2> next(n);
    for (int it = 0; it < iterations; ++it) {
        for (int v = 0; v < n; ++v) {
            if (fixed[v] || adj[v].empty()) {
                next[v] = mesh.vertices[v];
                continue;
            }
            Point2 c{0.0, 0.0};
            for (int u : adj[v]) c = c + mesh.vertices[u];
            c = c * (1.0 / static_cast<double>(adj[v].size()));
            next[v] = mesh.vertices[v] * (1.0 - relax) + c * relax;
        }
        mesh.vertices.swap(next);
    }
}

}  // namespace detail

// Fixed boundary node count, used to keep mesh topology identical across the
// shapes of a finite-difference stencil. The interior ring cascade is a pure
// function of the count, so pinning it pins the whole topology.
struct MeshBudget {
    int boundary_nodes = 0;
};

inline MeshBudget mesh_budget(const StarBoundary& sb, double h) {
    const ArclengthTable arc(sb);
    // A multiple of 8 keeps the 2:1 ring transitions regular.
    return {std::max(16, 8 * static_cast<int>(std::lround(arc.total() / h / 8.0)))};
}

inline Mesh triangulate(const StarBoundary& sb, double h,
                        std::optional<MeshBudget> budget = std::nullopt) {
    sb.require_positive();
    const int nb = (budget ? *budget : mesh_budget(sb, h)).boundary_nodes;
    const ArclengthTable arc(sb);
    const double L = arc.total();
    const double hb = L / nb;

    Mesh mesh;
    mesh.h_target = h;
    mesh.vertices.push_back(sb.center);

    // March inward from the boundary with radial steps equal to the local
    // tangential spacing (aspect ~1); halve the ring count when the spacing
    // drops below 1/sqrt(2) of the boundary spacing, giving regular 2:1
    // transitions and a self-similar center fan.
    std::vector<double> ts{1.0};
    std::vector<int> counts{nb};
    double t = 1.0;
    int n = nb;
    while (true) {
        t -= t * 2.0 * kPi / n;
        if (n > 8 && t * L / n < hb / std::sqrt(2.0)) n = std::max(8, (n / 2 + 1) & ~1);
        if (n < 1.6 * 2.0 * kPi || n <= 8) break;
        ts.push_back(t);
        counts.push_back(n);
    }
    if (t > 0.02) {
        ts.push_back(t);
        counts.push_back(std::max(6, n));
    }
    std::reverse(ts.begin(), ts.end());
    std::reverse(counts.begin(), counts.end());

    std::vector<std::vector<int>> rings(ts.size());
    std::vector<double> outer_theta;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const int ni = counts[i];
        rings[i].reserve(ni);
        for (int j = 0; j < ni; ++j) {
            const double theta = arc.theta_at(L * j / ni);
            const double r = ts[i] * sb.eval_radius(theta).r;
            rings[i].push_back(mesh.num_vertices());
            mesh.vertices.push_back({sb.center.x + r * std::cos(theta), sb.center.y + r * std::sin(theta)});
            if (i + 1 == ts.size()) outer_theta.push_back(theta);
        }
    }
    for (std::size_t j = 0; j < rings[0].size(); ++j)
        mesh.triangles.push_back({0, rings[0][j], rings[0][(j + 1) % rings[0].size()]});
    for (std::size_t i = 0; i + 1 < rings.size(); ++i)
        detail::stitch_rings(mesh.triangles, rings[i], rings[i + 1]);

    mesh.boundary_loops.push_back(rings.back());
    mesh.boundary_theta = outer_theta;

    std::vector<bool> fixed(mesh.num_vertices(), false);
    for (int v : rings.back()) fixed[v] = true;
    detail::laplacian_smooth(mesh, fixed, 100, 0.8);

    detail::compute_boundary_normals(mesh);
    validate_mesh(mesh);
    return mesh;
}

// Two-loop annulus template, radii r_in < r_out.
inline Mesh mesh_annulus(double r_in, double r_out, double h) {
    if (!(0.0 < r_in && r_in < r_out)) throw Error("annulus: need 0 < r_in < r_out");
    Mesh mesh;
    mesh.h_target = h;
    const int nr = std::max(2, static_cast<int>(std::lround((r_out - r_in) / h)));
    std::vector<std::vector<int>> rings(nr + 1);
    std::vector<double> inner_theta, outer_theta;
    for (int i = 0; i <= nr; ++i) {
        const double r = r_in + (r_out - r_in) * i / nr;
        const int ni = std::max(12, static_cast<int>(std::lround(2.0 * kPi * r / h)));
        for (int j = 0; j < ni; ++j) {
            const double theta = 2.0 * kPi * j / ni;
            rings[i].push_back(mesh.num_vertices());
            mesh.vertices.push_back({r * std::cos(theta), r * std::sin(theta)});
            if (i == 0) inner_theta.push_back(theta);
            if (i == nr) outer_theta.push_back(theta);
        }
    }
    for (int i = 0; i < nr; ++i) detail::stitch_rings(mesh.triangles, rings[i], rings[i + 1]);

    // Outer loop counterclockwise; inner loop reversed so the interior stays
    // on the left.
    mesh.boundary_loops.push_back(rings[nr]);
    mesh.boundary_theta = outer_theta;
    std::vector<int> inner = rings[0];
    std::vector<double> itheta = inner_theta;
    std::reverse(inner.begin() + 1, inner.end());
    std::reverse(itheta.begin() + 1, itheta.end());
    mesh.boundary_loops.push_back(inner);
    mesh.boundary_theta.insert(mesh.boundary_theta.end(), itheta.begin(), itheta.end());

    detail::compute_boundary_normals(mesh);
    validate_mesh(mesh);
    return mesh;
}

// Structured rectangle template (right-triangle grid).
inline Mesh mesh_rectangle(double width, double height, double h, Point2 origin = {0.0, 0.0}) {
    Mesh mesh;
    mesh.h_target = h;
    const int nx = std::max(2, static_cast<int>(std::lround(width / h)));
    const int ny = std::max(2, static_cast<int>(std::lround(height / h)));
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.vertices.push_back({origin.x + width * i / nx, origin.y + height * j / ny});
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    std::vector<int> loop;
    for (int i = 0; i < nx; ++i) loop.push_back(id(i, 0));
    for (int j = 0; j < ny; ++j) loop.push_back(id(nx, j));
    for (int i = nx; i > 0; --i) loop.push_back(id(i, ny));
    for (int j = ny; j > 0; --j) loop.push_back(id(0, j));
    mesh.boundary_loops.push_back(loop);
    mesh.boundary_theta.assign(loop.size(), std::numeric_limits<double>::quiet_NaN());
    detail::compute_boundary_normals(mesh);
    validate_mesh(mesh, 20.0);
    return mesh;
}

// Area, perimeter, and boundary curvature. Curvature comes from the analytic
// radius function when the star shape is supplied, otherwise from the
// discrete turning angle per arclength.
inline DomainMetrics metrics(const Mesh& mesh, const StarBoundary* sb = nullptr) {
    DomainMetrics dm;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        dm.area += mesh.triangle_area(static_cast<int>(t));

    std::vector<double> kappa;
    std::size_t bidx = 0;
    for (const auto& loop : mesh.boundary_loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 prev = mesh.vertices[loop[(i + n - 1) % n]];
            const Point2 cur = mesh.vertices[loop[i]];
            const Point2 next = mesh.vertices[loop[(i + 1) % n]];
            const double l0 = dist(prev, cur), l1 = dist(cur, next);
            dm.perimeter += l1;
            if (sb && bidx < mesh.boundary_theta.size() &&
                std::isfinite(mesh.boundary_theta[bidx])) {
                kappa.push_back(sb->curvature(mesh.boundary_theta[bidx]));
            } else {
                const Point2 e0 = cur - prev, e1 = next - cur;
                const double turn = std::atan2(e0.cross(e1), e0.dot(e1));
                kappa.push_back(2.0 * turn / (l0 + l1));
            }
            ++bidx;
        }
    }
    dm.curvature = make_boundary_field(mesh, kappa);

    if (dm.area <= 0.0 || dm.perimeter <= 0.0) throw Error("metrics: degenerate domain");
    if (sq(dm.perimeter) < 4.0 * kPi * dm.area * (1.0 - 10.0 * mesh.h_target))
        throw Error("metrics: isoperimetric sanity check failed");
    return dm;
}

// ---- mesh file format -------------------------------------------------------
// "insulmesh 1", then "nv nt nb", nv vertex lines, nt triangle lines (0-based),
// nb boundary index lines in loop order with "#loop" between loops.

inline void write_mesh(std::ostream& os, const Mesh& mesh) {
    os.precision(17);
    os << "insulmesh 1\n";
    os << mesh.num_vertices() << " " << mesh.triangles.size() << " " << mesh.num_boundary() << "\n";
    for (const auto& v : mesh.vertices) os << v.x << " " << v.y << "\n";
    for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    bool first = true;
    for (const auto& loop : mesh.boundary_loops) {
        if (!first) os << "#loop\n";
        first = false;
        for (int i : loop) os << i << "\n";
    }
}

inline Mesh read_mesh(std::istream& is) {
    std::string line;
    int lineno = 0;
    auto next = [&]() -> std::string& {
        if (!std::getline(is, line))
            throw ParseError("mesh file: unexpected end of file at line " + std::to_string(lineno));
        ++lineno;
        return line;
    };
    if (next() != "insulmesh 1")
        throw ParseError("mesh file: bad header at line 1: '" + line + "'");
    int nv, nt, nb;
    {
        std::istringstream ss(next());
        if (!(ss >> nv >> nt >> nb) || nv <= 0 || nt <= 0 || nb <= 0)
            throw ParseError("mesh file: bad counts at line 2");
    }
    Mesh mesh;
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices) {
        std::istringstream ss(next());
        if (!(ss >> v.x >> v.y)) throw ParseError("mesh file: bad vertex at line " + std::to_string(lineno));
    }
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles) {
        std::istringstream ss(next());
        if (!(ss >> t[0] >> t[1] >> t[2]))
            throw ParseError("mesh file: bad triangle at line " + std::to_string(lineno));
        for (int v : t)
            if (v < 0 || v >= nv) throw ParseError("mesh file: vertex index out of range at line " +
                                                   std::to_string(lineno));
    }
    mesh.boundary_loops.emplace_back();
    int got = 0;
    while (got < nb) {
        next();
        if (line == "#loop") {
            if (mesh.boundary_loops.back().empty())
                throw ParseError("mesh file: empty boundary loop at line " + std::to_string(lineno));
            mesh.boundary_loops.emplace_back();
            continue;
        }
        std::istringstream ss(line);
        int idx;
        if (!(ss >> idx) || idx < 0 || idx >= nv)
            throw ParseError("mesh file: bad boundary index at line " + std::to_string(lineno));
        mesh.boundary_loops.back().push_back(idx);
        ++got;
    }
    // h_target is not stored; infer the nominal spacing from boundary edges.
    double total = 0.0;
    int cnt = 0;
    for (const auto& loop : mesh.boundary_loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            total += dist(mesh.vertices[loop[i]], mesh.vertices[loop[(i + 1) % n]]);
            ++cnt;
        }
    }
    mesh.h_target = cnt ? total / cnt : 0.0;
    mesh.boundary_theta.assign(mesh.num_boundary(), std::numeric_limits<double>::quiet_NaN());
    detail::compute_boundary_normals(mesh);
    validate_mesh(mesh);
    return mesh;
}

inline Mesh read_mesh_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open mesh file: " + path);
    return read_mesh(f);
}

inline void write_mesh_file(const std::string& path, const Mesh& mesh) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write mesh file: " + path);
    write_mesh(f, mesh);
}

}  // namespace insul
