#pragma once

// Rasterized domains on a uniform cell grid: occupancy bitmap plus a signed
// distance field to the occupancy interface (negative inside). Distances are
// computed by two-pass fast sweeping of the eikonal update, O(hg) accurate.

#include <fstream>
#include <functional>
#include <sstream>

#include "insul/mesh.hpp"

namespace insul {

struct GridDomain {
    Point2 origin;       // lower-left corner of cell (0,0)
    double spacing = 0.0;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> occupancy;    // nx*ny, row-major, 1 = inside
    std::vector<double> signed_distance;    // per cell center, negative inside

    int idx(int i, int j) const { return j * nx + i; }
    bool inside(int i, int j) const { return occupancy[idx(i, j)] != 0; }

    Point2 cell_center(int i, int j) const {
        return {origin.x + (i + 0.5) * spacing, origin.y + (j + 0.5) * spacing};
    }

    bool contains_point(Point2 p) const {
        const int i = static_cast<int>(std::floor((p.x - origin.x) / spacing));
        const int j = static_cast<int>(std::floor((p.y - origin.y) / spacing));
        if (i < 0 || j < 0 || i >= nx || j >= ny) return false;
        return inside(i, j);
    }

    double cell_area() const { return spacing * spacing; }

    double bbox_diagonal() const { return std::hypot(nx * spacing, ny * spacing); }

    // Diagonal of the tight bounding box of occupied cells; the canonical
    // domain diameter for range checks.
    double occupied_diagonal() const {
        int ilo = nx, ihi = -1, jlo = ny, jhi = -1;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (inside(i, j)) {
                    ilo = std::min(ilo, i); ihi = std::max(ihi, i);
                    jlo = std::min(jlo, j); jhi = std::max(jhi, j);
                }
        if (ihi < 0) return 0.0;
        return std::hypot((ihi - ilo + 1) * spacing, (jhi - jlo + 1) * spacing);
    }

    double occupied_area() const {
        std::size_t n = 0;
        for (auto o : occupancy) n += o;
        return static_cast<double>(n) * cell_area();
    }

    bool same_frame(const GridDomain& o) const {
        return nx == o.nx && ny == o.ny &&
               std::abs(spacing - o.spacing) <= 1e-12 * spacing &&
               std::abs(origin.x - o.origin.x) <= 1e-9 * spacing &&
               std::abs(origin.y - o.origin.y) <= 1e-9 * spacing;
    }
};

// Union of primitive shapes; enough for the dumbbell and box test domains.
struct BitmapSpec {
    struct Disk {
        Point2 center;
        double radius;
    };
    struct Rect {
        Point2 lo, hi;
    };
    std::vector<Disk> disks;
    std::vector<Rect> rects;

    bool contains(Point2 p) const {
        for (const auto& d : disks)
            if (dist(p, d.center) < d.radius) return true;
        for (const auto& r : rects)
            if (p.x > r.lo.x && p.x < r.hi.x && p.y > r.lo.y && p.y < r.hi.y) return true;
        return false;
    }

    void bounds(Point2& lo, Point2& hi) const {
        lo = {1e300, 1e300};
        hi = {-1e300, -1e300};
        auto grow = [&](Point2 a, Point2 b) {
            lo.x = std::min(lo.x, a.x); lo.y = std::min(lo.y, a.y);
            hi.x = std::max(hi.x, b.x); hi.y = std::max(hi.y, b.y);
        };
        for (const auto& d : disks)
            grow({d.center.x - d.radius, d.center.y - d.radius},
                 {d.center.x + d.radius, d.center.y + d.radius});
        for (const auto& r : rects) grow(r.lo, r.hi);
    }

    static BitmapSpec dumbbell(double lobe_radius = 1.0, double lobe_offset = 1.2,
                               double neck_half_width = 0.025) {
        BitmapSpec s;
        s.disks.push_back({{-lobe_offset, 0.0}, lobe_radius});
        s.disks.push_back({{lobe_offset, 0.0}, lobe_radius});
        s.rects.push_back({{-lobe_offset, -neck_half_width}, {lobe_offset, neck_half_width}});
        return s;
    }

    static BitmapSpec square(double side, Point2 center = {0.0, 0.0}) {
        BitmapSpec s;
        s.rects.push_back({{center.x - side / 2, center.y - side / 2},
                           {center.x + side / 2, center.y + side / 2}});
        return s;
    }
};

namespace detail {

inline void fast_sweep_distance(GridDomain& gd) {
    const int nx = gd.nx, ny = gd.ny;
    const double h = gd.spacing;
    const double INF = 1e300;
    std::vector<double> d(static_cast<std::size_t>(nx) * ny, INF);

    // Interface cells (a 4-neighbor with opposite occupancy) start at half a
    // cell; everything else is swept.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const bool in = gd.inside(i, j);
            const bool edge =
                (i > 0 && gd.inside(i - 1, j) != in) || (i + 1 < nx && gd.inside(i + 1, j) != in) ||
                (j > 0 && gd.inside(i, j - 1) != in) || (j + 1 < ny && gd.inside(i, j + 1) != in);
            if (edge) d[gd.idx(i, j)] = 0.5 * h;
        }
    }

    auto update = [&](int i, int j) {
        const double a = std::min(i > 0 ? d[gd.idx(i - 1, j)] : INF,
                                  i + 1 < nx ? d[gd.idx(i + 1, j)] : INF);
        const double b = std::min(j > 0 ? d[gd.idx(i, j - 1)] : INF,
                                  j + 1 < ny ? d[gd.idx(i, j + 1)] : INF);
        double cand;
        if (std::abs(a - b) >= h)
            cand = std::min(a, b) + h;
        else
            cand = 0.5 * (a + b + std::sqrt(2.0 * h * h - sq(a - b)));
        double& cur = d[gd.idx(i, j)];
        if (cand < cur) cur = cand;
    };

    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) update(i, j);
        for (int j = 0; j < ny; ++j)
            for (int i = nx - 1; i >= 0; --i) update(i, j);
        for (int j = ny - 1; j >= 0; --j)
            for (int i = 0; i < nx; ++i) update(i, j);
        for (int j = ny - 1; j >= 0; --j)
            for (int i = nx - 1; i >= 0; --i) update(i, j);
    }

    gd.signed_distance.resize(d.size());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            gd.signed_distance[gd.idx(i, j)] = gd.inside(i, j) ? -d[gd.idx(i, j)] : d[gd.idx(i, j)];
}

inline GridDomain rasterize_predicate(Point2 lo, Point2 hi, double hg,
                                      const std::function<bool(Point2)>& inside) {
    const double diam = dist(lo, hi);
    if (hg >= diam / 16.0)
        throw ResolutionTooCoarse("rasterize: spacing " + std::to_string(hg) +
                                  " too coarse for diameter " + std::to_string(diam));
    const double pad = 0.25 * diam;
    GridDomain gd;
    gd.spacing = hg;
    gd.origin = {lo.x - pad, lo.y - pad};
    gd.nx = static_cast<int>(std::ceil((hi.x - lo.x + 2.0 * pad) / hg));
    gd.ny = static_cast<int>(std::ceil((hi.y - lo.y + 2.0 * pad) / hg));
    gd.occupancy.assign(static_cast<std::size_t>(gd.nx) * gd.ny, 0);
    for (int j = 0; j < gd.ny; ++j)
        for (int i = 0; i < gd.nx; ++i)
            gd.occupancy[gd.idx(i, j)] = inside(gd.cell_center(i, j)) ? 1 : 0;
    fast_sweep_distance(gd);
    return gd;
}

}  // namespace detail

// Optional explicit bounds put several rasterizations into one grid frame.
struct GridBounds {
    Point2 lo, hi;
};

inline GridDomain rasterize(const StarBoundary& sb, double hg,
                            std::optional<GridBounds> bounds = std::nullopt) {
    sb.require_positive();
    double rmax = 0.0;
    for (int i = 0; i < 4096; ++i)
        rmax = std::max(rmax, sb.eval_radius(2.0 * kPi * i / 4096).r);
    const Point2 lo = bounds ? bounds->lo : Point2{sb.center.x - rmax, sb.center.y - rmax};
    const Point2 hi = bounds ? bounds->hi : Point2{sb.center.x + rmax, sb.center.y + rmax};
    return detail::rasterize_predicate(lo, hi, hg, [&](Point2 p) {
        const Point2 q = p - sb.center;
        const double rho = q.norm();
        if (rho == 0.0) return true;
        return rho < sb.eval_radius(std::atan2(q.y, q.x)).r;
    });
}

inline GridDomain rasterize(const Mesh& mesh, double hg) {
    Point2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const auto& v : mesh.vertices) {
        lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y);
    }
    // Even-odd ray crossings over all boundary loops (handles the annulus).
    auto inside = [&](Point2 p) {
        bool in = false;
        for (const auto& loop : mesh.boundary_loops) {
            const std::size_t n = loop.size();
            for (std::size_t i = 0; i < n; ++i) {
                const Point2 a = mesh.vertices[loop[i]];
                const Point2 b = mesh.vertices[loop[(i + 1) % n]];
                if ((a.y > p.y) != (b.y > p.y)) {
                    const double xcross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                    if (p.x < xcross) in = !in;
                }
            }
        }
        return in;
    };
    return detail::rasterize_predicate(lo, hi, hg, inside);
}

inline GridDomain rasterize(const BitmapSpec& spec, double hg,
                            std::optional<GridBounds> bounds = std::nullopt) {
    Point2 lo, hi;
    if (bounds) {
        lo = bounds->lo;
        hi = bounds->hi;
    } else {
        spec.bounds(lo, hi);
    }
    return detail::rasterize_predicate(lo, hi, hg, [&](Point2 p) { return spec.contains(p); });
}

// Area of {x : d(x, boundary) < r} by cell counting.
inline double tube_volume(const GridDomain& gd, double r) {
    if (!(r > 0.0)) throw Error("tube_volume: radius must be positive");
    std::size_t count = 0;
    for (double sd : gd.signed_distance)
        if (std::abs(sd) < r) ++count;
    return static_cast<double>(count) * gd.cell_area();
}

namespace detail {

// Exact Euclidean distance transform (squared), Felzenszwalb-Huttenlocher.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& out, int n) {
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -1e300;
    z[1] = 1e300;
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = 1e300;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        out[q] = sq(static_cast<double>(q - v[k])) + f[v[k]];
    }
}

// Squared distance in cell units to the nearest occupied cell.
inline std::vector<double> edt_to_occupied(const GridDomain& gd) {
    const int nx = gd.nx, ny = gd.ny;
    std::vector<double> d(static_cast<std::size_t>(nx) * ny);
    for (std::size_t c = 0; c < d.size(); ++c) d[c] = gd.occupancy[c] ? 0.0 : 1e300;
    std::vector<double> col(ny), colo(ny);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) col[j] = d[gd.idx(i, j)];
        edt_1d(col, colo, ny);
        for (int j = 0; j < ny; ++j) d[gd.idx(i, j)] = colo[j];
    }
    std::vector<double> row(nx), rowo(nx);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) row[i] = d[gd.idx(i, j)];
        edt_1d(row, rowo, nx);
        for (int i = 0; i < nx; ++i) d[gd.idx(i, j)] = rowo[i];
    }
    return d;
}

}  // namespace detail

// Symmetric Hausdorff distance between the rasterized closed sets, exact to
// one grid cell.
inline double hausdorff_distance(const GridDomain& A, const GridDomain& B) {
    if (!A.same_frame(B)) throw FrameMismatch("hausdorff_distance: grids use different frames");
    const auto db = detail::edt_to_occupied(B);
    const auto da = detail::edt_to_occupied(A);
    double worst2 = 0.0;
    for (std::size_t c = 0; c < A.occupancy.size(); ++c) {
        if (A.occupancy[c]) worst2 = std::max(worst2, db[c]);
        if (B.occupancy[c]) worst2 = std::max(worst2, da[c]);
    }
    return std::sqrt(worst2) * A.spacing;
}

inline double symmetric_difference_area(const GridDomain& A, const GridDomain& B) {
    if (!A.same_frame(B)) throw FrameMismatch("symmetric_difference_area: grids use different frames");
    std::size_t n = 0;
    for (std::size_t c = 0; c < A.occupancy.size(); ++c)
        if (A.occupancy[c] != B.occupancy[c]) ++n;
    return static_cast<double>(n) * A.cell_area();
}

inline bool grid_connected(const GridDomain& gd) {
    std::size_t total = 0;
    int si = -1, sj = -1;
    for (int j = 0; j < gd.ny && si < 0; ++j)
        for (int i = 0; i < gd.nx; ++i)
            if (gd.inside(i, j)) { si = i; sj = j; break; }
    for (auto o : gd.occupancy) total += o;
    if (si < 0) return false;
    std::vector<std::uint8_t> seen(gd.occupancy.size(), 0);
    std::vector<std::pair<int, int>> stack{{si, sj}};
    seen[gd.idx(si, sj)] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        ++reached;
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                if (!di && !dj) continue;
                const int ni = i + di, nj = j + dj;
                if (ni < 0 || nj < 0 || ni >= gd.nx || nj >= gd.ny) continue;
                if (!gd.inside(ni, nj) || seen[gd.idx(ni, nj)]) continue;
                seen[gd.idx(ni, nj)] = 1;
                stack.push_back({ni, nj});
            }
        }
    }
    return reached == total;
}

// ---- grid file format -------------------------------------------------------
// "grid 1", "origin x y", "spacing hg", "dims nx ny", then ny rows of nx
// characters '1'/'0', bottom row first.

inline void write_grid(std::ostream& os, const GridDomain& gd) {
    os.precision(17);
    os << "grid 1\n";
    os << "origin " << gd.origin.x << " " << gd.origin.y << "\n";
    os << "spacing " << gd.spacing << "\n";
    os << "dims " << gd.nx << " " << gd.ny << "\n";
    std::string row(gd.nx, '0');
    for (int j = 0; j < gd.ny; ++j) {
        for (int i = 0; i < gd.nx; ++i) row[i] = gd.inside(i, j) ? '1' : '0';
        os << row << "\n";
    }
}

inline GridDomain read_grid(std::istream& is) {
    std::string line;
    int lineno = 0;
    auto next = [&]() -> std::string& {
        if (!std::getline(is, line))
            throw ParseError("grid file: unexpected end of file at line " + std::to_string(lineno));
        ++lineno;
        return line;
    };
    if (next() != "grid 1") throw ParseError("grid file: bad header at line 1: '" + line + "'");
    GridDomain gd;
    {
        std::istringstream ss(next());
        std::string tag;
        if (!(ss >> tag >> gd.origin.x >> gd.origin.y) || tag != "origin")
            throw ParseError("grid file: bad origin at line " + std::to_string(lineno));
    }
    {
        std::istringstream ss(next());
        std::string tag;
        if (!(ss >> tag >> gd.spacing) || tag != "spacing" || gd.spacing <= 0)
            throw ParseError("grid file: bad spacing at line " + std::to_string(lineno));
    }
    {
        std::istringstream ss(next());
        std::string tag;
        if (!(ss >> tag >> gd.nx >> gd.ny) || tag != "dims" || gd.nx <= 0 || gd.ny <= 0)
            throw ParseError("grid file: bad dims at line " + std::to_string(lineno));
    }
    gd.occupancy.assign(static_cast<std::size_t>(gd.nx) * gd.ny, 0);
    for (int j = 0; j < gd.ny; ++j) {
        next();
        if (static_cast<int>(line.size()) < gd.nx)
            throw ParseError("grid file: short row at line " + std::to_string(lineno));
        for (int i = 0; i < gd.nx; ++i) {
            if (line[i] != '0' && line[i] != '1')
                throw ParseError("grid file: bad cell character at line " + std::to_string(lineno));
            gd.occupancy[gd.idx(i, j)] = line[i] == '1';
        }
    }
    detail::fast_sweep_distance(gd);
    return gd;
}

inline GridDomain read_grid_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open grid file: " + path);
    return read_grid(f);
}

inline void write_grid_file(const std::string& path, const GridDomain& gd) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write grid file: " + path);
    write_grid(f, gd);
}

}  // namespace insul
