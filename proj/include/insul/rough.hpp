#pragma once

// Quantitative diagnostics for rough domains on rasterized geometry:
// tube-volume scaling exponent, Monte Carlo fractional perimeter, and
// clearance-constrained path certification of the cigar condition.

#include <atomic>
#include <queue>
#include <thread>

#include "insul/grid.hpp"

namespace insul {

struct ScalingFit {
    std::vector<double> radii;
    std::vector<double> tube_volumes;
    double delta_fit = 0.0;
    double C_fit = 0.0;
    double r_squared = 0.0;
};

// Least-squares fit of log tube_volume against log r over dyadic radii.
inline ScalingFit porosity_exponent(const GridDomain& gd, double r_min, double r_max) {
    ScalingFit fit;
    for (double r = r_min; r <= r_max * (1.0 + 1e-12); r *= 2.0) fit.radii.push_back(r);
    if (fit.radii.size() < 4)
        throw InsufficientRange("porosity_exponent: fewer than 4 dyadic radii in [" +
                                std::to_string(r_min) + ", " + std::to_string(r_max) + "]");
    for (double r : fit.radii) fit.tube_volumes.push_back(tube_volume(gd, r));
    for (std::size_t i = 1; i < fit.tube_volumes.size(); ++i)
        if (!(fit.tube_volumes[i] > fit.tube_volumes[i - 1]))
            throw Error("porosity_exponent: tube volumes not strictly increasing");

    const std::size_t n = fit.radii.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(fit.radii[i]);
        const double y = std::log(fit.tube_volumes[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    const double den = n * sxx - sx * sx;
    fit.delta_fit = (n * sxy - sx * sy) / den;
    fit.C_fit = std::exp((sy - fit.delta_fit * sx) / n);
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = std::log(fit.C_fit) + fit.delta_fit * std::log(fit.radii[i]);
        ss_res += sq(std::log(fit.tube_volumes[i]) - pred);
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (!(fit.delta_fit > 0.0 && fit.delta_fit <= 2.0))
        throw Error("porosity_exponent: fitted exponent " + std::to_string(fit.delta_fit) +
                    " outside (0, 2]");
    return fit;
}

struct FractionalPerimeterResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    double bias_bound = 0.0;  // neglected below-cutoff stratum
    std::uint64_t n_samples = 0;
};

// Monte Carlo estimate of the W^{s,1} indicator seminorm over the grid
// bounding box, stratified dyadically in the pair separation with exact
// per-stratum weights and lower cutoff hg. Deterministic for a fixed seed:
// samples are partitioned into fixed chunks with counter-based streams and
// reduced in chunk order regardless of thread count.
inline FractionalPerimeterResult fractional_perimeter(const GridDomain& gd, double s,
                                                      std::uint64_t n_samples, std::uint64_t seed,
                                                      int threads = 1) {
    if (!(s > 0.0 && s < 1.0)) throw Error("fractional_perimeter: s must lie in (0,1)");
    const double hg = gd.spacing;
    const Point2 lo = gd.origin;
    const Point2 hi{gd.origin.x + gd.nx * hg, gd.origin.y + gd.ny * hg};
    const double box_area = (hi.x - lo.x) * (hi.y - lo.y);
    const double rho_max = dist(lo, hi);

    std::vector<std::pair<double, double>> strata;  // [rho_lo, rho_hi)
    for (double r = hg; r < rho_max; r *= 2.0) strata.push_back({r, std::min(2.0 * r, rho_max)});
    const std::size_t nt = strata.size();

    constexpr std::uint64_t kChunk = 16384;
    struct Acc {
        double sum = 0.0, sumsq = 0.0;
        std::uint64_t n = 0;
    };

    const std::uint64_t per_stratum = n_samples / nt;
    std::vector<std::vector<Acc>> acc(nt);
    std::vector<std::pair<std::size_t, std::size_t>> work;  // (stratum, chunk)
    for (std::size_t t = 0; t < nt; ++t) {
        const std::uint64_t chunks = (per_stratum + kChunk - 1) / kChunk;
        acc[t].resize(chunks);
        for (std::size_t c = 0; c < chunks; ++c) work.push_back({t, c});
    }

    auto run_chunk = [&](std::size_t t, std::size_t c) {
        const auto [rlo, rhi] = strata[t];
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(begin + kChunk, per_stratum);
        CounterRng rng(seed, (t << 32) ^ c);
        Acc a;
        for (std::uint64_t i = begin; i < end; ++i) {
            const Point2 x{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
            const double phi = rng.uniform(0.0, 2.0 * kPi);
            const double rho = std::sqrt(rlo * rlo + rng.uniform() * (rhi * rhi - rlo * rlo));
            const Point2 y{x.x + rho * std::cos(phi), x.y + rho * std::sin(phi)};
            double g = 0.0;
            if (y.x > lo.x && y.x < hi.x && y.y > lo.y && y.y < hi.y) {
                const bool cx = gd.contains_point(x);
                const bool cy = gd.contains_point(y);
                if (cx != cy) g = std::pow(rho, -(2.0 + s));
            }
            a.sum += g;
            a.sumsq += g * g;
            ++a.n;
        }
        acc[t][c] = a;
    };

    if (threads <= 1) {
        for (auto [t, c] : work) run_chunk(t, c);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = cursor.fetch_add(1);
                    if (i >= work.size()) return;
                    run_chunk(work[i].first, work[i].second);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    FractionalPerimeterResult res;
    double var_total = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        const auto [rlo, rhi] = strata[t];
        const double vol = box_area * kPi * (rhi * rhi - rlo * rlo);
        double sum = 0.0, sumsq = 0.0;
        std::uint64_t n = 0;
        for (const auto& a : acc[t]) {  // fixed reduction order
            sum += a.sum;
            sumsq += a.sumsq;
            n += a.n;
        }
        if (n == 0) continue;
        const double mean = sum / n;
        const double var = std::max(0.0, sumsq / n - mean * mean);
        res.estimate += vol * mean;
        var_total += vol * vol * var / n;
        res.n_samples += n;
    }
    res.stderr_ = std::sqrt(var_total);
    res.bias_bound = 2.0 * kPi / (1.0 - s) * tube_volume(gd, hg) * std::pow(hg, -s);
    return res;
}

struct UniformityPair {
    Point2 x1, x2;
    double best_length = -1.0;       // admissible path length; -1 when no path exists
    double clearance_ratio = 0.0;    // worst d(p,boundary)/min(|p-x1|,|p-x2|) on the free geodesic
    bool passed = false;
};

struct UniformityReport {
    double M = 0.0;
    int pairs_tested = 0;
    double pass_fraction = 0.0;
    UniformityPair worst_pair;
    std::vector<std::vector<Point2>> certificates;  // stored admissible paths
};

namespace detail {

struct GridDijkstra {
    const GridDomain& gd;
    std::vector<double> dist_;
    std::vector<int> prev_;

    explicit GridDijkstra(const GridDomain& g) : gd(g) {}

    // Shortest 8-connected path between cells, restricted to cells where
    // admissible() holds; octile edge lengths. Returns length or -1.
    template <class Admissible>
    double run(int s, int t, double length_cap, Admissible admissible, std::vector<int>* path) {
        const int nx = gd.nx, ny = gd.ny;
        dist_.assign(gd.occupancy.size(), 1e300);
        prev_.assign(gd.occupancy.size(), -1);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist_[s] = 0.0;
        pq.push({0.0, s});
        const double diag = gd.spacing * std::sqrt(2.0);
        while (!pq.empty()) {
            auto [d, c] = pq.top();
            pq.pop();
            if (d > dist_[c]) continue;
            if (c == t) break;
            if (d > length_cap) return -1.0;
            const int i = c % nx, j = c / nx;
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (!di && !dj) continue;
                    const int ni = i + di, nj = j + dj;
                    if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
                    const int nc = gd.idx(ni, nj);
                    if (!gd.occupancy[nc] || !admissible(nc)) continue;
                    const double w = (di && dj) ? diag : gd.spacing;
                    if (dist_[c] + w < dist_[nc]) {
                        dist_[nc] = dist_[c] + w;
                        prev_[nc] = c;
                        pq.push({dist_[nc], nc});
                    }
                }
            }
        }
        if (dist_[t] >= 1e300) return -1.0;
        if (path) {
            path->clear();
            for (int c = t; c != -1; c = prev_[c]) path->push_back(c);
            std::reverse(path->begin(), path->end());
        }
        return dist_[t];
    }
};

}  // namespace detail

// Cigar-condition certification by path search. A pass produces an explicit
// admissible path; a fail at resolution hg is evidence only, never a
// disproof. The clearance and length slacks absorb O(hg) rasterization error.
inline UniformityReport m_uniform_check(const GridDomain& gd, double M, int pair_samples,
                                        std::uint64_t seed, int max_certificates = 8) {
    if (!(M > 1.0)) throw Error("m_uniform_check: need M > 1");
    if (!grid_connected(gd)) throw DisconnectedDomain("m_uniform_check: occupancy is not connected");

    std::vector<int> interior;
    for (std::size_t c = 0; c < gd.occupancy.size(); ++c)
        if (gd.occupancy[c]) interior.push_back(static_cast<int>(c));
    if (interior.size() < 2) throw DisconnectedDomain("m_uniform_check: too few interior cells");

    CounterRng rng(seed, 0x7061697273ULL);
    detail::GridDijkstra dijkstra(gd);

    UniformityReport rep;
    rep.M = M;
    rep.pairs_tested = pair_samples;
    int passes = 0;
    double worst_margin = -1e300;

    for (int p = 0; p < pair_samples; ++p) {
        const int c1 = interior[rng.uniform_index(interior.size())];
        int c2 = c1;
        while (c2 == c1) c2 = interior[rng.uniform_index(interior.size())];
        const Point2 x1 = gd.cell_center(c1 % gd.nx, c1 / gd.nx);
        const Point2 x2 = gd.cell_center(c2 % gd.nx, c2 / gd.nx);
        const double D = dist(x1, x2);
        const double slack = 1.0 + 4.0 * gd.spacing / D;
        const double Mp = M * slack;
        const double cap = M * D * slack;

        auto admissible = [&](int c) {
            const Point2 q = gd.cell_center(c % gd.nx, c / gd.nx);
            const double need = std::min(dist(q, x1), dist(q, x2)) / Mp;
            return std::abs(gd.signed_distance[c]) >= need;
        };
        std::vector<int> cells;
        const double len = dijkstra.run(c1, c2, cap, admissible,
                                        static_cast<int>(rep.certificates.size()) < max_certificates
                                            ? &cells
                                            : nullptr);
        const bool pass = len >= 0.0 && len <= cap;
        if (pass) {
            ++passes;
            if (!cells.empty() && static_cast<int>(rep.certificates.size()) < max_certificates) {
                std::vector<Point2> pts;
                pts.reserve(cells.size());
                for (int c : cells) pts.push_back(gd.cell_center(c % gd.nx, c / gd.nx));
                rep.certificates.push_back(std::move(pts));
            }
        }
        // Margin for reporting: failed pairs ranked by how badly the free
        // geodesic violates the clearance condition.
        double margin = pass ? (len / cap - 1.0) : 1.0;
        double ratio = 1e300;
        if (!pass) {
            std::vector<int> free_path;
            const double flen =
                dijkstra.run(c1, c2, 1e300, [](int) { return true; }, &free_path);
            for (int c : free_path) {
                const Point2 q = gd.cell_center(c % gd.nx, c / gd.nx);
                const double mind = std::min(dist(q, x1), dist(q, x2));
                if (mind > gd.spacing)
                    ratio = std::min(ratio, std::abs(gd.signed_distance[c]) / mind);
            }
            margin = 1.0 + (ratio < 1e300 ? 1.0 / (ratio + 1e-12) : 0.0);
            if (margin > worst_margin) {
                worst_margin = margin;
                rep.worst_pair = {x1, x2, flen, ratio == 1e300 ? 0.0 : ratio, false};
            }
        } else if (worst_margin < 0 && margin > worst_margin) {
            worst_margin = margin;
            rep.worst_pair = {x1, x2, len, 0.0, true};
        }
    }
    rep.pass_fraction = static_cast<double>(passes) / pair_samples;
    return rep;
}

// Smallest M (within factor 1.1) at which the pass fraction reaches 0.99,
// by geometric bisection with a fixed pair sample.
inline double min_uniformity(const GridDomain& gd, double M_lo, double M_hi, int pair_samples,
                             std::uint64_t seed) {
    auto passes = [&](double M) {
        return m_uniform_check(gd, M, pair_samples, seed, 0).pass_fraction >= 0.99;
    };
    if (passes(M_lo) || !passes(M_hi))
        throw BracketInvalid("min_uniformity: expected fail at M_lo and pass at M_hi");
    while (M_hi / M_lo > 1.1) {
        const double mid = std::sqrt(M_lo * M_hi);
        (passes(mid) ? M_hi : M_lo) = mid;
    }
    return M_hi;
}

}  // namespace insul
