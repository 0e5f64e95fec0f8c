#pragma once

// Star-shaped domains given by a Fourier radius function
//   r(theta) = a0 + sum_k (a_k cos k theta + b_k sin k theta)
// about a center point. This is the canonical shape representation; meshes
// and grids are derived views.

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "insul/common.hpp"

namespace insul {

struct FourierMode {
    int k = 1;
    double a = 0.0;
    double b = 0.0;
};

struct RadiusJet {
    double r;    // r(theta)
    double rp;   // dr/dtheta
    double rpp;  // d2r/dtheta2
};

class StarBoundary {
public:
    Point2 center{0.0, 0.0};
    double a0 = 1.0;
    std::vector<FourierMode> modes;  // distinct k, ascending

    StarBoundary() = default;
    StarBoundary(Point2 c, double mean_radius, std::vector<FourierMode> ms)
        : center(c), a0(mean_radius), modes(std::move(ms)) {
        normalize_modes();
    }

    static StarBoundary circle(double radius, Point2 c = {0.0, 0.0}) {
        return StarBoundary(c, radius, {});
    }

    RadiusJet eval_radius(double theta) const {
        RadiusJet j{a0, 0.0, 0.0};
        for (const auto& m : modes) {
            const double c = std::cos(m.k * theta);
            const double s = std::sin(m.k * theta);
            j.r += m.a * c + m.b * s;
            j.rp += m.k * (m.b * c - m.a * s);
            j.rpp -= m.k * m.k * (m.a * c + m.b * s);
        }
        return j;
    }

    Point2 point(double theta) const {
        const double r = eval_radius(theta).r;
        return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
    }

    // Signed curvature of the polar curve; positive for convex boundaries
    // with outward normal.
    double curvature(double theta) const {
        const RadiusJet j = eval_radius(theta);
        const double q = j.r * j.r + j.rp * j.rp;
        return (q + j.rp * j.rp - j.r * j.rpp) / (q * std::sqrt(q));
    }

    int max_mode_order() const {
        return modes.empty() ? 0 : modes.back().k;
    }

    // |Omega| from the coefficients: (1/2) int r^2 dtheta.
    double analytic_area() const {
        double s = a0 * a0;
        for (const auto& m : modes) s += 0.5 * (m.a * m.a + m.b * m.b);
        return kPi * s;
    }

    // Arclength by periodic trapezoid quadrature (spectrally accurate).
    double analytic_perimeter(int n = 8192) const {
        double L = 0.0;
        for (int i = 0; i < n; ++i) {
            const RadiusJet j = eval_radius(2.0 * kPi * i / n);
            L += std::sqrt(j.r * j.r + j.rp * j.rp);
        }
        return L * 2.0 * kPi / n;
    }

    // r > 0 sampled on the standard 4096-point grid.
    bool is_positive(int n = 4096) const {
        for (int i = 0; i < n; ++i)
            if (eval_radius(2.0 * kPi * i / n).r <= 0.0) return false;
        return true;
    }

    void require_positive() const {
        if (!is_positive()) throw Error("star boundary: radius not positive on the 4096-point grid");
    }

    StarBoundary rescaled_to_area(double V0) const {
        if (V0 <= 0.0) throw Error("rescale: target area must be positive");
        const double lambda = std::sqrt(V0 / analytic_area());
        StarBoundary out = *this;
        out.a0 *= lambda;
        for (auto& m : out.modes) {
            m.a *= lambda;
            m.b *= lambda;
        }
        return out;
    }

    // Rigid rotation by phi (phase shift of every mode).
    StarBoundary rotated(double phi) const {
        StarBoundary out = *this;
        for (auto& m : out.modes) {
            const double c = std::cos(m.k * phi);
            const double s = std::sin(m.k * phi);
            const double a = m.a, b = m.b;
            m.a = a * c - b * s;
            m.b = a * s + b * c;
        }
        return out;
    }

    double mode_coefficient(int k, bool sine) const {
        for (const auto& m : modes)
            if (m.k == k) return sine ? m.b : m.a;
        return 0.0;
    }

    void set_mode(int k, double a, double b) {
        for (auto& m : modes) {
            if (m.k == k) {
                m.a = a;
                m.b = b;
                return;
            }
        }
        modes.push_back({k, a, b});
        normalize_modes();
    }

private:
    void normalize_modes() {
        std::sort(modes.begin(), modes.end(),
                  [](const FourierMode& l, const FourierMode& r) { return l.k < r.k; });
        for (std::size_t i = 0; i + 1 < modes.size(); ++i)
            if (modes[i].k == modes[i + 1].k) throw Error("star boundary: duplicate mode order");
        for (const auto& m : modes)
            if (m.k < 1) throw Error("star boundary: mode order must be positive");
    }
};

inline StarBoundary rescale_to_volume(const StarBoundary& sb, double V0) {
    return sb.rescaled_to_area(V0);
}

// Cumulative arclength table over a uniform theta grid; used to place
// boundary nodes at equal arclength spacing.
class ArclengthTable {
public:
    explicit ArclengthTable(const StarBoundary& sb, int n = 8192) : thetas_(n + 1), cum_(n + 1) {
        cum_[0] = 0.0;
        double prev = speed(sb, 0.0);
        thetas_[0] = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double th = 2.0 * kPi * i / n;
            const double cur = speed(sb, th);
            thetas_[i] = th;
            cum_[i] = cum_[i - 1] + 0.5 * (prev + cur) * (2.0 * kPi / n);
            prev = cur;
        }
    }

    double total() const { return cum_.back(); }

    // theta at arclength s (s in [0,total]).
    double theta_at(double s) const {
        s = clamp(s, 0.0, total());
        auto it = std::lower_bound(cum_.begin(), cum_.end(), s);
        if (it == cum_.begin()) return 0.0;
        const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
        const double t = (s - cum_[i - 1]) / (cum_[i] - cum_[i - 1]);
        return thetas_[i - 1] + t * (thetas_[i] - thetas_[i - 1]);
    }

private:
    static double speed(const StarBoundary& sb, double th) {
        const RadiusJet j = sb.eval_radius(th);
        return std::sqrt(j.r * j.r + j.rp * j.rp);
    }

    std::vector<double> thetas_;
    std::vector<double> cum_;
};

// ---- star file format ------------------------------------------------------
// header "starshape 1", then "center x y", "a0 v", and one "mode k a b" per mode.

inline void write_star(std::ostream& os, const StarBoundary& sb) {
    os.precision(17);
    os << "starshape 1\n";
    os << "center " << sb.center.x << " " << sb.center.y << "\n";
    os << "a0 " << sb.a0 << "\n";
    for (const auto& m : sb.modes) os << "mode " << m.k << " " << m.a << " " << m.b << "\n";
}

inline StarBoundary read_star(std::istream& is) {
    std::string line;
    int lineno = 0;
    auto next = [&](bool required) -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line[0] != '#') return true;
        }
        if (required) throw ParseError("star file: unexpected end of file at line " + std::to_string(lineno));
        return false;
    };
    next(true);
    if (line != "starshape 1")
        throw ParseError("star file: bad header at line " + std::to_string(lineno) + ": '" + line + "'");
    StarBoundary sb;
    sb.a0 = 0.0;
    bool have_a0 = false;
    while (next(false)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "center") {
            if (!(ss >> sb.center.x >> sb.center.y))
                throw ParseError("star file: bad center at line " + std::to_string(lineno));
        } else if (tag == "a0") {
            if (!(ss >> sb.a0)) throw ParseError("star file: bad a0 at line " + std::to_string(lineno));
            have_a0 = true;
        } else if (tag == "mode") {
            FourierMode m;
            if (!(ss >> m.k >> m.a >> m.b))
                throw ParseError("star file: bad mode at line " + std::to_string(lineno));
            sb.modes.push_back(m);
        } else {
            throw ParseError("star file: unknown record '" + tag + "' at line " + std::to_string(lineno));
        }
    }
    if (!have_a0) throw ParseError("star file: missing a0 record");
    std::sort(sb.modes.begin(), sb.modes.end(),
              [](const FourierMode& l, const FourierMode& r) { return l.k < r.k; });
    for (std::size_t i = 0; i + 1 < sb.modes.size(); ++i)
        if (sb.modes[i].k == sb.modes[i + 1].k) throw ParseError("star file: duplicate mode order");
    sb.require_positive();
    return sb;
}

inline StarBoundary read_star_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open star file: " + path);
    return read_star(f);
}

inline void write_star_file(const std::string& path, const StarBoundary& sb) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write star file: " + path);
    write_star(f, sb);
}

}  // namespace insul
