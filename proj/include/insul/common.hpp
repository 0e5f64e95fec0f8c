#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace insul {

// ---- error taxonomy ------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define INSUL_ERROR_TYPE(Name)                                 \
    struct Name : Error {                                      \
        explicit Name(const std::string& msg) : Error(msg) {}  \
    }

INSUL_ERROR_TYPE(MeshQualityFailure);
INSUL_ERROR_TYPE(FrameMismatch);
INSUL_ERROR_TYPE(ResolutionTooCoarse);
INSUL_ERROR_TYPE(InsufficientRange);
INSUL_ERROR_TYPE(DisconnectedDomain);
INSUL_ERROR_TYPE(BracketInvalid);
INSUL_ERROR_TYPE(DimensionMismatch);
INSUL_ERROR_TYPE(NoConvergence);
INSUL_ERROR_TYPE(NonDescent);
INSUL_ERROR_TYPE(IncompatibleData);
INSUL_ERROR_TYPE(NegativeTrace);
INSUL_ERROR_TYPE(ZeroTrace);
INSUL_ERROR_TYPE(MassOutOfRange);
INSUL_ERROR_TYPE(UnsupportedDimension);
INSUL_ERROR_TYPE(StallDetected);
INSUL_ERROR_TYPE(ParseError);

#undef INSUL_ERROR_TYPE

// ---- small geometry ------------------------------------------------------

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Point2 o) const { return x * o.x + y * o.y; }
    double cross(Point2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
};

inline double dist(Point2 a, Point2 b) { return (a - b).norm(); }

constexpr double kPi = 3.14159265358979323846;

// ---- counter-based RNG ----------------------------------------------------
//
// Stateless SplitMix64 keyed by (seed, stream); every draw is a pure function
// of the counter, so partitioned parallel work reduces deterministically.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64(seed ^ splitmix64(stream * 0x9E3779B97F4A7C15ULL + 1))) {}

    std::uint64_t next_u64() { return splitmix64(key_ + 0xA0761D6478BD642FULL * ++ctr_); }

    double uniform() {  // in [0,1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

// ---- content hashing (FNV-1a 64) ------------------------------------------

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xF];
        h >>= 4;
    }
    return s;
}

// ---- misc numeric helpers --------------------------------------------------

inline double sq(double x) { return x * x; }

template <class T>
T clamp(T v, T lo, T hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

inline bool approx_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace insul
