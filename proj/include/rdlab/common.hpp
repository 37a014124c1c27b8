#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdlab {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Deterministic uniform source. std::uniform_real_distribution is
// implementation-defined, so map the raw 64-bit stream ourselves to keep
// outputs byte-stable across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform in the d-ball of given radius, by rejection from the cube.
    std::vector<double> in_ball(int d, double radius) {
        std::vector<double> p(d);
        while (true) {
            double r2 = 0.0;
            for (int i = 0; i < d; ++i) {
                p[i] = uniform(-1.0, 1.0);
                r2 += p[i] * p[i];
            }
            if (r2 <= 1.0) break;
        }
        for (double& x : p) x *= radius;
        return p;
    }

private:
    std::mt19937_64 gen_;
};

inline double sq(double x) { return x * x; }

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// max(u,0)^e, defined as 0 for u <= 0 so fractional powers never produce NaN.
inline double pos_pow(double u, double e) {
    return u > 0.0 ? std::pow(u, e) : 0.0;
}

// |u|^(e-1) * u; the odd monomial-type tail used by the truncation blends.
inline double signed_pow(double u, double e) {
    if (u == 0.0) return 0.0;
    return std::pow(std::abs(u), e - 1.0) * (u > 0.0 ? 1.0 : -1.0);
}

// Fixed-width float formatting for CSV output: 17 significant digits
// round-trips doubles exactly, so repeated runs emit identical bytes.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace rdlab
