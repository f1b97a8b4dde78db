#include "samplers.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace lrmsim {

namespace {

// Michael-Schucany-Haas with mean 1: returns a = nu^2 / (2 shape) and whether the smaller
// root was accepted. The smaller root is 1 / (1 + a + sqrt(a^2 + 2a)) = exp(-acosh(1 + a)).
struct IgUnitDraw {
    double a;
    bool small_root;
};

IgUnitDraw ig_unit(double shape, RngStream& rng) {
    const double nu = rng.normal();
    const double a = nu * nu / (2.0 * shape);
    const double x = 1.0 / (1.0 + a + std::sqrt(a * a + 2.0 * a));
    return {a, rng.uniform() <= 1.0 / (1.0 + x)};
}

}  // namespace

double sample_exponential(RngStream& rng) { return -std::log(rng.uniform()); }

double sample_gamma(double shape, RngStream& rng) {
    require(shape > 0.0 && std::isfinite(shape), "gamma shape must be positive");
    if (shape < 1.0) {
        const double g = sample_gamma(shape + 1.0, rng);
        return g * std::pow(rng.uniform(), 1.0 / shape);
    }
    // Marsaglia-Tsang
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_inverse_gaussian(double mean, double shape, RngStream& rng) {
    require(mean > 0.0 && shape > 0.0, "inverse Gaussian parameters must be positive");
    // IG(mean, shape) = mean * IG(1, shape / mean)
    const IgUnitDraw d = ig_unit(shape / mean, rng);
    const double x = 1.0 / (1.0 + d.a + std::sqrt(d.a * d.a + 2.0 * d.a));
    return mean * (d.small_root ? x : 1.0 / x);
}

double sample_sinh_v(double K, RngStream& rng) {
    require(K > 0.0 && std::isfinite(K), "sinh density parameter K must be positive");
    const IgUnitDraw d = ig_unit(0.5 * K, rng);
    const double v = std::log1p(d.a + std::sqrt(d.a * d.a + 2.0 * d.a));
    return d.small_root ? v : -v;
}

double sinh_v_density(double v, double K) {
    const double s = std::sinh(0.5 * v);
    return std::sqrt(K / (4.0 * std::numbers::pi)) * std::exp(-K * s * s + 0.5 * v);
}

}  // namespace lrmsim
