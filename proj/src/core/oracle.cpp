#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"

namespace lrmsim {

namespace {

constexpr double negligible = 1e-15;

// First barrier touched by the bridge from (u0, b0) to (u0 + dt, b1): +1 upper, -1 lower, 0 none.
// When both touches are possible the bridge is bisected instead of guessing the order.
int resolve_bridge(double y1, double y2, double u0, double b0, double dt, double b1, RngStream& rng, int depth) {
    const double u1 = u0 + dt;
    const double d_lo = b0 - (y1 + u0), d_hi = (y2 - u0) - b0;
    const double e_lo = b1 - (y1 + u1), e_hi = (y2 - u1) - b1;
    const double p_lo = e_lo <= 0.0 ? 1.0 : std::exp(-2.0 * d_lo * e_lo / dt);
    const double p_hi = e_hi <= 0.0 ? 1.0 : std::exp(-2.0 * d_hi * e_hi / dt);
    if (p_lo < negligible) return rng.uniform() < p_hi ? 1 : 0;
    if (p_hi < negligible) return rng.uniform() < p_lo ? -1 : 0;
    if (depth >= 60) return rng.uniform() * (p_lo + p_hi) < p_hi ? 1 : -1;
    const double h = 0.5 * dt;
    const double bm = 0.5 * (b0 + b1) + 0.5 * std::sqrt(dt) * rng.normal();
    const int first = resolve_bridge(y1, y2, u0, b0, h, bm, rng, depth + 1);
    if (first != 0) return first;
    return resolve_bridge(y1, y2, u0 + h, bm, h, b1, rng, depth + 1);
}

}  // namespace

bool race_once(double y1, double y2, double step, RngStream& rng) {
    // In B coordinates the lower barrier is y1 + u and the upper barrier is y2 - u.
    const double u_close = 0.5 * (y2 - y1);
    double u = 0.0, b = 0.0;
    for (;;) {
        const double d_lo = b - (y1 + u);
        const double d_hi = (y2 - u) - b;
        const double near = std::min(d_lo, d_hi);
        double dt = std::max(step, near * near / 16.0);
        dt = std::min(dt, u_close - u);
        if (dt <= 0.0) return d_hi <= d_lo;
        const double b1 = b + std::sqrt(dt) * rng.normal();
        const int hit = resolve_bridge(y1, y2, u, b, dt, b1, rng, 0);
        if (hit != 0) return hit > 0;
        u += dt;
        b = b1;
    }
}

RaceEstimate race_oracle(double y1, double y2, double step, std::size_t replicas, std::uint64_t seed,
                         unsigned threads) {
    require(y1 < 0.0 && y2 > 0.0, "race_oracle: requires y1 < 0 < y2");
    require(step > 0.0, "race_oracle: step must be positive");
    require(replicas > 0, "race_oracle: replicas must be positive");
    constexpr std::size_t chunk = 4096;
    const std::size_t chunks = (replicas + chunk - 1) / chunk;
    const auto counts = parallel_map<std::size_t>(chunks, threads, [&](std::size_t c) {
        RngStream rng(seed, c);
        std::size_t hits = 0;
        const std::size_t end = std::min(replicas, (c + 1) * chunk);
        for (std::size_t r = c * chunk; r < end; ++r) hits += race_once(y1, y2, step, rng) ? 1 : 0;
        return hits;
    });
    RaceEstimate est;
    est.replicas = replicas;
    for (auto h : counts) est.upper_first += h;
    est.ci = wilson_interval(est.upper_first, replicas);
    return est;
}

}  // namespace lrmsim
