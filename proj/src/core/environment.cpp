#include "environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"
#include "samplers.hpp"

namespace lrmsim {

namespace {

// Two-sided Brownian path on a sorted grid containing 0, pinned at W(0) = 0.
std::vector<double> two_sided_brownian(const std::vector<double>& y, RngStream& rng) {
    std::vector<double> W(y.size(), 0.0);
    const auto zero = static_cast<std::size_t>(std::find(y.begin(), y.end(), 0.0) - y.begin());
    require(zero < y.size(), "environment grid must contain 0");
    for (std::size_t k = zero + 1; k < y.size(); ++k) W[k] = W[k - 1] + std::sqrt(y[k] - y[k - 1]) * rng.normal();
    for (std::size_t k = zero; k-- > 0;) W[k] = W[k + 1] + std::sqrt(y[k + 1] - y[k]) * rng.normal();
    return W;
}

}  // namespace

ContinuousEnvironment::ContinuousEnvironment(ScaleTable s0, std::vector<double> y, std::vector<double> W)
    : s0_(std::move(s0)), y_(std::move(y)), W_(std::move(W)) {
    require(y_.size() >= 2 && y_.size() == W_.size(), "continuous environment: grid/value size mismatch");
    for (std::size_t k = 1; k < y_.size(); ++k) require(y_[k] > y_[k - 1], "continuous environment: grid not increasing");
}

double ContinuousEnvironment::W_at(double y) const {
    if (y <= y_.front()) return W_.front();
    if (y >= y_.back()) return W_.back();
    auto it = std::upper_bound(y_.begin(), y_.end(), y);
    const auto k = static_cast<std::size_t>(it - y_.begin());
    const double w = (y - y_[k - 1]) / (y_[k] - y_[k - 1]);
    return W_[k - 1] + w * (W_[k] - W_[k - 1]);
}

double ContinuousEnvironment::U_at(double x) const {
    const double y = s0_(x);
    return std::numbers::sqrt2 * W_at(y) + std::abs(y);
}

double ContinuousEnvironment::U_at_grid(std::size_t k) const { return std::numbers::sqrt2 * W_[k] + std::abs(y_[k]); }

std::vector<double> ContinuousEnvironment::on_lattice(const Lattice& lattice) const {
    std::vector<double> out(lattice.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = U_at(lattice.x(i));
    return out;
}

std::uint64_t ContinuousEnvironment::hash() const {
    std::uint64_t h = 0xCBF29CE484222325ull;
    auto mix = [&h](double v) {
        const auto* p = reinterpret_cast<const unsigned char*>(&v);
        for (std::size_t i = 0; i < sizeof v; ++i) {
            h ^= p[i];
            h *= 0x100000001B3ull;
        }
    };
    for (std::size_t k = 0; k < y_.size(); ++k) {
        mix(y_[k]);
        mix(W_[k]);
    }
    return h;
}

DiscreteEnvironment sample_discrete_env(const OccupationProfile& profile, int n, RngStream& rng) {
    const Lattice lat = make_lattice(profile.lo(), profile.hi(), n);
    require(lat.contains_origin(), "sample_discrete_env: lattice must contain 0");
    const std::vector<double> L0 = lattice_restrict(profile, n);
    const double scale = std::ldexp(1.0, n);
    DiscreteEnvironment env{lat, std::vector<double>(lat.size(), 0.0)};
    const std::size_t o = lat.origin();
    for (std::size_t i = o + 1; i < lat.size(); ++i)
        env.U[i] = env.U[i - 1] + sample_sinh_v(scale * L0[i] * L0[i - 1], rng);
    for (std::size_t i = o; i-- > 0;) env.U[i] = env.U[i + 1] + sample_sinh_v(scale * L0[i] * L0[i + 1], rng);
    return env;
}

GammaEnvironment sample_gamma_env(const OccupationProfile& profile, int n, RngStream& rng) {
    const Lattice lat = make_lattice(profile.lo(), profile.hi(), n);
    require(lat.contains_origin(), "sample_gamma_env: lattice must contain 0");
    require(lat.size() >= 2, "sample_gamma_env: lattice needs at least one edge");
    const std::vector<double> L0 = lattice_restrict(profile, n);
    const double half = std::ldexp(1.0, n - 1);
    GammaEnvironment env{lat, std::vector<double>(lat.size() - 1), std::vector<double>(lat.size(), 0.0)};
    for (std::size_t k = 0; k + 1 < lat.size(); ++k) env.gamma[k] = sample_gamma(half * L0[k] * L0[k + 1], rng);
    const std::size_t o = lat.origin();
    // Each increment uses the edge on the side of the origin.
    for (std::size_t i = o + 1; i < lat.size(); ++i) env.U[i] = env.U[i - 1] + sample_sinh_v(2.0 * env.gamma[i - 1], rng);
    for (std::size_t i = o; i-- > 0;) env.U[i] = env.U[i + 1] + sample_sinh_v(2.0 * env.gamma[i], rng);
    return env;
}

ContinuousEnvironment sample_continuous_env(const OccupationProfile& profile, double dy, RngStream& rng) {
    require(dy > 0.0, "sample_continuous_env: grid step must be positive");
    ScaleTable s0 = scale_s0(profile, 0.0);
    const double ylo = s0.y_lo(), yhi = s0.y_hi();
    std::vector<double> y;
    const auto kmin = static_cast<long>(std::ceil(ylo / dy));
    const auto kmax = static_cast<long>(std::floor(yhi / dy));
    if (ylo < static_cast<double>(kmin) * dy) y.push_back(ylo);
    for (long k = kmin; k <= kmax; ++k) y.push_back(static_cast<double>(k) * dy);
    if (yhi > static_cast<double>(kmax) * dy) y.push_back(yhi);
    std::vector<double> W = two_sided_brownian(y, rng);
    return ContinuousEnvironment(std::move(s0), std::move(y), std::move(W));
}

ContinuousEnvironment sample_continuous_env_on_lattice(const OccupationProfile& profile, int n, RngStream& rng) {
    ScaleTable s0 = scale_s0(profile, 0.0);
    const Lattice lat = make_lattice(profile.lo(), profile.hi(), n);
    require(lat.contains_origin(), "sample_continuous_env: lattice must contain 0");
    std::vector<double> y(lat.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i == lat.origin()) ? 0.0 : s0(lat.x(i));
    std::vector<double> W = two_sided_brownian(y, rng);
    return ContinuousEnvironment(std::move(s0), std::move(y), std::move(W));
}

ScaleTable natural_scale(const ContinuousEnvironment& env, const OccupationProfile& profile) {
    const auto& y = env.y();
    std::vector<double> xs(y.size()), S(y.size(), 0.0);
    const ScaleTable& s0 = env.s0();
    for (std::size_t k = 0; k < y.size(); ++k) xs[k] = (y[k] == 0.0) ? 0.0 : s0.invert(y[k]);
    const auto zero = static_cast<std::size_t>(std::find(y.begin(), y.end(), 0.0) - y.begin());
    require(zero < y.size(), "natural_scale: grid must contain 0");
    require(xs.front() >= profile.lo() - 1e-9 && xs.back() <= profile.hi() + 1e-9,
            "natural_scale: environment and profile domains differ");
    for (std::size_t k = zero + 1; k < y.size(); ++k)
        S[k] = S[k - 1] + 0.5 * (std::exp(2.0 * env.U_at_grid(k - 1)) + std::exp(2.0 * env.U_at_grid(k))) * (y[k] - y[k - 1]);
    for (std::size_t k = zero; k-- > 0;)
        S[k] = S[k + 1] - 0.5 * (std::exp(2.0 * env.U_at_grid(k)) + std::exp(2.0 * env.U_at_grid(k + 1))) * (y[k + 1] - y[k]);
    return ScaleTable::linear_through(std::move(xs), std::move(S), 0.0);
}

ScaleTable natural_scale(const DiscreteEnvironment& env, const OccupationProfile& profile) {
    const Lattice& lat = env.lattice;
    const std::vector<double> L0 = lattice_restrict(profile, lat.n);
    require(L0.size() == env.U.size(), "natural_scale: environment and profile domains differ");
    const double h = lat.h();
    std::vector<double> xs(lat.size()), S(lat.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = lat.x(i);
    const std::size_t o = lat.origin();
    for (std::size_t i = o + 1; i < xs.size(); ++i)
        S[i] = S[i - 1] + h / (L0[i] * L0[i - 1]) * std::exp(env.U[i] + env.U[i - 1]);
    for (std::size_t i = o; i-- > 0;) S[i] = S[i + 1] - h / (L0[i] * L0[i + 1]) * std::exp(env.U[i] + env.U[i + 1]);
    return ScaleTable::linear_through(std::move(xs), std::move(S), 0.0);
}

}  // namespace lrmsim
