#pragma once

#include <cstdint>
#include <vector>

#include "profile.hpp"
#include "rng.hpp"

namespace lrmsim {

struct DiscreteEnvironment {
    Lattice lattice;
    std::vector<double> U;  // U(0) = 0
};

struct GammaEnvironment {
    Lattice lattice;
    std::vector<double> gamma;  // gamma[k]: edge between lattice indices k and k+1
    std::vector<double> U;      // hat-U, U(0) = 0
};

// U(x) = sqrt(2) W(S0(x)) + |S0(x)| with W a two-sided Brownian path stored on a y-grid.
class ContinuousEnvironment {
public:
    ContinuousEnvironment(ScaleTable s0, std::vector<double> y, std::vector<double> W);

    double W_at(double y) const;  // linear interpolation of W
    double U_at(double x) const;
    double U_at_grid(std::size_t k) const;
    std::vector<double> on_lattice(const Lattice& lattice) const;
    const ScaleTable& s0() const { return s0_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& W() const { return W_; }
    std::uint64_t hash() const;

private:
    ScaleTable s0_;
    std::vector<double> y_, W_;
};

DiscreteEnvironment sample_discrete_env(const OccupationProfile& profile, int n, RngStream& rng);
GammaEnvironment sample_gamma_env(const OccupationProfile& profile, int n, RngStream& rng);
// Uniform y-grid of step dy anchored at 0, plus the domain endpoints.
ContinuousEnvironment sample_continuous_env(const OccupationProfile& profile, double dy, RngStream& rng);
// y-grid = S0-images of the mesh-n lattice sites, so lattice consumers read W exactly.
ContinuousEnvironment sample_continuous_env_on_lattice(const OccupationProfile& profile, int n, RngStream& rng);

ScaleTable natural_scale(const ContinuousEnvironment& env, const OccupationProfile& profile);
ScaleTable natural_scale(const DiscreteEnvironment& env, const OccupationProfile& profile);

}  // namespace lrmsim
