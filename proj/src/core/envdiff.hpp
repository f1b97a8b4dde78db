#pragma once

#include <cstdint>
#include <memory>

#include "environment.hpp"
#include "lattice.hpp"

namespace lrmsim {

struct EnvDiffusionRun {
    std::shared_ptr<const ContinuousEnvironment> env;
    std::uint64_t env_hash = 0;
    int m = 0;
    LatticeRun run;  // q-time
};

// Lattice jump process at mesh m in a continuous environment evaluated at the sites.
// A fresh environment is drawn unless `quenched` is given.
EnvDiffusionRun simulate_env_diffusion(const OccupationProfile& profile, int m, const StopRule& stop, RngStream& rng,
                                       std::shared_ptr<const ContinuousEnvironment> quenched = nullptr);

LatticeRun time_change_to_lrm(const EnvDiffusionRun& run);
LatticeRun xi_representation(const EnvDiffusionRun& run);

}  // namespace lrmsim
