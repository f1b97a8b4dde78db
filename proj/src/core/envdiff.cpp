#include "envdiff.hpp"

#include "error.hpp"

namespace lrmsim {

EnvDiffusionRun simulate_env_diffusion(const OccupationProfile& profile, int m, const StopRule& stop, RngStream& rng,
                                       std::shared_ptr<const ContinuousEnvironment> quenched) {
    require(m >= 1, "simulate_env_diffusion: mesh exponent m must be at least 1");
    EnvDiffusionRun out;
    out.m = m;
    if (quenched) {
        out.env = std::move(quenched);
    } else {
        RngStream env_rng = rng.split(1);
        out.env = std::make_shared<const ContinuousEnvironment>(sample_continuous_env_on_lattice(profile, m, env_rng));
    }
    out.env_hash = out.env->hash();
    const Lattice lat = make_lattice(profile.lo(), profile.hi(), m);
    const std::vector<double> L0 = lattice_restrict(profile, m);
    const std::vector<double> U = out.env->on_lattice(lat);
    RngStream walk_rng = rng.split(2);
    out.run = jump_process_in_environment(lat, L0, U, stop, walk_rng);
    return out;
}

LatticeRun time_change_to_lrm(const EnvDiffusionRun& run) { return mixture_time_change(run.run, run.run.field.base); }

LatticeRun xi_representation(const EnvDiffusionRun& run) { return reduced_time_change(run.run); }

}  // namespace lrmsim
