#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "profile.hpp"
#include "rng.hpp"

namespace lrmsim {

enum class Clock { T, Q, U, Step };

const char* clock_name(Clock c);

// Nearest-neighbour path on 2^-n Z. Sites are integer labels i (position i * 2^-n).
struct JumpTrajectory {
    int n = 0;
    Clock clock = Clock::T;
    long start_site = 0;
    std::vector<double> jump_times;
    std::vector<long> sites;  // site after each jump
    bool boundary_hit = false;
    double end_time = 0.0;    // time at which the simulation stopped

    long site_at(double time) const;
    double position_at(double time) const;
    std::size_t jumps() const { return sites.size(); }
};

// Density-normalized local times on a lattice: occ[i] = 2^n * raw occupation of site i.
struct DiscreteLocalTimeField {
    Lattice lattice;
    std::vector<double> base;  // L0 at the sites
    std::vector<double> occ;   // final accumulated local time

    double total_time() const;  // sum of 2^-n occ
};

struct LatticeRun {
    JumpTrajectory traj;
    DiscreteLocalTimeField field;

    // Local times at an intermediate time, rebuilt from the sojourns.
    std::vector<double> occupation_at(double time) const;
};

struct StopRule {
    double primary = std::numeric_limits<double>::infinity();  // t for VRJP, q for environment runs
    // Secondary clocks: the martingale clock u for the VRJP; for environment runs, the mixture
    // clock t (t_max) and the reduced clock u of the unit-profile xi representation (u_max).
    double t_max = std::numeric_limits<double>::infinity();
    double u_max = std::numeric_limits<double>::infinity();
};

LatticeRun simulate_vrjp(const OccupationProfile& profile, int n, const StopRule& stop, RngStream& rng);
LatticeRun simulate_vrjp(const OccupationProfile& profile, int n, double t_max, RngStream& rng);
// Same law; jumps go to on_jump(t, site) and the returned trajectory stays empty.
LatticeRun simulate_vrjp_streaming(const OccupationProfile& profile, int n, const StopRule& stop, RngStream& rng,
                                   const std::function<void(double, long)>& on_jump);

// Discrete-time ERRW; jump_times are 1, 2, ...; field.occ counts visits (unnormalized).
LatticeRun simulate_errw(const OccupationProfile& profile, int n, std::size_t steps, RngStream& rng);

// Markov jump process with rate 2^{2n-1} (L0(x')/L0(x)) exp(-U(x') + U(x)); U given on the lattice.
LatticeRun jump_process_in_environment(const Lattice& lattice, std::span<const double> L0, std::span<const double> U,
                                       const StopRule& stop, RngStream& rng);

// Discrete-time walk with transitions proportional to gamma(x,x') exp(-U(x')); gamma[k] is the
// weight of the edge between lattice indices k and k+1.
LatticeRun walk_in_gamma_environment(const Lattice& lattice, std::span<const double> gamma, std::span<const double> U,
                                     std::size_t steps, RngStream& rng);

// q -> t change of time of an environment run: t(q) = 2^-n sum_x (sqrt(L0^2 + 2 lambda_q) - L0).
// The returned field stores L - L0 with L = sqrt(L0^2 + 2 lambda).
LatticeRun mixture_time_change(const LatticeRun& env_run, std::span<const double> L0);

// q -> u change for unit profiles: du = (1 + 2 lambda)^-2 dq. field.occ holds Lambda = lambda / (1 + 2 lambda).
LatticeRun reduced_time_change(const LatticeRun& env_run);

struct MartingaleTrace {
    std::vector<double> u;  // clock value at each jump
    std::vector<double> M;  // value after each jump
    double u_end = 0.0;
    std::vector<double> gaps;  // final gap per edge, edge k between lattice indices k and k+1

    double value_at(double uu) const;
};

MartingaleTrace track_martingale(const LatticeRun& vrjp_run);

}  // namespace lrmsim
