#pragma once

#include <cstddef>

#include "rng.hpp"
#include "stats.hpp"

namespace lrmsim {

struct RaceEstimate {
    std::size_t replicas = 0;
    std::size_t upper_first = 0;
    Interval ci;  // Wilson interval on P(U_up(y2) < U_down(y1))
};

// Probability that B_u + u reaches y2 before B_u - u reaches y1.
// Steps are max(step, d^2/16) with d the distance to the nearer barrier and crossings inside a
// step are resolved with the Brownian-bridge probability for linear barriers.
bool race_once(double y1, double y2, double step, RngStream& rng);
RaceEstimate race_oracle(double y1, double y2, double step, std::size_t replicas, std::uint64_t seed,
                         unsigned threads = 0);

}  // namespace lrmsim
