#pragma once

#include <cstddef>
#include <vector>

#include "rng.hpp"

namespace lrmsim {

struct BrownianPath {
    double du = 0.0;
    std::vector<double> values;  // B(k du), k = 0..K, values[0] = 0

    std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
    double u_max() const { return du * static_cast<double>(steps()); }
    // Piecewise-linear evaluation.
    double at(double u) const;
};

BrownianPath brownian_path(double du, double u_max, RngStream& rng);
BrownianPath refine_path(const BrownianPath& path, unsigned factor, RngStream& rng);

}  // namespace lrmsim
