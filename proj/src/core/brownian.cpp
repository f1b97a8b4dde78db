#include "brownian.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace lrmsim {

double BrownianPath::at(double u) const {
    if (values.empty()) return 0.0;
    const double pos = u / du;
    if (pos <= 0.0) return values.front();
    const auto k = static_cast<std::size_t>(pos);
    if (k >= steps()) return values.back();
    const double w = pos - static_cast<double>(k);
    return values[k] + w * (values[k + 1] - values[k]);
}

BrownianPath brownian_path(double du, double u_max, RngStream& rng) {
    require(du > 0.0 && std::isfinite(du), "brownian_path: du must be positive");
    require(u_max > 0.0 && std::isfinite(u_max), "brownian_path: u_max must be positive");
    require(u_max >= du, "brownian_path: u_max must be at least du");
    const auto k = static_cast<std::size_t>(std::ceil(u_max / du - 1e-9));
    BrownianPath p;
    p.du = du;
    p.values.resize(k + 1);
    p.values[0] = 0.0;
    const double sd = std::sqrt(du);
    for (std::size_t i = 1; i <= k; ++i) p.values[i] = p.values[i - 1] + sd * rng.normal();
    return p;
}

BrownianPath refine_path(const BrownianPath& path, unsigned factor, RngStream& rng) {
    require(factor > 0 && (factor & (factor - 1)) == 0, "refine_path: factor must be a power of 2");
    BrownianPath cur = path;
    for (unsigned f = factor; f > 1; f >>= 1) {
        BrownianPath next;
        next.du = cur.du / 2.0;
        next.values.resize(2 * cur.steps() + 1);
        // Bridge midpoint over an interval of length du: variance du/4.
        const double sd = std::sqrt(cur.du / 4.0);
        for (std::size_t i = 0; i < cur.steps(); ++i) {
            next.values[2 * i] = cur.values[i];
            next.values[2 * i + 1] = 0.5 * (cur.values[i] + cur.values[i + 1]) + sd * rng.normal();
        }
        next.values.back() = cur.values.back();
        cur = std::move(next);
    }
    return cur;
}

}  // namespace lrmsim
