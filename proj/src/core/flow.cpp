#include "flow.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace lrmsim {

const char* event_name(FlowEventKind k) {
    switch (k) {
        case FlowEventKind::CrossUp: return "cross_up";
        case FlowEventKind::CrossDown: return "cross_down";
        case FlowEventKind::SlideBegin: return "slide_begin";
        case FlowEventKind::SlideEnd: return "slide_end";
    }
    return "?";
}

FlowIntegrator::FlowIntegrator(std::vector<double> y, bool log_events)
    : FlowIntegrator(y, y, 0.0, log_events) {}

FlowIntegrator::FlowIntegrator(std::vector<double> y, std::vector<double> psi0, double b0, bool log_events)
    : y_(std::move(y)), base_(std::move(psi0)), b_(b0), log_(log_events) {
    require(!y_.empty(), "flow: empty y grid");
    require(y_.size() == base_.size(), "flow: initial condition size mismatch");
    for (std::size_t i = 1; i < y_.size(); ++i) {
        require(y_[i] > y_[i - 1], "flow: y grid must be strictly increasing");
        require(base_[i] >= base_[i - 1], "flow: initial positions must be nondecreasing");
    }
    lo_ = static_cast<std::size_t>(std::lower_bound(base_.begin(), base_.end(), b0) - base_.begin());
    hi_ = static_cast<std::size_t>(std::upper_bound(base_.begin(), base_.end(), b0) - base_.begin());
}

double FlowIntegrator::psi(std::size_t i) const {
    if (i < lo_) return base_[i] + shift_below_;
    if (i < hi_) return b_;
    return base_[i] - shift_above_;
}

LineMode FlowIntegrator::mode(std::size_t i) const {
    if (i < lo_) return LineMode::Below;
    if (i < hi_) return LineMode::Sliding;
    return LineMode::Above;
}

std::vector<double> FlowIntegrator::psi_all() const {
    std::vector<double> out(y_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = psi(i);
    return out;
}

void FlowIntegrator::step(double b1, double du) {
    require(du > 0.0, "flow: segment length must be positive");
    const double b0 = b_;
    const double m = (b1 - b0) / du;
    const std::size_t N = y_.size();

    // Lines that reach B inside the segment: the top of the lower group and the bottom of the upper group.
    std::size_t kb = 0, ka = 0;
    while (kb < lo_ && base_[lo_ - kb - 1] + shift_below_ + du >= b1) ++kb;
    while (hi_ + ka < N && base_[hi_ + ka] - shift_above_ - du <= b1) ++ka;

    const double sb = shift_below_ + du;
    const double sa = shift_above_ + du;

    if (std::abs(m) <= 1.0) {
        // Meeting lines slide on B; sliding lines stay.
        for (std::size_t k = 0; k < kb; ++k) {
            const std::size_t i = lo_ - 1 - k;
            const double p = base_[i] + shift_below_;
            log(u_ + std::clamp((b0 - p) / (1.0 - m), 0.0, du), i, FlowEventKind::SlideBegin);
        }
        for (std::size_t k = 0; k < ka; ++k) {
            const std::size_t i = hi_ + k;
            const double p = base_[i] - shift_above_;
            log(u_ + std::clamp((p - b0) / (1.0 + m), 0.0, du), i, FlowEventKind::SlideBegin);
        }
        lo_ -= kb;
        hi_ += ka;
    } else if (m > 1.0) {
        // Sliding lines detach downward; meeting upper lines cross and join the lower group.
        for (std::size_t i = lo_; i < hi_; ++i) {
            log(u_, i, FlowEventKind::SlideEnd);
            base_[i] = b0 + du - sb;
        }
        for (std::size_t k = 0; k < ka; ++k) {
            const std::size_t i = hi_ + k;
            const double p = base_[i] - shift_above_;
            const double s = std::clamp((p - b0) / (1.0 + m), 0.0, du);
            log(u_ + s, i, FlowEventKind::CrossDown);
            base_[i] = p + du - 2.0 * s - sb;
        }
        hi_ += ka;
        lo_ = hi_;
    } else {
        for (std::size_t i = lo_; i < hi_; ++i) {
            log(u_, i, FlowEventKind::SlideEnd);
            base_[i] = b0 - du + sa;
        }
        for (std::size_t k = 0; k < kb; ++k) {
            const std::size_t i = lo_ - 1 - k;
            const double p = base_[i] + shift_below_;
            const double s = std::clamp((b0 - p) / (1.0 - m), 0.0, du);
            log(u_ + s, i, FlowEventKind::CrossUp);
            base_[i] = p - du + 2.0 * s + sa;
        }
        lo_ -= kb;
        hi_ = lo_;
    }
    shift_below_ = sb;
    shift_above_ = sa;
    u_ += du;
    b_ = b1;
}

double FlowIntegrator::slope(std::size_t i) const {
    const std::size_t N = y_.size();
    if (N < 2) return 1.0;
    const std::size_t a = (i == 0) ? 0 : i - 1;
    const std::size_t c = (i + 1 >= N) ? N - 1 : i + 1;
    return (psi(c) - psi(a)) / (y_[c] - y_[a]);
}

void FlowIntegrator::bracket(std::size_t& i, std::size_t& j) const {
    if (lo_ == 0 || hi_ >= y_.size()) fail_range("flow: driver left the tracked range; widen the y grid");
    i = lo_ - 1;
    j = hi_;
}

double FlowIntegrator::xi() const {
    if (hi_ > lo_) return 0.5 * (y_[lo_] + y_[hi_ - 1]);
    std::size_t i, j;
    bracket(i, j);
    const double pi = psi(i), pj = psi(j);
    return y_[i] + (b_ - pi) / (pj - pi) * (y_[j] - y_[i]);
}

double FlowIntegrator::lambda_at_xi() const {
    auto lam = [this](std::size_t k) { return std::clamp(0.5 * (1.0 - slope(k)), 0.0, 0.5); };
    if (hi_ > lo_) {
        const std::size_t a = lo_, c = hi_ - 1;
        return 0.5 * (lam(a) + lam(c));
    }
    std::size_t i, j;
    bracket(i, j);
    const double w = (xi() - y_[i]) / (y_[j] - y_[i]);
    return (1.0 - w) * lam(i) + w * lam(j);
}

FlowState snapshot(const FlowIntegrator& flow) {
    FlowState s;
    s.u = flow.u();
    s.b = flow.b();
    s.y = flow.y();
    s.psi = flow.psi_all();
    s.mode.resize(flow.size());
    for (std::size_t i = 0; i < flow.size(); ++i) s.mode[i] = flow.mode(i);
    return s;
}

LocalTimeProfile local_times(const FlowState& s) {
    const std::size_t N = s.y.size();
    require(N >= 3, "flow_local_times: needs at least three tracked points");
    LocalTimeProfile p;
    p.u = s.u;
    p.Lcal.resize(N);
    p.Lambda.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t a = (i == 0) ? 0 : i - 1;
        const std::size_t c = (i + 1 >= N) ? N - 1 : i + 1;
        const double r = (s.psi[c] - s.psi[a]) / (s.y[c] - s.y[a]);
        p.Lcal[i] = (r >= 1.0) ? 0.0 : (r > 0.0 ? -0.5 * std::log(r) : std::numeric_limits<double>::infinity());
        p.Lambda[i] = std::clamp(0.5 * (1.0 - r), 0.0, 0.5);
    }
    return p;
}

std::vector<LocalTimeProfile> flow_local_times(const std::vector<FlowState>& states, double tol,
                                               std::size_t* violations) {
    std::vector<LocalTimeProfile> out;
    std::size_t bad = 0;
    for (const FlowState& s : states) {
        LocalTimeProfile p = local_times(s);
        if (!out.empty()) {
            const LocalTimeProfile& prev = out.back();
            for (std::size_t i = 0; i < p.Lcal.size(); ++i) {
                if (p.Lcal[i] < prev.Lcal[i]) {
                    if (prev.Lcal[i] - p.Lcal[i] > tol) ++bad;
                    p.Lcal[i] = prev.Lcal[i];
                    p.Lambda[i] = prev.Lambda[i];
                }
            }
        }
        out.push_back(std::move(p));
    }
    if (violations) *violations = bad;
    return out;
}

FlowRun flow_run(const BrownianPath& driver, const std::vector<double>& y_grid, double u_max,
                 const FlowRunOptions& opt) {
    require(!y_grid.empty(), "flow_run: empty y grid");
    require(u_max > 0.0, "flow_run: u_max must be positive");
    const auto K = static_cast<std::size_t>(std::llround(u_max / driver.du));
    require(K <= driver.steps(), "flow_run: u_max exceeds the driver length");
    FlowIntegrator flow(y_grid, y_grid, driver.values[0], opt.log_events);
    FlowRun run;
    run.du = driver.du;
    const std::size_t sub = std::max<std::size_t>(opt.xi_substeps, 1);
    run.xi_du = driver.du / static_cast<double>(sub);
    run.xi.reserve(K * sub + 1);
    run.lambda_at_xi.reserve(K * sub + 1);
    run.checkpoints.push_back(snapshot(flow));
    run.xi.push_back(flow.xi());
    run.lambda_at_xi.push_back(flow.lambda_at_xi());
    for (std::size_t k = 1; k <= K; ++k) {
        // Sub-steps follow the same linear segment, so the flow itself is unchanged.
        const double b0 = driver.values[k - 1], b1 = driver.values[k];
        for (std::size_t j = 1; j <= sub; ++j) {
            const double w = static_cast<double>(j) / static_cast<double>(sub);
            flow.step(j == sub ? b1 : b0 + w * (b1 - b0), run.xi_du);
            run.xi.push_back(flow.xi());
            run.lambda_at_xi.push_back(flow.lambda_at_xi());
        }
        if ((opt.checkpoint_every > 0 && k % opt.checkpoint_every == 0) || k == K) {
            if (k == K && run.checkpoints.back().u == flow.u()) continue;
            run.checkpoints.push_back(snapshot(flow));
        }
    }
    run.events = flow.events();
    return run;
}

double invert_state(const FlowState& s) {
    const auto lo = static_cast<std::size_t>(std::lower_bound(s.psi.begin(), s.psi.end(), s.b) - s.psi.begin());
    const auto hi = static_cast<std::size_t>(std::upper_bound(s.psi.begin(), s.psi.end(), s.b) - s.psi.begin());
    if (hi > lo) return 0.5 * (s.y[lo] + s.y[hi - 1]);
    if (lo == 0 || hi >= s.y.size()) fail_range("reduced_process: B outside the tracked range; widen the y grid");
    const std::size_t i = lo - 1, j = hi;
    return s.y[i] + (s.b - s.psi[i]) / (s.psi[j] - s.psi[i]) * (s.y[j] - s.y[i]);
}

std::vector<double> reduced_process(const std::vector<FlowState>& states) {
    std::vector<double> out;
    out.reserve(states.size());
    for (const FlowState& s : states) out.push_back(invert_state(s));
    return out;
}

Binning occupation_binning(const std::vector<double>& path, double du, double w) {
    require(w > 0.0, "occupation_binning: bin width must be positive");
    require(!path.empty(), "occupation_binning: empty path");
    const auto [mn, mx] = std::minmax_element(path.begin(), path.end());
    Binning b;
    b.width = w;
    b.first_bin = static_cast<long>(std::floor(*mn / w));
    const auto last = static_cast<long>(std::floor(*mx / w));
    b.density.assign(static_cast<std::size_t>(last - b.first_bin + 1), 0.0);
    auto bin_of = [&](double x) {
        auto k = static_cast<long>(std::floor(x / w)) - b.first_bin;
        return static_cast<std::size_t>(std::clamp(k, 0L, static_cast<long>(b.density.size()) - 1));
    };
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        double a = path[k], c = path[k + 1];
        if (a == c) {
            b.density[bin_of(a)] += du;
            continue;
        }
        if (a > c) std::swap(a, c);
        // Time spent in each bin is proportional to the length of [a, c] inside it.
        const double rate = du / (c - a);
        double x = a;
        while (x < c) {
            const std::size_t bi = bin_of(x);
            const double edge = std::min(c, static_cast<double>(b.first_bin + static_cast<long>(bi) + 1) * w);
            const double stop = edge > x ? edge : c;
            b.density[bi] += (stop - x) * rate;
            x = stop;
        }
    }
    for (double& d : b.density) d /= w;
    return b;
}

double quadratic_variation(const std::vector<double>& path, std::size_t stride) {
    require(stride > 0, "quadratic_variation: stride must be positive");
    double q = 0.0;
    for (std::size_t k = stride; k < path.size(); k += stride) {
        const double d = path[k] - path[k - stride];
        q += d * d;
    }
    return q;
}

std::vector<double> uniform_grid(double span, std::size_t points) {
    require(span > 0.0 && points >= 3, "uniform grid needs a positive span and at least three points");
    std::vector<double> y(points);
    for (std::size_t i = 0; i < points; ++i)
        y[i] = -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(points - 1);
    if (points % 2 == 1) y[points / 2] = 0.0;
    return y;
}

}  // namespace lrmsim
