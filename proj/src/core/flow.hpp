#pragma once

#include <cstddef>
#include <vector>

#include "brownian.hpp"

namespace lrmsim {

enum class LineMode { Below, Sliding, Above };
enum class FlowEventKind { CrossUp, CrossDown, SlideBegin, SlideEnd };

const char* event_name(FlowEventKind k);

struct FlowEvent {
    double u;
    std::size_t index;
    FlowEventKind kind;
};

// dY/du = -sign(Y - B) for a piecewise-linear B, integrated exactly segment by segment.
// Lines below B share one shift accumulator, lines above B another, and lines sliding on B
// carry no state, so a segment costs O(number of lines that change mode).
class FlowIntegrator {
public:
    FlowIntegrator(std::vector<double> y, std::vector<double> psi0, double b0 = 0.0, bool log_events = false);
    explicit FlowIntegrator(std::vector<double> y, bool log_events = false);

    // Advance over one driver segment from the current B to b1 in flow time du.
    void step(double b1, double du);

    std::size_t size() const { return y_.size(); }
    double u() const { return u_; }
    double b() const { return b_; }
    const std::vector<double>& y() const { return y_; }
    double psi(std::size_t i) const;
    LineMode mode(std::size_t i) const;
    std::vector<double> psi_all() const;
    std::size_t below_count() const { return lo_; }
    std::size_t sliding_count() const { return hi_ - lo_; }
    const std::vector<FlowEvent>& events() const { return events_; }

    // Centered finite-difference estimate of dPsi/dy at tracked point i (one-sided at the ends).
    double slope(std::size_t i) const;
    // Preimage of the current B and the interpolated Lambda there.
    double xi() const;
    double lambda_at_xi() const;

private:
    std::vector<double> y_;
    std::vector<double> base_;
    std::size_t lo_ = 0, hi_ = 0;  // [0,lo) below, [lo,hi) sliding, [hi,N) above
    double shift_below_ = 0.0, shift_above_ = 0.0;
    double u_ = 0.0, b_ = 0.0;
    bool log_ = false;
    std::vector<FlowEvent> events_;

    void log(double u, std::size_t i, FlowEventKind k) {
        if (log_) events_.push_back({u, i, k});
    }
    void bracket(std::size_t& i, std::size_t& j) const;
};

struct FlowState {
    double u = 0.0;
    double b = 0.0;
    std::vector<double> y;
    std::vector<double> psi;
    std::vector<LineMode> mode;
};

FlowState snapshot(const FlowIntegrator& flow);

struct LocalTimeProfile {
    double u = 0.0;
    std::vector<double> Lcal;    // -1/2 log dPsi/dy
    std::vector<double> Lambda;  // (1 - exp(-2 Lcal)) / 2
};

LocalTimeProfile local_times(const FlowState& s);
// Applies per-point monotone clamping in u; drops larger than tol are counted in *violations.
std::vector<LocalTimeProfile> flow_local_times(const std::vector<FlowState>& states, double tol = 1e-9,
                                               std::size_t* violations = nullptr);

struct FlowRunOptions {
    std::size_t checkpoint_every = 0;  // grid steps between snapshots; 0 keeps only start and end
    bool log_events = false;
    std::size_t xi_substeps = 1;  // samples of xi per driver segment
};

struct FlowRun {
    double du = 0.0;
    std::vector<FlowState> checkpoints;
    std::vector<FlowEvent> events;
    double xi_du = 0.0;                 // spacing of the xi samples
    std::vector<double> xi;             // reduced process, xi_substeps samples per driver segment
    std::vector<double> lambda_at_xi;   // Lambda_u(xi_u) at the same samples
};

FlowRun flow_run(const BrownianPath& driver, const std::vector<double>& y_grid, double u_max,
                 const FlowRunOptions& opt = {});

// xi = Psi^-1(B) by piecewise-linear inversion of the tracked table.
double invert_state(const FlowState& s);
std::vector<double> reduced_process(const std::vector<FlowState>& states);

struct Binning {
    double width = 0.0;
    long first_bin = 0;            // bin k covers [k w, (k+1) w)
    std::vector<double> density;   // time in bin / width

    double center(std::size_t k) const { return (static_cast<double>(first_bin + static_cast<long>(k)) + 0.5) * width; }
};

// Occupation of a piecewise-linear path sampled every du.
Binning occupation_binning(const std::vector<double>& path, double du, double bin_width);
double quadratic_variation(const std::vector<double>& path, std::size_t stride = 1);

std::vector<double> uniform_grid(double span, std::size_t points);

}  // namespace lrmsim
