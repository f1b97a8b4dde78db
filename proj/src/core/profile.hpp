#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lrmsim {

struct Knot {
    double x;
    double L;
};

// Initial occupation profile L0 on a closed domain. Every kind compiles to
// piecewise-linear knots spanning the domain.
class OccupationProfile {
public:
    enum class Kind { Constant, PiecewiseLinear, Builtin };

    static OccupationProfile constant(double c, double lo, double hi);
    static OccupationProfile piecewise_linear(std::vector<Knot> knots, double lo, double hi);
    // Named built-ins: "unit", "bump", "ramp". knots_per_unit controls compilation of "bump".
    static OccupationProfile builtin(const std::string& name, double lo, double hi, int knots_per_unit = 64);
    // {"kind":"constant","c":1,"domain":[-8,8]}, {"kind":"pwl","knots":[[x,L],...],"domain":[..]},
    // {"kind":"builtin","name":"bump","domain":[..]}
    static OccupationProfile from_json(const std::string& text);

    double operator()(double x) const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const std::vector<Knot>& knots() const { return knots_; }
    bool is_constant(double c) const;
    // True when the condition for non-explosion at infinity is known to hold (built-ins and
    // constants, extended by constants outside the domain). Unknown otherwise.
    bool non_explosion_verified() const { return kind_ != Kind::PiecewiseLinear; }
    std::string to_json() const;
    std::uint64_t hash() const;

private:
    Kind kind_ = Kind::Constant;
    std::string name_;
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<Knot> knots_;
};

// Sites i * 2^-n inside a closed interval; index 0 is site i_min.
struct Lattice {
    int n = 0;
    long i_min = 0;
    long i_max = 0;

    double h() const;
    std::size_t size() const { return static_cast<std::size_t>(i_max - i_min + 1); }
    double x(std::size_t idx) const { return static_cast<double>(i_min + static_cast<long>(idx)) * h(); }
    std::size_t origin() const { return static_cast<std::size_t>(-i_min); }
    bool contains_origin() const { return i_min <= 0 && i_max >= 0; }
    bool operator==(const Lattice&) const = default;
};

Lattice make_lattice(double lo, double hi, int n);
std::vector<double> lattice_restrict(const OccupationProfile& profile, int n);

// Strictly increasing map with segments S(x_k + s) = S_k + s / (a_k (a_k + b_k s)).
// This is the exact primitive of (a + b s)^-2; b = 0 gives a linear segment of slope a^-2.
class ScaleTable {
public:
    struct Segment {
        double x, S, a, b;
    };

    ScaleTable() = default;
    ScaleTable(double x0, std::vector<Segment> segs, double x_end);

    double operator()(double x) const;
    double invert(double y) const;
    double x0() const { return x0_; }
    double x_lo() const { return segs_.front().x; }
    double x_hi() const { return x_end_; }
    double y_lo() const { return segs_.front().S; }
    double y_hi() const { return S_end_; }
    const std::vector<Segment>& segments() const { return segs_; }

    // Piecewise-linear table through (x_k, S_k), anchored so that S(x0) = 0.
    static ScaleTable linear_through(std::vector<double> xs, std::vector<double> Ss, double x0);

private:
    double x0_ = 0.0;
    std::vector<Segment> segs_;
    double x_end_ = 0.0;
    double S_end_ = 0.0;
};

ScaleTable scale_s0(const OccupationProfile& profile, double x0);

}  // namespace lrmsim
