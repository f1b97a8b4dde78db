#include "profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <json.hpp>

#include "error.hpp"

namespace lrmsim {

namespace {

void check_domain(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "profile domain must be a finite interval lo < hi");
}

void check_knots(const std::vector<Knot>& k) {
    require(k.size() >= 2, "piecewise-linear profile needs at least two knots");
    for (std::size_t i = 0; i < k.size(); ++i) {
        require(std::isfinite(k[i].x) && std::isfinite(k[i].L), "profile knots must be finite");
        require(k[i].L > 0.0, "profile values must be positive");
        if (i > 0) require(k[i].x > k[i - 1].x, "profile knots must be strictly increasing in x");
    }
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace

OccupationProfile OccupationProfile::constant(double c, double lo, double hi) {
    check_domain(lo, hi);
    require(c > 0.0 && std::isfinite(c), "constant profile value must be positive");
    OccupationProfile p;
    p.kind_ = Kind::Constant;
    p.name_ = "constant";
    p.lo_ = lo;
    p.hi_ = hi;
    p.knots_ = {{lo, c}, {hi, c}};
    return p;
}

OccupationProfile OccupationProfile::piecewise_linear(std::vector<Knot> knots, double lo, double hi) {
    check_domain(lo, hi);
    check_knots(knots);
    OccupationProfile p;
    p.kind_ = Kind::PiecewiseLinear;
    p.name_ = "pwl";
    p.lo_ = lo;
    p.hi_ = hi;
    // Clip to the domain, extending by constants where the knots stop short.
    std::vector<Knot> out;
    auto eval = [&](double x) {
        if (x <= knots.front().x) return knots.front().L;
        if (x >= knots.back().x) return knots.back().L;
        auto it = std::upper_bound(knots.begin(), knots.end(), x, [](double v, const Knot& k) { return v < k.x; });
        const Knot& b = *it;
        const Knot& a = *(it - 1);
        return a.L + (b.L - a.L) * (x - a.x) / (b.x - a.x);
    };
    out.push_back({lo, eval(lo)});
    for (const Knot& k : knots)
        if (k.x > lo && k.x < hi) out.push_back(k);
    out.push_back({hi, eval(hi)});
    p.knots_ = std::move(out);
    return p;
}

OccupationProfile OccupationProfile::builtin(const std::string& name, double lo, double hi, int knots_per_unit) {
    check_domain(lo, hi);
    OccupationProfile p;
    if (name == "unit") {
        p = constant(1.0, lo, hi);
    } else if (name == "ramp") {
        // 1 left of 0, rising linearly to 2 at x = 1, flat afterwards.
        p = piecewise_linear({{0.0, 1.0}, {1.0, 2.0}}, lo, hi);
    } else if (name == "bump") {
        // 1 + exp(-2 x^2), compiled to knots.
        require(knots_per_unit > 0, "bump knot density must be positive");
        const auto count = static_cast<long>(std::ceil((hi - lo) * knots_per_unit));
        std::vector<Knot> k;
        for (long i = 0; i <= count; ++i) {
            const double x = (i == count) ? hi : lo + static_cast<double>(i) / knots_per_unit;
            k.push_back({x, 1.0 + std::exp(-2.0 * x * x)});
        }
        p = piecewise_linear(std::move(k), lo, hi);
    } else {
        fail_invalid("unknown built-in profile '" + name + "'");
    }
    p.kind_ = Kind::Builtin;
    p.name_ = name;
    return p;
}

OccupationProfile OccupationProfile::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail_invalid(std::string("profile JSON: ") + e.what());
    }
    require(j.is_object() && j.contains("kind"), "profile JSON: missing field 'kind'");
    double lo = -8.0, hi = 8.0;
    if (j.contains("domain")) {
        const auto& d = j["domain"];
        require(d.is_array() && d.size() == 2 && d[0].is_number() && d[1].is_number(),
                "profile JSON: 'domain' must be [lo, hi]");
        lo = d[0].get<double>();
        hi = d[1].get<double>();
    }
    const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    if (kind == "constant") {
        require(j.contains("c") && j["c"].is_number(), "profile JSON: constant profile needs numeric 'c'");
        return constant(j["c"].get<double>(), lo, hi);
    }
    if (kind == "pwl") {
        require(j.contains("knots") && j["knots"].is_array(), "profile JSON: pwl profile needs 'knots'");
        std::vector<Knot> k;
        for (const auto& e : j["knots"]) {
            require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(),
                    "profile JSON: each knot must be [x, L]");
            k.push_back({e[0].get<double>(), e[1].get<double>()});
        }
        return piecewise_linear(std::move(k), lo, hi);
    }
    if (kind == "builtin") {
        require(j.contains("name") && j["name"].is_string(), "profile JSON: builtin profile needs 'name'");
        const int density = j.value("knots_per_unit", 64);
        return builtin(j["name"].get<std::string>(), lo, hi, density);
    }
    fail_invalid("profile JSON: unknown kind '" + kind + "'");
}

double OccupationProfile::operator()(double x) const {
    if (x <= knots_.front().x) return knots_.front().L;
    if (x >= knots_.back().x) return knots_.back().L;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x, [](double v, const Knot& k) { return v < k.x; });
    const Knot& b = *it;
    const Knot& a = *(it - 1);
    return a.L + (b.L - a.L) * (x - a.x) / (b.x - a.x);
}

bool OccupationProfile::is_constant(double c) const {
    return std::all_of(knots_.begin(), knots_.end(), [c](const Knot& k) { return k.L == c; });
}

std::string OccupationProfile::to_json() const {
    nlohmann::json j;
    if (kind_ == Kind::Constant) {
        j["kind"] = "constant";
        j["c"] = knots_.front().L;
    } else if (kind_ == Kind::Builtin) {
        j["kind"] = "builtin";
        j["name"] = name_;
    } else {
        j["kind"] = "pwl";
        nlohmann::json k = nlohmann::json::array();
        for (const Knot& kn : knots_) k.push_back({kn.x, kn.L});
        j["knots"] = k;
    }
    j["domain"] = {lo_, hi_};
    return j.dump();
}

std::uint64_t OccupationProfile::hash() const {
    std::uint64_t h = 0xCBF29CE484222325ull;
    h = fnv1a(h, name_.data(), name_.size());
    h = fnv1a(h, &lo_, sizeof lo_);
    h = fnv1a(h, &hi_, sizeof hi_);
    for (const Knot& k : knots_) {
        h = fnv1a(h, &k.x, sizeof k.x);
        h = fnv1a(h, &k.L, sizeof k.L);
    }
    return h;
}

double Lattice::h() const { return std::ldexp(1.0, -n); }

Lattice make_lattice(double lo, double hi, int n) {
    require(n >= 0 && n <= 30, "mesh exponent must be in [0, 30]");
    const double scale = std::ldexp(1.0, n);
    Lattice l;
    l.n = n;
    l.i_min = static_cast<long>(std::ceil(lo * scale - 1e-9));
    l.i_max = static_cast<long>(std::floor(hi * scale + 1e-9));
    require(l.i_min <= l.i_max, "lattice does not meet the profile domain");
    return l;
}

std::vector<double> lattice_restrict(const OccupationProfile& profile, int n) {
    const Lattice l = make_lattice(profile.lo(), profile.hi(), n);
    std::vector<double> out(l.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = profile(l.x(i));
    return out;
}

ScaleTable::ScaleTable(double x0, std::vector<Segment> segs, double x_end)
    : x0_(x0), segs_(std::move(segs)), x_end_(x_end) {
    require(!segs_.empty(), "scale table needs at least one segment");
    const Segment& last = segs_.back();
    const double s = x_end_ - last.x;
    S_end_ = last.S + s / (last.a * (last.a + last.b * s));
}

double ScaleTable::operator()(double x) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(x));
    if (x < x_lo() - tol || x > x_hi() + tol) fail_range("scale table evaluated outside its domain");
    x = std::clamp(x, x_lo(), x_hi());
    auto it = std::upper_bound(segs_.begin(), segs_.end(), x, [](double v, const Segment& g) { return v < g.x; });
    const Segment& g = *(it - 1);
    const double s = x - g.x;
    return g.S + s / (g.a * (g.a + g.b * s));
}

double ScaleTable::invert(double y) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(y));
    if (!(y >= y_lo() - tol && y <= y_hi() + tol)) fail_range("scale inversion outside the table range");
    y = std::clamp(y, y_lo(), y_hi());
    auto it = std::upper_bound(segs_.begin(), segs_.end(), y, [](double v, const Segment& g) { return v < g.S; });
    const Segment& g = *(it - 1);
    const double d = y - g.S;
    const double s = d * g.a * g.a / (1.0 - d * g.a * g.b);
    const double x_next = (it == segs_.end()) ? x_end_ : it->x;
    return std::min(g.x + s, x_next);
}

ScaleTable ScaleTable::linear_through(std::vector<double> xs, std::vector<double> Ss, double x0) {
    require(xs.size() >= 2 && xs.size() == Ss.size(), "scale table needs at least two knots");
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double slope = (Ss[i + 1] - Ss[i]) / (xs[i + 1] - xs[i]);
        require(slope > 0.0 && std::isfinite(slope), "scale table must be strictly increasing");
        segs.push_back({xs[i], Ss[i], 1.0 / std::sqrt(slope), 0.0});
    }
    ScaleTable t(x0, std::move(segs), xs.back());
    t.S_end_ = Ss.back();
    return t;
}

ScaleTable scale_s0(const OccupationProfile& profile, double x0) {
    require(x0 >= profile.lo() && x0 <= profile.hi(), "scale anchor must lie in the profile domain");
    const auto& k = profile.knots();
    std::vector<ScaleTable::Segment> segs;
    double S = 0.0;
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
        const double w = k[i + 1].x - k[i].x;
        const double a = k[i].L;
        const double b = (k[i + 1].L - k[i].L) / w;
        segs.push_back({k[i].x, S, a, b});
        S += w / (a * (a + b * w));
    }
    ScaleTable raw(x0, segs, k.back().x);
    const double shift = raw(x0);
    for (auto& g : segs) g.S -= shift;
    return ScaleTable(x0, std::move(segs), k.back().x);
}

}  // namespace lrmsim
