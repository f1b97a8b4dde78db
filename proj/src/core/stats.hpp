#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lrmsim {

struct KsResult {
    double D = 0.0;
    double p = 1.0;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov p-value at n_a n_b / (n_a + n_b).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
// One-sample version against a continuous CDF.
KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);
double kolmogorov_sf(double lambda);

struct Interval {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // unbiased
double chi_square_sf(double x, double dof);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace lrmsim
