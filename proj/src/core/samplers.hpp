#pragma once

#include "rng.hpp"

namespace lrmsim {

double sample_exponential(RngStream& rng);  // rate 1
double sample_gamma(double shape, RngStream& rng);
double sample_inverse_gaussian(double mean, double shape, RngStream& rng);

// V with density proportional to exp(-K sinh(v/2)^2 + v/2).
// exp(-V) is inverse Gaussian with mean 1 and shape K/2.
double sample_sinh_v(double K, RngStream& rng);

// Normalized density of sample_sinh_v, for goodness-of-fit checks.
double sinh_v_density(double v, double K);

}  // namespace lrmsim
