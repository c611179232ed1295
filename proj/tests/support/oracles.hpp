#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the estimators they are used to check.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "orient/so3.hpp"

namespace oracle {

// Composite Simpson rule on `nodes` points (nodes must be odd).
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t nodes);

// Root of a monotone increasing f on [a, b] by bisection.
double bisect(const std::function<double(double)>& f, double target, double a, double b, int iters = 200);

// Kolmogorov-Smirnov statistic of `samples` against a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Angle of a rotation via arccos of the trace, clamped.
double trace_angle(const orient::Mat3& m);

// Frobenius distance computed entry by entry.
double frobenius_gap(const orient::Mat3& a, const orient::Mat3& b);

// Rotation maximizing tr(R^T a) over a fixed sample of rotations.
orient::Mat3 best_by_trace(const orient::Mat3& a, std::span<const orient::Mat3> sample);

// Haar rotations from normalized Gaussian quaternions (a different
// construction than the library sampler).
std::vector<orient::Mat3> haar_by_gaussian_quaternions(std::size_t count, unsigned long long seed);

// Squared residual norms computed with a naive double loop over plain vectors.
std::vector<double> naive_residuals(std::span<const double> y, const std::vector<std::vector<double>>& templates);

// Pearson correlation by the textbook two-pass formula.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace oracle
