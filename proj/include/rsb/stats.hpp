#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rsb {

using SampleVector = std::vector<double>;

double sample_mean(std::span<const double> x);

// Unbiased (n-1) variance. Throws DegenerateSampleError for fewer than 2 values.
double sample_variance(std::span<const double> x);

// Variance of the paired differences x_r - y_r over the first n replications.
double paired_diff_variance(std::span<const double> x, std::span<const double> y, std::size_t n);

double normal_cdf(double x);
double normal_quantile(double p);

double student_t_cdf(double x, double df);
// Upper tail P(T > x), evaluated without cancellation for large x.
double student_t_sf(double x, double df);
// Solves CDF(x) = p by bisection on the incomplete-beta tail, then polishes
// with Newton steps. Absolute CDF error below 1e-10.
double student_t_quantile(double p, double df);

// Sup-distance between the empirical CDF of `sample` and `cdf`.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);

// Asymptotic K-S coefficient c(level); critical value is c/sqrt(n).
// Supported levels: 0.10, 0.05, 0.025, 0.01, 0.001.
double ks_critical_coefficient(double level);

bool ks_accepts(std::span<const double> sample, const std::function<double(double)>& cdf, double level);
bool ks_accepts_statistic(double statistic, std::size_t n, double level);

// The ceil(p*n)-th order statistic (1-based), no interpolation.
double empirical_quantile(std::span<const double> samples, double p);
double empirical_quantile_sorted(std::span<const double> sorted, double p);

// Normal-approximation confidence interval for a mean.
struct MeanCI {
    double mean = 0.0;
    double half_width = 0.0;
    std::size_t n = 0;
    double lower() const { return mean - half_width; }
    double upper() const { return mean + half_width; }
};

MeanCI mean_ci(std::span<const double> values, double level = 0.95);

// Wald interval for a Bernoulli proportion, clipped to [0,1].
struct ProportionCI {
    double p = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::size_t n = 0;
    double half_width() const { return 0.5 * (upper - lower); }
};

ProportionCI proportion_ci(std::size_t successes, std::size_t n, double level = 0.95);

// Ratio of means mean(x)/mean(y) for paired observations, with a delta-method
// interval.
MeanCI ratio_of_means_ci(std::span<const double> x, std::span<const double> y, double level = 0.95);

}  // namespace rsb
