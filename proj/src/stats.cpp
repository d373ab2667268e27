#include "rsb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "rsb/errors.hpp"

namespace rsb {

namespace {

void require_finite(std::span<const double> x, const char* what) {
    for (double v : x) {
        if (!std::isfinite(v)) throw DataError(std::string(what) + ": non-finite value");
    }
}

}  // namespace

double sample_mean(std::span<const double> x) {
    if (x.empty()) throw DegenerateSampleError("sample_mean: empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw DegenerateSampleError("sample_variance: need at least 2 values");
    const double m = sample_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double paired_diff_variance(std::span<const double> x, std::span<const double> y, std::size_t n) {
    if (n < 2) throw DegenerateSampleError("paired_diff_variance: n < 2");
    if (x.size() < n || y.size() < n) throw DomainError("paired_diff_variance: vectors shorter than n");
    double dbar = 0.0;
    for (std::size_t r = 0; r < n; ++r) dbar += x[r] - y[r];
    dbar /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double e = x[r] - y[r] - dbar;
        ss += e * e;
    }
    return ss / static_cast<double>(n - 1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double student_t_sf(double x, double df) {
    if (!(df > 0.0)) throw DomainError("student_t_sf: df must be positive");
    if (std::isnan(x)) throw DomainError("student_t_sf: NaN argument");
    if (x == 0.0) return 0.5;
    if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
    const double ax = std::abs(x);
    // P(|T| > ax) = I_{df/(df+x^2)}(df/2, 1/2)
    const double z = df / (df + ax * ax);
    const double tail = 0.5 * boost::math::ibeta(0.5 * df, 0.5, z);
    return x > 0 ? tail : 1.0 - tail;
}

double student_t_cdf(double x, double df) {
    if (x <= 0.0) return student_t_sf(-x, df);
    return 1.0 - student_t_sf(x, df);
}

double student_t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("student_t_quantile: p must lie in (0,1)");
    if (!(df >= 1.0)) throw DomainError("student_t_quantile: df must be >= 1");
    if (p == 0.5) return 0.0;
    const bool upper = p > 0.5;
    const double q = upper ? 1.0 - p : p;  // target upper-tail mass

    double lo = 0.0, hi = 1.0;
    while (student_t_sf(hi, df) > q) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericError("student_t_quantile: bracket search failed");
    }
    for (int it = 0; it < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_sf(mid, df) > q) lo = mid;
        else hi = mid;
    }
    const double x = 0.5 * (lo + hi);
    return upper ? x : -x;
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw DegenerateSampleError("ks_statistic: empty sample");
    require_finite(sample, "ks_statistic");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double up = std::abs(static_cast<double>(i + 1) / n - f);
        const double dn = std::abs(f - static_cast<double>(i) / n);
        d = std::max({d, up, dn});
    }
    return std::min(d, 1.0);
}

double ks_critical_coefficient(double level) {
    struct Row {
        double level, coef;
    };
    static constexpr Row table[] = {{0.10, 1.224}, {0.05, 1.358}, {0.025, 1.480}, {0.01, 1.628}, {0.001, 1.949}};
    for (const auto& row : table) {
        if (std::abs(row.level - level) < 1e-12) return row.coef;
    }
    throw ConfigError("ks_critical_coefficient: unsupported level " + std::to_string(level) +
                      " (supported: 0.10, 0.05, 0.025, 0.01, 0.001)");
}

bool ks_accepts_statistic(double statistic, std::size_t n, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("ks_accepts: level must lie in (0,1)");
    if (n == 0) throw DegenerateSampleError("ks_accepts: empty sample");
    return statistic < ks_critical_coefficient(level) / std::sqrt(static_cast<double>(n));
}

bool ks_accepts(std::span<const double> sample, const std::function<double(double)>& cdf, double level) {
    // Validate the level before doing any work so bad configs fail fast.
    ks_critical_coefficient(level);
    return ks_accepts_statistic(ks_statistic(sample, cdf), sample.size(), level);
}

double empirical_quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DegenerateSampleError("empirical_quantile: empty sample");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("empirical_quantile: p must lie in (0,1)");
    const double n = static_cast<double>(sorted.size());
    // Guard against p*n landing one ulp above an integer.
    auto idx = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, sorted.size());
    return sorted[idx - 1];
}

double empirical_quantile(std::span<const double> samples, double p) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return empirical_quantile_sorted(sorted, p);
}

MeanCI mean_ci(std::span<const double> values, double level) {
    MeanCI ci;
    ci.n = values.size();
    if (values.empty()) return ci;
    ci.mean = sample_mean(values);
    if (values.size() < 2) {
        ci.half_width = std::numeric_limits<double>::infinity();
        return ci;
    }
    const double z = normal_quantile(0.5 + 0.5 * level);
    ci.half_width = z * std::sqrt(sample_variance(values) / static_cast<double>(values.size()));
    return ci;
}

ProportionCI proportion_ci(std::size_t successes, std::size_t n, double level) {
    ProportionCI ci;
    ci.n = n;
    if (n == 0) return ci;
    ci.p = static_cast<double>(successes) / static_cast<double>(n);
    const double z = normal_quantile(0.5 + 0.5 * level);
    const double hw = z * std::sqrt(ci.p * (1.0 - ci.p) / static_cast<double>(n));
    ci.lower = std::max(0.0, ci.p - hw);
    ci.upper = std::min(1.0, ci.p + hw);
    return ci;
}

MeanCI ratio_of_means_ci(std::span<const double> x, std::span<const double> y, double level) {
    if (x.size() != y.size() || x.empty()) throw DomainError("ratio_of_means_ci: need equal-length nonempty inputs");
    MeanCI ci;
    ci.n = x.size();
    const double mx = sample_mean(x), my = sample_mean(y);
    if (my == 0.0) throw NumericError("ratio_of_means_ci: zero denominator mean");
    ci.mean = mx / my;
    if (x.size() < 2) {
        ci.half_width = std::numeric_limits<double>::infinity();
        return ci;
    }
    double vx = 0.0, vy = 0.0, cxy = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r) {
        vx += (x[r] - mx) * (x[r] - mx);
        vy += (y[r] - my) * (y[r] - my);
        cxy += (x[r] - mx) * (y[r] - my);
    }
    const double d = static_cast<double>(x.size() - 1);
    vx /= d;
    vy /= d;
    cxy /= d;
    const double r = ci.mean;
    const double var = std::max(0.0, (vx - 2.0 * r * cxy + r * r * vy) / (my * my));
    ci.half_width = normal_quantile(0.5 + 0.5 * level) * std::sqrt(var / static_cast<double>(x.size()));
    return ci;
}

}  // namespace rsb
