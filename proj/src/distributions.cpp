#include "rsb/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/pareto.hpp>
#include <boost/math/distributions/triangular.hpp>
#include <boost/math/distributions/weibull.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "rsb/errors.hpp"
#include "rsb/stats.hpp"

namespace rsb {

namespace {

constexpr std::pair<Family, std::string_view> kNames[] = {
    {Family::lognormal, "lognormal"},     {Family::gamma, "gamma"},
    {Family::weibull, "weibull"},         {Family::exponential, "exponential"},
    {Family::pareto, "pareto"},           {Family::triangular, "triangular"},
    {Family::deterministic, "deterministic"}, {Family::empirical, "empirical"},
};

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

}  // namespace

std::string_view family_name(Family f) {
    for (const auto& [fam, name] : kNames) {
        if (fam == f) return name;
    }
    return "unknown";
}

Family family_from_name(std::string_view name) {
    for (const auto& [fam, n] : kNames) {
        if (n == name) return fam;
    }
    throw ConfigError("unknown distribution family '" + std::string(name) + "'");
}

Distribution Distribution::lognormal(double mu, double sigma) {
    if (!std::isfinite(mu)) throw DomainError("lognormal: mu must be finite");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("lognormal: sigma must be >= 0");
    Distribution d;
    d.family_ = Family::lognormal;
    d.params_ = {mu, sigma, 0.0};
    return d;
}

Distribution Distribution::lognormal_with_mean(double mean, double sigma) {
    require_positive(mean, "lognormal mean");
    return lognormal(std::log(mean) - 0.5 * sigma * sigma, sigma);
}

Distribution Distribution::gamma(double shape, double scale) {
    require_positive(shape, "gamma shape");
    require_positive(scale, "gamma scale");
    Distribution d;
    d.family_ = Family::gamma;
    d.params_ = {shape, scale, 0.0};
    return d;
}

Distribution Distribution::weibull(double shape, double scale) {
    require_positive(shape, "weibull shape");
    require_positive(scale, "weibull scale");
    Distribution d;
    d.family_ = Family::weibull;
    d.params_ = {shape, scale, 0.0};
    return d;
}

Distribution Distribution::exponential(double rate) {
    require_positive(rate, "exponential rate");
    Distribution d;
    d.family_ = Family::exponential;
    d.params_ = {rate, 0.0, 0.0};
    return d;
}

Distribution Distribution::pareto(double xm, double alpha) {
    require_positive(xm, "pareto x_m");
    require_positive(alpha, "pareto alpha");
    Distribution d;
    d.family_ = Family::pareto;
    d.params_ = {xm, alpha, 0.0};
    return d;
}

Distribution Distribution::triangular(double lower, double mode, double upper) {
    if (!(lower <= mode && mode <= upper && lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
        throw DomainError("triangular: need lower <= mode <= upper with lower < upper");
    Distribution d;
    d.family_ = Family::triangular;
    d.params_ = {lower, mode, upper};
    return d;
}

Distribution Distribution::deterministic(double value) {
    if (!std::isfinite(value)) throw DomainError("deterministic: value must be finite");
    Distribution d;
    d.family_ = Family::deterministic;
    d.params_ = {value, 0.0, 0.0};
    return d;
}

Distribution Distribution::empirical(std::vector<double> data) {
    if (data.empty()) throw DomainError("empirical: empty data");
    for (double v : data) {
        if (!std::isfinite(v)) throw DataError("empirical: non-finite value");
    }
    std::sort(data.begin(), data.end());
    Distribution d;
    d.family_ = Family::empirical;
    d.data_ = std::make_shared<const std::vector<double>>(std::move(data));
    return d;
}

std::span<const double> Distribution::support() const {
    if (!data_) return {};
    return {data_->data(), data_->size()};
}

double Distribution::cdf(double x) const {
    const auto& p = params_;
    switch (family_) {
        case Family::lognormal:
            if (x <= 0.0) return 0.0;
            if (p[1] == 0.0) return std::log(x) >= p[0] ? 1.0 : 0.0;
            return boost::math::cdf(boost::math::lognormal_distribution<double>(p[0], p[1]), x);
        case Family::gamma:
            if (x <= 0.0) return 0.0;
            return boost::math::cdf(boost::math::gamma_distribution<double>(p[0], p[1]), x);
        case Family::weibull:
            if (x <= 0.0) return 0.0;
            return boost::math::cdf(boost::math::weibull_distribution<double>(p[0], p[1]), x);
        case Family::exponential:
            if (x <= 0.0) return 0.0;
            return boost::math::cdf(boost::math::exponential_distribution<double>(p[0]), x);
        case Family::pareto:
            if (x <= p[0]) return 0.0;
            return boost::math::cdf(boost::math::pareto_distribution<double>(p[0], p[1]), x);
        case Family::triangular:
            if (x <= p[0]) return 0.0;
            if (x >= p[2]) return 1.0;
            return boost::math::cdf(boost::math::triangular_distribution<double>(p[0], p[1], p[2]), x);
        case Family::deterministic:
            return x >= p[0] ? 1.0 : 0.0;
        case Family::empirical: {
            const auto it = std::upper_bound(data_->begin(), data_->end(), x);
            return static_cast<double>(it - data_->begin()) / static_cast<double>(data_->size());
        }
    }
    return 0.0;
}

double Distribution::mean() const {
    const auto& p = params_;
    switch (family_) {
        case Family::lognormal: return std::exp(p[0] + 0.5 * p[1] * p[1]);
        case Family::gamma: return p[0] * p[1];
        case Family::weibull: return p[1] * std::tgamma(1.0 + 1.0 / p[0]);
        case Family::exponential: return 1.0 / p[0];
        case Family::pareto:
            return p[1] > 1.0 ? p[1] * p[0] / (p[1] - 1.0) : std::numeric_limits<double>::infinity();
        case Family::triangular: return (p[0] + p[1] + p[2]) / 3.0;
        case Family::deterministic: return p[0];
        case Family::empirical: return sample_mean(*data_);
    }
    return 0.0;
}

double Distribution::variance() const {
    const auto& p = params_;
    switch (family_) {
        case Family::lognormal: {
            const double s2 = p[1] * p[1];
            return std::expm1(s2) * std::exp(2.0 * p[0] + s2);
        }
        case Family::gamma: return p[0] * p[1] * p[1];
        case Family::weibull: {
            const double g1 = std::tgamma(1.0 + 1.0 / p[0]);
            const double g2 = std::tgamma(1.0 + 2.0 / p[0]);
            return p[1] * p[1] * (g2 - g1 * g1);
        }
        case Family::exponential: return 1.0 / (p[0] * p[0]);
        case Family::pareto:
            if (p[1] <= 2.0) return std::numeric_limits<double>::infinity();
            return p[0] * p[0] * p[1] / ((p[1] - 1.0) * (p[1] - 1.0) * (p[1] - 2.0));
        case Family::triangular:
            return (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - p[0] * p[1] - p[0] * p[2] - p[1] * p[2]) / 18.0;
        case Family::deterministic: return 0.0;
        case Family::empirical: {
            // Population variance of the resampling distribution.
            const double m = mean();
            double ss = 0.0;
            for (double v : *data_) ss += (v - m) * (v - m);
            return ss / static_cast<double>(data_->size());
        }
    }
    return 0.0;
}

double Distribution::quantile(double prob) const {
    if (!(prob > 0.0 && prob < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
    const auto& p = params_;
    switch (family_) {
        case Family::lognormal:
            if (p[1] == 0.0) return std::exp(p[0]);
            return boost::math::quantile(boost::math::lognormal_distribution<double>(p[0], p[1]), prob);
        case Family::gamma:
            return boost::math::quantile(boost::math::gamma_distribution<double>(p[0], p[1]), prob);
        case Family::weibull:
            return p[1] * std::pow(-std::log1p(-prob), 1.0 / p[0]);
        case Family::exponential:
            return -std::log1p(-prob) / p[0];
        case Family::pareto:
            return p[0] * std::pow(1.0 - prob, -1.0 / p[1]);
        case Family::triangular: {
            const double a = p[0], c = p[1], b = p[2];
            const double fc = (c - a) / (b - a);
            if (prob < fc) return a + std::sqrt(prob * (b - a) * (c - a));
            return b - std::sqrt((1.0 - prob) * (b - a) * (b - c));
        }
        case Family::deterministic: return p[0];
        case Family::empirical: return empirical_quantile_sorted(*data_, prob);
    }
    return 0.0;
}

std::string Distribution::describe() const {
    std::ostringstream os;
    os.precision(6);
    os << family_name(family_) << "(";
    switch (family_) {
        case Family::lognormal: os << "mu=" << params_[0] << ", sigma=" << params_[1]; break;
        case Family::gamma:
        case Family::weibull: os << "shape=" << params_[0] << ", scale=" << params_[1]; break;
        case Family::exponential: os << "rate=" << params_[0]; break;
        case Family::pareto: os << "xm=" << params_[0] << ", alpha=" << params_[1]; break;
        case Family::triangular:
            os << "lower=" << params_[0] << ", mode=" << params_[1] << ", upper=" << params_[2];
            break;
        case Family::deterministic: os << "value=" << params_[0]; break;
        case Family::empirical: os << "n=" << data_->size(); break;
    }
    os << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// MLE

namespace {

double fit_gamma_shape(double s, double mom_shape) {
    // Root of log k - digamma(k) = s; the left side is decreasing in k.
    double k = mom_shape > 0.0 && std::isfinite(mom_shape) ? mom_shape : 0.5 / s;
    for (int it = 0; it < kMleMaxIterations; ++it) {
        const double f = std::log(k) - boost::math::digamma(k) - s;
        if (std::abs(f) < kMleTolerance) return k;
        const double fp = 1.0 / k - boost::math::trigamma(k);
        double next = k - f / fp;
        if (!(next > 0.0) || !std::isfinite(next)) next = 0.5 * k;
        k = next;
    }
    throw FitError("gamma MLE did not converge");
}

double weibull_profile(double k, std::span<const double> logy, double& deriv) {
    // logy are logs of data scaled by the geometric mean (so they average 0).
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double l : logy) {
        const double w = std::exp(k * l);
        s0 += w;
        s1 += w * l;
        s2 += w * l * l;
    }
    const double r = s1 / s0;
    deriv = s2 / s0 - r * r + 1.0 / (k * k);
    return r - 1.0 / k;
}

double fit_weibull_shape(std::span<const double> logy) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double k = 1.0;
    for (int it = 0; it < kMleMaxIterations; ++it) {
        double d = 0.0;
        const double g = weibull_profile(k, logy, d);
        if (std::abs(g) < kMleTolerance) return k;
        // g is increasing in k: keep a bracket and fall back to bisection.
        if (g < 0.0) lo = k;
        else hi = k;
        double next = k - g / d;
        const bool inside = next > lo && (std::isinf(hi) ? std::isfinite(next) : next < hi);
        if (!inside) next = std::isinf(hi) ? 2.0 * k : 0.5 * (lo + hi);
        k = next;
    }
    throw FitError("weibull MLE did not converge");
}

double triangular_loglik(std::span<const double> x, double a, double c, double b) {
    double ll = 0.0;
    for (double v : x) {
        double dens;
        if (v < c) dens = 2.0 * (v - a) / ((b - a) * (c - a));
        else if (v > c) dens = 2.0 * (b - v) / ((b - a) * (b - c));
        else dens = 2.0 / (b - a);
        if (!(dens > 0.0)) return -std::numeric_limits<double>::infinity();
        ll += std::log(dens);
    }
    return ll;
}

void check_positive_support(std::span<const double> x, Family f) {
    for (double v : x) {
        if (!std::isfinite(v)) throw DataError("fit_mle: non-finite value");
        if (!(v > 0.0))
            throw DomainError("fit_mle: " + std::string(family_name(f)) + " requires positive data");
    }
}

}  // namespace

FittedDistribution fit_mle(Family family, std::span<const double> x) {
    if (x.empty()) throw DegenerateSampleError("fit_mle: empty sample");
    const double n = static_cast<double>(x.size());
    FittedDistribution out;
    out.source_size = x.size();

    switch (family) {
        case Family::lognormal: {
            check_positive_support(x, family);
            double mu = 0.0;
            for (double v : x) mu += std::log(v);
            mu /= n;
            double ss = 0.0;
            for (double v : x) ss += (std::log(v) - mu) * (std::log(v) - mu);
            double sigma = std::sqrt(ss / n);
            if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
                mu = std::log(x[0]);
                sigma = 0.0;
            }
            out.dist = Distribution::lognormal(mu, sigma);
            out.degenerate = sigma == 0.0;
            break;
        }
        case Family::exponential: {
            check_positive_support(x, family);
            out.dist = Distribution::exponential(1.0 / sample_mean(x));
            break;
        }
        case Family::gamma: {
            check_positive_support(x, family);
            const double m = sample_mean(x);
            double mlog = 0.0;
            for (double v : x) mlog += std::log(v);
            mlog /= n;
            const double s = std::log(m) - mlog;
            if (!(s > 1e-14)) throw FitError("gamma MLE: sample has no spread");
            double var = 0.0;
            for (double v : x) var += (v - m) * (v - m);
            var /= n;
            const double shape = fit_gamma_shape(s, var > 0.0 ? m * m / var : 0.0);
            out.dist = Distribution::gamma(shape, m / shape);
            break;
        }
        case Family::weibull: {
            check_positive_support(x, family);
            double mlog = 0.0;
            for (double v : x) mlog += std::log(v);
            mlog /= n;
            std::vector<double> logy(x.size());
            bool spread = false;
            for (std::size_t r = 0; r < x.size(); ++r) {
                logy[r] = std::log(x[r]) - mlog;
                spread = spread || std::abs(logy[r]) > 1e-14;
            }
            if (!spread) throw FitError("weibull MLE: sample has no spread");
            const double k = fit_weibull_shape(logy);
            double s0 = 0.0;
            for (double l : logy) s0 += std::exp(k * l);
            const double scale = std::exp(mlog) * std::pow(s0 / n, 1.0 / k);
            out.dist = Distribution::weibull(k, scale);
            break;
        }
        case Family::pareto: {
            check_positive_support(x, family);
            const double xm = *std::min_element(x.begin(), x.end());
            double sl = 0.0;
            for (double v : x) sl += std::log(v / xm);
            if (!(sl > 0.0)) throw FitError("pareto MLE: sample has no spread");
            out.dist = Distribution::pareto(xm, n / sl);
            break;
        }
        case Family::triangular: {
            for (double v : x) {
                if (!std::isfinite(v)) throw DataError("fit_mle: non-finite value");
            }
            const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
            const double range = *mx - *mn;
            if (!(range > 0.0)) throw FitError("triangular MLE: sample has no spread");
            // Bounds at the sample extremes would give an extreme point zero
            // density for any interior mode, so they are widened by range/n.
            const double a = *mn - range / n, b = *mx + range / n;
            constexpr int grid = 200;
            double best_c = a, best_ll = -std::numeric_limits<double>::infinity();
            for (int g = 0; g <= grid; ++g) {
                const double c = a + (b - a) * g / grid;
                const double ll = triangular_loglik(x, a, c, b);
                if (ll > best_ll) {
                    best_ll = ll;
                    best_c = c;
                }
            }
            // Golden-section refinement within the neighbouring grid cells.
            double lo = std::max(a, best_c - (b - a) / grid), hi = std::min(b, best_c + (b - a) / grid);
            const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
            double c1 = hi - phi * (hi - lo), c2 = lo + phi * (hi - lo);
            double f1 = triangular_loglik(x, a, c1, b), f2 = triangular_loglik(x, a, c2, b);
            for (int it = 0; it < kMleMaxIterations && hi - lo > kMleTolerance * (b - a); ++it) {
                if (f1 >= f2) {
                    hi = c2;
                    c2 = c1;
                    f2 = f1;
                    c1 = hi - phi * (hi - lo);
                    f1 = triangular_loglik(x, a, c1, b);
                } else {
                    lo = c1;
                    c1 = c2;
                    f1 = f2;
                    c2 = lo + phi * (hi - lo);
                    f2 = triangular_loglik(x, a, c2, b);
                }
            }
            double c = 0.5 * (lo + hi);
            if (triangular_loglik(x, a, c, b) < best_ll) c = best_c;
            out.dist = Distribution::triangular(a, c, b);
            break;
        }
        case Family::deterministic:
        case Family::empirical:
            throw ConfigError("fit_mle: family '" + std::string(family_name(family)) + "' is not fitted by MLE");
    }

    const Distribution& d = out.dist;
    out.ks_stat = ks_statistic(x, [&d](double v) { return d.cdf(v); });
    return out;
}

}  // namespace rsb
