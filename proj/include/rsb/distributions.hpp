#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsb/rng.hpp"

namespace rsb {

enum class Family { lognormal, gamma, weibull, exponential, pareto, triangular, deterministic, empirical };

std::string_view family_name(Family f);
Family family_from_name(std::string_view name);  // throws ConfigError

// Parameter layout per family:
//   lognormal   (mu, sigma)          log-scale location and shape
//   gamma       (shape, scale)
//   weibull     (shape, scale)
//   exponential (rate)
//   pareto      (x_m, alpha)         support [x_m, inf)
//   triangular  (lower, mode, upper)
//   deterministic (value)
//   empirical   uniform resampling over a stored data vector
class Distribution {
public:
    Distribution() = default;

    static Distribution lognormal(double mu, double sigma);
    // Lognormal with E = mean and log-scale sd sigma.
    static Distribution lognormal_with_mean(double mean, double sigma);
    static Distribution gamma(double shape, double scale);
    static Distribution weibull(double shape, double scale);
    static Distribution exponential(double rate);
    static Distribution exponential_mean(double mean) { return exponential(1.0 / mean); }
    static Distribution pareto(double xm, double alpha);
    static Distribution triangular(double lower, double mode, double upper);
    static Distribution deterministic(double value);
    static Distribution empirical(std::vector<double> data);

    Family family() const { return family_; }
    const std::array<double, 3>& params() const { return params_; }
    std::span<const double> support() const;  // empirical only (sorted)

    double cdf(double x) const;
    double mean() const;
    double variance() const;
    double quantile(double p) const;

    template <class Engine>
    double sample(Engine& eng) const;

    // Fills `out` with consecutive draws. Reuses one distribution object, so it
    // is faster than repeated sample() calls but consumes the engine
    // differently.
    template <class Engine>
    void sample_into(Engine& eng, std::span<double> out) const;

    std::string describe() const;

private:
    Family family_ = Family::deterministic;
    std::array<double, 3> params_{};
    std::shared_ptr<const std::vector<double>> data_;
};

struct FittedDistribution {
    Distribution dist;
    double ks_stat = 1.0;
    std::size_t source_size = 0;
    bool degenerate = false;  // zero-spread sample; params sit on the family boundary

    Family family() const { return dist.family(); }
};

// Maximum-likelihood fit. Throws DomainError for data outside the family's
// support and FitError on non-convergence.
FittedDistribution fit_mle(Family family, std::span<const double> sample);

inline constexpr int kMleMaxIterations = 200;
inline constexpr double kMleTolerance = 1e-8;

template <class Engine>
double Distribution::sample(Engine& eng) const {
    switch (family_) {
        case Family::lognormal:
            if (params_[1] == 0.0) return std::exp(params_[0]);
            return std::lognormal_distribution<double>(params_[0], params_[1])(eng);
        case Family::gamma:
            return std::gamma_distribution<double>(params_[0], params_[1])(eng);
        case Family::weibull:
            return std::weibull_distribution<double>(params_[0], params_[1])(eng);
        case Family::exponential:
            return std::exponential_distribution<double>(params_[0])(eng);
        case Family::deterministic:
            return params_[0];
        case Family::empirical: {
            std::uniform_int_distribution<std::size_t> pick(0, data_->size() - 1);
            return (*data_)[pick(eng)];
        }
        case Family::pareto:
        case Family::triangular: {
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            double u = u01(eng);
            while (u <= 0.0) u = u01(eng);
            return quantile(u);
        }
    }
    return params_[0];
}

template <class Engine>
void Distribution::sample_into(Engine& eng, std::span<double> out) const {
    auto fill = [&](auto dist) {
        for (double& v : out) v = dist(eng);
    };
    switch (family_) {
        case Family::lognormal:
            if (params_[1] == 0.0) {
                for (double& v : out) v = std::exp(params_[0]);
                return;
            }
            fill(std::lognormal_distribution<double>(params_[0], params_[1]));
            return;
        case Family::gamma: fill(std::gamma_distribution<double>(params_[0], params_[1])); return;
        case Family::weibull: fill(std::weibull_distribution<double>(params_[0], params_[1])); return;
        case Family::exponential: fill(std::exponential_distribution<double>(params_[0])); return;
        case Family::deterministic:
            for (double& v : out) v = params_[0];
            return;
        default:
            for (double& v : out) v = sample(eng);
            return;
    }
}

}  // namespace rsb
