#include "rsb/boundary.hpp"

#include <cmath>
#include <limits>

#include "rsb/errors.hpp"

namespace rsb {

const char* rule_name(ErrorRule r) { return r == ErrorRule::multiplicative ? "multiplicative" : "additive"; }

double error_allowance(ErrorRule rule, int k, int m, double alpha) {
    if (k < 2) throw DomainError("error_allowance: k must be >= 2");
    if (m < 1) throw DomainError("error_allowance: m must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("error_allowance: alpha must lie in (0,1)");
    const double denom = rule == ErrorRule::multiplicative ? static_cast<double>(k) * m - 1.0
                                                           : static_cast<double>(k) + m - 2.0;
    return alpha / denom;
}

double c_from_beta(double beta) {
    if (!(beta > 0.0 && beta <= 0.5)) throw DomainError("c_from_beta: beta must lie in (0, 1/2]");
    return -2.0 * std::log(2.0 * beta);
}

double beta_from_c(double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("beta_from_c: c must be finite and >= 0");
    return 0.5 * std::exp(-0.5 * c);
}

BoundaryParams BoundaryParams::from_beta(double beta) { return {beta, c_from_beta(beta)}; }

BoundaryParams BoundaryParams::from_c(double c) { return {beta_from_c(c), c}; }

double boundary_gc(double t, const BoundaryParams& p) {
    if (!(t >= 0.0)) throw DomainError("boundary_gc: t must be >= 0");
    if (std::isinf(t)) return std::numeric_limits<double>::infinity();
    return std::sqrt((p.c + std::log1p(t)) * (t + 1.0));
}

double boundary_slope(double t, const BoundaryParams& p) {
    if (!(t > 0.0)) throw DomainError("boundary_slope: t must be > 0");
    if (std::isinf(t)) return 0.0;
    return boundary_gc(t, p) / t;
}

IZParams split_iz(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("split_iz: delta must be positive");
    return {delta, 0.5 * delta, 0.5 * delta};
}

double truncation_time(double delta, const BoundaryParams& p) {
    if (!(delta > 0.0)) throw DomainError("truncation_time: delta must be positive");
    if (!(p.c > 0.0)) throw DomainError("truncation_time: c must be positive");
    const auto h = [&](double t) { return t * delta / 2.0 - boundary_gc(t, p); };
    // h < 0 near 0 (g_c(0) = sqrt(c) > 0) and h -> +inf, with a single crossing.
    double lo = 0.0, hi = 1.0;
    while (h(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericError("truncation_time: failed to bracket root");
    }
    for (int it = 0; it < 2000 && (hi - lo) > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) <= 0.0) lo = mid;
        else hi = mid;
    }
    const double root = 0.5 * (lo + hi);
    if (!(std::abs(h(root)) <= 1e-8 * std::max(1.0, root * delta)))
        throw NumericError("truncation_time: back-substitution residual too large");
    return root;
}

}  // namespace rsb
