#pragma once

namespace rsb {

enum class ErrorRule { multiplicative, additive };

const char* rule_name(ErrorRule r);

// Per-comparison error budget: alpha/(km-1) or alpha/(k+m-2).
double error_allowance(ErrorRule rule, int k, int m, double alpha);

double c_from_beta(double beta);
double beta_from_c(double c);

struct BoundaryParams {
    double beta = 0.0;
    double c = 0.0;

    static BoundaryParams from_beta(double beta);
    static BoundaryParams from_c(double c);
};

// g_c(t) = sqrt((c + log(t+1)) (t+1)), natural log. Returns +inf at t = +inf.
double boundary_gc(double t, const BoundaryParams& p);

// g_c(t)/t; strictly decreasing on t > 0 and 0 in the limit t -> inf.
double boundary_slope(double t, const BoundaryParams& p);

struct IZParams {
    double delta = 0.0;
    double delta_inner = 0.0;
    double delta_outer = 0.0;
};

IZParams split_iz(double delta);

// Positive root T* of T*delta/2 = g_c(T).
double truncation_time(double delta, const BoundaryParams& p);

}  // namespace rsb
