#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rsb/distributions.hpp"
#include "rsb/sampler.hpp"

namespace rsb {

struct QueueCost {
    double c_A = 4.0;
    double c_W = 2.0;
    double c_S = 1.0;
    // Abandonment utility; defaults to U(p) = log(1/(1-p)).
    std::function<double(double)> utility;

    double U(double p) const;
};

struct QueueModel {
    Distribution interarrival;
    Distribution service;
    Distribution patience;
    int servers = 1;
    std::size_t customers = 1;  // horizon, in customers
    QueueCost cost;

    void validate() const;
};

// Named presets. "call-center": exponential interarrival (mean 0.1), exponential
// patience (mean 5), lognormal service with mean 1 and log-sd sigma,
// c_A=4, c_W=2, c_S=1, 10,000 customers.
QueueModel queue_preset(const std::string& name, double sigma = 1.0, int servers = 1);
std::vector<std::string> queue_preset_names();

struct QueuePathStats {
    std::size_t n = 0;
    std::size_t abandoned = 0;
    double served_wait_sum = 0.0;
    std::vector<double> arrival;
    std::vector<double> wait;         // served: service start - arrival; abandoned: patience
    std::vector<std::uint8_t> abandon;
};

// Random numbers: customer i consumes the i-th interarrival, service and
// patience draws of three separate streams derived from `seed`, whatever its
// fate. Paths with equal seeds but different server counts are therefore
// coupled (common random numbers).
//
// A customer abandons iff its patience is strictly less than its offered wait
// (a server freeing at the patience instant serves it).
QueuePathStats simulate_path(const QueueModel& model, std::uint64_t seed, bool keep_customers = false);

// Same system via an event calendar (departure < abandonment < arrival on
// ties, then customer index). Slower; used to cross-check simulate_path.
QueuePathStats simulate_path_events(const QueueModel& model, std::uint64_t seed);

struct PathCost {
    double value = 0.0;
    bool all_abandoned = false;  // N_A = n: waiting term dropped, U evaluated at (n-1)/n
};

PathCost path_cost(const QueuePathStats& stats, const QueueModel& model);

// Write (customer_index, arrival, wait, abandoned) rows.
void write_path_csv(const QueuePathStats& stats, const std::string& path);

// System (i,j): staffing level s = i+1 under service scenario j. Each
// replication is an independent path seeded by (seed, i, j, rep); with
// crn = true the seed ignores j, so the scenarios of one staffing level share
// arrivals and patience draws. Safe for concurrent draws.
std::unique_ptr<Sampler> staffing_sampler(const QueueModel& base, std::vector<Distribution> scenarios, int k,
                                          std::uint64_t seed, bool crn = false);

}  // namespace rsb
