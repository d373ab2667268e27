#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rsb/distributions.hpp"
#include "rsb/sampler.hpp"

namespace rsb {

using Permutation = std::vector<int>;  // 0-based operation ids in service order

// W[0] = 0; W[i] = max(0, W[i-1] + d[psi[i-1]] - t[psi[i-1]]); W[n] is overtime.
std::vector<double> waiting_chain(const Permutation& psi, std::span<const double> d, std::span<const double> t);

double schedule_cost(const Permutation& psi, std::span<const double> d, std::span<const double> t, double c_W,
                     double c_O);

// Stable ascending sort by variance.
Permutation ov_sequence(std::span<const double> variances);

// Allowance rule: (means, sds, psi, T) -> per-operation allowances indexed by
// operation id. Outputs must be nonnegative and sum to at most T.
using AllowanceRule =
    std::function<std::vector<double>(std::span<const double>, std::span<const double>, const Permutation&, double)>;

// t_i = mu_i + sigma_i (T - sum mu)/sum sigma when T >= sum mu; otherwise
// t_i = mu_i T / sum mu. With zero total sd the slack is split equally.
std::vector<double> proportional_slack(std::span<const double> means, std::span<const double> sds,
                                       const Permutation& psi, double T);

// Rule of the form t_i = mu_i + eta_i sigma_i with a caller-supplied eta.
// Negative results are clipped to 0 and the vector is scaled down if it
// exceeds T.
using EtaFunction =
    std::function<std::vector<double>(std::span<const double>, std::span<const double>, const Permutation&, double)>;
AllowanceRule eta_allowance_rule(EtaFunction eta);

void check_allowances(std::span<const double> t, double T);

// All permutations of 0..n-1 in lexicographic order; n <= 5.
std::vector<Permutation> all_permutations(int n);

struct ScenarioCaps {
    std::size_t soft = 256;        // above this, deterministic subsample down to `soft`
    std::size_t hard = 1'000'000;  // above this, ConfigError
    std::uint64_t subsample_seed = 0;
};

// Product scenarios over per-operation candidate counts, as index tuples in
// lexicographic order.
std::vector<std::vector<int>> product_scenarios(const std::vector<int>& sizes, const ScenarioCaps& caps = {});

struct ScheduleInstance {
    int n_ops = 0;
    std::vector<std::vector<Distribution>> candidates;  // per operation (the sets P_i)
    double session_length = 0.0;                        // T
    double c_W = 1.0;
    double c_O = 0.5;
    AllowanceRule rule;  // defaults to proportional_slack
    // Mean/sd estimates the allowance rule sees (one per operation).
    std::vector<double> mean_estimates;
    std::vector<double> sd_estimates;
};

struct SequencingProblem {
    std::vector<Permutation> alternatives;
    std::vector<std::vector<double>> allowances;  // per alternative, by operation id
    std::vector<std::vector<int>> scenarios;      // per scenario, candidate index per operation
};

// Builds the alternatives (all permutations, or `subset`), computes each
// alternative's allowances once, and enumerates product scenarios.
SequencingProblem build_sequencing_problem(const ScheduleInstance& inst, const std::vector<Permutation>* subset = nullptr,
                                           const ScenarioCaps& caps = {});

// System (i,j): durations drawn from scenario j, cost under permutation i with
// its allowances. Seeded by (seed, i, j, rep). Safe for concurrent draws.
std::unique_ptr<Sampler> sequencing_sampler(const ScheduleInstance& inst, const SequencingProblem& prob,
                                            std::uint64_t seed);

// Duration dataset: one column per operation, header row with operation ids,
// columns may have different lengths (blank cells).
struct DurationData {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> columns;
};

DurationData read_duration_csv(const std::string& path);

}  // namespace rsb
