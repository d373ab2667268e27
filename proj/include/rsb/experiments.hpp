#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rsb/ambiguity.hpp"
#include "rsb/queueing.hpp"
#include "rsb/scheduling.hpp"
#include "rsb/selection.hpp"
#include "rsb/stats.hpp"
#include "rsb/synth_bench.hpp"

namespace rsb {

// Runs fn(0..n-1) on `threads` workers (0 = hardware concurrency, 1 = inline
// on the caller). Results must be written by index; the first exception is
// rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

using SamplerFactory = std::function<std::unique_ptr<Sampler>(std::uint64_t seed)>;

struct PcsEstimate {
    ProportionCI pcs;
    MeanCI avg_samples;
    std::uint64_t total_samples = 0;  // sum over runs of SelectionOutcome::total_samples
    std::size_t truncated = 0;
    std::vector<std::uint64_t> samples;  // per run
    std::vector<int> selected;           // per run, 0-based
};

// Run r uses seed base_seed + r. `good[i]` marks alternatives that count as a
// correct selection.
PcsEstimate estimate_pcs(ProcedureKind proc, const ProcedureConfig& cfg, const SamplerFactory& factory,
                         const std::vector<char>& good, std::size_t runs, std::uint64_t base_seed, unsigned threads);

// ---------------------------------------------------------------- synthetic

struct BenchCell {
    int k = 10;
    int m = 10;
    MeansConfig means = MeansConfig::sc;
    VarianceConfig vars = VarianceConfig::ev;
};

std::string cell_label(const BenchCell& c);
SamplerFactory bench_factory(const BenchCell& cell, bool crn = false);
std::vector<char> bench_good_set(const BenchCell& cell, double delta);

struct BenchRow {
    BenchCell cell;
    double delta = 0.0;
    ProcedureKind proc = ProcedureKind::sequential;
    std::optional<ErrorRule> rule;
    PcsEstimate est;
};

// One row per (cell, delta, procedure). Every row with the same cell reuses
// the same run seeds.
std::vector<BenchRow> compare_procedures(const std::vector<BenchCell>& cells, const std::vector<double>& deltas,
                                         const std::vector<ProcedureKind>& procs, const ProcedureConfig& base,
                                         std::size_t runs, std::uint64_t seed, unsigned threads);

struct RuleRatioRow {
    BenchCell cell;
    PcsEstimate multiplicative;
    PcsEstimate additive;
    MeanCI ratio;  // N^M / N^A over paired runs
};

// Two-stage procedure under both error rules with paired run seeds.
std::vector<RuleRatioRow> compare_rules_two_stage(const std::vector<BenchCell>& cells, const ProcedureConfig& base,
                                                  std::size_t runs, std::uint64_t seed, unsigned threads);

// ----------------------------------------------------------------- queueing

inline ProcedureConfig with_delta(double delta) {
    ProcedureConfig c;
    c.delta = delta;
    return c;
}

inline const std::vector<Family> kQueueFamilies{Family::lognormal, Family::gamma, Family::weibull};

struct QueueStudyConfig {
    double sigma = 2.0;
    std::size_t ell = 50;
    std::size_t macro_reps = 100;
    int k = 10;
    std::size_t path_customers = 2000;
    std::size_t truth_samples = 10000;
    std::vector<Family> families = kQueueFamilies;
    double ks_level = 0.05;
    ProcedureKind procedure = ProcedureKind::sequential;
    ProcedureConfig proc = with_delta(0.2);
    bool crn = false;
    std::uint64_t seed = 1;
    unsigned threads = 0;

    void validate() const;
};

struct PerformanceRow {
    int decision = 0;  // 1-based staffing level or alternative label
    double M = 0.0;
    double Q70 = 0.0;
    double Q80 = 0.0;
    double Q90 = 0.0;
};

// Mean and quantiles of `costs` (sorted in place).
PerformanceRow performance_of(std::vector<double>& costs, int decision);

struct QueueMacroRep {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::size_t set_size = 0;
    bool forced = false;
    bool lognormal_rejected = false;
    bool misspecified = false;
    std::string best_family;
    int s_rsb = 0;  // 1-based
    int s_bf = 0;
    std::uint64_t samples_rsb = 0;
    std::uint64_t samples_bf = 0;
};

struct RelativeDiff {
    std::string approach;
    MeanCI M, Q70, Q80, Q90;  // in percent
};

struct QueueStudyReport {
    QueueStudyConfig config;
    std::vector<PerformanceRow> truth;  // s = 1..k under the true service distribution
    int s_tr = 0;
    std::vector<QueueMacroRep> reps;
    RelativeDiff tr_vs_rsb;
    RelativeDiff bf_vs_rsb;
    RelativeDiff bf_vs_rsb_misspecified;  // conditional on misspecification
    MeanCI set_size;
    ProportionCI misspecification;        // in [0,1]
    std::size_t lognormal_rejections = 0;
};

std::vector<PerformanceRow> queue_truth_table(const QueueModel& base, int k, std::size_t samples, std::uint64_t seed,
                                              unsigned threads);

QueueStudyReport queueing_study(const QueueStudyConfig& cfg);

struct QueuePcsConfig {
    double sigma = 2.0;
    std::size_t ell = 50;
    std::size_t sets = 20;
    std::size_t runs = 200;
    int k = 10;
    std::size_t path_customers = 2000;
    std::size_t pool_size = 500;
    // delta = fraction * (second-smallest - smallest worst-case pool mean)
    double delta_fraction = 0.5;
    std::vector<ProcedureKind> procs{ProcedureKind::sequential};
    std::vector<Family> families = kQueueFamilies;
    double ks_level = 0.05;
    double alpha = 0.05;
    std::size_t n0 = 10;
    std::uint64_t max_replications = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 0;

    void validate() const;
};

struct QueuePcsSet {
    std::size_t index = 0;
    std::size_t set_size = 0;
    int best = 0;  // 1-based
    double gap = 0.0;
    double delta = 0.0;
    std::vector<PcsEstimate> est;  // per procedure in config order
};

struct Quartiles {
    double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
};

struct QueuePcsReport {
    QueuePcsConfig config;
    std::vector<QueuePcsSet> sets;
    std::vector<Quartiles> summary;  // per procedure
};

QueuePcsReport queue_pcs_study(const QueuePcsConfig& cfg);

// --------------------------------------------------------------- scheduling

inline const std::vector<Family> kScheduleFamilies{Family::exponential, Family::gamma,  Family::weibull,
                                                   Family::lognormal,   Family::pareto, Family::triangular};

struct ScheduleStudyConfig {
    DurationData data;
    std::string dataset = "data";
    double gamma = 0.5;
    std::size_t macro_reps = 50;
    std::vector<Family> families = kScheduleFamilies;
    double ks_level = 0.05;
    double c_W = 1.0;
    double c_O = 0.5;
    ProcedureKind procedure = ProcedureKind::sequential;
    ProcedureConfig proc = with_delta(1.0);
    std::size_t eval_samples = 20000;
    ScenarioCaps caps;
    std::uint64_t seed = 1;
    unsigned threads = 0;

    void validate() const;
};

inline const std::vector<std::string> kScheduleApproaches{"RSB", "BF", "Em", "OV"};

struct ScheduleMacroRep {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::size_t scenarios = 0;  // |P_1 x ... x P_n| after caps
    bool any_forced = false;
    std::vector<Permutation> chosen;         // per approach
    std::vector<PerformanceRow> performance; // per approach
    std::vector<std::uint64_t> samples;      // per approach (OV: 0)
};

struct ScheduleStudyReport {
    ScheduleStudyConfig config;
    double session_length = 0.0;
    std::vector<ScheduleMacroRep> reps;
    std::vector<RelativeDiff> vs_rsb;  // BF, Em, OV
};

ScheduleStudyReport scheduling_study(const ScheduleStudyConfig& cfg);

}  // namespace rsb
