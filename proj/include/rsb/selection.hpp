#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsb/boundary.hpp"
#include "rsb/sampler.hpp"

namespace rsb {

enum class StopReason { single_survivor, iz_closure, two_stage_complete, truncation };
enum class EliminationKind { inner, outer };

const char* stop_reason_name(StopReason r);
const char* elimination_kind_name(EliminationKind k);

// scen < 0 denotes a whole alternative (outer-layer events).
struct SystemRef {
    int alt = 0;
    int scen = -1;
    friend bool operator==(const SystemRef&, const SystemRef&) = default;
};

struct TraceEvent {
    std::uint64_t n = 0;  // replications per surviving system when the decision was made
    EliminationKind kind = EliminationKind::inner;
    SystemRef victim;
    SystemRef eliminator;
    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct SelectionOutcome {
    std::string procedure;
    int k = 0;
    int m = 0;
    int selected = 0;  // 0-based alternative index
    std::uint64_t total_samples = 0;
    std::vector<std::uint64_t> per_system_counts;  // row-major k x m
    StopReason stop_reason = StopReason::single_survivor;
    std::vector<TraceEvent> trace;
    std::uint64_t final_n = 0;
    double beta = 0.0;
    double h = 0.0;               // two-stage only
    double truncation_T = 0.0;    // vanilla only
};

struct ProcedureConfig {
    double delta = 0.5;
    double alpha = 0.05;
    std::size_t n0 = 10;
    // Two-stage defaults to additive. The sequential and vanilla procedures
    // require multiplicative and reject additive.
    std::optional<ErrorRule> rule;
    // Sequential/vanilla: stop with StopReason::truncation once a surviving
    // system has this many replications.
    std::uint64_t max_replications = 10'000'000;
    // Two-stage: h^2 S^2 / delta^2 above this raises ResourceError.
    double max_two_stage_n = 1e9;
};

SelectionOutcome run_two_stage(Sampler& sampler, const ProcedureConfig& cfg);
SelectionOutcome run_sequential(Sampler& sampler, const ProcedureConfig& cfg);
SelectionOutcome run_vanilla(Sampler& sampler, const ProcedureConfig& cfg);

enum class ProcedureKind { two_stage, sequential, vanilla };
const char* procedure_name(ProcedureKind p);
ProcedureKind procedure_from_name(const std::string& name);  // "t", "s", "v" or full names
SelectionOutcome run_procedure(ProcedureKind kind, Sampler& sampler, const ProcedureConfig& cfg);

}  // namespace rsb
