// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]  (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "erlang_a.hpp"
#include "reference_procedures.hpp"
#include "rsb/boundary.hpp"
#include "rsb/errors.hpp"
#include "rsb/experiments.hpp"
#include "rsb/queueing.hpp"
#include "rsb/sampler.hpp"
#include "rsb/stats.hpp"
#include "t_quadrature.hpp"

using namespace rsb;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

constexpr std::uint64_t kSeed = 20240601;
constexpr std::size_t kRuns = 200;

ProcedureConfig bench_cfg(double delta, std::optional<ErrorRule> rule = std::nullopt) {
    auto c = with_delta(delta);
    c.rule = rule;
    return c;
}

PcsEstimate bench_run(const BenchCell& cell, ProcedureKind proc, const ProcedureConfig& cfg, std::uint64_t seed) {
    return estimate_pcs(proc, cfg, bench_factory(cell), bench_good_set(cell, cfg.delta), kRuns, seed, 0);
}

double ratio(const PcsEstimate& a, const PcsEstimate& b) { return a.avg_samples.mean / b.avg_samples.mean; }

const BenchCell kSC{10, 10, MeansConfig::sc, VarianceConfig::ev};
const BenchCell kMDM{10, 10, MeansConfig::mdm, VarianceConfig::ev};

// ----------------------------------------------------------------------------

Verdict c1() {
    std::string d;
    bool ok = true;
    for (const auto& cell : {kSC, kMDM}) {
        const auto t = bench_run(cell, ProcedureKind::two_stage, bench_cfg(0.5, ErrorRule::additive), kSeed + 1);
        const auto s = bench_run(cell, ProcedureKind::sequential, bench_cfg(0.5), kSeed + 1);
        ok = ok && t.pcs.p >= 0.97 && s.pcs.p >= 0.97;
        d += fmt("%s T=%.3f S=%.3f; ", cell_label(cell).c_str(), t.pcs.p, s.pcs.p);
    }
    return {ok, d + "need >= 0.97"};
}

Verdict c2() {
    const auto rows = compare_rules_two_stage({kSC}, bench_cfg(0.5), kRuns, kSeed + 2, 0);
    const auto& r = rows.front().ratio;
    const bool ok = r.mean >= 1.4 && r.mean <= 2.0 && r.half_width < 0.05;
    return {ok, fmt("N^M/N^A = %.4f +- %.4f; need [1.4, 2.0], half-width < 0.05", r.mean, r.half_width)};
}

Verdict c3() {
    const auto a = bench_run(kSC, ProcedureKind::two_stage, bench_cfg(0.25), kSeed + 3);
    const auto b = bench_run(kSC, ProcedureKind::two_stage, bench_cfg(0.5), kSeed + 3);
    const double q = ratio(a, b);
    return {q >= 3.5 && q <= 4.5, fmt("N^T(0.25)/N^T(0.5) = %.4f; need [3.5, 4.5]", q)};
}

Verdict c4() {
    const auto a = bench_run(kMDM, ProcedureKind::sequential, bench_cfg(0.1), kSeed + 4);
    const auto b = bench_run(kMDM, ProcedureKind::sequential, bench_cfg(0.25), kSeed + 4);
    const double q = ratio(a, b);
    return {q >= 0.85 && q <= 1.15, fmt("N^S(0.1)/N^S(0.25) = %.4f; need [0.85, 1.15]", q)};
}

Verdict c5() {
    const auto t = bench_run(kMDM, ProcedureKind::two_stage, bench_cfg(0.25), kSeed + 5);
    const auto s = bench_run(kMDM, ProcedureKind::sequential, bench_cfg(0.25), kSeed + 5);
    const double q = ratio(t, s);
    return {q >= 5.0, fmt("N^T/N^S = %.3f; need >= 5", q)};
}

Verdict c6() {
    const auto vs = bench_run(kSC, ProcedureKind::vanilla, bench_cfg(0.5), kSeed + 6);
    const auto ss = bench_run(kSC, ProcedureKind::sequential, bench_cfg(0.5), kSeed + 6);
    const auto vm = bench_run(kMDM, ProcedureKind::vanilla, bench_cfg(0.1), kSeed + 6);
    const auto sm = bench_run(kMDM, ProcedureKind::sequential, bench_cfg(0.1), kSeed + 6);
    const double q1 = ratio(vs, ss), q2 = ratio(vm, sm);
    return {q1 >= 0.8 && q1 <= 1.25 && q2 >= 2.0,
            fmt("SC d=0.5 N^V/N^S = %.4f (need [0.8, 1.25]); MDM d=0.1 N^V/N^S = %.4f (need >= 2)", q1, q2)};
}

Verdict c7() {
    std::mt19937_64 eng(kSeed + 7);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> mu(0.0, 3.0), sd(0.2, 0.8);
    int agree = 0, completed = 0;
    const int instances = 100;
    std::string first_mismatch;
    for (int c = 0; c < instances; ++c) {
        const int k = 2 + static_cast<int>(eng() % 2), m = 1 + static_cast<int>(eng() % 3);
        ref::Streams x(static_cast<std::size_t>(k) * m);
        for (auto& s : x) {
            const double a = mu(eng), b = sd(eng);
            s.resize(50);
            for (auto& v : s) v = a + b * z(eng);
        }
        bool same = true;
        for (auto kind : {ProcedureKind::two_stage, ProcedureKind::sequential}) {
            ProcedureConfig cfg = bench_cfg(1.5);
            const auto want = kind == ProcedureKind::two_stage ? ref::two_stage(x, k, m, cfg) : ref::sequential(x, k, m, cfg);
            RecordedSampler smp(k, m, x);
            try {
                const auto got = run_procedure(kind, smp, cfg);
                same = same && !want.ran_out && got.selected == want.selected && got.trace == want.trace &&
                       got.per_system_counts == want.counts && got.stop_reason == want.stop;
                completed += !want.ran_out;
            } catch (const DataError&) {
                same = same && want.ran_out;  // both need more than the 50 recorded replications
            }
        }
        agree += same;
        if (!same && first_mismatch.empty()) first_mismatch = fmt(" first mismatch: instance %d", c);
    }
    return {agree == instances,
            fmt("%d/%d instances agree (%d of %d procedure runs finished within 50 replications)%s", agree, instances,
                completed, 2 * instances, first_mismatch.c_str())};
}

Verdict c8() {
    double worst_q = 0.0, worst_t = 0.0;
    for (double p : {0.9, 0.95, 0.975, 0.999})
        for (double df : {1.0, 5.0, 10.0, 100.0})
            worst_q = std::max(worst_q, std::fabs(student_t_quantile(p, df) - ref::t_quantile_by_quadrature(p, df)));
    for (double delta : {0.05, 0.1, 0.25, 0.5, 1.0, 2.0})
        for (double beta : {0.05 / 99, 0.05 / 18, 0.025, 1e-6}) {
            const auto bp = BoundaryParams::from_beta(beta);
            const double T = truncation_time(delta, bp);
            worst_t = std::max(worst_t, std::fabs(T * delta / 2 - boundary_gc(T, bp)));
        }
    return {worst_q < 1e-8 && worst_t < 1e-8,
            fmt("max |t quantile error| = %.2e, max truncation residual = %.2e; need < 1e-8", worst_q, worst_t)};
}

Verdict c9() {
    // lambda = 10, mu = 1, theta = 0.2; per-path fractions after a warm-up give the standard error.
    constexpr std::size_t kCustomers = 60000, kWarmup = 10000;
    constexpr int kPaths = 20;
    bool ok = true;
    std::string d;
    for (int s : {8, 10, 12}) {
        const auto want = ref::erlang_a(10.0, 1.0, 0.2, s).abandon_fraction;
        QueueModel q;
        q.interarrival = Distribution::exponential(10.0);
        q.service = Distribution::exponential(1.0);
        q.patience = Distribution::exponential(0.2);
        q.servers = s;
        q.customers = kCustomers;
        std::vector<double> frac(kPaths);
        for (int p = 0; p < kPaths; ++p) {
            const auto st = simulate_path(q, kSeed + 9 + 1000 * s + p, true);
            std::size_t ab = 0;
            for (std::size_t i = kWarmup; i < st.n; ++i) ab += st.abandon[i];
            frac[p] = static_cast<double>(ab) / static_cast<double>(st.n - kWarmup);
        }
        const double mean = sample_mean(frac), se = std::sqrt(sample_variance(frac) / kPaths);
        const double z = std::fabs(mean - want) / se;
        ok = ok && z <= 3.0;
        d += fmt("s=%d sim %.5f oracle %.5f (%.2f SE); ", s, mean, want, z);
    }
    return {ok, d + "need <= 3 SE"};
}

Verdict c10() {
    QueueStudyConfig cfg;
    cfg.seed = kSeed + 10;
    const auto rep = queueing_study(cfg);
    const auto& m = rep.bf_vs_rsb.M;
    return {m.mean >= 0.0 && m.lower() > -0.5,
            fmt("M_BF/M_RSB - 1 = %+.3f%% +- %.3f%% over %zu macro-reps (TR: %+.3f%%); need mean >= 0, lower > -0.5%%",
                m.mean, m.half_width, m.n, rep.tr_vs_rsb.M.mean)};
}

Verdict c11() {
    QueuePcsConfig cfg;
    cfg.seed = kSeed + 11;
    const auto rep = queue_pcs_study(cfg);
    const auto& q = rep.summary.front();
    std::size_t trunc = 0;
    const QueuePcsSet* worst = &rep.sets.front();
    for (const auto& s : rep.sets) {
        trunc += s.est.front().truncated;
        if (s.est.front().pcs.p < worst->est.front().pcs.p) worst = &s;
    }
    return {q.min >= 0.90 && q.median >= 0.95,
            fmt("PCS over %zu sets: min %.3f, median %.3f, max %.3f (%zu truncated runs; worst set %zu has gap %.4f, "
                "%zu/%zu runs truncated at %llu replications); need min >= 0.90, median >= 0.95",
                rep.sets.size(), q.min, q.median, q.max, trunc, worst->index + 1, worst->gap, worst->est.front().truncated,
                cfg.runs, static_cast<unsigned long long>(cfg.max_replications))};
}

Verdict c12() {
    const std::vector<std::string> bins{"test_stats", "test_rng_distributions", "test_boundary_table", "test_selection",
                                        "test_queueing", "test_scheduling"};
    std::string d;
    bool ok = true;
    for (const auto& b : bins) {
        const std::string cmd = std::string(RSB_TEST_BIN_DIR) + "/" + b + " \"[property]\" > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        ok = ok && rc == 0;
        d += b + (rc == 0 ? " ok; " : " FAILED; ");
    }
    return {ok, d + "each case runs 1000 generated inputs"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, Verdict (*)()>> criteria{
        {"realized PCS, synthetic", c1},      {"error-rule ratio", c2},
        {"two-stage scaling", c3},            {"sequential delta-insensitivity", c4},
        {"S vs T dominance", c5},             {"V vs S", c6},
        {"oracle equivalence", c7},           {"numerical kernels", c8},
        {"queueing validation", c9},          {"queueing study", c10},
        {"realized PCS, queueing", c11},      {"property suites", c12},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %2d %-32s %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first, v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !v.pass;
    }
    return failed == 0 ? 0 : 1;
}
