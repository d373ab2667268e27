#include "rsb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "rsb/errors.hpp"
#include "rsb/rng.hpp"

namespace rsb {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!first) first = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

PcsEstimate estimate_pcs(ProcedureKind proc, const ProcedureConfig& cfg, const SamplerFactory& factory,
                         const std::vector<char>& good, std::size_t runs, std::uint64_t base_seed, unsigned threads) {
    if (runs == 0) throw ConfigError("estimate_pcs: runs must be >= 1");
    PcsEstimate est;
    est.samples.assign(runs, 0);
    est.selected.assign(runs, -1);
    std::vector<char> truncated(runs, 0);
    parallel_for(runs, threads, [&](std::size_t r) {
        auto sampler = factory(base_seed + r);
        if (static_cast<std::size_t>(sampler->alternatives()) != good.size())
            throw ConfigError("estimate_pcs: good-set size does not match the sampler");
        const auto o = run_procedure(proc, *sampler, cfg);
        est.samples[r] = o.total_samples;
        est.selected[r] = o.selected;
        truncated[r] = o.stop_reason == StopReason::truncation;
    });
    std::size_t correct = 0;
    std::vector<double> n(runs);
    for (std::size_t r = 0; r < runs; ++r) {
        correct += good[est.selected[r]] ? 1 : 0;
        est.total_samples += est.samples[r];
        est.truncated += truncated[r];
        n[r] = static_cast<double>(est.samples[r]);
    }
    est.pcs = proportion_ci(correct, runs);
    est.avg_samples = mean_ci(n);
    return est;
}

// ---------------------------------------------------------------- synthetic

std::string cell_label(const BenchCell& c) {
    return "k" + std::to_string(c.k) + "_m" + std::to_string(c.m) + "_" + means_config_name(c.means) + "_" +
           variance_config_name(c.vars);
}

SamplerFactory bench_factory(const BenchCell& cell, bool crn) {
    auto config = std::make_shared<MeanVarianceConfig>(make_config(cell.means, cell.vars, cell.k, cell.m));
    return [config, crn](std::uint64_t seed) { return std::make_unique<NormalBenchSampler>(*config, seed, crn); };
}

std::vector<char> bench_good_set(const BenchCell& cell, double delta) {
    const auto config = make_config(cell.means, cell.vars, cell.k, cell.m);
    return good_set_from_means(worst_case_means(config.means), delta);
}

std::vector<BenchRow> compare_procedures(const std::vector<BenchCell>& cells, const std::vector<double>& deltas,
                                         const std::vector<ProcedureKind>& procs, const ProcedureConfig& base,
                                         std::size_t runs, std::uint64_t seed, unsigned threads) {
    std::vector<BenchRow> rows;
    for (const auto& cell : cells) {
        const auto factory = bench_factory(cell);
        for (double delta : deltas) {
            const auto good = bench_good_set(cell, delta);
            for (auto proc : procs) {
                ProcedureConfig cfg = base;
                cfg.delta = delta;
                if (proc != ProcedureKind::two_stage) cfg.rule.reset();
                BenchRow row{cell, delta, proc, cfg.rule, {}};
                if (proc == ProcedureKind::two_stage && !row.rule) row.rule = ErrorRule::additive;
                row.est = estimate_pcs(proc, cfg, factory, good, runs, seed, threads);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<RuleRatioRow> compare_rules_two_stage(const std::vector<BenchCell>& cells, const ProcedureConfig& base,
                                                  std::size_t runs, std::uint64_t seed, unsigned threads) {
    std::vector<RuleRatioRow> rows;
    for (const auto& cell : cells) {
        const auto factory = bench_factory(cell);
        const auto good = bench_good_set(cell, base.delta);
        RuleRatioRow row;
        row.cell = cell;
        ProcedureConfig cfg = base;
        cfg.rule = ErrorRule::multiplicative;
        row.multiplicative = estimate_pcs(ProcedureKind::two_stage, cfg, factory, good, runs, seed, threads);
        cfg.rule = ErrorRule::additive;
        row.additive = estimate_pcs(ProcedureKind::two_stage, cfg, factory, good, runs, seed, threads);
        std::vector<double> x(runs), y(runs);
        for (std::size_t r = 0; r < runs; ++r) {
            x[r] = static_cast<double>(row.multiplicative.samples[r]);
            y[r] = static_cast<double>(row.additive.samples[r]);
        }
        row.ratio = ratio_of_means_ci(x, y);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ----------------------------------------------------------------- queueing

namespace {

constexpr std::uint64_t kStreamSample = 1;
constexpr std::uint64_t kStreamRsb = 2;
constexpr std::uint64_t kStreamBf = 3;
constexpr std::uint64_t kStreamTruth = 4;
constexpr std::uint64_t kStreamPool = 5;
constexpr std::uint64_t kStreamRuns = 6;
constexpr std::uint64_t kStreamEval = 7;

std::vector<double> draw_sample(const Distribution& d, std::size_t n, std::uint64_t seed) {
    CounterEngine eng(seed, 0);
    std::vector<double> x(n);
    for (auto& v : x) v = d.sample(eng);
    return x;
}

RelativeDiff relative_diff(const std::string& name, const std::vector<PerformanceRow>& a,
                           const std::vector<PerformanceRow>& rsb, const std::vector<char>* mask = nullptr) {
    std::vector<double> M, Q70, Q80, Q90;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (mask && !(*mask)[r]) continue;
        M.push_back(100.0 * (a[r].M / rsb[r].M - 1.0));
        Q70.push_back(100.0 * (a[r].Q70 / rsb[r].Q70 - 1.0));
        Q80.push_back(100.0 * (a[r].Q80 / rsb[r].Q80 - 1.0));
        Q90.push_back(100.0 * (a[r].Q90 / rsb[r].Q90 - 1.0));
    }
    return {name, mean_ci(M), mean_ci(Q70), mean_ci(Q80), mean_ci(Q90)};
}

QueueModel queue_base(double sigma, std::size_t customers) {
    QueueModel base = queue_preset("call-center", sigma, 1);
    base.customers = customers;
    return base;
}

std::vector<Distribution> members_of(const AmbiguitySet& set) {
    std::vector<Distribution> out;
    for (const auto& f : set.members) out.push_back(f.dist);
    return out;
}

}  // namespace

PerformanceRow performance_of(std::vector<double>& costs, int decision) {
    if (costs.empty()) throw DegenerateSampleError("performance_of: no samples");
    std::sort(costs.begin(), costs.end());
    PerformanceRow row;
    row.decision = decision;
    row.M = sample_mean(costs);
    row.Q70 = empirical_quantile_sorted(costs, 0.7);
    row.Q80 = empirical_quantile_sorted(costs, 0.8);
    row.Q90 = empirical_quantile_sorted(costs, 0.9);
    return row;
}

void QueueStudyConfig::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
    if (ell < kMinAmbiguitySample) throw ConfigError("ell must be >= " + std::to_string(kMinAmbiguitySample));
    if (macro_reps < 1) throw ConfigError("macro_reps must be >= 1");
    if (k < 2) throw ConfigError("k must be >= 2");
    if (path_customers < 1) throw ConfigError("path length must be >= 1");
    if (truth_samples < 2) throw ConfigError("truth_samples must be >= 2");
    if (families.empty()) throw ConfigError("no candidate families");
    if (procedure != ProcedureKind::two_stage && proc.rule && *proc.rule == ErrorRule::additive)
        throw ConfigError("the additive error rule is only valid for the two-stage procedure");
}

std::vector<PerformanceRow> queue_truth_table(const QueueModel& base, int k, std::size_t samples, std::uint64_t seed,
                                              unsigned threads) {
    std::vector<std::vector<double>> costs(k, std::vector<double>(samples));
    parallel_for(static_cast<std::size_t>(k) * samples, threads, [&](std::size_t q) {
        const int s = static_cast<int>(q / samples);
        const std::size_t r = q % samples;
        QueueModel model = base;
        model.servers = s + 1;
        costs[s][r] = path_cost(simulate_path(model, derive_seed(seed, r)), model).value;
    });
    std::vector<PerformanceRow> out;
    for (int s = 0; s < k; ++s) out.push_back(performance_of(costs[s], s + 1));
    return out;
}

QueueStudyReport queueing_study(const QueueStudyConfig& cfg) {
    cfg.validate();
    QueueStudyReport rep;
    rep.config = cfg;
    const QueueModel base = queue_base(cfg.sigma, cfg.path_customers);
    const Distribution truth = base.service;

    rep.truth = queue_truth_table(base, cfg.k, cfg.truth_samples, derive_seed(cfg.seed, kStreamTruth), cfg.threads);
    rep.s_tr = 1;
    for (const auto& row : rep.truth) {
        if (row.M < rep.truth[rep.s_tr - 1].M) rep.s_tr = row.decision;
    }

    rep.reps.resize(cfg.macro_reps);
    parallel_for(cfg.macro_reps, cfg.threads, [&](std::size_t r) {
        QueueMacroRep& m = rep.reps[r];
        m.index = r;
        m.seed = cfg.seed + r;
        const auto x = draw_sample(truth, cfg.ell, derive_seed(m.seed, kStreamSample));
        const auto set = build_ambiguity_set(x, cfg.families, cfg.ks_level, {"lognormal-sample", 1.0, m.seed});
        const auto bf = best_fit(x, cfg.families);
        m.set_size = set.members.size();
        m.forced = set.forced;
        m.best_family = std::string(family_name(bf.family()));
        m.misspecified = misspecification_indicator(bf, Family::lognormal);
        for (const auto& d : set.diagnostics) {
            if (d.family == Family::lognormal) m.lognormal_rejected = !d.accepted;
        }
        auto rsb = staffing_sampler(base, members_of(set), cfg.k, derive_seed(m.seed, kStreamRsb), cfg.crn);
        const auto o_rsb = run_procedure(cfg.procedure, *rsb, cfg.proc);
        auto bfs = staffing_sampler(base, {bf.dist}, cfg.k, derive_seed(m.seed, kStreamBf), cfg.crn);
        const auto o_bf = run_procedure(cfg.procedure, *bfs, cfg.proc);
        m.s_rsb = o_rsb.selected + 1;
        m.s_bf = o_bf.selected + 1;
        m.samples_rsb = o_rsb.total_samples;
        m.samples_bf = o_bf.total_samples;
    });

    std::vector<PerformanceRow> p_rsb, p_bf, p_tr;
    std::vector<char> mis;
    std::vector<double> sizes;
    std::size_t n_mis = 0;
    for (const auto& m : rep.reps) {
        p_rsb.push_back(rep.truth[m.s_rsb - 1]);
        p_bf.push_back(rep.truth[m.s_bf - 1]);
        p_tr.push_back(rep.truth[rep.s_tr - 1]);
        mis.push_back(m.misspecified ? 1 : 0);
        n_mis += m.misspecified ? 1 : 0;
        sizes.push_back(static_cast<double>(m.set_size));
        rep.lognormal_rejections += m.lognormal_rejected ? 1 : 0;
    }
    rep.tr_vs_rsb = relative_diff("Tr", p_tr, p_rsb);
    rep.bf_vs_rsb = relative_diff("BF", p_bf, p_rsb);
    rep.bf_vs_rsb_misspecified = relative_diff("BF|misspecified", p_bf, p_rsb, &mis);
    rep.set_size = mean_ci(sizes);
    rep.misspecification = proportion_ci(n_mis, rep.reps.size());
    return rep;
}

void QueuePcsConfig::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
    if (ell < kMinAmbiguitySample) throw ConfigError("ell must be >= " + std::to_string(kMinAmbiguitySample));
    if (sets < 1 || runs < 1) throw ConfigError("sets and runs must be >= 1");
    if (k < 2) throw ConfigError("k must be >= 2");
    if (pool_size < 2) throw ConfigError("pool_size must be >= 2");
    if (!(delta_fraction > 0.0 && delta_fraction <= 1.0)) throw ConfigError("delta_fraction must lie in (0,1]");
    if (procs.empty()) throw ConfigError("no procedures");
}

QueuePcsReport queue_pcs_study(const QueuePcsConfig& cfg) {
    cfg.validate();
    QueuePcsReport rep;
    rep.config = cfg;
    const QueueModel base = queue_base(cfg.sigma, cfg.path_customers);
    for (std::size_t idx = 0; idx < cfg.sets; ++idx) {
        const std::uint64_t seed = cfg.seed + idx;
        const auto x = draw_sample(base.service, cfg.ell, derive_seed(seed, kStreamSample));
        const auto set = build_ambiguity_set(x, cfg.families, cfg.ks_level);
        const auto scen = members_of(set);
        const int m = static_cast<int>(scen.size());
        auto sim = staffing_sampler(base, scen, cfg.k, derive_seed(seed, kStreamPool));
        auto pools = std::make_shared<std::vector<std::vector<double>>>(static_cast<std::size_t>(cfg.k) * m);
        parallel_for(pools->size(), cfg.threads, [&](std::size_t q) {
            const SystemId id{static_cast<int>(q) / m, static_cast<int>(q) % m};
            auto& pool = (*pools)[q];
            pool.resize(cfg.pool_size);
            for (std::size_t r = 0; r < cfg.pool_size; ++r) sim->draw(r, {&id, 1}, {&pool[r], 1});
        });
        std::vector<double> worst(cfg.k, -std::numeric_limits<double>::infinity());
        for (int i = 0; i < cfg.k; ++i) {
            for (int j = 0; j < m; ++j) worst[i] = std::max(worst[i], sample_mean((*pools)[i * m + j]));
        }
        auto sorted = worst;
        std::sort(sorted.begin(), sorted.end());
        QueuePcsSet out;
        out.index = idx;
        out.set_size = scen.size();
        out.best = static_cast<int>(std::min_element(worst.begin(), worst.end()) - worst.begin()) + 1;
        out.gap = sorted[1] - sorted[0];
        if (!(out.gap > 0.0)) throw NumericError("queue PCS study: tied worst-case pool means in set " + std::to_string(idx));
        out.delta = cfg.delta_fraction * out.gap;
        std::vector<char> good(cfg.k, 0);
        good[out.best - 1] = 1;
        ProcedureConfig pc;
        pc.delta = out.delta;
        pc.alpha = cfg.alpha;
        pc.n0 = cfg.n0;
        pc.max_replications = cfg.max_replications;
        const int k = cfg.k;
        SamplerFactory factory = [pools, k, m](std::uint64_t s) {
            return std::make_unique<ResamplingSampler>(k, m, pools, s);
        };
        for (auto proc : cfg.procs) {
            out.est.push_back(estimate_pcs(proc, pc, factory, good, cfg.runs, derive_seed(seed, kStreamRuns), cfg.threads));
        }
        rep.sets.push_back(std::move(out));
    }
    for (std::size_t p = 0; p < cfg.procs.size(); ++p) {
        std::vector<double> v;
        for (const auto& s : rep.sets) v.push_back(s.est[p].pcs.p);
        std::sort(v.begin(), v.end());
        Quartiles q;
        q.min = v.front();
        q.max = v.back();
        q.q25 = empirical_quantile_sorted(v, 0.25);
        q.median = empirical_quantile_sorted(v, 0.5);
        q.q75 = empirical_quantile_sorted(v, 0.75);
        rep.summary.push_back(q);
    }
    return rep;
}

// --------------------------------------------------------------- scheduling

void ScheduleStudyConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0,1)");
    if (macro_reps < 1) throw ConfigError("macro_reps must be >= 1");
    if (data.columns.empty()) throw ConfigError("duration data has no operations");
    if (data.columns.size() > 5) throw ConfigError("at most 5 operations are supported (n! alternatives)");
    for (std::size_t i = 0; i < data.columns.size(); ++i) {
        const auto sub = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(data.columns[i].size())));
        if (sub < kMinAmbiguitySample)
            throw ConfigError("operation '" + data.ids[i] + "': subsample of " + std::to_string(sub) +
                              " observations is below the minimum of " + std::to_string(kMinAmbiguitySample));
        for (double v : data.columns[i]) {
            if (!(v > 0.0)) throw ConfigError("operation '" + data.ids[i] + "': durations must be positive");
        }
    }
    if (eval_samples < 2) throw ConfigError("eval_samples must be >= 2");
    if (families.empty()) throw ConfigError("no candidate families");
    if (!(c_W >= 0.0) || !(c_O >= 0.0)) throw ConfigError("cost rates must be nonnegative");
}

namespace {

std::vector<double> subsample(const std::vector<double>& data, double gamma, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(data.size())));
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    CounterEngine eng(seed, 0);
    // Partial Fisher-Yates: the first n slots form a uniform subset.
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(eng)]);
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = data[idx[i]];
    return out;
}

int selected_alternative(const ScheduleInstance& inst, const SequencingProblem& prob, ProcedureKind proc,
                         const ProcedureConfig& pc, std::uint64_t seed, std::uint64_t& samples) {
    auto sampler = sequencing_sampler(inst, prob, seed);
    const auto o = run_procedure(proc, *sampler, pc);
    samples = o.total_samples;
    return o.selected;
}

}  // namespace

ScheduleStudyReport scheduling_study(const ScheduleStudyConfig& cfg) {
    cfg.validate();
    ScheduleStudyReport rep;
    rep.config = cfg;
    const int n = static_cast<int>(cfg.data.columns.size());
    std::vector<Distribution> truth;
    for (const auto& col : cfg.data.columns) {
        truth.push_back(Distribution::empirical(col));
        rep.session_length += sample_mean(col);
    }
    const auto perms = all_permutations(n);

    rep.reps.resize(cfg.macro_reps);
    parallel_for(cfg.macro_reps, cfg.threads, [&](std::size_t r) {
        ScheduleMacroRep& m = rep.reps[r];
        m.index = r;
        m.seed = cfg.seed + r;

        ScheduleInstance inst;
        inst.n_ops = n;
        inst.session_length = rep.session_length;
        inst.c_W = cfg.c_W;
        inst.c_O = cfg.c_O;
        std::vector<std::vector<Distribution>> rsb_sets(n), bf_sets(n), em_sets(n);
        std::vector<double> variances(n);
        for (int i = 0; i < n; ++i) {
            const auto F = subsample(cfg.data.columns[i], cfg.gamma, derive_seed(m.seed, kStreamSample, i));
            const double mu = sample_mean(F), var = sample_variance(F);
            inst.mean_estimates.push_back(mu);
            inst.sd_estimates.push_back(std::sqrt(var));
            variances[i] = var;
            const auto set = build_ambiguity_set(F, cfg.families, cfg.ks_level, {cfg.dataset, cfg.gamma, m.seed});
            m.any_forced = m.any_forced || set.forced;
            rsb_sets[i] = members_of(set);
            bf_sets[i] = {best_fit(F, cfg.families).dist};
            em_sets[i] = {Distribution::empirical(F)};
        }

        m.chosen.resize(4);
        m.samples.assign(4, 0);
        const std::vector<std::vector<std::vector<Distribution>>*> candidate_sets{&rsb_sets, &bf_sets, &em_sets};
        for (std::size_t a = 0; a < candidate_sets.size(); ++a) {
            inst.candidates = *candidate_sets[a];
            const auto prob = build_sequencing_problem(inst, &perms, cfg.caps);
            if (a == 0) m.scenarios = prob.scenarios.size();
            const int sel = selected_alternative(inst, prob, cfg.procedure, cfg.proc,
                                                 derive_seed(m.seed, kStreamRsb, a), m.samples[a]);
            m.chosen[a] = prob.alternatives[sel];
        }
        m.chosen[3] = ov_sequence(variances);

        // Every approach is evaluated on the same duration draws.
        const AllowanceRule rule(proportional_slack);
        for (std::size_t a = 0; a < 4; ++a) {
            const auto& psi = m.chosen[a];
            const auto t = rule(inst.mean_estimates, inst.sd_estimates, psi, inst.session_length);
            std::vector<double> costs(cfg.eval_samples), d(n);
            CounterEngine eng(derive_seed(m.seed, kStreamEval), 0);
            for (auto& c : costs) {
                for (int i = 0; i < n; ++i) d[i] = truth[i].sample(eng);
                c = schedule_cost(psi, d, t, cfg.c_W, cfg.c_O);
            }
            m.performance.push_back(performance_of(costs, static_cast<int>(a)));
        }
    });

    std::vector<PerformanceRow> rsb;
    for (const auto& m : rep.reps) rsb.push_back(m.performance[0]);
    for (std::size_t a = 1; a < 4; ++a) {
        std::vector<PerformanceRow> other;
        for (const auto& m : rep.reps) other.push_back(m.performance[a]);
        rep.vs_rsb.push_back(relative_diff(kScheduleApproaches[a], other, rsb));
    }
    return rep;
}

}  // namespace rsb
