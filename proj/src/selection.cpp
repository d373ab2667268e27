#include "rsb/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rsb/errors.hpp"
#include "rsb/stats.hpp"
#include "rsb/system_table.hpp"

namespace rsb {

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::single_survivor: return "single_survivor";
        case StopReason::iz_closure: return "iz_closure";
        case StopReason::two_stage_complete: return "two_stage_complete";
        case StopReason::truncation: return "truncation";
    }
    return "unknown";
}

const char* elimination_kind_name(EliminationKind k) { return k == EliminationKind::inner ? "inner" : "outer"; }

const char* procedure_name(ProcedureKind p) {
    switch (p) {
        case ProcedureKind::two_stage: return "two_stage";
        case ProcedureKind::sequential: return "sequential";
        case ProcedureKind::vanilla: return "vanilla";
    }
    return "unknown";
}

ProcedureKind procedure_from_name(const std::string& name) {
    if (name == "t" || name == "two_stage") return ProcedureKind::two_stage;
    if (name == "s" || name == "sequential") return ProcedureKind::sequential;
    if (name == "v" || name == "vanilla") return ProcedureKind::vanilla;
    throw ConfigError("unknown procedure '" + name + "' (expected t, s or v)");
}

SelectionOutcome run_procedure(ProcedureKind kind, Sampler& sampler, const ProcedureConfig& cfg) {
    switch (kind) {
        case ProcedureKind::two_stage: return run_two_stage(sampler, cfg);
        case ProcedureKind::sequential: return run_sequential(sampler, cfg);
        case ProcedureKind::vanilla: return run_vanilla(sampler, cfg);
    }
    throw ConfigError("unknown procedure");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const Sampler& sampler, const ProcedureConfig& cfg) {
    if (sampler.alternatives() < 1 || sampler.scenarios() < 1) throw ConfigError("sampler must have k, m >= 1");
    if (cfg.n0 < 2) throw ConfigError("n0 must be >= 2");
    if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta)) throw ConfigError("delta must be positive");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
}

void require_multiplicative(const ProcedureConfig& cfg, const char* proc) {
    if (cfg.rule && *cfg.rule == ErrorRule::additive)
        throw ConfigError(std::string(proc) +
                          " requires the multiplicative error rule: the additive rule assumes each "
                          "alternative's worst system stays in contention, which sequential inner "
                          "elimination does not guarantee");
}

double tau_of(double n, double s2) { return s2 > 0.0 ? n / s2 : kInf; }

// Z = tau*diff <= -g(tau). At tau = inf the drift sign decides.
bool exits_below(double tau, double diff, const BoundaryParams& p) {
    if (std::isinf(tau)) return diff < 0.0;
    return tau * diff <= -boundary_gc(tau, p);
}

bool exits_above(double tau, double diff, const BoundaryParams& p) {
    if (std::isinf(tau)) return diff > 0.0;
    return tau * diff >= boundary_gc(tau, p);
}

// tau*x > g(tau)
bool strictly_beyond(double tau, double x, const BoundaryParams& p) {
    if (std::isinf(tau)) return x > 0.0;
    return tau * x > boundary_gc(tau, p);
}

// tau*x >= g(tau)
bool reaches(double tau, double x, const BoundaryParams& p) {
    if (std::isinf(tau)) return x > 0.0;
    return tau * x >= boundary_gc(tau, p);
}

double slope_or_zero(double tau, const BoundaryParams& p) { return std::isinf(tau) ? 0.0 : boundary_slope(tau, p); }

// Lowest index among maxima (keep_max) or minima of the table means.
int extreme_of(const SystemTable& t, const std::vector<int>& members, bool keep_max) {
    int best = members.front();
    for (std::size_t q = 1; q < members.size(); ++q) {
        const double d = t.mean_diff(members[q], best);
        if (keep_max ? d > 0.0 : d < 0.0) best = members[q];
    }
    return best;
}

struct Screened {
    int victim;
    int eliminator;
};

// One FHN screening pass on a frozen snapshot. keep_max: a is eliminated when
// Z_ab <= -g for some surviving b; otherwise when Z_ab >= g.
std::vector<Screened> fhn_screen(const SystemTable& t, const std::vector<int>& alive, bool keep_max,
                                 const BoundaryParams& p) {
    std::vector<Screened> out;
    if (alive.size() < 2) return out;
    const double n = static_cast<double>(t.count(alive.front()));
    for (int a : alive) {
        for (int b : alive) {
            if (a == b) continue;
            const double tau = tau_of(n, t.diff_variance(a, b));
            const double diff = t.mean_diff(a, b);
            const bool hit = keep_max ? exits_below(tau, diff, p) : exits_above(tau, diff, p);
            if (hit) {
                out.push_back({a, b});
                break;
            }
        }
    }
    return out;
}

bool all_pairs_past(const SystemTable& t, const std::vector<int>& alive, double T) {
    if (alive.size() < 2) return true;
    const double n = static_cast<double>(t.count(alive.front()));
    for (std::size_t x = 0; x < alive.size(); ++x) {
        for (std::size_t y = x + 1; y < alive.size(); ++y) {
            if (tau_of(n, t.diff_variance(alive[x], alive[y])) < T) return false;
        }
    }
    return true;
}

SelectionOutcome init_outcome(const Sampler& s, const char* name) {
    SelectionOutcome o;
    o.procedure = name;
    o.k = s.alternatives();
    o.m = s.scenarios();
    o.per_system_counts.assign(static_cast<std::size_t>(o.k) * o.m, 0);
    return o;
}

// Draw replication `rep` of the listed flat systems and append to the table.
class Feeder {
public:
    Feeder(Sampler& s, SystemTable& t) : sampler_(s), table_(t) {}

    void feed(std::uint64_t rep, const std::vector<int>& locals, const std::vector<SystemId>& ids,
              bool with_cross = true) {
        buf_.resize(ids.size());
        sampler_.draw(rep, ids, buf_);
        table_.append(locals, buf_, with_cross);
    }

private:
    Sampler& sampler_;
    SystemTable& table_;
    std::vector<double> buf_;
};

SystemId id_of(int flat, int m) { return {flat / m, flat % m}; }

SelectionOutcome single_alternative(Sampler& sampler, const ProcedureConfig& cfg, const char* name) {
    SelectionOutcome o = init_outcome(sampler, name);
    const int s = o.m;
    SystemTable table(s);
    Feeder feeder(sampler, table);
    std::vector<int> locals(s);
    std::vector<SystemId> ids(s);
    for (int j = 0; j < s; ++j) {
        locals[j] = j;
        ids[j] = {0, j};
    }
    for (std::uint64_t r = 0; r < cfg.n0; ++r) feeder.feed(r, locals, ids, false);
    for (int j = 0; j < s; ++j) o.per_system_counts[j] = cfg.n0;
    o.total_samples = cfg.n0 * static_cast<std::uint64_t>(s);
    o.final_n = cfg.n0;
    o.selected = 0;
    o.stop_reason = StopReason::single_survivor;
    return o;
}

}  // namespace

// ---------------------------------------------------------------------------

SelectionOutcome run_two_stage(Sampler& sampler, const ProcedureConfig& cfg) {
    validate(sampler, cfg);
    if (sampler.alternatives() == 1) return single_alternative(sampler, cfg, "two_stage");
    SelectionOutcome o = init_outcome(sampler, "two_stage");
    const int k = o.k, m = o.m, s = k * m;
    const ErrorRule rule = cfg.rule.value_or(ErrorRule::additive);
    o.beta = error_allowance(rule, k, m, cfg.alpha);
    o.h = student_t_quantile(1.0 - o.beta, static_cast<double>(cfg.n0 - 1));
    const IZParams iz = split_iz(cfg.delta);

    SystemTable table(s);
    Feeder feeder(sampler, table);
    std::vector<int> all(s);
    std::vector<SystemId> ids(s);
    for (int q = 0; q < s; ++q) {
        all[q] = q;
        ids[q] = id_of(q, m);
    }
    for (std::uint64_t r = 0; r < cfg.n0; ++r) feeder.feed(r, all, ids);

    double s2max = 0.0;
    int pa = 0, pb = 1;
    for (int a = 0; a < s; ++a) {
        for (int b = a + 1; b < s; ++b) {
            const double v = table.diff_variance(a, b);
            if (v > s2max) {
                s2max = v;
                pa = a;
                pb = b;
            }
        }
    }
    const double h2 = o.h * o.h;
    const double need = std::max(h2 * s2max / (iz.delta_inner * iz.delta_inner),
                                 h2 * s2max / (iz.delta_outer * iz.delta_outer));
    if (!(need <= cfg.max_two_stage_n)) {
        const SystemId A = id_of(pa, m), B = id_of(pb, m);
        throw ResourceError("two-stage sample size " + std::to_string(need) + " exceeds limit for pair (" +
                            std::to_string(A.alt + 1) + "," + std::to_string(A.scen + 1) + ") vs (" +
                            std::to_string(B.alt + 1) + "," + std::to_string(B.scen + 1) + ")");
    }
    const auto N = std::max<std::uint64_t>(cfg.n0, static_cast<std::uint64_t>(std::ceil(need)));
    for (std::uint64_t r = cfg.n0; r < N; ++r) feeder.feed(r, all, ids, false);

    std::vector<int> tops(k);
    for (int i = 0; i < k; ++i) {
        std::vector<int> members(m);
        for (int j = 0; j < m; ++j) members[j] = i * m + j;
        tops[i] = extreme_of(table, members, true);
    }
    o.selected = 0;
    for (int i = 1; i < k; ++i) {
        if (table.mean_diff(tops[i], tops[o.selected]) < 0.0) o.selected = i;
    }
    for (int q = 0; q < s; ++q) o.per_system_counts[q] = N;
    o.total_samples = N * static_cast<std::uint64_t>(s);
    o.final_n = N;
    o.stop_reason = StopReason::two_stage_complete;
    return o;
}

// ---------------------------------------------------------------------------

SelectionOutcome run_sequential(Sampler& sampler, const ProcedureConfig& cfg) {
    validate(sampler, cfg);
    require_multiplicative(cfg, "the sequential procedure");
    if (sampler.alternatives() == 1) return single_alternative(sampler, cfg, "sequential");
    SelectionOutcome o = init_outcome(sampler, "sequential");
    const int k = o.k, m = o.m, s = k * m;
    o.beta = error_allowance(ErrorRule::multiplicative, k, m, cfg.alpha);
    const BoundaryParams bp = BoundaryParams::from_beta(o.beta);
    const double delta = cfg.delta;

    SystemTable table(s);
    Feeder feeder(sampler, table);
    std::vector<char> sys_alive(s, 1), alt_alive(k, 1);
    std::vector<int> alive;
    std::vector<SystemId> ids;
    auto refresh = [&] {
        alive.clear();
        ids.clear();
        for (int q = 0; q < s; ++q) {
            if (sys_alive[q]) {
                alive.push_back(q);
                ids.push_back(id_of(q, m));
            }
        }
    };
    refresh();
    for (std::uint64_t r = 0; r < cfg.n0; ++r) feeder.feed(r, alive, ids);
    std::uint64_t n = cfg.n0;

    std::vector<std::vector<int>> members(k);
    std::vector<double> C(k, 0.0);
    std::vector<int> top(k, 0);
    std::vector<double> tau_star(static_cast<std::size_t>(k) * k, kInf);
    auto collect = [&](int i) {
        members[i].clear();
        for (int j = 0; j < m; ++j) {
            if (sys_alive[i * m + j]) members[i].push_back(i * m + j);
        }
    };

    for (;;) {
        const double nd = static_cast<double>(n);

        // Inner layer: all alternatives decided on the same snapshot.
        std::vector<Screened> inner;
        for (int i = 0; i < k; ++i) {
            if (!alt_alive[i]) continue;
            collect(i);
            const auto hits = fhn_screen(table, members[i], true, bp);
            inner.insert(inner.end(), hits.begin(), hits.end());
        }
        for (const auto& e : inner) {
            sys_alive[e.victim] = 0;
            const SystemId v = id_of(e.victim, m), w = id_of(e.eliminator, m);
            o.trace.push_back({n, EliminationKind::inner, {v.alt, v.scen}, {w.alt, w.scen}});
        }

        // Outer layer on post-inner survivor sets.
        std::vector<int> alts;
        for (int i = 0; i < k; ++i) {
            if (!alt_alive[i]) continue;
            alts.push_back(i);
            collect(i);
            double c = 0.0;
            const auto& S = members[i];
            for (std::size_t x = 0; x < S.size(); ++x) {
                for (std::size_t y = x + 1; y < S.size(); ++y) {
                    c = std::max(c, slope_or_zero(tau_of(nd, table.diff_variance(S[x], S[y])), bp));
                }
            }
            C[i] = c;
            top[i] = extreme_of(table, S, true);
        }
        for (std::size_t x = 0; x < alts.size(); ++x) {
            for (std::size_t y = x + 1; y < alts.size(); ++y) {
                const int i = alts[x], ip = alts[y];
                double s2 = 0.0;
                for (int a : members[i]) {
                    for (int b : members[ip]) s2 = std::max(s2, table.diff_variance(a, b));
                }
                tau_star[i * k + ip] = tau_star[ip * k + i] = tau_of(nd, s2);
            }
        }
        std::vector<Screened> outer;
        for (int i : alts) {
            for (int ip : alts) {
                if (ip == i) continue;
                const double W = table.mean_diff(top[i], top[ip]);
                if (strictly_beyond(tau_star[i * k + ip], W - C[i], bp)) {
                    outer.push_back({i, ip});
                    break;
                }
            }
        }
        // Mutual elimination cannot occur (it needs W > 0 and W < 0), but if
        // it ever did, only the alternative with the larger maximum mean goes.
        std::vector<char> drop(k, 0);
        for (const auto& e : outer) drop[e.victim] = 1;
        for (const auto& e : outer) {
            for (const auto& f : outer) {
                if (f.victim == e.eliminator && f.eliminator == e.victim && drop[e.victim] && drop[f.victim]) {
                    const bool e_worse = table.mean_diff(top[e.victim], top[f.victim]) > 0.0;
                    drop[e_worse ? f.victim : e.victim] = 0;
                }
            }
        }
        std::size_t remaining = 0;
        for (int i : alts) remaining += drop[i] ? 0 : 1;
        if (remaining == 0) {
            // Unreachable: the alternative with the smallest maximum mean is never beaten.
            int keep = alts.front();
            for (int i : alts) {
                if (table.mean_diff(top[i], top[keep]) < 0.0) keep = i;
            }
            drop[keep] = 0;
        }
        for (const auto& e : outer) {
            if (!drop[e.victim]) continue;
            alt_alive[e.victim] = 0;
            for (int j = 0; j < m; ++j) sys_alive[e.victim * m + j] = 0;
            o.trace.push_back({n, EliminationKind::outer, {e.victim, -1}, {e.eliminator, -1}});
        }
        alts.erase(std::remove_if(alts.begin(), alts.end(), [&](int i) { return !alt_alive[i]; }), alts.end());

        // Stopping.
        if (alts.size() == 1) {
            o.stop_reason = StopReason::single_survivor;
            break;
        }
        bool closed = true;
        for (std::size_t x = 0; x < alts.size() && closed; ++x) {
            for (std::size_t y = x + 1; y < alts.size() && closed; ++y) {
                const int i = alts[x], ip = alts[y];
                const double ts = tau_star[i * k + ip];
                closed = reaches(ts, delta - C[i], bp) && reaches(ts, delta - C[ip], bp);
            }
        }
        if (closed) {
            for (std::size_t x = 0; x < alts.size(); ++x) {
                for (std::size_t y = x + 1; y < alts.size(); ++y) {
                    const int i = alts[x], ip = alts[y];
                    const double D = slope_or_zero(tau_star[i * k + ip], bp);
                    const double slack = 1e-9 * std::max(1.0, delta);
                    if (C[i] + D > delta + slack || C[ip] + D > delta + slack)
                        throw NumericError("sequential: closure stop without C_i + D <= delta");
                }
            }
            o.stop_reason = StopReason::iz_closure;
            break;
        }
        if (n >= cfg.max_replications) {
            o.stop_reason = StopReason::truncation;
            break;
        }
        refresh();
        feeder.feed(n, alive, ids);
        ++n;
    }

    std::vector<int> alts;
    for (int i = 0; i < k; ++i) {
        if (alt_alive[i]) alts.push_back(i);
    }
    o.selected = alts.front();
    for (int i : alts) {
        if (table.mean_diff(top[i], top[o.selected]) < 0.0) o.selected = i;
    }
    for (int q = 0; q < s; ++q) {
        o.per_system_counts[q] = table.count(q);
        o.total_samples += table.count(q);
    }
    o.final_n = n;
    return o;
}

// ---------------------------------------------------------------------------

SelectionOutcome run_vanilla(Sampler& sampler, const ProcedureConfig& cfg) {
    validate(sampler, cfg);
    require_multiplicative(cfg, "the vanilla procedure");
    if (sampler.alternatives() == 1) return single_alternative(sampler, cfg, "vanilla");
    SelectionOutcome o = init_outcome(sampler, "vanilla");
    const int k = o.k, m = o.m;
    o.beta = error_allowance(ErrorRule::multiplicative, k, m, cfg.alpha);
    const BoundaryParams bp = BoundaryParams::from_beta(o.beta);
    const double T = truncation_time(cfg.delta, bp);
    o.truncation_T = T;
    bool truncated = false;

    // Phase 1: per-alternative screening toward the largest mean.
    std::vector<int> rep_scen(k, 0);
    std::vector<std::uint64_t> rep_inner_count(k, 0);
    for (int i = 0; i < k; ++i) {
        SystemTable table(m);
        Feeder feeder(sampler, table);
        std::vector<char> alive_flag(m, 1);
        std::vector<int> alive;
        std::vector<SystemId> ids;
        auto refresh = [&] {
            alive.clear();
            ids.clear();
            for (int j = 0; j < m; ++j) {
                if (alive_flag[j]) {
                    alive.push_back(j);
                    ids.push_back({i, j});
                }
            }
        };
        refresh();
        for (std::uint64_t r = 0; r < cfg.n0; ++r) feeder.feed(r, alive, ids);
        std::uint64_t n = cfg.n0;
        for (;;) {
            for (const auto& e : fhn_screen(table, alive, true, bp)) {
                alive_flag[e.victim] = 0;
                o.trace.push_back({n, EliminationKind::inner, {i, e.victim}, {i, e.eliminator}});
            }
            refresh();
            if (alive.size() == 1 || all_pairs_past(table, alive, T)) break;
            if (n >= cfg.max_replications) {
                truncated = true;
                break;
            }
            feeder.feed(n, alive, ids);
            ++n;
        }
        rep_scen[i] = extreme_of(table, alive, true);
        rep_inner_count[i] = table.count(rep_scen[i]);
        for (int j = 0; j < m; ++j) o.per_system_counts[i * m + j] = table.count(j);
    }

    // Phase 2: screening of the representatives toward the smallest mean.
    // Replications already drawn in phase 1 are replayed, not re-counted.
    std::uint64_t n = *std::max_element(rep_inner_count.begin(), rep_inner_count.end());
    SystemTable table(k);
    Feeder feeder(sampler, table);
    std::vector<char> alive_flag(k, 1);
    std::vector<int> alive;
    std::vector<SystemId> ids;
    auto refresh = [&] {
        alive.clear();
        ids.clear();
        for (int i = 0; i < k; ++i) {
            if (alive_flag[i]) {
                alive.push_back(i);
                ids.push_back({i, rep_scen[i]});
            }
        }
    };
    refresh();
    for (std::uint64_t r = 0; r < n; ++r) feeder.feed(r, alive, ids);
    for (;;) {
        const auto hits = fhn_screen(table, alive, false, bp);
        for (const auto& e : hits) {
            alive_flag[e.victim] = 0;
            o.trace.push_back({n, EliminationKind::outer, {e.victim, -1}, {e.eliminator, -1}});
        }
        refresh();
        if (alive.size() == 1) {
            o.stop_reason = StopReason::single_survivor;
            break;
        }
        if (all_pairs_past(table, alive, T)) {
            o.stop_reason = StopReason::iz_closure;
            break;
        }
        if (n >= cfg.max_replications) {
            truncated = true;
            o.stop_reason = StopReason::truncation;
            break;
        }
        feeder.feed(n, alive, ids);
        ++n;
    }
    if (truncated) o.stop_reason = StopReason::truncation;
    o.selected = extreme_of(table, alive, false);
    for (int i = 0; i < k; ++i) {
        auto& c = o.per_system_counts[i * m + rep_scen[i]];
        c = std::max<std::uint64_t>(c, table.count(i));
    }
    for (auto c : o.per_system_counts) o.total_samples += c;
    o.final_n = n;
    return o;
}

}  // namespace rsb
