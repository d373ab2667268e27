#pragma once

// Straightforward re-implementations of the three selection procedures over
// fully recorded output streams. Every statistic is recomputed from the raw
// prefix at every iteration; nothing is shared with the library beyond the
// output types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "rsb/selection.hpp"

namespace ref {

using Streams = std::vector<std::vector<double>>;  // [i*m+j][r]

struct Result {
    int selected = 0;
    std::vector<rsb::TraceEvent> trace;
    rsb::StopReason stop = rsb::StopReason::single_survivor;
    std::vector<std::uint64_t> counts;
    bool ran_out = false;  // needed more replications than recorded
};

inline double mean_of(const std::vector<double>& x, std::size_t n) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += x[r];
    return s / static_cast<double>(n);
}

inline double var_of_diff(const std::vector<double>& x, const std::vector<double>& y, std::size_t n) {
    std::vector<double> d(n);
    for (std::size_t r = 0; r < n; ++r) d[r] = x[r] - y[r];
    const double mu = mean_of(d, n);
    double s = 0.0;
    for (double v : d) s += (v - mu) * (v - mu);
    return s / static_cast<double>(n - 1);
}

inline double g_of(double t, double c) { return std::sqrt((c + std::log1p(t)) * (t + 1.0)); }

struct Boundary {
    double c;
    explicit Boundary(double beta) : c(-2.0 * std::log(2.0 * beta)) {}
    double g(double t) const { return g_of(t, c); }
    double slope(double t) const { return std::isinf(t) ? 0.0 : g(t) / t; }
};

inline double tau(std::size_t n, double s2) {
    return s2 > 0.0 ? static_cast<double>(n) / s2 : std::numeric_limits<double>::infinity();
}

// ------------------------------------------------------------ Procedure T

inline Result two_stage(const Streams& x, int k, int m, const rsb::ProcedureConfig& cfg) {
    Result res;
    const int s = k * m;
    const rsb::ErrorRule rule = cfg.rule.value_or(rsb::ErrorRule::additive);
    const double beta = rule == rsb::ErrorRule::multiplicative ? cfg.alpha / (k * m - 1.0) : cfg.alpha / (k + m - 2.0);
    const boost::math::students_t dist(static_cast<double>(cfg.n0 - 1));
    const double h = boost::math::quantile(boost::math::complement(dist, beta));
    double s2max = 0.0;
    for (int a = 0; a < s; ++a)
        for (int b = a + 1; b < s; ++b) s2max = std::max(s2max, var_of_diff(x[a], x[b], cfg.n0));
    const double half = cfg.delta / 2.0;
    const auto N = std::max<std::size_t>(cfg.n0, static_cast<std::size_t>(std::ceil(h * h * s2max / (half * half))));
    if (N > x[0].size()) {
        res.ran_out = true;
        return res;
    }
    double best_val = 0.0;
    for (int i = 0; i < k; ++i) {
        double worst = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) worst = std::max(worst, mean_of(x[i * m + j], N));
        if (i == 0 || worst < best_val) {
            best_val = worst;
            res.selected = i;
        }
    }
    res.counts.assign(s, N);
    res.stop = rsb::StopReason::two_stage_complete;
    return res;
}

// ------------------------------------------------------------ Procedure S

inline Result sequential(const Streams& x, int k, int m, const rsb::ProcedureConfig& cfg) {
    Result res;
    const std::size_t L = x[0].size();
    const Boundary bd(cfg.alpha / (k * m - 1.0));
    std::vector<std::vector<int>> S(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j) S[i].push_back(j);
    std::vector<int> alts(k);
    for (int i = 0; i < k; ++i) alts[i] = i;
    std::vector<std::uint64_t> counts(k * m, 0);
    std::size_t n = cfg.n0;
    if (n > L) {
        res.ran_out = true;
        return res;
    }
    auto X = [&](int i, int j) { return mean_of(x[i * m + j], n); };
    std::vector<int> top(k, 0);
    for (;;) {
        for (int i : alts)
            for (int j : S[i]) counts[i * m + j] = n;
        // inner, decided on one snapshot
        std::vector<std::vector<int>> nextS = S;
        for (int i : alts) {
            std::vector<int> keep;
            for (int a : S[i]) {
                int killer = -1;
                for (int b : S[i]) {
                    if (a == b) continue;
                    const double t = tau(n, var_of_diff(x[i * m + a], x[i * m + b], n));
                    const double d = X(i, a) - X(i, b);
                    const bool hit = std::isinf(t) ? d < 0.0 : t * d <= -bd.g(t);
                    if (hit) {
                        killer = b;
                        break;
                    }
                }
                if (killer >= 0)
                    res.trace.push_back({n, rsb::EliminationKind::inner, {i, a}, {i, killer}});
                else
                    keep.push_back(a);
            }
            nextS[i] = keep;
        }
        S = nextS;
        // outer
        std::vector<double> C(k, 0.0);
        for (int i : alts) {
            double c = 0.0;
            for (std::size_t p = 0; p < S[i].size(); ++p)
                for (std::size_t q = p + 1; q < S[i].size(); ++q)
                    c = std::max(c, bd.slope(tau(n, var_of_diff(x[i * m + S[i][p]], x[i * m + S[i][q]], n))));
            C[i] = c;
            int t = S[i].front();
            for (int j : S[i])
                if (X(i, j) > X(i, t)) t = j;
            top[i] = t;
        }
        auto tau_star = [&](int i, int ip) {
            double s2 = 0.0;
            for (int a : S[i])
                for (int b : S[ip]) s2 = std::max(s2, var_of_diff(x[i * m + a], x[ip * m + b], n));
            return tau(n, s2);
        };
        std::vector<int> survivors;
        for (int i : alts) {
            int killer = -1;
            for (int ip : alts) {
                if (ip == i) continue;
                const double ts = tau_star(i, ip);
                const double w = X(i, top[i]) - X(ip, top[ip]) - C[i];
                const bool hit = std::isinf(ts) ? w > 0.0 : ts * w > bd.g(ts);
                if (hit) {
                    killer = ip;
                    break;
                }
            }
            if (killer >= 0)
                res.trace.push_back({n, rsb::EliminationKind::outer, {i, -1}, {killer, -1}});
            else
                survivors.push_back(i);
        }
        alts = survivors;
        if (alts.size() == 1) {
            res.stop = rsb::StopReason::single_survivor;
            break;
        }
        bool closed = true;
        for (std::size_t p = 0; p < alts.size() && closed; ++p) {
            for (std::size_t q = p + 1; q < alts.size() && closed; ++q) {
                const int i = alts[p], ip = alts[q];
                const double ts = tau_star(i, ip);
                auto ok = [&](double cc) { return std::isinf(ts) ? (cfg.delta - cc) > 0.0 : ts * (cfg.delta - cc) >= bd.g(ts); };
                closed = ok(C[i]) && ok(C[ip]);
            }
        }
        if (closed) {
            res.stop = rsb::StopReason::iz_closure;
            break;
        }
        if (n >= cfg.max_replications) {
            res.stop = rsb::StopReason::truncation;
            break;
        }
        if (n + 1 > L) {
            res.ran_out = true;
            return res;
        }
        ++n;
    }
    res.selected = alts.front();
    for (int i : alts)
        if (X(i, top[i]) < X(res.selected, top[res.selected])) res.selected = i;
    res.counts = counts;
    return res;
}

// ------------------------------------------------------------ Procedure V

inline double truncation_T(double delta, double c) {
    // T*delta/2 = g(T): bracket by doubling, then bisect.
    auto f = [&](double t) { return t * delta / 2.0 - g_of(t, c); };
    double lo = 0.0, hi = 1.0;
    while (f(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

// FHN loop over the listed streams starting at n0. keep_max selects the
// elimination direction. Returns survivors; n is the final count.
struct FhnOut {
    std::vector<int> alive;
    std::size_t n;
    bool truncated = false;
    bool ran_out = false;
    std::vector<std::pair<int, int>> kills;  // (victim, eliminator) in local indices
    std::vector<std::size_t> kill_n;
};

inline FhnOut fhn(const std::vector<const std::vector<double>*>& xs, std::size_t n_start, bool keep_max,
                  const Boundary& bd, double T, std::uint64_t cap) {
    FhnOut out;
    for (std::size_t q = 0; q < xs.size(); ++q) out.alive.push_back(static_cast<int>(q));
    std::size_t n = n_start;
    const std::size_t L = xs[0]->size();
    if (n > L) {
        out.ran_out = true;
        return out;
    }
    auto pairs_past = [&] {
        for (std::size_t p = 0; p < out.alive.size(); ++p)
            for (std::size_t q = p + 1; q < out.alive.size(); ++q)
                if (tau(n, var_of_diff(*xs[out.alive[p]], *xs[out.alive[q]], n)) < T) return false;
        return true;
    };
    for (;;) {
        std::vector<int> keep;
        for (int a : out.alive) {
            int killer = -1;
            for (int b : out.alive) {
                if (a == b) continue;
                const double t = tau(n, var_of_diff(*xs[a], *xs[b], n));
                const double d = mean_of(*xs[a], n) - mean_of(*xs[b], n);
                bool hit;
                if (keep_max)
                    hit = std::isinf(t) ? d < 0.0 : t * d <= -bd.g(t);
                else
                    hit = std::isinf(t) ? d > 0.0 : t * d >= bd.g(t);
                if (hit) {
                    killer = b;
                    break;
                }
            }
            if (killer >= 0) {
                out.kills.push_back({a, killer});
                out.kill_n.push_back(n);
            } else {
                keep.push_back(a);
            }
        }
        out.alive = keep;
        if (out.alive.size() == 1 || pairs_past()) break;
        if (n >= cap) {
            out.truncated = true;
            break;
        }
        if (n + 1 > L) {
            out.ran_out = true;
            return out;
        }
        ++n;
    }
    out.n = n;
    return out;
}

inline Result vanilla(const Streams& x, int k, int m, const rsb::ProcedureConfig& cfg) {
    Result res;
    const Boundary bd(cfg.alpha / (k * m - 1.0));
    const double T = truncation_T(cfg.delta, bd.c);
    res.counts.assign(k * m, 0);
    std::vector<int> rep(k);
    std::vector<std::size_t> rep_n(k);
    bool truncated = false;
    for (int i = 0; i < k; ++i) {
        std::vector<const std::vector<double>*> xs;
        for (int j = 0; j < m; ++j) xs.push_back(&x[i * m + j]);
        auto o = fhn(xs, cfg.n0, true, bd, T, cfg.max_replications);
        if (o.ran_out) {
            res.ran_out = true;
            return res;
        }
        truncated = truncated || o.truncated;
        for (std::size_t e = 0; e < o.kills.size(); ++e)
            res.trace.push_back({o.kill_n[e], rsb::EliminationKind::inner, {i, o.kills[e].first}, {i, o.kills[e].second}});
        // counts: survivors reach o.n; victims stop at their elimination n
        for (int j = 0; j < m; ++j) res.counts[i * m + j] = o.n;
        for (std::size_t e = 0; e < o.kills.size(); ++e) res.counts[i * m + o.kills[e].first] = o.kill_n[e];
        int best = o.alive.front();
        for (int j : o.alive)
            if (mean_of(x[i * m + j], o.n) > mean_of(x[i * m + best], o.n)) best = j;
        rep[i] = best;
        rep_n[i] = o.n;
    }
    const std::size_t n1 = *std::max_element(rep_n.begin(), rep_n.end());
    std::vector<const std::vector<double>*> xs;
    for (int i = 0; i < k; ++i) xs.push_back(&x[i * m + rep[i]]);
    auto o = fhn(xs, n1, false, bd, T, cfg.max_replications);
    if (o.ran_out) {
        res.ran_out = true;
        return res;
    }
    for (std::size_t e = 0; e < o.kills.size(); ++e)
        res.trace.push_back({o.kill_n[e], rsb::EliminationKind::outer, {o.kills[e].first, -1}, {o.kills[e].second, -1}});
    int best = o.alive.front();
    for (int i : o.alive)
        if (mean_of(*xs[i], o.n) < mean_of(*xs[best], o.n)) best = i;
    res.selected = best;
    std::vector<std::uint64_t> outer_n(k, o.n);
    for (std::size_t e = 0; e < o.kills.size(); ++e) outer_n[o.kills[e].first] = o.kill_n[e];
    for (int i = 0; i < k; ++i) {
        auto& c = res.counts[i * m + rep[i]];
        c = std::max<std::uint64_t>(c, outer_n[i]);
    }
    if (o.alive.size() == 1)
        res.stop = rsb::StopReason::single_survivor;
    else if (o.truncated)
        res.stop = rsb::StopReason::truncation;
    else
        res.stop = rsb::StopReason::iz_closure;
    if (truncated) res.stop = rsb::StopReason::truncation;
    return res;
}

}  // namespace ref
