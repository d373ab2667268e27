#include "rsb/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "rsb/errors.hpp"
#include "rsb/rng.hpp"

namespace rsb {

std::vector<double> waiting_chain(const Permutation& psi, std::span<const double> d, std::span<const double> t) {
    const std::size_t n = psi.size();
    if (d.size() != n || t.size() != n) throw DomainError("waiting_chain: inconsistent lengths");
    std::vector<double> W(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const int op = psi[i - 1];
        W[i] = std::max(0.0, W[i - 1] + d[op] - t[op]);
    }
    return W;
}

double schedule_cost(const Permutation& psi, std::span<const double> d, std::span<const double> t, double c_W,
                     double c_O) {
    const std::size_t n = psi.size();
    if (d.size() != n || t.size() != n) throw DomainError("schedule_cost: inconsistent lengths");
    double w = 0.0, total = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const int op = psi[i - 1];
        w = std::max(0.0, w + d[op] - t[op]);
        if (i < n) total += w;
    }
    return c_W * total + c_O * w;
}

Permutation ov_sequence(std::span<const double> variances) {
    if (variances.empty()) throw DomainError("ov_sequence: empty");
    Permutation p(variances.size());
    std::iota(p.begin(), p.end(), 0);
    std::stable_sort(p.begin(), p.end(), [&](int a, int b) { return variances[a] < variances[b]; });
    return p;
}

std::vector<double> proportional_slack(std::span<const double> mu, std::span<const double> sd, const Permutation&,
                                       double T) {
    if (mu.size() != sd.size() || mu.empty()) throw DomainError("proportional_slack: inconsistent estimates");
    if (!(T > 0.0)) throw DomainError("proportional_slack: T must be positive");
    const double smu = std::accumulate(mu.begin(), mu.end(), 0.0);
    const double ssd = std::accumulate(sd.begin(), sd.end(), 0.0);
    std::vector<double> t(mu.size());
    if (T >= smu) {
        const double slack = T - smu;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            t[i] = ssd > 0.0 ? mu[i] + sd[i] * slack / ssd : mu[i] + slack / static_cast<double>(mu.size());
        }
    } else {
        if (!(smu > 0.0)) throw DomainError("proportional_slack: total mean must be positive");
        for (std::size_t i = 0; i < mu.size(); ++i) t[i] = mu[i] * T / smu;
    }
    // Rounding can push the sum a hair above T.
    const double s = std::accumulate(t.begin(), t.end(), 0.0);
    if (s > T) {
        for (double& x : t) x *= T / s;
    }
    return t;
}

AllowanceRule eta_allowance_rule(EtaFunction eta) {
    return [eta = std::move(eta)](std::span<const double> mu, std::span<const double> sd, const Permutation& psi,
                                  double T) {
        const auto e = eta(mu, sd, psi, T);
        if (e.size() != mu.size()) throw ConfigError("eta rule returned the wrong number of values");
        std::vector<double> t(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) t[i] = std::max(0.0, mu[i] + e[i] * sd[i]);
        const double s = std::accumulate(t.begin(), t.end(), 0.0);
        if (s > T) {
            for (double& x : t) x *= T / s;
        }
        return t;
    };
}

void check_allowances(std::span<const double> t, double T) {
    double s = 0.0;
    for (double x : t) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("allowances must be finite and >= 0");
        s += x;
    }
    if (s > T * (1.0 + 1e-12)) throw ConfigError("allowances exceed the session length");
}

std::vector<Permutation> all_permutations(int n) {
    if (n < 1) throw ConfigError("all_permutations: n must be >= 1");
    if (n > 5) throw ConfigError("all_permutations: n! alternatives exceed the cap for n > 5; supply a permutation subset");
    std::vector<Permutation> out;
    Permutation p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::vector<std::vector<int>> product_scenarios(const std::vector<int>& sizes, const ScenarioCaps& caps) {
    if (sizes.empty()) throw ConfigError("product_scenarios: no operations");
    std::size_t total = 1;
    for (int s : sizes) {
        if (s < 1) throw ConfigError("product_scenarios: every operation needs at least one candidate");
        total *= static_cast<std::size_t>(s);
        if (total > caps.hard)
            throw ConfigError("product ambiguity set has more than " + std::to_string(caps.hard) +
                              " scenarios; reduce the candidate families or raise the cap");
    }
    std::vector<std::size_t> keep(total);
    std::iota(keep.begin(), keep.end(), 0);
    if (total > caps.soft) {
        // Deterministic subsample: shuffle with a fixed seed, keep the first
        // `soft`, restore lexicographic order.
        std::mt19937_64 eng(caps.subsample_seed);
        std::shuffle(keep.begin(), keep.end(), eng);
        keep.resize(caps.soft);
        std::sort(keep.begin(), keep.end());
    }
    std::vector<std::vector<int>> out;
    out.reserve(keep.size());
    for (std::size_t code : keep) {
        std::vector<int> tuple(sizes.size());
        for (std::size_t op = sizes.size(); op-- > 0;) {
            tuple[op] = static_cast<int>(code % static_cast<std::size_t>(sizes[op]));
            code /= static_cast<std::size_t>(sizes[op]);
        }
        out.push_back(std::move(tuple));
    }
    return out;
}

SequencingProblem build_sequencing_problem(const ScheduleInstance& inst, const std::vector<Permutation>* subset,
                                           const ScenarioCaps& caps) {
    const int n = inst.n_ops;
    if (n < 1) throw ConfigError("schedule instance: n_ops must be >= 1");
    if (static_cast<int>(inst.candidates.size()) != n) throw ConfigError("schedule instance: one candidate set per operation");
    if (!(inst.session_length > 0.0)) throw ConfigError("schedule instance: session length must be positive");
    if (static_cast<int>(inst.mean_estimates.size()) != n || static_cast<int>(inst.sd_estimates.size()) != n)
        throw ConfigError("schedule instance: mean/sd estimates needed for every operation");
    SequencingProblem prob;
    if (subset) {
        for (const auto& p : *subset) {
            Permutation q = p;
            std::sort(q.begin(), q.end());
            for (int i = 0; i < n; ++i) {
                if (static_cast<int>(q.size()) != n || q[i] != i) throw ConfigError("permutation subset: not a permutation");
            }
        }
        prob.alternatives = *subset;
    } else {
        prob.alternatives = all_permutations(n);
    }
    const AllowanceRule rule = inst.rule ? inst.rule : AllowanceRule(proportional_slack);
    for (const auto& psi : prob.alternatives) {
        auto t = rule(inst.mean_estimates, inst.sd_estimates, psi, inst.session_length);
        check_allowances(t, inst.session_length);
        prob.allowances.push_back(std::move(t));
    }
    std::vector<int> sizes;
    for (const auto& c : inst.candidates) sizes.push_back(static_cast<int>(c.size()));
    prob.scenarios = product_scenarios(sizes, caps);
    return prob;
}

std::unique_ptr<Sampler> sequencing_sampler(const ScheduleInstance& inst, const SequencingProblem& prob,
                                            std::uint64_t seed) {
    auto shared = std::make_shared<std::pair<ScheduleInstance, SequencingProblem>>(inst, prob);
    const int k = static_cast<int>(prob.alternatives.size());
    const int m = static_cast<int>(prob.scenarios.size());
    return std::make_unique<FunctionSampler>(k, m, [shared, seed](std::uint64_t rep, SystemId id) {
        const auto& [in, pr] = *shared;
        const auto& scen = pr.scenarios[id.scen];
        CounterEngine eng(derive_seed(seed, static_cast<std::uint64_t>(id.alt), static_cast<std::uint64_t>(id.scen), rep));
        double d[16];
        std::vector<double> dv;
        std::span<double> ds;
        if (in.n_ops <= 16) {
            ds = std::span<double>(d, in.n_ops);
        } else {
            dv.resize(in.n_ops);
            ds = dv;
        }
        for (int op = 0; op < in.n_ops; ++op) ds[op] = in.candidates[op][scen[op]].sample(eng);
        return schedule_cost(pr.alternatives[id.alt], ds, pr.allowances[id.alt], in.c_W, in.c_O);
    });
}

DurationData read_duration_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open duration data '" + path + "'");
    DurationData out;
    std::string line;
    if (!std::getline(is, line)) throw DataError("duration data: missing header");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell.erase(std::remove_if(cell.begin(), cell.end(), [](unsigned char c) { return std::isspace(c); }), cell.end());
            out.ids.push_back(cell);
        }
    }
    if (out.ids.empty()) throw DataError("duration data: empty header");
    out.columns.resize(out.ids.size());
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= out.columns.size()) throw DataError("duration data: too many cells on row " + std::to_string(row));
            if (cell.find_first_not_of(" \t\r") != std::string::npos) {
                std::size_t used = 0;
                double v;
                try {
                    v = std::stod(cell, &used);
                } catch (const std::exception&) {
                    throw DataError("duration data: bad number on row " + std::to_string(row));
                }
                if (!std::isfinite(v)) throw DataError("duration data: non-finite value on row " + std::to_string(row));
                out.columns[col].push_back(v);
            }
            ++col;
        }
    }
    return out;
}

}  // namespace rsb
