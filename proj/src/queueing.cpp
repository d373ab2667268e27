#include "rsb/queueing.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <queue>
#include <vector>

#include "rsb/errors.hpp"
#include "rsb/rng.hpp"

namespace rsb {

double QueueCost::U(double p) const {
    if (utility) return utility(p);
    return -std::log1p(-p);
}

void QueueModel::validate() const {
    if (servers < 1) throw ConfigError("queue model: servers must be >= 1");
    if (customers < 1) throw ConfigError("queue model: horizon must be >= 1 customer");
    if (cost.c_A < 0.0 || cost.c_W < 0.0 || cost.c_S < 0.0) throw ConfigError("queue model: costs must be >= 0");
}

std::vector<std::string> queue_preset_names() { return {"call-center"}; }

QueueModel queue_preset(const std::string& name, double sigma, int servers) {
    if (name != "call-center") throw ConfigError("unknown queue preset '" + name + "'");
    if (!(sigma > 0.0)) throw ConfigError("queue preset: sigma must be > 0");
    QueueModel q;
    q.interarrival = Distribution::exponential_mean(0.1);
    q.patience = Distribution::exponential_mean(5.0);
    q.service = Distribution::lognormal_with_mean(1.0, sigma);
    q.servers = servers;
    q.customers = 10000;
    q.cost = QueueCost{4.0, 2.0, 1.0, {}};
    return q;
}

namespace {

struct Inputs {
    std::vector<double> arrival, service, patience;
};

// Arrival times, service requirements and patience for every customer, each
// from its own stream.
void draw_inputs(const QueueModel& model, std::uint64_t seed, Inputs& in) {
    const std::size_t n = model.customers;
    in.arrival.resize(n);
    in.service.resize(n);
    in.patience.resize(n);
    CounterEngine ea(derive_seed(seed, 1)), es(derive_seed(seed, 2)), ep(derive_seed(seed, 3));
    model.interarrival.sample_into(ea, in.arrival);
    model.service.sample_into(es, in.service);
    model.patience.sample_into(ep, in.patience);
    double t = 0.0;
    for (double& a : in.arrival) {
        t += a;
        a = t;
    }
}

}  // namespace

QueuePathStats simulate_path(const QueueModel& model, std::uint64_t seed, bool keep_customers) {
    model.validate();
    thread_local Inputs in;
    draw_inputs(model, seed, in);
    QueuePathStats st;
    st.n = model.customers;
    if (keep_customers) {
        st.arrival.resize(st.n);
        st.wait.resize(st.n);
        st.abandon.resize(st.n);
    }
    // Min-heap of the times at which each server next becomes free.
    std::priority_queue<double, std::vector<double>, std::greater<>> free_at;
    for (int s = 0; s < model.servers; ++s) free_at.push(0.0);
    for (std::size_t i = 0; i < st.n; ++i) {
        const double t = in.arrival[i];
        const double service = in.service[i];
        const double patience = in.patience[i];
        const double f = free_at.top();
        bool left = false;
        double wait = 0.0;
        if (f > t && t + patience < f) {
            left = true;
            wait = patience;
            ++st.abandoned;
        } else {
            const double start = f > t ? f : t;
            wait = start - t;
            st.served_wait_sum += wait;
            free_at.pop();
            free_at.push(start + service);
        }
        if (keep_customers) {
            st.arrival[i] = t;
            st.wait[i] = wait;
            st.abandon[i] = left ? 1 : 0;
        }
    }
    return st;
}

QueuePathStats simulate_path_events(const QueueModel& model, std::uint64_t seed) {
    model.validate();
    Inputs in;
    draw_inputs(model, seed, in);
    const std::size_t n = model.customers;
    QueuePathStats st;
    st.n = n;
    st.arrival = in.arrival;
    st.wait.resize(n);
    st.abandon.resize(n);
    const auto& service = in.service;
    const auto& patience = in.patience;

    enum Kind { departure = 0, abandonment = 1, arrival = 2 };
    struct Event {
        double time;
        int kind;
        std::size_t who;
        bool operator>(const Event& o) const {
            if (time != o.time) return time > o.time;
            if (kind != o.kind) return kind > o.kind;
            return who > o.who;
        }
    };
    std::priority_queue<Event, std::vector<Event>, std::greater<>> cal;
    enum State : std::uint8_t { pending, waiting, in_service, gone };
    std::vector<State> state(n, pending);
    std::deque<std::size_t> line;
    int busy = 0;
    if (n > 0) cal.push({st.arrival[0], arrival, 0});

    auto start_service = [&](std::size_t c, double now) {
        state[c] = in_service;
        st.wait[c] = now - st.arrival[c];
        st.served_wait_sum += st.wait[c];
        ++busy;
        cal.push({now + service[c], departure, c});
    };

    while (!cal.empty()) {
        const Event e = cal.top();
        cal.pop();
        switch (e.kind) {
            case arrival:
                if (e.who + 1 < n) cal.push({st.arrival[e.who + 1], arrival, e.who + 1});
                if (busy < model.servers) {
                    start_service(e.who, e.time);
                } else {
                    state[e.who] = waiting;
                    line.push_back(e.who);
                    cal.push({e.time + patience[e.who], abandonment, e.who});
                }
                break;
            case abandonment:
                if (state[e.who] == waiting) {
                    state[e.who] = gone;
                    st.abandon[e.who] = 1;
                    st.wait[e.who] = patience[e.who];
                    ++st.abandoned;
                }
                break;
            case departure:
                --busy;
                while (!line.empty() && state[line.front()] != waiting) line.pop_front();
                if (!line.empty()) {
                    const std::size_t c = line.front();
                    line.pop_front();
                    start_service(c, e.time);
                }
                break;
        }
    }
    return st;
}

PathCost path_cost(const QueuePathStats& stats, const QueueModel& model) {
    const double n = static_cast<double>(stats.n);
    const auto& c = model.cost;
    PathCost out;
    if (stats.abandoned >= stats.n) {
        out.all_abandoned = true;
        out.value = c.c_A * c.U((n - 1.0) / n) + c.c_S * model.servers;
        return out;
    }
    const double served = n - static_cast<double>(stats.abandoned);
    out.value = c.c_A * c.U(static_cast<double>(stats.abandoned) / n) + c.c_W * stats.served_wait_sum / served +
                c.c_S * model.servers;
    return out;
}

void write_path_csv(const QueuePathStats& stats, const std::string& path) {
    if (stats.arrival.size() != stats.n) throw ConfigError("write_path_csv: path was simulated without customer detail");
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path);
    os << "customer_index,arrival,wait,abandoned\n";
    os.precision(17);
    for (std::size_t i = 0; i < stats.n; ++i)
        os << (i + 1) << ',' << stats.arrival[i] << ',' << stats.wait[i] << ',' << int(stats.abandon[i]) << '\n';
}

std::unique_ptr<Sampler> staffing_sampler(const QueueModel& base, std::vector<Distribution> scenarios, int k,
                                          std::uint64_t seed, bool crn) {
    if (k < 1) throw ConfigError("staffing_sampler: k must be >= 1");
    if (scenarios.empty()) throw ConfigError("staffing_sampler: scenario list is empty");
    const int m = static_cast<int>(scenarios.size());
    auto models = std::make_shared<std::vector<QueueModel>>();
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m; ++j) {
            QueueModel q = base;
            q.servers = i + 1;
            q.service = scenarios[j];
            q.validate();
            models->push_back(std::move(q));
        }
    }
    return std::make_unique<FunctionSampler>(k, m, [models, m, seed, crn](std::uint64_t rep, SystemId id) {
        const auto& q = (*models)[static_cast<std::size_t>(id.alt) * m + id.scen];
        const std::uint64_t s = crn ? derive_seed(derive_seed(seed, id.alt), rep)
                                     : derive_seed(derive_seed(seed, id.alt, id.scen), rep);
        return path_cost(simulate_path(q, s), q).value;
    });
}

}  // namespace rsb
