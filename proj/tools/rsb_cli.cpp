// Command-line front end: synthetic benches, queueing and scheduling studies,
// and selection on user-supplied outputs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "rsb/errors.hpp"
#include "rsb/experiments.hpp"
#include "rsb/report_io.hpp"

using namespace rsb;
namespace fs = std::filesystem;

namespace {

struct Global {
    std::uint64_t seed = 20240601;
    unsigned threads = 0;
    std::string out = "out";
    bool paper_scale = false;
};

// Thread count and output directory do not affect results, so they stay out of the hashed config.
Json global_json(const Global& g) {
    return {{"seed", g.seed}, {"paper_scale", g.paper_scale}};
}

std::optional<ErrorRule> parse_rule(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "mult" || s == "multiplicative") return ErrorRule::multiplicative;
    if (s == "add" || s == "additive") return ErrorRule::additive;
    throw ConfigError("unknown error rule '" + s + "' (expected mult or add)");
}

void reject_additive(ProcedureKind p, const std::optional<ErrorRule>& rule) {
    if (p != ProcedureKind::two_stage && rule && *rule == ErrorRule::additive)
        throw ConfigError(std::string("--rule add is not allowed with --proc ") + procedure_name(p) +
                          ": the additive rule requires each alternative's worst system to stay in contention until "
                          "the end, which the sequential inner layer violates; use --rule mult");
}

void print_written(const WrittenReport& w) {
    std::cout << Json{{"json", w.json_path}, {"csv", w.csv_path}}.dump() << '\n';
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
    int k = 10, m = 10;
    std::string means = "sc", vars = "ev";
    std::vector<double> deltas{0.5};
    double alpha = 0.05;
    std::size_t n0 = 10;
    std::string rule;
    std::vector<std::string> procs{"s"};
    std::size_t runs = 200;
    bool compare_rules = false;
    std::uint64_t max_reps = 10'000'000;
};

int cmd_bench(const BenchArgs& a, const Global& g) {
    if (a.k < 2) throw ConfigError("--k must be >= 2");
    if (a.m < 1) throw ConfigError("--m must be >= 1");
    if (a.runs < 1) throw ConfigError("--runs must be >= 1");
    const auto rule = parse_rule(a.rule);
    std::vector<ProcedureKind> procs;
    for (const auto& p : a.procs) {
        procs.push_back(procedure_from_name(p));
        reject_additive(procs.back(), rule);
    }
    const BenchCell cell{a.k, a.m, means_config_from_name(a.means), variance_config_from_name(a.vars)};
    make_config(cell.means, cell.vars, cell.k, cell.m);
    const std::size_t runs = g.paper_scale ? std::max<std::size_t>(a.runs, 1000) : a.runs;
    ProcedureConfig base;
    base.alpha = a.alpha;
    base.n0 = a.n0;
    base.rule = rule;
    base.max_replications = a.max_reps;
    for (double d : a.deltas) {
        if (!(d > 0.0)) throw ConfigError("--delta must be positive");
    }

    Json config{{"command", "bench"},
                {"k", a.k},
                {"m", a.m},
                {"means", a.means},
                {"vars", a.vars},
                {"deltas", a.deltas},
                {"alpha", a.alpha},
                {"n0", a.n0},
                {"rule", rule ? rule_name(*rule) : "default"},
                {"procs", a.procs},
                {"runs", runs},
                {"compare_rules", a.compare_rules},
                {"max_reps", a.max_reps},
                {"global", global_json(g)}};
    if (a.compare_rules) {
        base.delta = a.deltas.front();
        const auto rows = compare_rules_two_stage({cell}, base, runs, g.seed, g.threads);
        Json rep = Json::array();
        for (const auto& r : rows) {
            rep.push_back({{"cell", cell_label(r.cell)},
                           {"multiplicative", to_json(r.multiplicative)},
                           {"additive", to_json(r.additive)},
                           {"ratio", to_json(r.ratio)}});
        }
        print_written(write_report(g.out, "bench_rules", config, rep, rules_csv(rows)));
        return 0;
    }
    const auto rows = compare_procedures({cell}, a.deltas, procs, base, runs, g.seed, g.threads);
    Json rep = Json::array();
    for (const auto& r : rows) {
        Json j = to_json(r.est);
        j["cell"] = cell_label(r.cell);
        j["delta"] = r.delta;
        j["procedure"] = procedure_name(r.proc);
        j["rule"] = r.rule ? rule_name(*r.rule) : "multiplicative";
        rep.push_back(j);
    }
    print_written(write_report(g.out, "bench", config, rep, bench_csv(rows)));
    return 0;
}

// ------------------------------------------------------------------- queue

struct QueueArgs {
    double sigma = 2.0;
    std::size_t ell = 50;
    std::size_t reps = 100;
    std::vector<std::string> procs{"s"};
    double delta = 0.2;
    double alpha = 0.05;
    std::size_t n0 = 10;
    std::size_t path_n = 2000;
    std::size_t truth_samples = 10000;
    int k = 10;
    bool crn = false;
    bool pcs = false;
    std::size_t sets = 20;
    std::size_t runs = 200;
    std::size_t pool = 500;
    double delta_fraction = 0.5;
    std::uint64_t max_reps = 100000;
};

int cmd_queue(QueueArgs a, const Global& g) {
    if (!(a.sigma > 0.0)) throw ConfigError("--sigma must be positive");
    if (a.k < 2) throw ConfigError("--k must be >= 2");
    std::vector<ProcedureKind> procs;
    for (const auto& p : a.procs) procs.push_back(procedure_from_name(p));
    if (g.paper_scale) {
        a.reps = 1000;
        a.path_n = 10000;
        a.truth_samples = 10000;
        a.sets = 100;
        a.runs = 1000;
        a.pool = 10000;
    }
    Json config{{"command", a.pcs ? "queue-pcs" : "queue"},
                {"sigma", a.sigma},
                {"ell", a.ell},
                {"k", a.k},
                {"procs", a.procs},
                {"alpha", a.alpha},
                {"n0", a.n0},
                {"path_n", a.path_n},
                {"global", global_json(g)}};
    if (a.pcs) {
        QueuePcsConfig c;
        c.sigma = a.sigma;
        c.ell = a.ell;
        c.sets = a.sets;
        c.runs = a.runs;
        c.k = a.k;
        c.path_customers = a.path_n;
        c.pool_size = a.pool;
        c.delta_fraction = a.delta_fraction;
        c.procs = procs;
        c.alpha = a.alpha;
        c.n0 = a.n0;
        c.max_replications = a.max_reps;
        c.seed = g.seed;
        c.threads = g.threads;
        config["sets"] = a.sets;
        config["runs"] = a.runs;
        config["pool"] = a.pool;
        config["delta_fraction"] = a.delta_fraction;
        config["max_reps"] = a.max_reps;
        const auto rep = queue_pcs_study(c);
        print_written(write_report(g.out, "queue_pcs", config, to_json(rep), queue_pcs_csv(rep)));
        return 0;
    }
    config["reps"] = a.reps;
    config["delta"] = a.delta;
    config["truth_samples"] = a.truth_samples;
    config["crn"] = a.crn;
    for (auto proc : procs) {
        QueueStudyConfig c;
        c.sigma = a.sigma;
        c.ell = a.ell;
        c.macro_reps = a.reps;
        c.k = a.k;
        c.path_customers = a.path_n;
        c.truth_samples = a.truth_samples;
        c.procedure = proc;
        c.proc.delta = a.delta;
        c.proc.alpha = a.alpha;
        c.proc.n0 = a.n0;
        c.crn = a.crn;
        c.seed = g.seed;
        c.threads = g.threads;
        Json cj = config;
        cj["procedure"] = procedure_name(proc);
        const auto rep = queueing_study(c);
        print_written(write_report(g.out, std::string("queue_") + procedure_name(proc), cj, to_json(rep),
                                   queue_csv(rep)));
    }
    return 0;
}

// ---------------------------------------------------------------- schedule

struct ScheduleArgs {
    std::string data;
    double gamma = 0.5;
    std::size_t reps = 50;
    std::string proc = "s";
    double delta = 1.0;
    double alpha = 0.05;
    std::size_t n0 = 10;
    std::size_t eval_samples = 20000;
    std::string families = "exponential,gamma,weibull,lognormal,pareto,triangular";
    std::size_t soft_cap = 16;
};

int cmd_schedule(ScheduleArgs a, const Global& g) {
    if (a.data.empty() || !fs::exists(a.data)) throw ConfigError("--data file '" + a.data + "' not found");
    if (g.paper_scale) {
        a.reps = 1000;
        a.eval_samples = 10'000'000;
        a.soft_cap = 256;
    }
    ScheduleStudyConfig c;
    c.data = read_duration_csv(a.data);
    c.dataset = fs::path(a.data).filename().string();
    c.gamma = a.gamma;
    c.macro_reps = a.reps;
    c.families = parse_families(a.families);
    c.procedure = procedure_from_name(a.proc);
    c.proc.delta = a.delta;
    c.proc.alpha = a.alpha;
    c.proc.n0 = a.n0;
    c.eval_samples = a.eval_samples;
    c.caps.soft = a.soft_cap;
    c.seed = g.seed;
    c.threads = g.threads;
    Json config{{"command", "schedule"},
                {"data", a.data},
                {"gamma", a.gamma},
                {"reps", a.reps},
                {"proc", a.proc},
                {"delta", a.delta},
                {"alpha", a.alpha},
                {"n0", a.n0},
                {"eval_samples", a.eval_samples},
                {"families", a.families},
                {"soft_cap", a.soft_cap},
                {"c_W", c.c_W},
                {"c_O", c.c_O},
                {"global", global_json(g)}};
    const auto rep = scheduling_study(c);
    print_written(write_report(g.out, "schedule", config, to_json(rep), schedule_csv(rep)));
    return 0;
}

// ------------------------------------------------------------------ select

struct SelectArgs {
    std::string samples;
    std::string exec;
    int k = 0, m = 0;
    std::string proc = "s";
    std::string rule;
    double delta = 0.5;
    double alpha = 0.05;
    std::size_t n0 = 10;
    std::uint64_t max_reps = 10'000'000;
};

std::vector<double> read_series(const fs::path& p) {
    std::ifstream is(p);
    if (!is) throw DataError("cannot read '" + p.string() + "'");
    std::vector<double> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::size_t used = 0;
        try {
            out.push_back(std::stod(line.substr(first), &used));
        } catch (const std::exception&) {
            throw DataError(p.filename().string() + ": bad number on line " + std::to_string(row));
        }
    }
    return out;
}

std::unique_ptr<Sampler> recorded_from_dir(const std::string& dir, int& k, int& m) {
    if (!fs::is_directory(dir)) throw ConfigError("--samples '" + dir + "' is not a directory");
    const std::regex name(R"((\d+)_(\d+)\.csv)");
    std::map<std::pair<int, int>, fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::smatch mt;
        const std::string fn = e.path().filename().string();
        if (!std::regex_match(fn, mt, name)) continue;
        const int i = std::stoi(mt[1]), j = std::stoi(mt[2]);
        if (i < 1 || j < 1) throw ConfigError("sample file '" + fn + "': indices are 1-based");
        files[{i, j}] = e.path();
    }
    if (files.empty()) throw ConfigError("no i_j.csv files in '" + dir + "'");
    k = 0;
    m = 0;
    for (const auto& [key, _] : files) {
        k = std::max(k, key.first);
        m = std::max(m, key.second);
    }
    std::vector<std::vector<double>> data;
    for (int i = 1; i <= k; ++i) {
        for (int j = 1; j <= m; ++j) {
            auto it = files.find({i, j});
            if (it == files.end())
                throw ConfigError("missing sample file " + std::to_string(i) + "_" + std::to_string(j) + ".csv");
            data.push_back(read_series(it->second));
        }
    }
    return std::make_unique<RecordedSampler>(k, m, std::move(data));
}

int cmd_select(const SelectArgs& a, const Global& g) {
    if (a.samples.empty() == a.exec.empty()) throw ConfigError("give exactly one of --samples or --exec");
    const auto proc = procedure_from_name(a.proc);
    const auto rule = parse_rule(a.rule);
    reject_additive(proc, rule);
    int k = a.k, m = a.m;
    std::unique_ptr<Sampler> sampler;
    if (!a.samples.empty()) {
        sampler = recorded_from_dir(a.samples, k, m);
    } else {
        if (k < 1 || m < 1) throw ConfigError("--exec needs --k and --m");
        sampler = std::make_unique<ExecSampler>(k, m, a.exec);
    }
    if (k < 2) throw ConfigError("at least two alternatives are required (k >= 2)");
    ProcedureConfig cfg;
    cfg.delta = a.delta;
    cfg.alpha = a.alpha;
    cfg.n0 = a.n0;
    cfg.rule = rule;
    cfg.max_replications = a.max_reps;
    const auto outcome = run_procedure(proc, *sampler, cfg);
    Json config{{"command", "select"},
                {"samples", a.samples},
                {"exec", a.exec},
                {"k", k},
                {"m", m},
                {"proc", procedure_name(proc)},
                {"rule", rule ? rule_name(*rule) : "default"},
                {"delta", a.delta},
                {"alpha", a.alpha},
                {"n0", a.n0},
                {"max_reps", a.max_reps},
                {"seed", g.seed}};
    std::cout << Json{{"config", config}, {"outcome", to_json(outcome)}}.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust selection of the best under input-distribution ambiguity"};
    app.require_subcommand(1);
    Global g;
    auto add_global = [&](CLI::App* sc) {
        sc->add_option("--seed", g.seed, "Base seed");
        sc->add_option("--threads", g.threads, "Worker threads (0 = all cores)");
        sc->add_option("--out", g.out, "Output directory");
        sc->add_flag("--paper-scale", g.paper_scale, "Use the full experiment scale");
    };

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Synthetic normal benchmark");
    bench->add_option("--k", ba.k);
    bench->add_option("--m", ba.m);
    bench->add_option("--means", ba.means)->check(CLI::IsMember({"sc", "mdm", "mixed"}));
    bench->add_option("--vars", ba.vars)->check(CLI::IsMember({"ev", "iv", "dv"}));
    bench->add_option("--delta", ba.deltas)->delimiter(',');
    bench->add_option("--alpha", ba.alpha);
    bench->add_option("--n0", ba.n0);
    bench->add_option("--rule", ba.rule)->check(CLI::IsMember({"mult", "add", "multiplicative", "additive"}));
    bench->add_option("--proc", ba.procs)->delimiter(',');
    bench->add_option("--runs", ba.runs);
    bench->add_option("--max-reps", ba.max_reps);
    bench->add_flag("--compare-rules", ba.compare_rules, "Two-stage N^M / N^A ratio");
    add_global(bench);

    QueueArgs qa;
    auto* queue = app.add_subcommand("queue", "G/G/s+G staffing study");
    queue->add_option("--sigma", qa.sigma);
    queue->add_option("--ell", qa.ell);
    queue->add_option("--reps", qa.reps);
    queue->add_option("--procs", qa.procs)->delimiter(',');
    queue->add_option("--delta", qa.delta);
    queue->add_option("--alpha", qa.alpha);
    queue->add_option("--n0", qa.n0);
    queue->add_option("--path-n", qa.path_n);
    queue->add_option("--truth-samples", qa.truth_samples);
    queue->add_option("--k", qa.k);
    queue->add_flag("--crn", qa.crn);
    queue->add_flag("--pcs", qa.pcs, "Realized-PCS study instead of the comparison study");
    queue->add_option("--sets", qa.sets);
    queue->add_option("--runs", qa.runs);
    queue->add_option("--pool", qa.pool);
    queue->add_option("--delta-fraction", qa.delta_fraction);
    queue->add_option("--max-reps", qa.max_reps);
    add_global(queue);

    ScheduleArgs sa;
    auto* schedule = app.add_subcommand("schedule", "Appointment sequencing study");
    schedule->add_option("--data", sa.data)->required();
    schedule->add_option("--gamma", sa.gamma);
    schedule->add_option("--reps", sa.reps);
    schedule->add_option("--proc", sa.proc);
    schedule->add_option("--delta", sa.delta);
    schedule->add_option("--alpha", sa.alpha);
    schedule->add_option("--n0", sa.n0);
    schedule->add_option("--eval-samples", sa.eval_samples);
    schedule->add_option("--families", sa.families);
    schedule->add_option("--soft-cap", sa.soft_cap);
    add_global(schedule);

    SelectArgs xa;
    auto* select = app.add_subcommand("select", "Select the best from recorded or external outputs");
    select->add_option("--samples", xa.samples, "Directory of i_j.csv files (1-based)");
    select->add_option("--exec", xa.exec, "External sampler command");
    select->add_option("--k", xa.k);
    select->add_option("--m", xa.m);
    select->add_option("--proc", xa.proc);
    select->add_option("--rule", xa.rule);
    select->add_option("--delta", xa.delta);
    select->add_option("--alpha", xa.alpha);
    select->add_option("--n0", xa.n0);
    select->add_option("--max-reps", xa.max_reps);
    add_global(select);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*bench) return cmd_bench(ba, g);
        if (*queue) return cmd_queue(qa, g);
        if (*schedule) return cmd_schedule(sa, g);
        if (*select) return cmd_select(xa, g);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
