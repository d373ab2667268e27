#include "rsb/report_io.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rsb/errors.hpp"

namespace rsb {

namespace {

Json ref_json(const SystemRef& r) {
    Json j{{"alt", r.alt + 1}};
    if (r.scen >= 0) j["scen"] = r.scen + 1;
    return j;
}

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

std::string perm_string(const Permutation& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(p[i] + 1);
    }
    return s;
}

Json perf_json(const PerformanceRow& p) {
    return {{"decision", p.decision}, {"M", p.M}, {"Q70", p.Q70}, {"Q80", p.Q80}, {"Q90", p.Q90}};
}

Json rel_json(const RelativeDiff& d) {
    return {{"approach", d.approach}, {"M", to_json(d.M)}, {"Q70", to_json(d.Q70)}, {"Q80", to_json(d.Q80)},
            {"Q90", to_json(d.Q90)}};
}

void rel_row(CsvTable& t, const RelativeDiff& d) {
    t.rows.push_back({d.approach, std::to_string(d.M.n), num(d.M.mean), num(d.M.half_width), num(d.Q70.mean),
                      num(d.Q70.half_width), num(d.Q80.mean), num(d.Q80.half_width), num(d.Q90.mean),
                      num(d.Q90.half_width)});
}

}  // namespace

Json to_json(const SelectionOutcome& o) {
    Json trace = Json::array();
    for (const auto& e : o.trace) {
        trace.push_back({{"n", e.n},
                         {"kind", elimination_kind_name(e.kind)},
                         {"victim", ref_json(e.victim)},
                         {"eliminator", ref_json(e.eliminator)}});
    }
    Json j{{"procedure", o.procedure},
           {"k", o.k},
           {"m", o.m},
           {"selected", o.selected + 1},
           {"total_samples", o.total_samples},
           {"per_system_counts", o.per_system_counts},
           {"stop_reason", stop_reason_name(o.stop_reason)},
           {"final_n", o.final_n},
           {"beta", o.beta},
           {"trace", trace}};
    if (o.procedure == "two_stage") j["h"] = o.h;
    if (o.procedure == "vanilla") j["truncation_T"] = o.truncation_T;
    return j;
}

Json to_json(const MeanCI& ci) { return {{"mean", ci.mean}, {"half_width", ci.half_width}, {"n", ci.n}}; }

Json to_json(const ProportionCI& ci) {
    return {{"p", ci.p}, {"lower", ci.lower}, {"upper", ci.upper}, {"n", ci.n}};
}

Json to_json(const PcsEstimate& e) {
    return {{"realized_pcs", to_json(e.pcs)},
            {"avg_total_samples", to_json(e.avg_samples)},
            {"total_samples", e.total_samples},
            {"truncated_runs", e.truncated}};
}

Json to_json(const AmbiguitySet& set) {
    Json members = Json::array();
    for (const auto& f : set.members) {
        const auto& p = f.dist.params();
        members.push_back({{"family", std::string(family_name(f.family()))},
                           {"params", {p[0], p[1], p[2]}},
                           {"ks_stat", f.ks_stat},
                           {"description", f.dist.describe()}});
    }
    Json diag = Json::array();
    for (const auto& d : set.diagnostics) {
        Json x{{"family", std::string(family_name(d.family))}, {"fitted", d.fitted}, {"accepted", d.accepted}};
        if (d.fitted) x["ks_stat"] = d.ks_stat;
        if (!d.error.empty()) x["error"] = d.error;
        diag.push_back(x);
    }
    return {{"members", members},
            {"forced", set.forced},
            {"diagnostics", diag},
            {"source", {{"dataset", set.source.dataset}, {"fraction", set.source.fraction}, {"seed", set.source.seed}}}};
}

Json to_json(const QueueStudyReport& r) {
    Json truth = Json::array();
    for (const auto& t : r.truth) truth.push_back(perf_json(t));
    Json reps = Json::array();
    for (const auto& m : r.reps) {
        reps.push_back({{"index", m.index},
                        {"seed", m.seed},
                        {"set_size", m.set_size},
                        {"forced", m.forced},
                        {"lognormal_rejected", m.lognormal_rejected},
                        {"best_family", m.best_family},
                        {"misspecified", m.misspecified},
                        {"s_rsb", m.s_rsb},
                        {"s_bf", m.s_bf},
                        {"samples_rsb", m.samples_rsb},
                        {"samples_bf", m.samples_bf}});
    }
    return {{"truth", truth},
            {"s_tr", r.s_tr},
            {"relative_differences_pct",
             {rel_json(r.tr_vs_rsb), rel_json(r.bf_vs_rsb), rel_json(r.bf_vs_rsb_misspecified)}},
            {"mean_set_size", to_json(r.set_size)},
            {"misspecification", to_json(r.misspecification)},
            {"lognormal_rejections", r.lognormal_rejections},
            {"macro_reps", reps}};
}

Json to_json(const QueuePcsReport& r) {
    Json sets = Json::array();
    for (const auto& s : r.sets) {
        Json est = Json::array();
        for (std::size_t p = 0; p < s.est.size(); ++p) {
            Json e = to_json(s.est[p]);
            e["procedure"] = procedure_name(r.config.procs[p]);
            est.push_back(e);
        }
        sets.push_back({{"index", s.index},
                        {"set_size", s.set_size},
                        {"best", s.best},
                        {"gap", s.gap},
                        {"delta", s.delta},
                        {"procedures", est}});
    }
    Json summary = Json::array();
    for (std::size_t p = 0; p < r.summary.size(); ++p) {
        const auto& q = r.summary[p];
        summary.push_back({{"procedure", procedure_name(r.config.procs[p])},
                           {"min", q.min},
                           {"q25", q.q25},
                           {"median", q.median},
                           {"q75", q.q75},
                           {"max", q.max}});
    }
    return {{"sets", sets}, {"summary", summary}};
}

Json to_json(const ScheduleStudyReport& r) {
    Json reps = Json::array();
    for (const auto& m : r.reps) {
        Json ap = Json::array();
        for (std::size_t a = 0; a < m.chosen.size(); ++a) {
            Json p = perf_json(m.performance[a]);
            p.erase("decision");
            p["approach"] = kScheduleApproaches[a];
            p["sequence"] = perm_string(m.chosen[a]);
            p["samples"] = m.samples[a];
            ap.push_back(p);
        }
        reps.push_back({{"index", m.index},
                        {"seed", m.seed},
                        {"scenarios", m.scenarios},
                        {"any_forced", m.any_forced},
                        {"approaches", ap}});
    }
    Json rel = Json::array();
    for (const auto& d : r.vs_rsb) rel.push_back(rel_json(d));
    return {{"session_length", r.session_length}, {"relative_differences_pct", rel}, {"macro_reps", reps}};
}

std::string config_hash(const Json& config) {
    const std::string s = config.dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CsvTable bench_csv(const std::vector<BenchRow>& rows) {
    CsvTable t;
    t.header = {"cell", "k", "m", "means", "vars", "delta", "procedure", "rule", "runs", "pcs", "pcs_lower",
                "pcs_upper", "avg_total_samples", "avg_total_samples_hw", "truncated_runs"};
    for (const auto& r : rows) {
        t.rows.push_back({cell_label(r.cell), std::to_string(r.cell.k), std::to_string(r.cell.m),
                          means_config_name(r.cell.means), variance_config_name(r.cell.vars), num(r.delta),
                          procedure_name(r.proc), r.rule ? rule_name(*r.rule) : "multiplicative",
                          std::to_string(r.est.pcs.n), num(r.est.pcs.p), num(r.est.pcs.lower), num(r.est.pcs.upper),
                          num(r.est.avg_samples.mean), num(r.est.avg_samples.half_width),
                          std::to_string(r.est.truncated)});
    }
    return t;
}

CsvTable rules_csv(const std::vector<RuleRatioRow>& rows) {
    CsvTable t;
    t.header = {"cell", "k", "m", "means", "vars", "avg_samples_mult", "avg_samples_add", "ratio", "ratio_hw",
                "pcs_mult", "pcs_add"};
    for (const auto& r : rows) {
        t.rows.push_back({cell_label(r.cell), std::to_string(r.cell.k), std::to_string(r.cell.m),
                          means_config_name(r.cell.means), variance_config_name(r.cell.vars),
                          num(r.multiplicative.avg_samples.mean), num(r.additive.avg_samples.mean), num(r.ratio.mean),
                          num(r.ratio.half_width), num(r.multiplicative.pcs.p), num(r.additive.pcs.p)});
    }
    return t;
}

CsvTable queue_csv(const QueueStudyReport& r) {
    CsvTable t;
    t.header = {"approach", "n", "M_pct", "M_hw", "Q70_pct", "Q70_hw", "Q80_pct", "Q80_hw", "Q90_pct", "Q90_hw"};
    rel_row(t, r.tr_vs_rsb);
    rel_row(t, r.bf_vs_rsb);
    rel_row(t, r.bf_vs_rsb_misspecified);
    return t;
}

CsvTable queue_pcs_csv(const QueuePcsReport& r) {
    CsvTable t;
    t.header = {"set", "set_size", "best", "gap", "delta", "procedure", "pcs", "avg_total_samples", "truncated_runs"};
    for (const auto& s : r.sets) {
        for (std::size_t p = 0; p < s.est.size(); ++p) {
            t.rows.push_back({std::to_string(s.index), std::to_string(s.set_size), std::to_string(s.best), num(s.gap),
                              num(s.delta), procedure_name(r.config.procs[p]), num(s.est[p].pcs.p),
                              num(s.est[p].avg_samples.mean), std::to_string(s.est[p].truncated)});
        }
    }
    return t;
}

CsvTable schedule_csv(const ScheduleStudyReport& r) {
    CsvTable t;
    t.header = {"approach", "macro_rep", "M", "Q70", "Q80", "Q90"};
    for (const auto& m : r.reps) {
        for (std::size_t a = 0; a < m.performance.size(); ++a) {
            const auto& p = m.performance[a];
            t.rows.push_back({kScheduleApproaches[a], std::to_string(m.index), num(p.M), num(p.Q70), num(p.Q80),
                              num(p.Q90)});
        }
    }
    return t;
}

std::string format_csv(const CsvTable& t) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out;
}

WrittenReport write_report(const std::string& dir, const std::string& stem, const Json& config, const Json& report,
                           const CsvTable& csv) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    const std::string hash = config_hash(config);
    const auto base = std::filesystem::path(dir) / (stem + "_" + hash);
    WrittenReport w{base.string() + ".json", base.string() + ".csv"};
    {
        std::ofstream os(w.json_path);
        if (!os) throw ConfigError("cannot write '" + w.json_path + "'");
        os << Json{{"config", config}, {"config_hash", hash}, {"report", report}}.dump(2) << '\n';
    }
    {
        std::ofstream os(w.csv_path);
        if (!os) throw ConfigError("cannot write '" + w.csv_path + "'");
        os << format_csv(csv);
    }
    return w;
}

}  // namespace rsb
