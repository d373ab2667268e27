#include "rsb/ambiguity.hpp"

#include <algorithm>
#include <sstream>

#include "rsb/errors.hpp"
#include "rsb/stats.hpp"

namespace rsb {

namespace {

void check_inputs(std::span<const double> sample, const std::vector<Family>& families) {
    if (sample.size() < kMinAmbiguitySample)
        throw ConfigError("ambiguity set needs at least " + std::to_string(kMinAmbiguitySample) + " observations, got " +
                          std::to_string(sample.size()));
    if (families.empty()) throw ConfigError("ambiguity set needs at least one candidate family");
    for (std::size_t i = 0; i < families.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (families[i] == families[j])
                throw ConfigError("duplicate candidate family '" + std::string(family_name(families[i])) + "'");
        }
    }
}

struct Fits {
    std::vector<FittedDistribution> ok;   // in family order
    std::vector<FamilyDiagnostic> diag;
};

Fits fit_all(std::span<const double> sample, const std::vector<Family>& families) {
    Fits out;
    for (Family f : families) {
        FamilyDiagnostic d;
        d.family = f;
        try {
            auto fit = fit_mle(f, sample);
            d.fitted = true;
            d.ks_stat = fit.ks_stat;
            out.ok.push_back(std::move(fit));
        } catch (const Error& e) {
            d.error = e.what();
        }
        out.diag.push_back(std::move(d));
    }
    if (out.ok.empty()) {
        std::ostringstream msg;
        msg << "no candidate family could be fitted:";
        for (const auto& d : out.diag) msg << " [" << family_name(d.family) << ": " << d.error << "]";
        throw FitError(msg.str());
    }
    return out;
}

std::size_t smallest_ks(const std::vector<FittedDistribution>& fits) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < fits.size(); ++i) {
        if (fits[i].ks_stat < fits[best].ks_stat) best = i;
    }
    return best;
}

}  // namespace

AmbiguitySet build_ambiguity_set(std::span<const double> sample, const std::vector<Family>& families, double level,
                                 AmbiguitySource source) {
    check_inputs(sample, families);
    auto fits = fit_all(sample, families);
    AmbiguitySet set;
    set.source = std::move(source);
    for (auto& d : fits.diag) {
        if (d.fitted) d.accepted = ks_accepts_statistic(d.ks_stat, sample.size(), level);
    }
    for (const auto& fit : fits.ok) {
        if (ks_accepts_statistic(fit.ks_stat, sample.size(), level)) set.members.push_back(fit);
    }
    if (set.members.empty()) {
        set.members.push_back(fits.ok[smallest_ks(fits.ok)]);
        set.forced = true;
    }
    set.diagnostics = std::move(fits.diag);
    return set;
}

FittedDistribution best_fit(std::span<const double> sample, const std::vector<Family>& families) {
    check_inputs(sample, families);
    auto fits = fit_all(sample, families);
    return fits.ok[smallest_ks(fits.ok)];
}

bool misspecification_indicator(const FittedDistribution& best, Family true_family) {
    return best.family() != true_family;
}

bool misspecification_indicator(const AmbiguitySet& set, Family true_family) {
    if (set.members.empty()) throw DomainError("empty ambiguity set");
    return misspecification_indicator(set.members[smallest_ks(set.members)], true_family);
}

std::vector<Family> parse_families(const std::string& comma_list) {
    std::vector<Family> out;
    std::stringstream ss(comma_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
        if (!tok.empty()) out.push_back(family_from_name(tok));
    }
    if (out.empty()) throw ConfigError("empty family list");
    return out;
}

}  // namespace rsb
