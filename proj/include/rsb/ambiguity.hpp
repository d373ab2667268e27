#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsb/distributions.hpp"

namespace rsb {

struct AmbiguitySource {
    std::string dataset;
    double fraction = 1.0;  // subsample fraction gamma; 1 when the full sample is used
    std::uint64_t seed = 0;
};

// Outcome of fitting one family. `error` is empty on success.
struct FamilyDiagnostic {
    Family family = Family::lognormal;
    bool fitted = false;
    bool accepted = false;
    double ks_stat = 1.0;
    std::string error;
};

struct AmbiguitySet {
    std::vector<FittedDistribution> members;
    // Every family was rejected; `members` holds only the smallest-KS fit.
    bool forced = false;
    std::vector<FamilyDiagnostic> diagnostics;  // one per requested family, in request order
    AmbiguitySource source;
};

inline constexpr std::size_t kMinAmbiguitySample = 10;

// MLE-fits every family and keeps the fits the KS test accepts at `level`.
// Throws FitError listing every family when no fit succeeds.
AmbiguitySet build_ambiguity_set(std::span<const double> sample, const std::vector<Family>& families,
                                 double level = 0.05, AmbiguitySource source = {});

// Smallest KS statistic; ties go to the earlier family in `families`.
FittedDistribution best_fit(std::span<const double> sample, const std::vector<Family>& families);

bool misspecification_indicator(const FittedDistribution& best, Family true_family);
bool misspecification_indicator(const AmbiguitySet& set, Family true_family);  // uses the set's best member

std::vector<Family> parse_families(const std::string& comma_list);

}  // namespace rsb
