#include <catch_amalgamated.hpp>

#include <random>

#include "rsb/ambiguity.hpp"
#include "rsb/errors.hpp"
#include "rsb/rng.hpp"
#include "rsb/stats.hpp"

using namespace rsb;

namespace {

std::vector<double> draw(const Distribution& d, std::size_t n, std::uint64_t seed) {
    CounterEngine eng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = d.sample(eng);
    return x;
}

const std::vector<Family> kFams{Family::lognormal, Family::gamma, Family::weibull, Family::exponential};

}  // namespace

TEST_CASE("family lists parse") {
    CHECK(parse_families("lognormal, gamma,weibull") == std::vector<Family>{Family::lognormal, Family::gamma, Family::weibull});
    CHECK_THROWS_AS(parse_families("lognormal,nope"), ConfigError);
    CHECK_THROWS_AS(parse_families(""), ConfigError);
}

TEST_CASE("ambiguity set keeps accepted fits with diagnostics") {
    const auto x = draw(Distribution::lognormal_with_mean(1.0, 0.5), 200, 1);
    const auto set = build_ambiguity_set(x, kFams, 0.05, {"synthetic", 1.0, 1});
    REQUIRE(set.diagnostics.size() == kFams.size());
    CHECK(!set.forced);
    CHECK(set.source.dataset == "synthetic");
    bool has_lognormal = false;
    for (const auto& m : set.members) {
        CHECK(ks_accepts_statistic(m.ks_stat, x.size(), 0.05));
        has_lognormal |= m.family() == Family::lognormal;
    }
    CHECK(has_lognormal);
    for (std::size_t i = 0; i < kFams.size(); ++i) CHECK(set.diagnostics[i].family == kFams[i]);
    const auto best = best_fit(x, kFams);
    CHECK(misspecification_indicator(best, Family::lognormal) == (best.family() != Family::lognormal));
}

TEST_CASE("ambiguity set errors and fallback") {
    const std::vector<double> tiny{1, 2, 3};
    CHECK_THROWS_AS(build_ambiguity_set(tiny, kFams), ConfigError);
    const auto x = draw(Distribution::exponential(1.0), 50, 2);
    CHECK_THROWS_AS(build_ambiguity_set(x, {Family::gamma, Family::gamma}), ConfigError);
    // Bimodal data: nothing fits, the least-bad fit is kept.
    std::vector<double> bi;
    for (int i = 0; i < 300; ++i) bi.push_back(i % 2 ? 1.0 + 0.001 * i : 100.0 + 0.001 * i);
    const auto set = build_ambiguity_set(bi, {Family::exponential, Family::lognormal}, 0.05);
    CHECK(set.forced);
    REQUIRE(set.members.size() == 1);
    // Negative data: no positive family can be fitted.
    std::vector<double> neg(20, -1.0);
    neg[0] = -2.0;
    CHECK_THROWS_AS(build_ambiguity_set(neg, {Family::lognormal, Family::gamma}), FitError);
}

TEST_CASE("best fit has the smallest KS statistic") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = draw(Distribution::weibull(1.5, 2.0), 80, seed);
        const auto set = build_ambiguity_set(x, kFams, 0.05);
        const auto best = best_fit(x, kFams);
        for (const auto& d : set.diagnostics)
            if (d.fitted) REQUIRE(best.ks_stat <= d.ks_stat);
    }
    std::vector<double> flat(30, 2.0);
    const auto fit = fit_mle(Family::lognormal, flat);
    CHECK(fit.degenerate);
    CHECK(fit.dist.params()[0] == std::log(2.0));
}

TEST_CASE("lognormal rejection rate rises with sample size for gamma data") {
    auto rate = [](std::size_t n) {
        int rejected = 0;
        for (int r = 0; r < 200; ++r) {
            const auto x = draw(Distribution::gamma(0.7, 1.0), n, 100 + r);
            const auto set = build_ambiguity_set(x, {Family::lognormal, Family::gamma}, 0.05);
            rejected += !set.diagnostics[0].accepted;
        }
        return rejected / 200.0;
    };
    const double small = rate(20), large = rate(400);
    INFO("n=20 " << small << " n=400 " << large);
    CHECK(large > small);
    CHECK(large > 0.5);
}
