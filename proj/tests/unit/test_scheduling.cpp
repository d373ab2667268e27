#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "rsb/errors.hpp"
#include "rsb/scheduling.hpp"

using namespace rsb;
using Catch::Matchers::WithinRel;

TEST_CASE("waiting chain and cost examples") {
    const Permutation psi{1, 0};
    const std::vector<double> d{1.0, 3.0}, t{2.0, 2.0};
    const auto w = waiting_chain(psi, d, t);
    REQUIRE(w.size() == 3);
    CHECK(w[0] == 0.0);
    CHECK(w[1] == 1.0);  // op 1 overruns by 1
    CHECK(w[2] == 0.0);  // op 0 absorbs it
    CHECK(schedule_cost(psi, d, t, 1.0, 0.5) == 1.0);
    CHECK(schedule_cost(Permutation{0, 1}, d, t, 1.0, 0.5) == 0.5);
    CHECK_THROWS_AS(schedule_cost(psi, std::vector<double>{1.0}, t, 1.0, 0.5), DomainError);
}

TEST_CASE("waits grow with durations and shrink with allowances, 1000 cases", "[property]") {
    std::mt19937_64 eng(31);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int c = 0; c < 1000; ++c) {
        const int n = 2 + static_cast<int>(eng() % 5);
        Permutation psi(n);
        std::iota(psi.begin(), psi.end(), 0);
        std::shuffle(psi.begin(), psi.end(), eng);
        std::vector<double> d(n), t(n);
        for (int i = 0; i < n; ++i) {
            d[i] = u(eng);
            t[i] = u(eng);
        }
        auto d2 = d, t2 = t;
        d2[eng() % n] += u(eng);
        t2[eng() % n] += u(eng);
        const auto w = waiting_chain(psi, d, t), wd = waiting_chain(psi, d2, t), wt = waiting_chain(psi, d, t2);
        double excess = 0.0;
        for (int i = 0; i < n; ++i) excess += d[i] - t[i];
        for (int i = 0; i <= n; ++i) {
            REQUIRE(w[i] >= 0.0);
            REQUIRE(wd[i] >= w[i]);
            REQUIRE(wt[i] <= w[i]);
        }
        const double cost = schedule_cost(psi, d, t, 1.0, 0.5);
        REQUIRE(cost >= 0.5 * std::max(0.0, excess) - 1e-12);
        REQUIRE(schedule_cost(psi, d2, t, 1.0, 0.5) >= cost);
    }
}

TEST_CASE("ov sequence sorts by variance and is stable") {
    CHECK(ov_sequence(std::vector<double>{3.0, 1.0, 2.0}) == Permutation{1, 2, 0});
    CHECK(ov_sequence(std::vector<double>{1.0, 1.0, 0.5}) == Permutation{2, 0, 1});
    std::mt19937_64 eng(32);
    std::uniform_int_distribution<int> u(0, 4);
    for (int c = 0; c < 1000; ++c) {
        std::vector<double> v(1 + eng() % 6);
        for (auto& x : v) x = u(eng);
        const auto p = ov_sequence(v);
        std::vector<double> sorted(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sorted[i] = v[p[i]];
        REQUIRE(std::is_sorted(sorted.begin(), sorted.end()));
        REQUIRE(ov_sequence(sorted) == [&] {
            Permutation id(v.size());
            std::iota(id.begin(), id.end(), 0);
            return id;
        }());
    }
}

TEST_CASE("proportional slack allocates exactly T, 1000 cases", "[property]") {
    std::mt19937_64 eng(33);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int c = 0; c < 1000; ++c) {
        const int n = 1 + static_cast<int>(eng() % 5);
        std::vector<double> mu(n), sd(n);
        for (int i = 0; i < n; ++i) {
            mu[i] = u(eng);
            sd[i] = c % 10 == 0 ? 0.0 : u(eng);
        }
        const double sum_mu = std::accumulate(mu.begin(), mu.end(), 0.0);
        const double T = sum_mu * (0.5 + u(eng) / 2);
        Permutation psi(n);
        std::iota(psi.begin(), psi.end(), 0);
        const auto t = proportional_slack(mu, sd, psi, T);
        REQUIRE_NOTHROW(check_allowances(t, T * (1 + 1e-12)));
        REQUIRE_THAT(std::accumulate(t.begin(), t.end(), 0.0), WithinRel(T, 1e-12));
        if (T >= sum_mu)
            for (int i = 0; i < n; ++i) REQUIRE(t[i] >= mu[i] - 1e-12);
    }
    CHECK_THROWS_AS(check_allowances(std::vector<double>{1.0, -0.1}, 5.0), ConfigError);
    CHECK_THROWS_AS(check_allowances(std::vector<double>{3.0, 3.0}, 5.0), ConfigError);
}

TEST_CASE("eta rule clips and rescales") {
    auto rule = eta_allowance_rule([](auto, auto, const Permutation&, double) { return std::vector<double>{-10.0, 1.0}; });
    const std::vector<double> mu{1.0, 1.0}, sd{1.0, 1.0};
    const auto t = rule(mu, sd, Permutation{0, 1}, 10.0);
    CHECK(t[0] == 0.0);
    CHECK(t[1] == 2.0);
    auto big = eta_allowance_rule([](auto, auto, const Permutation&, double) { return std::vector<double>{4.0, 4.0}; });
    const auto t2 = big(mu, sd, Permutation{0, 1}, 5.0);
    CHECK_THAT(t2[0] + t2[1], WithinRel(5.0, 1e-12));
}

TEST_CASE("permutations and product scenarios") {
    const auto p3 = all_permutations(3);
    REQUIRE(p3.size() == 6);
    CHECK(p3.front() == Permutation{0, 1, 2});
    CHECK(p3.back() == Permutation{2, 1, 0});
    CHECK(std::is_sorted(p3.begin(), p3.end()));
    CHECK(all_permutations(5).size() == 120);
    CHECK_THROWS_AS(all_permutations(6), ConfigError);

    const auto sc = product_scenarios({2, 3});
    REQUIRE(sc.size() == 6);
    CHECK(sc[1] == std::vector<int>{0, 1});
    CHECK(sc[3] == std::vector<int>{1, 0});

    ScenarioCaps caps;
    caps.soft = 10;
    const auto sub = product_scenarios({4, 4, 4}, caps);
    CHECK(sub.size() == 10);
    CHECK(std::is_sorted(sub.begin(), sub.end()));
    CHECK(std::adjacent_find(sub.begin(), sub.end()) == sub.end());
    CHECK(product_scenarios({4, 4, 4}, caps) == sub);
    caps.hard = 50;
    CHECK_THROWS_AS(product_scenarios({4, 4, 4}, caps), ConfigError);
}

TEST_CASE("sequencing sampler evaluates the schedule cost") {
    ScheduleInstance inst;
    inst.n_ops = 2;
    inst.candidates = {{Distribution::deterministic(1.0)}, {Distribution::deterministic(3.0), Distribution::deterministic(1.0)}};
    inst.session_length = 4.0;
    inst.mean_estimates = {1.0, 2.0};
    inst.sd_estimates = {0.0, 0.0};
    const auto prob = build_sequencing_problem(inst);
    REQUIRE(prob.alternatives.size() == 2);
    REQUIRE(prob.scenarios.size() == 2);
    auto smp = sequencing_sampler(inst, prob, 5);
    std::vector<SystemId> ids{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    std::vector<double> out(4), again(4);
    smp->draw(0, ids, out);
    for (int q = 0; q < 4; ++q) {
        const auto& a = prob.allowances[ids[q].alt];
        std::vector<double> d{1.0, ids[q].scen == 0 ? 3.0 : 1.0};
        CHECK_THAT(out[q], WithinRel(schedule_cost(prob.alternatives[ids[q].alt], d, a, 1.0, 0.5), 1e-12));
    }
    smp->draw(0, ids, again);
    CHECK(out == again);
}

TEST_CASE("duration csv tolerates ragged columns") {
    const auto path = std::filesystem::temp_directory_path() / "rsb_durations_test.csv";
    {
        std::ofstream os(path);
        os << "a, b\n1.5,2\n2.5,\n,\n";
    }
    const auto d = read_duration_csv(path.string());
    CHECK(d.ids == std::vector<std::string>{"a", "b"});
    CHECK(d.columns[0] == std::vector<double>{1.5, 2.5});
    CHECK(d.columns[1] == std::vector<double>{2.0});
    {
        std::ofstream os(path);
        os << "a\nxyz\n";
    }
    CHECK_THROWS_AS(read_duration_csv(path.string()), DataError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_duration_csv(path.string()), ConfigError);
}
