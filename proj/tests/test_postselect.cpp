#include "eprb/errors.hpp"
#include "eprb/postselect.hpp"
#include "golden.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>

using namespace eprb;

namespace {

TrialRecord trial(double t1, double t2, int x1 = 1, int x2 = -1)
{
    TrialRecord t;
    t.t1 = t1;
    t.t2 = t2;
    t.x1 = x1;
    t.x2 = x2;
    return t;
}

const SettingsQuadruple chsh_settings{0.0, pi / 4, pi / 8, 3 * pi / 8};

} // namespace

TEST_SUITE("postselect")
{
    TEST_CASE("coincidence_filter uses a strict window")
    {
        const std::vector<TrialRecord> one{trial(100, 150)};
        CHECK(coincidence_filter(one, {60}).retained.size() == 1);
        CHECK(coincidence_filter(one, {40}).retained.size() == 0);
        CHECK(coincidence_filter(one, {50}).retained.size() == 0);
        const auto r = coincidence_filter(one, {40});
        CHECK(r.total == 1);
        CHECK(r.retention() == 0.0);
    }

    TEST_CASE("coincidence_filter edge windows")
    {
        const auto trials = run_protocol1(5000, chsh_settings, ScheduleKind::random, {}, 1);
        // delays lie in [0, T); a window of T keeps everything with |t1 - t2| < T
        CHECK(coincidence_filter(trials, {1000.0}).retained.size() == trials.size());
        CHECK(coincidence_filter(trials, {2000.0}).retained == trials);
        CHECK(coincidence_filter(trials, {0.0}).retained.empty());
        const std::vector<TrialRecord> tie{trial(3, 3)};
        CHECK(coincidence_filter(tie, {0.0}).retained.empty());
        CHECK(coincidence_filter(tie, {1e-12}).retained.size() == 1);
    }

    TEST_CASE("coincidence_filter is monotone, idempotent and order-preserving")
    {
        const auto trials = run_protocol1(5000, chsh_settings, ScheduleKind::random, {}, 2);
        std::vector<TrialRecord> previous;
        for (double w : {0.0, 1.0, 10.0, 50.0, 200.0, 1000.0}) {
            const auto kept = coincidence_filter(trials, {w}).retained;
            CHECK(coincidence_filter(kept, {w}).retained == kept);
            CHECK(std::is_sorted(kept.begin(), kept.end(),
                [](const auto& a, const auto& b) { return a.trial_index < b.trial_index; }));
            CHECK(std::includes(kept.begin(), kept.end(), previous.begin(), previous.end(),
                [](const auto& a, const auto& b) { return a.trial_index < b.trial_index; }));
            previous = kept;
        }
    }

    TEST_CASE("toy criteria")
    {
        const std::vector<std::pair<int, int>> sample{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}, {1, 1}, {-1, 1}};

        auto r = toy_postselect(sample, ToyCriterion::sum_plus_two);
        CHECK(r.retained.size() == 2);
        CHECK(r.estimate.e_value() == 1.0);
        CHECK(r.estimate.n_pp == 2);

        r = toy_postselect(sample, ToyCriterion::sum_minus_two);
        CHECK(r.retained.size() == 1);
        CHECK(r.estimate.e_value() == 1.0);
        CHECK(r.estimate.n_mm == 1);

        r = toy_postselect(sample, ToyCriterion::sum_zero);
        CHECK(r.retained.size() == 3);
        CHECK(r.estimate.e_value() == -1.0);
        CHECK(r.estimate.n_pm == 1);
        CHECK(r.estimate.n_mp == 2);

        const std::vector<std::pair<int, int>> only_mixed{{1, -1}};
        CHECK_THROWS_AS(toy_postselect(only_mixed, ToyCriterion::sum_plus_two), NoDataError);
        CHECK_THROWS_AS(toy_postselect({}, ToyCriterion::sum_zero), NoDataError);
        const std::vector<std::pair<int, int>> invalid{{2, 0}};
        CHECK_THROWS_AS(toy_postselect(invalid, ToyCriterion::sum_zero), DomainError);
    }

    TEST_CASE("window sweep with the maximal window equals the unfiltered statistic")
    {
        const auto trials = run_protocol1(20000, chsh_settings, ScheduleKind::block, {}, 3);
        std::array<std::vector<TrialRecord>, 4> by_pair;
        for (const auto& t : trials)
            by_pair[static_cast<std::size_t>(t.pair_index)].push_back(t);
        const std::array<std::span<const TrialRecord>, 4> spans{by_pair[0], by_pair[1], by_pair[2], by_pair[3]};

        const std::vector<CoincidenceWindow> full{{1000.0}};
        const auto rows = window_sweep(spans, full);
        REQUIRE(rows.size() == 1);
        REQUIRE(rows[0].report);
        const auto unfiltered = make_chsh_report(estimates_by_pair(trials));
        CHECK(rows[0].report->value.s_value == unfiltered.value.s_value);
        CHECK(rows[0].report->value.s_max == unfiltered.value.s_max);
        CHECK(rows[0].retention_min() == 1.0);

        const std::vector<CoincidenceWindow> dup{{0.0}, {20.0}, {20.0}};
        const auto d = window_sweep(spans, dup);
        CHECK(d[0].insufficient_data());
        REQUIRE(d[1].report);
        CHECK(d[1].report->e == d[2].report->e);
        CHECK(d[1].retained == d[2].retained);

        const std::vector<CoincidenceWindow> descending{{20.0}, {10.0}};
        CHECK_THROWS_AS(window_sweep(spans, descending), ConfigError);
    }

    TEST_CASE("acceptance_probability closed-form cases")
    {
        CHECK(acceptance_probability(0, 0, 0.01, 0) == 1.0);
        CHECK(acceptance_probability(0, 0, 0.0, 0) == 0.0);
        CHECK(acceptance_probability(0.3, 0.7, 0.7, 0) == 1.0);
        CHECK(acceptance_probability(0.9, 0.2, 0.95, 0.5) == 1.0);
        CHECK(acceptance_probability(1, 1, 0.1, 0) == doctest::Approx(golden::acceptance_unit_band).epsilon(1e-12));
        // u = 0: Pr(r2 v < w) = w / v
        CHECK(acceptance_probability(0, 0.5, 0.1, 0) == doctest::Approx(0.2));
        CHECK_THROWS_AS(acceptance_probability(1.5, 0, 0.1, 0), DomainError);
        CHECK_THROWS_AS(acceptance_probability(0.5, 0.5, 0.1, 1.0), DomainError);
    }

    TEST_CASE("acceptance_probability agrees with the brute-force grid")
    {
        Substream rng(17, StreamTag::pair, 0);
        for (int i = 0; i < 30; ++i) {
            const double u = rng.uniform(), v = rng.uniform();
            const double w = rng.uniform(0.0, 0.6);
            const double r_min = i % 3 == 0 ? rng.uniform(0.0, 0.95) : 0.0;
            const double exact = acceptance_probability(u, v, w, r_min);
            REQUIRE(exact >= 0.0);
            REQUIRE(exact <= 1.0);
            CHECK(exact == doctest::Approx(acceptance_probability(v, u, w, r_min)).epsilon(1e-12).scale(1.0));
            CHECK(std::fabs(exact - oracle::acceptance_grid(u, v, w, r_min, 800)) < 4e-3);
            CHECK(std::fabs(exact - oracle::acceptance_conditional(u, v, w, r_min, 20000)) < 1e-4);
        }
    }

    TEST_CASE("acceptance_probability agrees with Monte Carlo draws")
    {
        Substream pick(23, StreamTag::pair, 0);
        for (int i = 0; i < 25; ++i) {
            const double u = pick.uniform(), v = pick.uniform();
            const double w = pick.uniform(0.0, 0.5);
            const double r_min = i % 2 ? 0.5 : 0.0;
            const double p = acceptance_probability(u, v, w, r_min);
            Substream draws(23, StreamTag::pair, static_cast<std::uint64_t>(i + 1));
            constexpr int n = 1000000;
            int hits = 0;
            for (int k = 0; k < n; ++k) {
                const double r1 = draws.uniform(r_min, 1.0);
                const double r2 = draws.uniform(r_min, 1.0);
                hits += std::fabs(r1 * u - r2 * v) < w;
            }
            const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / n);
            CHECK(std::fabs(double(hits) / n - p) <= 3 * se + 1e-9);
        }
    }

    TEST_CASE("acceptance_probability is non-decreasing in the window")
    {
        Substream rng(29, StreamTag::pair, 0);
        for (int i = 0; i < 200; ++i) {
            const double u = rng.uniform(), v = rng.uniform(), r_min = rng.uniform(0.0, 0.9);
            double last = 0.0;
            for (int j = 0; j <= 50; ++j) {
                const double p = acceptance_probability(u, v, j / 50.0, r_min);
                REQUIRE(p >= last - 1e-12);
                last = p;
            }
            REQUIRE(last == doctest::Approx(1.0));
        }
    }
}
