#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace embers;
using testutil::make_alert;
using testutil::make_event;

TEST_CASE("week significance") {
    SECTION("fixture anchor") {
        WeekSignificance w = week_significance_from_stats(21.569, 12.597, 57.25, 7);
        CHECK_THAT(w.z_score, Catch::Matchers::WithinAbs(2.832, 0.001));
        CHECK_THAT(w.p_value, Catch::Matchers::WithinAbs(0.00462, 0.0001));
    }
    SECTION("observed at the mean") {
        WeekSignificance w = week_significance_from_stats(10.0, 2.0, 10.0, 3);
        CHECK(w.z_score == 0.0);
        CHECK(w.p_value == 1.0);
    }
    SECTION("five sigma") {
        WeekSignificance w = week_significance_from_stats(0.0, 1.0, 5.0, 1);
        CHECK(w.z_score == 5.0);
        CHECK_THAT(w.p_value, Catch::Matchers::WithinRel(5.733e-7, 1e-3));
    }
    SECTION("zero std is an error") {
        CHECK_THROWS_AS(week_significance_from_stats(1.0, 0.0, 2.0, 1), ValidationError);
    }
    SECTION("history-based form computes mean and sample std") {
        WeekSignificance w = week_significance({1, 2, 3, 4, 5}, 3.0, 2);
        CHECK_THAT(w.history_mean, Catch::Matchers::WithinAbs(3.0, 1e-12));
        CHECK_THAT(w.history_std, Catch::Matchers::WithinAbs(std::sqrt(2.5), 1e-12));
        CHECK(w.z_score == 0.0);
    }
}

TEST_CASE("ablation delta arithmetic") {
    CHECK_THAT(*ablation_delta_pct(2.0, 1.6704),
               Catch::Matchers::WithinAbs(-16.48, 1e-9));
    CHECK_FALSE(ablation_delta_pct(std::nullopt, 1.0).has_value());
    CHECK_FALSE(ablation_delta_pct(0.0, 1.0).has_value());
}

TEST_CASE("ablation runs") {
    YearMonth month(2014, 6);
    // Matchable alerts are news-tagged; a twitter-tagged alert exists but is
    // too far from any event.
    auto a1 = make_alert("a1", "2014-06-01", "2014-06-10", "Brazil");
    a1.sources = {"news"};
    auto a2 = make_alert("a2", "2014-06-01", "2014-06-20", "Brazil");
    a2.sources = {"news", "blogs"};
    auto a3 = make_alert("a3", "2014-06-01", "2014-06-28", "Brazil");
    a3.sources = {"twitter"};
    std::vector<Alert> alerts = {a1, a2, a3};
    std::vector<GsrEvent> events = {make_event("e1", "2014-06-10", "Brazil"),
                                    make_event("e2", "2014-06-20", "Brazil")};

    SECTION("full configuration has all-zero deltas") {
        auto reports = run_ablation(alerts, events, month,
                                    {{"news", "blogs", "twitter"}});
        REQUIRE(reports.size() == 1);
        CHECK(*reports[0].deltas_vs_full.mean_quality == 0.0);
        CHECK(*reports[0].deltas_vs_full.mean_lead_time == 0.0);
        CHECK(*reports[0].deltas_vs_full.precision == 0.0);
        CHECK(*reports[0].deltas_vs_full.recall == 0.0);
    }
    SECTION("social-media-only run loses all matches") {
        auto reports = run_ablation(alerts, events, month, {{"twitter"}});
        REQUIRE(reports.size() == 1);
        CHECK(*reports[0].metrics.recall == 0.0);
        CHECK_THAT(*reports[0].deltas_vs_full.recall,
                   Catch::Matchers::WithinAbs(-100.0, 1e-9));
    }
    SECTION("unknown tag lists the known tags") {
        CHECK_THROWS_WITH(run_ablation(alerts, events, month, {{"radio"}}),
                          Catch::Matchers::ContainsSubstring("news"));
    }
}

TEST_CASE("narrative generation") {
    Alert alert = make_alert("a", "2014-02-10", "2014-02-18", "Venezuela",
                             "Distrito Capital", "Caracas", "business", "economic",
                             true);
    SECTION("forecast sentence matches the template") {
        std::string text = generate_narrative(alert, {});
        CHECK_THAT(text, Catch::Matchers::ContainsSubstring(
                             "EMBERS forecasts that there will be a violent protest "
                             "on February 18, 2014 in Caracas"));
        CHECK_THAT(text, Catch::Matchers::ContainsSubstring("business"));
        CHECK_THAT(text, Catch::Matchers::ContainsSubstring("economic"));
    }
    SECTION("similar-warnings sentence") {
        NarrativeContext ctx;
        ctx.recent_alert_counts = {{5, 5, 5}};
        CHECK_THAT(generate_narrative(alert, ctx),
                   Catch::Matchers::ContainsSubstring(
                       "There were 5, 5, and 5 other similar warnings in last 2, 7 "
                       "and 30 days"));
    }
    SECTION("empty context emits only the forecast block") {
        std::string text = generate_narrative(alert, {});
        CHECK(std::count(text.begin(), text.end(), '\n') == 1);
        CHECK_THAT(text, !Catch::Matchers::ContainsSubstring("Audit trail"));
        CHECK_THAT(text, !Catch::Matchers::ContainsSubstring("Major players"));
        CHECK_THAT(text, !Catch::Matchers::ContainsSubstring("Reasons"));
    }
    SECTION("sections appear in the fixed order") {
        NarrativeContext ctx;
        ctx.recent_alert_counts = {{1, 2, 3}};
        ctx.week_stats = week_significance_from_stats(21.569, 12.597, 57.25, 7);
        ctx.audit_articles = {"an article printed 2014-02-17"};
        ctx.players = {"students", "opposition leader"};
        ctx.reasons = {"protest against rising inflation"};
        ctx.characterizations = {"days of street protests"};
        std::string text = generate_narrative(alert, ctx);
        size_t p0 = text.find("EMBERS forecasts");
        size_t p1 = text.find("other similar warnings");
        size_t p2 = text.find("falls in week 7");
        size_t p3 = text.find("Audit trail");
        size_t p4 = text.find("Major players");
        size_t p5 = text.find("Reasons:");
        size_t p6 = text.find("Protests are characterized by:");
        REQUIRE(p6 != std::string::npos);
        CHECK(p0 < p1);
        CHECK(p1 < p2);
        CHECK(p2 < p3);
        CHECK(p3 < p4);
        CHECK(p4 < p5);
        CHECK(p5 < p6);
        CHECK_THAT(text, Catch::Matchers::ContainsSubstring("statistically significant"));
        CHECK_THAT(text, Catch::Matchers::ContainsSubstring("zscore=2.832"));
    }
    SECTION("output is a pure function of its inputs") {
        NarrativeContext ctx;
        ctx.players = {"students"};
        CHECK(generate_narrative(alert, ctx) == generate_narrative(alert, ctx));
    }
}
