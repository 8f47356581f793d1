// Lead-time legality, the four-component quality score, optimal monthly
// matching, and aggregate metrics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "embers/assignment.hpp"
#include "embers/date.hpp"
#include "embers/domain.hpp"

namespace embers {

// Date-match window, used both as the legality gate and the date-score
// denominator.
inline constexpr int kDateWindowDays = 7;

// Quality components are rationals with denominator 42 (7 * 3 * 2), so
// integer units give exact matching weights.
inline constexpr std::int64_t kQualityUnits = 42;

class ContractViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline bool is_legal_pair(const Alert& alert, const GsrEvent& event) {
    if (!(alert.issued_at < event.report_date)) return false;
    if (normalize_place_name(alert.location.country) !=
        normalize_place_name(event.location.country))
        return false;
    std::int64_t delta = alert.predicted_date - event.event_date;
    return std::llabs(delta) <= kDateWindowDays;
}

inline double date_score(Date predicted, Date actual) {
    double delta = static_cast<double>(std::llabs(predicted - actual));
    return 1.0 - delta / kDateWindowDays;
}

// 1/3 per matched level of the country > state > city hierarchy; city credit
// requires the state to match. Empty-vs-empty matches, empty-vs-nonempty does
// not.
inline double location_score(const Location& a, const Location& b) {
    double score = 1.0 / 3.0;
    if (normalize_place_name(a.state) != normalize_place_name(b.state))
        return score;
    score += 1.0 / 3.0;
    if (normalize_place_name(a.city) == normalize_place_name(b.city))
        score += 1.0 / 3.0;
    return score;
}

inline double event_type_score(const EventType& a, const EventType& b) {
    return 0.5 * (a.event_class == b.event_class) + 0.5 * (a.violent == b.violent);
}

inline double population_score(const Population& a, const Population& b) {
    return a.group == b.group ? 1.0 : 0.0;
}

namespace detail {

// Exact quality in 1/42 units; assumes legality.
inline std::int64_t quality_units(const Alert& a, const GsrEvent& e) {
    std::int64_t delta = std::llabs(a.predicted_date - e.event_date);
    std::int64_t units = (kDateWindowDays - delta) * 6;
    units += 14;
    bool state_match = normalize_place_name(a.location.state) ==
                       normalize_place_name(e.location.state);
    if (state_match) {
        units += 14;
        if (normalize_place_name(a.location.city) ==
            normalize_place_name(e.location.city))
            units += 14;
    }
    if (a.event_type.event_class == e.event_type.event_class) units += 21;
    if (a.event_type.violent == e.event_type.violent) units += 21;
    if (a.population.group == e.population.group) units += 42;
    return units;
}

}  // namespace detail

inline double quality_score(const Alert& alert, const GsrEvent& event) {
    if (!is_legal_pair(alert, event))
        throw ContractViolation("quality_score on an illegal pair");
    return date_score(alert.predicted_date, event.event_date) +
           location_score(alert.location, event.location) +
           event_type_score(alert.event_type, event.event_type) +
           population_score(alert.population, event.population);
}

inline double lead_time(const Alert& alert, const GsrEvent& event) {
    if (!is_legal_pair(alert, event))
        throw ContractViolation("lead_time on an illegal pair");
    return static_cast<double>(event.report_date - alert.issued_at);
}

struct MatchPair {
    std::string alert_id;
    std::string event_id;
    double date_score = 0;
    double location_score = 0;
    double event_type_score = 0;
    double population_score = 0;
    double quality = 0;
    double lead_time_days = 0;
};

struct ScoreReport {
    YearMonth month;
    std::string label = "standard";
    std::vector<MatchPair> pairs;
    std::vector<std::string> unmatched_alert_ids;
    std::vector<std::string> unmatched_event_ids;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> mean_quality;
    std::optional<double> mean_lead_time;
    std::optional<double> mean_probability_score;
    int perfect_count = 0;

    json to_json() const {
        json j;
        j["month"] = month.to_string();
        j["label"] = label;
        json jp = json::array();
        for (const auto& p : pairs) {
            json e;
            e["alert_id"] = p.alert_id;
            e["event_id"] = p.event_id;
            e["date_score"] = p.date_score;
            e["location_score"] = p.location_score;
            e["event_type_score"] = p.event_type_score;
            e["population_score"] = p.population_score;
            e["quality"] = p.quality;
            e["lead_time_days"] = p.lead_time_days;
            jp.push_back(std::move(e));
        }
        j["pairs"] = std::move(jp);
        j["unmatched_alert_ids"] = unmatched_alert_ids;
        j["unmatched_event_ids"] = unmatched_event_ids;
        auto put = [&](const char* k, const std::optional<double>& v) {
            if (v) j[k] = *v; else j[k] = nullptr;
        };
        put("precision", precision);
        put("recall", recall);
        put("mean_quality", mean_quality);
        put("mean_lead_time", mean_lead_time);
        put("mean_probability_score", mean_probability_score);
        j["perfect_count"] = perfect_count;
        return j;
    }
};

// Mean over alerts of 1 - (p - o)^2, o = 1 iff matched.
inline std::optional<double> probability_metric(const std::vector<Alert>& alerts,
                                                const std::set<std::string>& matched_ids) {
    if (alerts.empty()) return std::nullopt;
    double sum = 0;
    for (const auto& a : alerts) {
        double o = matched_ids.count(a.id) ? 1.0 : 0.0;
        double d = a.probability - o;
        sum += 1.0 - d * d;
    }
    return sum / static_cast<double>(alerts.size());
}

// Max-total-quality assignment of alerts to events over legal pairs.
// Ties broken toward larger cardinality, then the lexicographically smallest
// sequence of (alert_id, event_id) pairs.
inline ScoreReport match_month(const std::vector<Alert>& alerts,
                               const std::vector<GsrEvent>& events,
                               YearMonth month) {
    const int na = static_cast<int>(alerts.size());
    const int ne = static_cast<int>(events.size());

    // Weight = quality_units * (n + 1) + 1 so that any quality difference
    // dominates the per-pair cardinality bonus.
    const std::int64_t card = std::min(na, ne);
    const std::int64_t scale = card + 1;
    std::vector<std::vector<std::int64_t>> weights(na, std::vector<std::int64_t>(ne, 0));
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < ne; ++j)
            if (is_legal_pair(alerts[i], events[j]))
                weights[i][j] = detail::quality_units(alerts[i], events[j]) * scale + 1;

    const std::int64_t best = AssignmentSolver::best_total(weights);

    // Canonical matching: walk alerts by id; for each, take the smallest
    // event id whose forced inclusion still attains the optimum.
    std::vector<int> alert_order(na), event_order(ne);
    std::iota(alert_order.begin(), alert_order.end(), 0);
    std::iota(event_order.begin(), event_order.end(), 0);
    std::sort(alert_order.begin(), alert_order.end(),
              [&](int a, int b) { return alerts[a].id < alerts[b].id; });
    std::sort(event_order.begin(), event_order.end(),
              [&](int a, int b) { return events[a].id < events[b].id; });

    std::vector<char> event_taken(ne, 0);
    std::vector<char> alert_done(na, 0);
    std::vector<std::pair<int, int>> chosen;
    std::int64_t base = 0;

    auto residual_best = [&](int skip_alert, int skip_event) {
        std::vector<std::vector<std::int64_t>> sub;
        for (int i = 0; i < na; ++i) {
            if (alert_done[i] || i == skip_alert) continue;
            std::vector<std::int64_t> row;
            for (int j = 0; j < ne; ++j) {
                if (event_taken[j] || j == skip_event) continue;
                row.push_back(weights[i][j]);
            }
            sub.push_back(std::move(row));
        }
        return AssignmentSolver::best_total(sub);
    };

    for (int ai : alert_order) {
        bool fixed = false;
        for (int ej : event_order) {
            if (event_taken[ej] || weights[ai][ej] == 0) continue;
            std::int64_t with = base + weights[ai][ej] + residual_best(ai, ej);
            if (with == best) {
                base += weights[ai][ej];
                event_taken[ej] = 1;
                chosen.emplace_back(ai, ej);
                fixed = true;
                break;
            }
        }
        alert_done[ai] = 1;
        (void)fixed;
    }

    ScoreReport report;
    report.month = month;
    std::set<std::string> matched_alerts, matched_events;
    for (auto [ai, ej] : chosen) {
        const Alert& a = alerts[ai];
        const GsrEvent& e = events[ej];
        MatchPair p;
        p.alert_id = a.id;
        p.event_id = e.id;
        p.date_score = date_score(a.predicted_date, e.event_date);
        p.location_score = location_score(a.location, e.location);
        p.event_type_score = event_type_score(a.event_type, e.event_type);
        p.population_score = population_score(a.population, e.population);
        p.quality = p.date_score + p.location_score + p.event_type_score + p.population_score;
        p.lead_time_days = lead_time(a, e);
        if (detail::quality_units(a, e) == 4 * kQualityUnits) ++report.perfect_count;
        report.pairs.push_back(std::move(p));
        matched_alerts.insert(a.id);
        matched_events.insert(e.id);
    }
    std::sort(report.pairs.begin(), report.pairs.end(),
              [](const MatchPair& x, const MatchPair& y) {
                  return std::tie(x.alert_id, x.event_id) < std::tie(y.alert_id, y.event_id);
              });
    for (const auto& a : alerts)
        if (!matched_alerts.count(a.id)) report.unmatched_alert_ids.push_back(a.id);
    for (const auto& e : events)
        if (!matched_events.count(e.id)) report.unmatched_event_ids.push_back(e.id);
    std::sort(report.unmatched_alert_ids.begin(), report.unmatched_alert_ids.end());
    std::sort(report.unmatched_event_ids.begin(), report.unmatched_event_ids.end());

    const double npairs = static_cast<double>(report.pairs.size());
    if (na > 0) report.precision = npairs / static_cast<double>(na);
    if (ne > 0) report.recall = npairs / static_cast<double>(ne);
    if (!report.pairs.empty()) {
        double q = 0, lt = 0;
        for (const auto& p : report.pairs) {
            q += p.quality;
            lt += p.lead_time_days;
        }
        report.mean_quality = q / npairs;
        report.mean_lead_time = lt / npairs;
    }
    report.mean_probability_score = probability_metric(alerts, matched_alerts);
    return report;
}

struct CurvePoint {
    double threshold = 0;
    std::optional<double> recall;
    std::optional<double> mean_quality;
};

// Suppress alerts with expected_quality below each threshold and rescore.
// Every alert must carry an expected_quality annotation.
inline std::vector<CurvePoint> recall_quality_curve(const std::vector<Alert>& alerts,
                                                    const std::vector<GsrEvent>& events,
                                                    std::vector<double> thresholds,
                                                    YearMonth month) {
    for (const auto& a : alerts)
        if (!a.expected_quality)
            throw ValidationError("alert '" + a.id + "' lacks an expected_quality annotation");
    std::sort(thresholds.begin(), thresholds.end());
    std::vector<CurvePoint> curve;
    for (double theta : thresholds) {
        std::vector<Alert> retained;
        for (const auto& a : alerts)
            if (*a.expected_quality >= theta) retained.push_back(a);
        ScoreReport r = match_month(retained, events, month);
        curve.push_back({theta, r.recall, r.mean_quality});
    }
    return curve;
}

}  // namespace embers
