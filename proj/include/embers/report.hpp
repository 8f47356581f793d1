// Week-significance statistics, ablation reports, and narrative generation.
#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "embers/domain.hpp"
#include "embers/scoring.hpp"

namespace embers {

struct WeekSignificance {
    int week_index = 0;  // 1..53
    double observed = 0;
    double history_mean = 0;
    double history_std = 0;
    double z_score = 0;
    double p_value = 0;  // two-sided normal tail
};

inline WeekSignificance week_significance_from_stats(double history_mean,
                                                     double history_std,
                                                     double observed,
                                                     int week_index) {
    if (history_std <= 0)
        throw ValidationError("week significance undefined: zero history std");
    WeekSignificance w;
    w.week_index = week_index;
    w.observed = observed;
    w.history_mean = history_mean;
    w.history_std = history_std;
    w.z_score = (observed - history_mean) / history_std;
    w.p_value = std::erfc(std::fabs(w.z_score) / std::sqrt(2.0));
    return w;
}

inline WeekSignificance week_significance(const std::vector<double>& weekly_history,
                                          double observed, int week_index) {
    if (weekly_history.size() < 2)
        throw ValidationError("week significance needs at least two history points");
    double mean = std::accumulate(weekly_history.begin(), weekly_history.end(), 0.0) /
                  weekly_history.size();
    double ss = 0;
    for (double v : weekly_history) ss += (v - mean) * (v - mean);
    double stddev = std::sqrt(ss / (weekly_history.size() - 1));
    return week_significance_from_stats(mean, stddev, observed, week_index);
}

struct AblationMetrics {
    std::optional<double> mean_quality;
    std::optional<double> mean_lead_time;
    std::optional<double> precision;
    std::optional<double> recall;

    static AblationMetrics from_report(const ScoreReport& r) {
        return {r.mean_quality, r.mean_lead_time, r.precision, r.recall};
    }
};

inline std::optional<double> ablation_delta_pct(std::optional<double> full,
                                                std::optional<double> ablated) {
    if (!full || !ablated || *full == 0) return std::nullopt;
    return (*ablated - *full) / *full * 100.0;
}

struct AblationReport {
    std::set<std::string> configuration;  // retained source tags
    AblationMetrics metrics;
    AblationMetrics deltas_vs_full;  // signed percentages

    json to_json() const {
        json j;
        j["configuration"] = configuration;
        auto metrics_json = [](const AblationMetrics& m) {
            json o;
            auto put = [&](const char* k, const std::optional<double>& v) {
                if (v) o[k] = *v; else o[k] = nullptr;
            };
            put("mean_quality", m.mean_quality);
            put("mean_lead_time", m.mean_lead_time);
            put("precision", m.precision);
            put("recall", m.recall);
            return o;
        };
        j["metrics"] = metrics_json(metrics);
        j["deltas_vs_full_pct"] = metrics_json(deltas_vs_full);
        return j;
    }
};

// Rescoring with filtered source tags; an alert survives a configuration if
// it carries at least one retained tag.
inline std::vector<AblationReport> run_ablation(
    const std::vector<Alert>& alerts, const std::vector<GsrEvent>& events,
    YearMonth month, const std::vector<std::set<std::string>>& source_sets) {
    std::set<std::string> known;
    for (const auto& a : alerts) known.insert(a.sources.begin(), a.sources.end());
    for (const auto& set : source_sets)
        for (const auto& tag : set)
            if (!known.count(tag)) {
                std::string msg = "unknown source tag '" + tag + "'; known tags:";
                for (const auto& k : known) msg += " " + k;
                throw VocabularyError(msg);
            }

    ScoreReport full = match_month(alerts, events, month);
    AblationMetrics full_metrics = AblationMetrics::from_report(full);

    std::vector<AblationReport> reports;
    for (const auto& retained : source_sets) {
        std::vector<Alert> filtered;
        for (const auto& a : alerts) {
            bool keep = false;
            for (const auto& tag : a.sources)
                if (retained.count(tag)) { keep = true; break; }
            if (keep) filtered.push_back(a);
        }
        ScoreReport r = match_month(filtered, events, month);
        AblationReport out;
        out.configuration = retained;
        out.metrics = AblationMetrics::from_report(r);
        out.deltas_vs_full.mean_quality =
            ablation_delta_pct(full_metrics.mean_quality, out.metrics.mean_quality);
        out.deltas_vs_full.mean_lead_time =
            ablation_delta_pct(full_metrics.mean_lead_time, out.metrics.mean_lead_time);
        out.deltas_vs_full.precision =
            ablation_delta_pct(full_metrics.precision, out.metrics.precision);
        out.deltas_vs_full.recall =
            ablation_delta_pct(full_metrics.recall, out.metrics.recall);
        reports.push_back(std::move(out));
    }
    return reports;
}

struct NarrativeContext {
    std::optional<std::array<int, 3>> recent_alert_counts;  // last 2, 7, 30 days
    std::optional<WeekSignificance> week_stats;
    std::vector<std::string> audit_articles;
    std::vector<std::string> players;
    std::vector<std::string> reasons;
    std::vector<std::string> characterizations;
};

namespace detail {

inline std::string prose_date(Date d) {
    static const char* kMonths[] = {"January", "February", "March",
                                    "April",   "May",      "June",
                                    "July",    "August",   "September",
                                    "October", "November", "December"};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%s %u, %d", kMonths[d.month() - 1], d.day(),
                  d.year());
    return buf;
}

inline std::string join_and(const std::vector<std::string>& items) {
    if (items.empty()) return "";
    if (items.size() == 1) return items[0];
    std::string out;
    for (size_t i = 0; i + 1 < items.size(); ++i) {
        out += items[i];
        out += items.size() > 2 ? ", " : " ";
    }
    out += "and " + items.back();
    return out;
}

inline std::string join_semi(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += "; ";
        out += items[i];
    }
    return out;
}

}  // namespace detail

// Deterministic prose summary of an alert. Sections appear in a fixed order;
// sections without context data are omitted, never fabricated.
inline std::string generate_narrative(const Alert& alert, const NarrativeContext& ctx) {
    std::string out;
    out += "EMBERS forecasts that there will be a ";
    out += alert.event_type.violent ? "violent" : "non-violent";
    out += " protest on " + detail::prose_date(alert.predicted_date);
    out += " in ";
    if (!alert.location.city.empty()) out += alert.location.city + ", ";
    out += alert.location.country + ".";
    out += " We predict that the protest will involve the " + alert.population.group +
           " population.";
    out += " The protest will be related to " + alert.event_type.event_class +
           " issues.\n";

    if (ctx.recent_alert_counts) {
        const auto& c = *ctx.recent_alert_counts;
        out += "There were " + std::to_string(c[0]) + ", " + std::to_string(c[1]) +
               ", and " + std::to_string(c[2]) +
               " other similar warnings in last 2, 7 and 30 days, respectively.\n";
    }
    if (ctx.week_stats) {
        const auto& w = *ctx.week_stats;
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "(pval=%.6g, zscore=%.3f, avg. count=%g, mean=%g +/- %g)",
                      w.p_value, w.z_score, w.observed, w.history_mean, w.history_std);
        out += "The forecast date of the warning falls in week " +
               std::to_string(w.week_index) + "; this week is found to be " +
               (w.p_value < 0.05 ? "statistically significant "
                                 : "not statistically significant ") +
               buf + ".\n";
    }
    if (!ctx.audit_articles.empty())
        out += "Audit trail of the warning includes " +
               detail::join_and(ctx.audit_articles) + ".\n";
    if (!ctx.players.empty())
        out += "Major players involved in the protest include " +
               detail::join_and(ctx.players) + ".\n";
    if (!ctx.reasons.empty())
        out += "Reasons: " + detail::join_semi(ctx.reasons) + ".\n";
    if (!ctx.characterizations.empty())
        out += "Protests are characterized by: " +
               detail::join_semi(ctx.characterizations) + ".\n";
    return out;
}

}  // namespace embers
