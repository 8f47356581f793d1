// History-based forecaster: trailing three months of GSR become next-month
// alerts at the observed per-cell rate.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "embers/date.hpp"
#include "embers/domain.hpp"

namespace embers {

struct RateCell {
    std::string country;
    std::string city;
    Population population;
    EventType event_type;
    int trailing_count = 0;
    double monthly_rate = 0;  // trailing_count / 3
};

// Counts the trailing three calendar months of history per
// (country, city, population, event_type) cell. Events outside the window are
// rejected.
inline std::vector<RateCell> build_rate_table(const std::vector<GsrEvent>& history,
                                              YearMonth target_month) {
    const YearMonth m1 = target_month.prev();
    const YearMonth m2 = m1.prev();
    const YearMonth m3 = m2.prev();
    using Key = std::tuple<std::string, std::string, std::string, std::string, bool>;
    std::map<Key, int> counts;
    for (const auto& e : history) {
        YearMonth em = YearMonth::of(e.event_date);
        if (em != m1 && em != m2 && em != m3)
            throw ValidationError("event '" + e.id + "' falls outside the trailing 3-month window");
        Key key{e.location.country, e.location.city, e.population.group,
                e.event_type.event_class, e.event_type.violent};
        ++counts[key];
    }
    std::vector<RateCell> table;
    table.reserve(counts.size());
    for (const auto& [key, n] : counts) {
        RateCell cell;
        cell.country = std::get<0>(key);
        cell.city = std::get<1>(key);
        cell.population.group = std::get<2>(key);
        cell.event_type.event_class = std::get<3>(key);
        cell.event_type.violent = std::get<4>(key);
        cell.trailing_count = n;
        cell.monthly_rate = n / 3.0;
        table.push_back(std::move(cell));
    }
    return table;
}

inline int round_half_up(double x) {
    return static_cast<int>(std::floor(x + 0.5));
}

// Emits round-half-up(rate) alerts per cell, predicted dates spaced evenly
// across the target month. Deterministic: same table and month give
// byte-identical corpora.
inline std::vector<Alert> generate_baserate_alerts(const std::vector<RateCell>& table,
                                                   YearMonth target_month) {
    std::vector<Alert> alerts;
    const Date issue_date = target_month.prev().last_day();
    const int month_days = target_month.days_in_month();
    int seq = 0;
    for (const auto& cell : table) {
        const int n = round_half_up(cell.monthly_rate);
        for (int k = 1; k <= n; ++k) {
            int day = static_cast<int>(k * static_cast<std::int64_t>(month_days) / (n + 1));
            day = std::max(day, 1);
            Alert a;
            a.id = "baserate-" + target_month.to_string() + "-" + std::to_string(++seq);
            a.issued_at = issue_date;
            a.predicted_date = Date(target_month.year, target_month.month,
                                    static_cast<unsigned>(day));
            a.location.country = cell.country;
            a.location.city = cell.city;
            a.population = cell.population;
            a.event_type = cell.event_type;
            a.probability = std::min(0.95, cell.monthly_rate / (cell.monthly_rate + 1.0));
            a.model = "baserate";
            a.sources = {"gsr-history"};
            alerts.push_back(std::move(a));
        }
    }
    return alerts;
}

}  // namespace embers
