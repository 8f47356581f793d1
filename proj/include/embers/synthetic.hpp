// Seeded deterministic synthetic alert/GSR corpus generator.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "embers/date.hpp"
#include "embers/domain.hpp"

namespace embers {

struct SyntheticCell {
    std::string country;
    std::string state;
    std::string city;
    std::string population;
    std::string event_class;
    bool violent = false;
    double monthly_rate = 0;
    std::vector<std::string> sources = {"twitter", "news"};
};

struct UptickSpec {
    int month_offset = 0;   // 0-based from start_month
    size_t cell_index = 0;  // into SyntheticProfile::cells
    double factor = 1.0;
};

struct SyntheticProfile {
    YearMonth start_month;
    int months = 1;
    std::vector<SyntheticCell> cells;
    std::vector<UptickSpec> upticks;
    // "deterministic": monthly count = round(rate); "poisson": sampled.
    std::string sampling = "deterministic";
    int date_jitter_days = 2;     // |predicted - actual| bound for alerts
    double alert_probability = 0.85;
    double miss_rate = 0;         // fraction of events with no alert

    static SyntheticProfile from_json(const json& j) {
        SyntheticProfile p;
        p.start_month = YearMonth::parse(j.at("start_month").get<std::string>());
        p.months = j.at("months").get<int>();
        for (const auto& c : j.at("cells")) {
            SyntheticCell cell;
            cell.country = c.at("country").get<std::string>();
            cell.state = c.value("state", std::string{});
            cell.city = c.at("city").get<std::string>();
            cell.population = c.at("population").get<std::string>();
            cell.event_class = c.at("event_class").get<std::string>();
            cell.violent = c.value("violent", false);
            cell.monthly_rate = c.at("monthly_rate").get<double>();
            if (c.contains("sources"))
                cell.sources = c["sources"].get<std::vector<std::string>>();
            p.cells.push_back(std::move(cell));
        }
        if (j.contains("upticks"))
            for (const auto& u : j["upticks"])
                p.upticks.push_back({u.at("month_offset").get<int>(),
                                     u.at("cell_index").get<size_t>(),
                                     u.at("factor").get<double>()});
        p.sampling = j.value("sampling", std::string("deterministic"));
        p.date_jitter_days = j.value("date_jitter_days", 2);
        p.alert_probability = j.value("alert_probability", 0.85);
        p.miss_rate = j.value("miss_rate", 0.0);
        return p;
    }
};

struct SyntheticCorpus {
    std::vector<GsrEvent> events;
    std::vector<Alert> alerts;
};

namespace detail {

// mt19937_64 output is pinned by the standard, so these stay reproducible
// across platforms (std::*_distribution would not be).
inline double unit_uniform(std::mt19937_64& rng) {
    return (rng() >> 11) * 0x1.0p-53;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline int poisson_draw(std::mt19937_64& rng, double lambda) {
    double limit = std::exp(-lambda);
    double p = 1.0;
    int k = 0;
    do {
        ++k;
        p *= unit_uniform(rng);
    } while (p > limit);
    return k - 1;
}

}  // namespace detail

// Generates `months` consecutive months of events from the cell rates (with
// any uptick factors applied), plus one alert per event from a forecaster
// that sees the generated events. Identical (profile, seed) inputs give
// identical corpora.
inline SyntheticCorpus generate_synthetic(const SyntheticProfile& profile,
                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SyntheticCorpus corpus;
    int event_seq = 0, alert_seq = 0;
    YearMonth month = profile.start_month;
    for (int mo = 0; mo < profile.months; ++mo, month = month.next()) {
        for (size_t ci = 0; ci < profile.cells.size(); ++ci) {
            const SyntheticCell& cell = profile.cells[ci];
            double rate = cell.monthly_rate;
            for (const auto& u : profile.upticks)
                if (u.month_offset == mo && u.cell_index == ci) rate *= u.factor;
            int count = profile.sampling == "poisson"
                            ? detail::poisson_draw(rng, rate)
                            : static_cast<int>(std::llround(rate));
            for (int n = 0; n < count; ++n) {
                GsrEvent e;
                e.id = "gsr-" + month.to_string() + "-" + std::to_string(++event_seq);
                int day = detail::uniform_int(rng, 1, month.days_in_month());
                e.event_date = Date(month.year, month.month, static_cast<unsigned>(day));
                e.report_date = e.event_date.plus_days(1);
                e.location = {cell.country, cell.state, cell.city};
                e.population = {cell.population};
                e.event_type = {cell.event_class, cell.violent};
                corpus.events.push_back(e);

                if (detail::unit_uniform(rng) < profile.miss_rate) continue;
                Alert a;
                a.id = "alert-" + month.to_string() + "-" + std::to_string(++alert_seq);
                int jitter = profile.date_jitter_days > 0
                                 ? detail::uniform_int(rng, -profile.date_jitter_days,
                                                       profile.date_jitter_days)
                                 : 0;
                a.predicted_date = e.event_date.plus_days(jitter);
                a.issued_at = e.event_date.plus_days(-1 - detail::uniform_int(rng, 0, 9));
                a.location = e.location;
                a.population = e.population;
                a.event_type = e.event_type;
                a.probability = profile.alert_probability;
                a.model = "synthetic";
                a.sources.insert(cell.sources.begin(), cell.sources.end());
                corpus.alerts.push_back(std::move(a));
            }
        }
    }
    return corpus;
}

inline void write_gsr_file(const std::string& path, const std::vector<GsrEvent>& events) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write gsr file: " + path);
    for (const auto& e : events) out << gsr_event_to_json(e).dump() << "\n";
}

inline void write_alert_file(const std::string& path, const std::vector<Alert>& alerts) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write alert file: " + path);
    for (const auto& a : alerts) out << alert_to_json(a).dump() << "\n";
}

}  // namespace embers
