// Shared test builders and independent oracles. The oracles deliberately
// avoid the library's solver paths: matching by exhaustive enumeration,
// max-entropy by 1-D search over the margin-preserving family.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "embers/embers.hpp"

namespace testutil {

using namespace embers;

inline Alert make_alert(std::string id, const std::string& issued,
                        const std::string& predicted, std::string country,
                        std::string state = "", std::string city = "",
                        std::string population = "general-population",
                        std::string event_class = "economic", bool violent = false,
                        double probability = 0.8) {
    Alert a;
    a.id = std::move(id);
    a.issued_at = Date::parse(issued);
    a.predicted_date = Date::parse(predicted);
    a.location = {std::move(country), std::move(state), std::move(city)};
    a.population = {std::move(population)};
    a.event_type = {std::move(event_class), violent};
    a.probability = probability;
    a.model = "test";
    a.sources = {"twitter"};
    return a;
}

inline GsrEvent make_event(std::string id, const std::string& event_date,
                           std::string country, std::string state = "",
                           std::string city = "",
                           std::string population = "general-population",
                           std::string event_class = "economic",
                           bool violent = false, const std::string& report_date = "") {
    GsrEvent e;
    e.id = std::move(id);
    e.event_date = Date::parse(event_date);
    e.report_date = report_date.empty() ? e.event_date.plus_days(1)
                                        : Date::parse(report_date);
    e.location = {std::move(country), std::move(state), std::move(city)};
    e.population = {std::move(population)};
    e.event_type = {std::move(event_class), violent};
    return e;
}

struct OracleMatch {
    std::int64_t total_units = 0;  // exact quality in 1/42 units
    int cardinality = 0;
    std::vector<std::pair<std::string, std::string>> pairs;  // sorted
};

// Exhaustive enumeration over all legal matchings; breaks ties toward larger
// cardinality, then the lexicographically smallest (alert_id, event_id)
// sequence. Feasible for <= ~7 alerts/events.
inline OracleMatch brute_force_match(const std::vector<Alert>& alerts,
                                     const std::vector<GsrEvent>& events) {
    const int na = static_cast<int>(alerts.size());
    const int ne = static_cast<int>(events.size());
    std::vector<std::vector<std::int64_t>> units(na, std::vector<std::int64_t>(ne, -1));
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < ne; ++j)
            if (is_legal_pair(alerts[i], events[j]))
                units[i][j] = embers::detail::quality_units(alerts[i], events[j]);

    OracleMatch best;
    bool have_best = false;
    std::vector<int> assign(na, -1);
    std::vector<char> used(ne, 0);

    auto consider = [&]() {
        OracleMatch cand;
        for (int i = 0; i < na; ++i)
            if (assign[i] >= 0) {
                cand.total_units += units[i][assign[i]];
                ++cand.cardinality;
                cand.pairs.emplace_back(alerts[i].id, events[assign[i]].id);
            }
        std::sort(cand.pairs.begin(), cand.pairs.end());
        if (!have_best || cand.total_units > best.total_units ||
            (cand.total_units == best.total_units &&
             (cand.cardinality > best.cardinality ||
              (cand.cardinality == best.cardinality && cand.pairs < best.pairs)))) {
            best = std::move(cand);
            have_best = true;
        }
    };

    std::function<void(int)> rec = [&](int i) {
        if (i == na) {
            consider();
            return;
        }
        rec(i + 1);  // alert i unmatched
        for (int j = 0; j < ne; ++j) {
            if (used[j] || units[i][j] < 0) continue;
            used[j] = 1;
            assign[i] = j;
            rec(i + 1);
            assign[i] = -1;
            used[j] = 0;
        }
    };
    rec(0);
    return best;
}

inline std::int64_t report_total_units(const ScoreReport& r) {
    std::int64_t total = 0;
    for (const auto& p : r.pairs)
        total += std::llround(p.quality * 42.0);
    return total;
}

// Max-entropy oracle for 2x2x2 tables. Every table sharing the three two-way
// margins of `x` has the form x + t * (-1)^(i+j+k); entropy is concave in t,
// so a grid scan plus refinement finds the maximizer.
inline std::vector<double> maxent_2x2x2_oracle(const std::vector<double>& x) {
    auto sign = [](int cell) {
        int i = cell >> 2, j = (cell >> 1) & 1, k = cell & 1;
        return ((i + j + k) % 2 == 0) ? 1.0 : -1.0;
    };
    double total = 0;
    for (double v : x) total += v;
    auto entropy = [&](double t) {
        double h = 0;
        for (int c = 0; c < 8; ++c) {
            double m = x[c] + t * sign(c);
            if (m < 0) return -1e18;
            if (m > 0) {
                double p = m / total;
                h -= p * std::log(p);
            }
        }
        return h;
    };
    // Feasible t range from non-negativity.
    double lo = -1e18, hi = 1e18;
    for (int c = 0; c < 8; ++c) {
        if (sign(c) > 0) lo = std::max(lo, -x[c]);
        else hi = std::min(hi, x[c]);
    }
    double best_t = lo, best_h = entropy(lo);
    const int grid = 20000;
    for (int g = 0; g <= grid; ++g) {
        double t = lo + (hi - lo) * g / grid;
        double h = entropy(t);
        if (h > best_h) {
            best_h = h;
            best_t = t;
        }
    }
    // Ternary refinement around the grid optimum.
    double a = std::max(lo, best_t - (hi - lo) / grid);
    double b = std::min(hi, best_t + (hi - lo) / grid);
    for (int it = 0; it < 200; ++it) {
        double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
        if (entropy(m1) < entropy(m2)) a = m1;
        else b = m2;
    }
    best_t = (a + b) / 2;
    std::vector<double> out(8);
    for (int c = 0; c < 8; ++c) out[c] = x[c] + best_t * sign(c);
    return out;
}

}  // namespace testutil
