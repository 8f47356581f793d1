// Surprise-event detection: 3-D contingency cube, iterative proportional
// fitting to the max-entropy table, Poisson z-scores, and truncated-GSR
// evaluation.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "embers/domain.hpp"
#include "embers/scoring.hpp"

namespace embers {

struct CubeAxes {
    std::vector<std::string> event_classes;  // axis i
    std::vector<std::string> populations;    // axis j
    std::vector<std::string> countries;      // axis k

    static CubeAxes from_vocabulary(const Vocabulary& v) {
        return {v.event_classes, v.populations, v.countries};
    }

    size_t size() const {
        return event_classes.size() * populations.size() * countries.size();
    }
    size_t index(size_t i, size_t j, size_t k) const {
        return (i * populations.size() + j) * countries.size() + k;
    }

    std::tuple<size_t, size_t, size_t> locate(const GsrEvent& e) const {
        auto find = [&](const std::vector<std::string>& axis, const std::string& value) {
            for (size_t n = 0; n < axis.size(); ++n)
                if (axis[n] == value) return n;
            throw VocabularyError("event '" + e.id + "' has category '" + value +
                                  "' outside the cube axes");
        };
        return {find(event_classes, e.event_type.event_class),
                find(populations, e.population.group),
                find(countries, e.location.country)};
    }
};

struct CountCube {
    CubeAxes axes;
    std::vector<std::int64_t> counts;

    explicit CountCube(CubeAxes a) : axes(std::move(a)), counts(axes.size(), 0) {}

    std::int64_t& at(size_t i, size_t j, size_t k) { return counts[axes.index(i, j, k)]; }
    std::int64_t at(size_t i, size_t j, size_t k) const { return counts[axes.index(i, j, k)]; }
    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

inline CountCube build_cube(const std::vector<GsrEvent>& events, const CubeAxes& axes) {
    CountCube cube(axes);
    for (const auto& e : events) {
        auto [i, j, k] = axes.locate(e);
        ++cube.at(i, j, k);
    }
    return cube;
}

struct FittedCube {
    CubeAxes axes;
    std::vector<double> estimates;
    int iterations_used = 0;
    bool converged = false;
    double tolerance = 1e-6;
    int max_iterations = 1000;

    double at(size_t i, size_t j, size_t k) const { return estimates[axes.index(i, j, k)]; }
    double total() const {
        double t = 0;
        for (double v : estimates) t += v;
        return t;
    }
};

// Fits the max-entropy table consistent with the cube's three two-way margins
// by multiplicative margin adjustment. Starts from all ones; cells under any
// zero source margin are pinned to zero. One iteration = one sweep of the
// three margin families; convergence when the max per-cell change over a
// sweep drops below tolerance.
inline FittedCube ipf_fit(const CountCube& cube, double tolerance = 1e-6,
                          int max_iterations = 1000) {
    const size_t I = cube.axes.event_classes.size();
    const size_t J = cube.axes.populations.size();
    const size_t K = cube.axes.countries.size();

    std::vector<double> margin_ij(I * J, 0), margin_ik(I * K, 0), margin_jk(J * K, 0);
    for (size_t i = 0; i < I; ++i)
        for (size_t j = 0; j < J; ++j)
            for (size_t k = 0; k < K; ++k) {
                double x = static_cast<double>(cube.at(i, j, k));
                margin_ij[i * J + j] += x;
                margin_ik[i * K + k] += x;
                margin_jk[j * K + k] += x;
            }

    FittedCube fit;
    fit.axes = cube.axes;
    fit.tolerance = tolerance;
    fit.max_iterations = max_iterations;
    fit.estimates.assign(cube.axes.size(), 1.0);
    for (size_t i = 0; i < I; ++i)
        for (size_t j = 0; j < J; ++j)
            for (size_t k = 0; k < K; ++k)
                if (margin_ij[i * J + j] == 0 || margin_ik[i * K + k] == 0 ||
                    margin_jk[j * K + k] == 0)
                    fit.estimates[cube.axes.index(i, j, k)] = 0.0;

    auto& m = fit.estimates;
    auto adjust = [&](auto margin_of_cell, const std::vector<double>& target,
                      size_t target_size) {
        std::vector<double> fitted(target_size, 0);
        for (size_t i = 0; i < I; ++i)
            for (size_t j = 0; j < J; ++j)
                for (size_t k = 0; k < K; ++k)
                    fitted[margin_of_cell(i, j, k)] += m[cube.axes.index(i, j, k)];
        for (size_t i = 0; i < I; ++i)
            for (size_t j = 0; j < J; ++j)
                for (size_t k = 0; k < K; ++k) {
                    size_t cell = cube.axes.index(i, j, k);
                    size_t mg = margin_of_cell(i, j, k);
                    if (fitted[mg] > 0) m[cell] *= target[mg] / fitted[mg];
                }
    };

    std::vector<double> before;
    for (int sweep = 0; sweep < max_iterations; ++sweep) {
        before = m;
        adjust([&](size_t i, size_t j, size_t) { return i * J + j; }, margin_ij, I * J);
        adjust([&](size_t i, size_t, size_t k) { return i * K + k; }, margin_ik, I * K);
        adjust([&](size_t, size_t j, size_t k) { return j * K + k; }, margin_jk, J * K);
        fit.iterations_used = sweep + 1;
        double max_change = 0;
        for (size_t c = 0; c < m.size(); ++c)
            max_change = std::max(max_change, std::fabs(m[c] - before[c]));
        if (max_change < tolerance) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

struct SurpriseResult {
    double scale = 0;  // current-month total / fitted total
    std::vector<double> z_scores;
    std::set<std::tuple<size_t, size_t, size_t>> surprising_cells;
    std::set<std::string> truncated_event_ids;
    double sigma_threshold = 5.0;
};

// Scales the fitted table to the current month's total and flags cells whose
// observed count exceeds expectation by more than sigma_threshold Poisson
// standard deviations (std = sqrt(max(e, 0.5)), one-sided).
inline SurpriseResult detect_surprise(const FittedCube& fit, const CountCube& current,
                                      double sigma_threshold = 5.0) {
    const double fitted_total = fit.total();
    if (fitted_total <= 0)
        throw ValidationError("fitted cube has zero total: no history to scale");
    SurpriseResult result;
    result.sigma_threshold = sigma_threshold;
    result.scale = static_cast<double>(current.total()) / fitted_total;
    result.z_scores.assign(current.axes.size(), 0.0);
    const size_t I = current.axes.event_classes.size();
    const size_t J = current.axes.populations.size();
    const size_t K = current.axes.countries.size();
    for (size_t i = 0; i < I; ++i)
        for (size_t j = 0; j < J; ++j)
            for (size_t k = 0; k < K; ++k) {
                size_t cell = current.axes.index(i, j, k);
                double expected = result.scale * fit.estimates[cell];
                double z = (static_cast<double>(current.counts[cell]) - expected) /
                           std::sqrt(std::max(expected, 0.5));
                result.z_scores[cell] = z;
                if (z > sigma_threshold) result.surprising_cells.insert({i, j, k});
            }
    return result;
}

// Fills truncated_event_ids with the current-month events falling in
// surprising cells.
inline void collect_truncated_events(SurpriseResult& result,
                                     const std::vector<GsrEvent>& current_events,
                                     const CubeAxes& axes) {
    for (const auto& e : current_events)
        if (result.surprising_cells.count(axes.locate(e)))
            result.truncated_event_ids.insert(e.id);
}

// Scores the supplied alerts against only the surprising events.
inline ScoreReport evaluate_truncated(const std::vector<GsrEvent>& gsr_month,
                                      const SurpriseResult& result,
                                      const std::vector<Alert>& alerts,
                                      YearMonth month) {
    std::vector<GsrEvent> truncated;
    for (const auto& e : gsr_month)
        if (result.truncated_event_ids.count(e.id)) truncated.push_back(e);
    ScoreReport report = match_month(alerts, truncated, month);
    report.label = "surprise-truncated";
    return report;
}

// End-to-end: cube the 3-month history, fit, and flag the current month.
inline SurpriseResult surprise_month(const std::vector<GsrEvent>& history,
                                     const std::vector<GsrEvent>& current_events,
                                     const CubeAxes& axes,
                                     double sigma_threshold = 5.0,
                                     double tolerance = 1e-6,
                                     int max_iterations = 1000) {
    CountCube history_cube = build_cube(history, axes);
    FittedCube fit = ipf_fit(history_cube, tolerance, max_iterations);
    CountCube current_cube = build_cube(current_events, axes);
    SurpriseResult result = detect_surprise(fit, current_cube, sigma_threshold);
    collect_truncated_events(result, current_events, axes);
    return result;
}

inline json surprise_result_to_json(const SurpriseResult& result, const CubeAxes& axes) {
    json j;
    j["scale"] = result.scale;
    j["sigma_threshold"] = result.sigma_threshold;
    json cells = json::array();
    for (const auto& [i, jx, k] : result.surprising_cells) {
        json c;
        c["event_class"] = axes.event_classes[i];
        c["population"] = axes.populations[jx];
        c["country"] = axes.countries[k];
        c["z_score"] = result.z_scores[axes.index(i, jx, k)];
        cells.push_back(std::move(c));
    }
    j["surprising_cells"] = std::move(cells);
    j["truncated_event_ids"] = result.truncated_event_ids;
    return j;
}

}  // namespace embers
