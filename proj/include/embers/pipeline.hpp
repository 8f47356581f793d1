// Share-nothing stage pipeline (ingestion -> enrichment -> modeling ->
// selection) plus the selection-stage machinery: dedup/fusion, expected
// quality, and suppression.
#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_set>
#include <variant>
#include <vector>

#include "embers/domain.hpp"
#include "embers/scoring.hpp"

namespace embers {

struct RawRecord {
    std::string text;
};

struct EnrichedRecord {
    json data;
};

using Payload = std::variant<RawRecord, EnrichedRecord, Alert>;

struct Envelope {
    std::string message_id;
    std::string created_at;
    std::vector<std::string> provenance;  // stage names traversed
    Payload payload;
};

enum class StageKind { ingestion, enrichment, modeling, selection };

inline const char* stage_kind_name(StageKind k) {
    switch (k) {
        case StageKind::ingestion: return "ingestion";
        case StageKind::enrichment: return "enrichment";
        case StageKind::modeling: return "modeling";
        case StageKind::selection: return "selection";
    }
    return "?";
}

// A stage handler maps one envelope to zero or more envelopes. Handlers must
// not touch state shared with other stages.
using StageHandler = std::function<std::vector<Envelope>(const Envelope&)>;

struct StageSpec {
    std::string name;
    StageKind kind;
    StageHandler handler;
};

struct DeadLetter {
    std::string stage;
    std::string message_id;
    std::string error;
};

struct PipelineResult {
    std::vector<Envelope> outputs;
    std::vector<DeadLetter> dead_letters;
};

namespace detail {

// One stage's work on one message: stamp provenance, run the handler, and
// route failures to the dead-letter list. Receiver-side dedup by message_id
// makes redelivery safe.
class StageWorkerState {
public:
    std::vector<Envelope> process(const StageSpec& stage, const Envelope& msg,
                                  std::vector<DeadLetter>& dead) {
        if (!seen_.insert(msg.message_id).second) return {};
        Envelope stamped = msg;
        stamped.provenance.push_back(stage.name);
        try {
            return stage.handler(stamped);
        } catch (const std::exception& e) {
            dead.push_back({stage.name, msg.message_id, e.what()});
            return {};
        }
    }

private:
    std::unordered_set<std::string> seen_;
};

inline void validate_stage_order(const std::vector<StageSpec>& stages) {
    std::unordered_set<std::string> names;
    StageKind prev = StageKind::ingestion;
    bool first = true;
    for (const auto& s : stages) {
        if (!names.insert(s.name).second)
            throw ValidationError("duplicate stage name '" + s.name + "'");
        if (!first && static_cast<int>(s.kind) < static_cast<int>(prev))
            throw ValidationError("stage kinds out of pipeline order at '" + s.name + "'");
        prev = s.kind;
        first = false;
    }
}

template <class T>
class BoundedQueue {
public:
    explicit BoundedQueue(size_t capacity) : capacity_(capacity) {}

    void push(T item) {
        std::unique_lock lk(mu_);
        not_full_.wait(lk, [&] { return q_.size() < capacity_; });
        q_.push_back(std::move(item));
        not_empty_.notify_one();
    }

    void close() {
        std::lock_guard lk(mu_);
        closed_ = true;
        not_empty_.notify_all();
    }

    // False when the queue is closed and drained.
    bool pop(T& out) {
        std::unique_lock lk(mu_);
        not_empty_.wait(lk, [&] { return !q_.empty() || closed_; });
        if (q_.empty()) return false;
        out = std::move(q_.front());
        q_.pop_front();
        not_full_.notify_one();
        return true;
    }

private:
    std::mutex mu_;
    std::condition_variable not_full_, not_empty_;
    std::deque<T> q_;
    size_t capacity_;
    bool closed_ = false;
};

}  // namespace detail

// Single-threaded reference execution: each stage consumes its predecessor's
// full FIFO output.
inline PipelineResult run_pipeline_serial(const std::vector<StageSpec>& stages,
                                          const std::vector<Envelope>& inputs) {
    detail::validate_stage_order(stages);
    PipelineResult result;
    std::vector<Envelope> current = inputs;
    for (const auto& stage : stages) {
        detail::StageWorkerState state;
        std::vector<Envelope> next;
        for (const auto& msg : current) {
            auto out = state.process(stage, msg, result.dead_letters);
            next.insert(next.end(), out.begin(), out.end());
        }
        current = std::move(next);
    }
    result.outputs = std::move(current);
    return result;
}

// Concurrent execution: one worker thread per stage, connected by bounded
// FIFO queues. Stages share nothing; messages are the only communication.
inline PipelineResult run_pipeline(const std::vector<StageSpec>& stages,
                                   const std::vector<Envelope>& inputs,
                                   size_t queue_capacity = 64) {
    detail::validate_stage_order(stages);
    const size_t n = stages.size();
    if (n == 0) return {inputs, {}};

    std::vector<std::unique_ptr<detail::BoundedQueue<Envelope>>> queues;
    for (size_t i = 0; i <= n; ++i)
        queues.push_back(std::make_unique<detail::BoundedQueue<Envelope>>(queue_capacity));

    std::vector<std::vector<DeadLetter>> dead_per_stage(n);
    std::vector<std::thread> workers;
    workers.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        workers.emplace_back([&, i] {
            detail::StageWorkerState state;
            Envelope msg;
            while (queues[i]->pop(msg)) {
                auto out = state.process(stages[i], msg, dead_per_stage[i]);
                for (auto& e : out) queues[i + 1]->push(std::move(e));
            }
            queues[i + 1]->close();
        });
    }

    // Feed from a separate thread: with bounded queues, pushing everything
    // before draining the tail would deadlock once back-pressure reaches the
    // head.
    std::thread feeder([&] {
        for (const auto& msg : inputs) queues[0]->push(msg);
        queues[0]->close();
    });

    PipelineResult result;
    Envelope out;
    while (queues[n]->pop(out)) result.outputs.push_back(std::move(out));
    feeder.join();
    for (auto& w : workers) w.join();
    for (auto& dl : dead_per_stage)
        result.dead_letters.insert(result.dead_letters.end(), dl.begin(), dl.end());
    return result;
}

// Expected-quality model: per-(model, country) mean of matched quality with
// unmatched alerts counting as 0, global mean as fallback, prior 2.0 for cold
// start.
struct ExpectedQualityModel {
    std::map<std::pair<std::string, std::string>, double> per_key_means;
    std::optional<double> global_mean;
    double prior = 2.0;
};

inline double expected_quality(const Alert& alert, const ExpectedQualityModel& model) {
    auto it = model.per_key_means.find({alert.model, alert.location.country});
    if (it != model.per_key_means.end()) return it->second;
    if (model.global_mean) return *model.global_mean;
    return model.prior;
}

inline ExpectedQualityModel train_expected_quality(const std::vector<ScoreReport>& past_reports,
                                                   const std::vector<Alert>& past_alerts) {
    std::map<std::string, const Alert*> by_id;
    for (const auto& a : past_alerts) by_id[a.id] = &a;

    std::map<std::pair<std::string, std::string>, std::pair<double, int>> acc;
    double total = 0;
    int count = 0;
    auto add = [&](const std::string& alert_id, double quality) {
        auto it = by_id.find(alert_id);
        if (it == by_id.end())
            throw ValidationError("report references unknown alert '" + alert_id + "'");
        auto& slot = acc[{it->second->model, it->second->location.country}];
        slot.first += quality;
        slot.second += 1;
        total += quality;
        ++count;
    };
    for (const auto& report : past_reports) {
        for (const auto& p : report.pairs) add(p.alert_id, p.quality);
        for (const auto& id : report.unmatched_alert_ids) add(id, 0.0);
    }

    ExpectedQualityModel model;
    for (const auto& [key, slot] : acc)
        model.per_key_means[key] = slot.first / slot.second;
    if (count > 0) model.global_mean = total / count;
    return model;
}

// Duplicate key: same normalized city, predicted date, population, and event
// class. The highest-expected-quality alert in a group survives, first-seen
// order preserved, sources unioned.
inline std::vector<Alert> deduplicate(const std::vector<Alert>& alerts,
                                      const ExpectedQualityModel& model) {
    using Key = std::tuple<std::string, std::int64_t, std::string, std::string>;
    std::map<Key, size_t> survivor_slot;  // key -> index into result
    std::vector<Alert> result;
    std::vector<double> survivor_eq;
    for (const auto& a : alerts) {
        Key key{normalize_place_name(a.location.city),
                a.predicted_date.days_since_epoch(), a.population.group,
                a.event_type.event_class};
        double eq = expected_quality(a, model);
        auto it = survivor_slot.find(key);
        if (it == survivor_slot.end()) {
            survivor_slot[key] = result.size();
            result.push_back(a);
            survivor_eq.push_back(eq);
            continue;
        }
        Alert& kept = result[it->second];
        std::set<std::string> merged = kept.sources;
        merged.insert(a.sources.begin(), a.sources.end());
        if (eq > survivor_eq[it->second]) {
            Alert replacement = a;
            kept = std::move(replacement);
            survivor_eq[it->second] = eq;
        }
        kept.sources = std::move(merged);
    }
    return result;
}

inline std::vector<Alert> deduplicate(const std::vector<Alert>& alerts) {
    return deduplicate(alerts, ExpectedQualityModel{});
}

// Retains alerts whose expected quality meets the threshold; stable order.
inline std::vector<Alert> suppress(const std::vector<Alert>& alerts,
                                   const ExpectedQualityModel& model,
                                   double threshold) {
    if (threshold < 0 || threshold > 4)
        throw ValidationError("suppression threshold must be in [0, 4]");
    std::vector<Alert> kept;
    for (const auto& a : alerts)
        if (expected_quality(a, model) >= threshold) kept.push_back(a);
    return kept;
}

}  // namespace embers
