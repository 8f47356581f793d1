// Batch CLI over the forecast-evaluation toolkit: scoring, baserate alerts,
// surprise detection, ablation, recall/quality curves, narratives, synthetic
// corpora, and pipeline runs.
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "embers/embers.hpp"

namespace {

using namespace embers;

Vocabulary load_vocab(const std::string& config_path) {
    return config_path.empty() ? Vocabulary::standard() : Vocabulary::load(config_path);
}

std::vector<Alert> alerts_for_month(const std::vector<Alert>& alerts, YearMonth m) {
    std::vector<Alert> out;
    for (const auto& a : alerts)
        if (m.contains(a.predicted_date)) out.push_back(a);
    return out;
}

std::vector<GsrEvent> events_for_month(const std::vector<GsrEvent>& events, YearMonth m) {
    std::vector<GsrEvent> out;
    for (const auto& e : events)
        if (m.contains(e.event_date)) out.push_back(e);
    return out;
}

// Writes the document to --out when given; otherwise prints it only in json
// format (table output is handled by the caller).
void emit_doc(const json& doc, const std::string& out_path, const std::string& format) {
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw ParseError("cannot write output file: " + out_path);
        out << doc.dump(2) << "\n";
        return;
    }
    if (format == "json") std::cout << doc.dump(2) << "\n";
}

std::string fmt_opt(const std::optional<double>& v) {
    if (!v) return "absent";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

void print_report_table(const ScoreReport& r) {
    std::cout << "Month:                  " << r.month.to_string() << "\n"
              << "Matched pairs:          " << r.pairs.size() << "\n"
              << "Mean Lead-Time:         " << fmt_opt(r.mean_lead_time) << "\n"
              << "Mean Probability Score: " << fmt_opt(r.mean_probability_score) << "\n"
              << "Mean Quality Score:     " << fmt_opt(r.mean_quality) << "\n"
              << "Recall:                 " << fmt_opt(r.recall) << "\n"
              << "Precision:              " << fmt_opt(r.precision) << "\n"
              << "Perfect scores (4.0):   " << r.perfect_count << "\n";
}

// Trains the expected-quality model on a scored month and annotates alerts.
std::vector<Alert> annotate_expected_quality(std::vector<Alert> alerts,
                                             const std::vector<GsrEvent>& events,
                                             YearMonth month) {
    ScoreReport report = match_month(alerts, events, month);
    ExpectedQualityModel model = train_expected_quality({report}, alerts);
    for (auto& a : alerts) a.expected_quality = expected_quality(a, model);
    return alerts;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::set<std::string> parse_tag_set(const std::string& csv) {
    std::set<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.insert(tok);
    return out;
}

struct CommonOpts {
    std::string config;
    std::string month;
    std::string out;
    std::string format = "table";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "vocabulary config JSON");
    cmd->add_option("--out", o.out, "output file (default: stdout)");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "table"}));
}

int run(int argc, char** argv) {
    CLI::App app{"forecast alert scoring and pipeline toolkit"};
    app.require_subcommand(1);

    // --- score ---
    auto* score = app.add_subcommand("score", "match alerts to GSR events for one month");
    CommonOpts score_o;
    std::string score_alerts, score_gsr;
    add_common(score, score_o);
    score->add_option("--alerts", score_alerts)->required();
    score->add_option("--gsr", score_gsr)->required();
    score->add_option("--month", score_o.month, "YYYY-MM")->required();

    // --- baserate ---
    auto* base = app.add_subcommand("baserate", "emit history-rate alerts for a target month");
    CommonOpts base_o;
    std::string base_gsr;
    add_common(base, base_o);
    base->add_option("--gsr", base_gsr, "GSR history (trailing 3 months)")->required();
    base->add_option("--month", base_o.month, "target month YYYY-MM")->required();

    // --- surprise ---
    auto* surprise = app.add_subcommand("surprise", "detect surprise cells and score truncated GSR");
    CommonOpts sur_o;
    std::string sur_history, sur_current, sur_alerts;
    double sur_sigma = 5.0;
    add_common(surprise, sur_o);
    surprise->add_option("--history", sur_history, "GSR for the 3 prior months")->required();
    surprise->add_option("--current", sur_current, "GSR for the current month")->required();
    surprise->add_option("--alerts", sur_alerts)->required();
    surprise->add_option("--month", sur_o.month, "current month YYYY-MM")->required();
    surprise->add_option("--sigma", sur_sigma, "z-score threshold");

    // --- ablate ---
    auto* ablate = app.add_subcommand("ablate", "rescore with subsets of data sources");
    CommonOpts abl_o;
    std::string abl_alerts, abl_gsr;
    std::vector<std::string> abl_sources;
    add_common(ablate, abl_o);
    ablate->add_option("--alerts", abl_alerts)->required();
    ablate->add_option("--gsr", abl_gsr)->required();
    ablate->add_option("--month", abl_o.month, "YYYY-MM")->required();
    ablate->add_option("--sources", abl_sources,
                       "retained tag set, comma-separated (repeatable)")->required();

    // --- curve ---
    auto* curve = app.add_subcommand("curve", "recall vs quality over suppression thresholds");
    CommonOpts cur_o;
    std::string cur_alerts, cur_gsr, cur_thresholds = "0,0.5,1,1.5,2,2.5,3,3.5,4";
    add_common(curve, cur_o);
    curve->add_option("--alerts", cur_alerts)->required();
    curve->add_option("--gsr", cur_gsr)->required();
    curve->add_option("--month", cur_o.month, "YYYY-MM")->required();
    curve->add_option("--thresholds", cur_thresholds, "comma-separated thresholds");

    // --- narrate ---
    auto* narrate = app.add_subcommand("narrate", "render an alert as prose");
    CommonOpts nar_o;
    std::string nar_alert, nar_context;
    add_common(narrate, nar_o);
    narrate->add_option("--alert", nar_alert, "file with one alert JSON object")->required();
    narrate->add_option("--context", nar_context, "context JSON file");

    // --- generate ---
    auto* generate = app.add_subcommand("generate", "write a seeded synthetic corpus");
    CommonOpts gen_o;
    std::string gen_profile, gen_gsr_out, gen_alerts_out;
    add_common(generate, gen_o);
    generate->add_option("--profile", gen_profile, "generator profile JSON")->required();
    generate->add_option("--gsr-out", gen_gsr_out)->required();
    generate->add_option("--alerts-out", gen_alerts_out)->required();

    // --- pipeline-run ---
    auto* pipe = app.add_subcommand("pipeline-run", "run raw records through the stage pipeline");
    CommonOpts pipe_o;
    std::string pipe_input, pipe_dead;
    double pipe_threshold = 0.0;
    add_common(pipe, pipe_o);
    pipe->add_option("--input", pipe_input, "raw alert records, one JSON per line")->required();
    pipe->add_option("--dead-letter-out", pipe_dead, "dead-letter output file");
    pipe->add_option("--threshold", pipe_threshold, "selection suppression threshold");

    CLI11_PARSE(app, argc, argv);

    if (*score) {
        Vocabulary vocab = load_vocab(score_o.config);
        YearMonth month = YearMonth::parse(score_o.month);
        auto alerts = alerts_for_month(load_alert_file(score_alerts, vocab), month);
        auto events = events_for_month(load_gsr_file(score_gsr, vocab), month);
        ScoreReport report = match_month(alerts, events, month);
        if (score_o.format == "table") print_report_table(report);
        emit_doc(report.to_json(), score_o.out, score_o.format);
        return 0;
    }

    if (*base) {
        Vocabulary vocab = load_vocab(base_o.config);
        YearMonth month = YearMonth::parse(base_o.month);
        auto history = load_gsr_file(base_gsr, vocab);
        std::vector<GsrEvent> window;
        for (const auto& e : history) {
            YearMonth em = YearMonth::of(e.event_date);
            if (em == month.prev() || em == month.prev().prev() ||
                em == month.prev().prev().prev())
                window.push_back(e);
        }
        auto table = build_rate_table(window, month);
        auto alerts = generate_baserate_alerts(table, month);
        if (base_o.out.empty()) {
            for (const auto& a : alerts) std::cout << alert_to_json(a).dump() << "\n";
        } else {
            write_alert_file(base_o.out, alerts);
        }
        return 0;
    }

    if (*surprise) {
        Vocabulary vocab = load_vocab(sur_o.config);
        YearMonth month = YearMonth::parse(sur_o.month);
        auto history = load_gsr_file(sur_history, vocab);
        if (history.empty()) throw ValidationError("empty GSR history");
        std::set<std::string> history_months;
        for (const auto& e : history)
            history_months.insert(YearMonth::of(e.event_date).to_string());
        std::set<std::string> expected = {month.prev().to_string(),
                                          month.prev().prev().to_string(),
                                          month.prev().prev().prev().to_string()};
        for (const auto& m : history_months)
            if (!expected.count(m))
                throw ValidationError("history month " + m +
                                      " is outside the 3 months preceding " + month.to_string());
        auto current = events_for_month(load_gsr_file(sur_current, vocab), month);
        auto alerts = alerts_for_month(load_alert_file(sur_alerts, vocab), month);

        CubeAxes axes = CubeAxes::from_vocabulary(vocab);
        SurpriseResult result = surprise_month(history, current, axes, sur_sigma);
        ScoreReport supplied = evaluate_truncated(current, result, alerts, month);
        auto baserate_alerts =
            generate_baserate_alerts(build_rate_table(history, month), month);
        ScoreReport baseline = evaluate_truncated(current, result, baserate_alerts, month);

        json doc;
        doc["surprise"] = surprise_result_to_json(result, axes);
        doc["supplied_report"] = supplied.to_json();
        doc["baserate_report"] = baseline.to_json();
        if (sur_o.format == "table") {
            std::cout << "Surprising cells: " << result.surprising_cells.size()
                      << ", truncated events: " << result.truncated_event_ids.size() << "\n";
            std::cout << "--- supplied alerts, truncated GSR ---\n";
            print_report_table(supplied);
            std::cout << "--- baserate alerts, truncated GSR ---\n";
            print_report_table(baseline);
        }
        emit_doc(doc, sur_o.out, sur_o.format);
        return 0;
    }

    if (*ablate) {
        Vocabulary vocab = load_vocab(abl_o.config);
        YearMonth month = YearMonth::parse(abl_o.month);
        auto alerts = alerts_for_month(load_alert_file(abl_alerts, vocab), month);
        auto events = events_for_month(load_gsr_file(abl_gsr, vocab), month);
        std::set<std::string> all_tags;
        for (const auto& a : alerts) all_tags.insert(a.sources.begin(), a.sources.end());
        std::vector<std::set<std::string>> sets = {all_tags};  // full configuration first
        for (const auto& csv : abl_sources) sets.push_back(parse_tag_set(csv));
        auto reports = run_ablation(alerts, events, month, sets);
        json doc = json::array();
        for (const auto& r : reports) doc.push_back(r.to_json());
        if (abl_o.format == "table") {
            for (const auto& r : reports) {
                std::cout << "sources:";
                for (const auto& t : r.configuration) std::cout << " " << t;
                std::cout << " | quality " << fmt_opt(r.metrics.mean_quality) << " ("
                          << fmt_opt(r.deltas_vs_full.mean_quality) << "%)"
                          << " | lead " << fmt_opt(r.metrics.mean_lead_time) << " ("
                          << fmt_opt(r.deltas_vs_full.mean_lead_time) << "%)"
                          << " | precision " << fmt_opt(r.metrics.precision) << " ("
                          << fmt_opt(r.deltas_vs_full.precision) << "%)"
                          << " | recall " << fmt_opt(r.metrics.recall) << " ("
                          << fmt_opt(r.deltas_vs_full.recall) << "%)\n";
            }
        }
        emit_doc(doc, abl_o.out, abl_o.format);
        return 0;
    }

    if (*curve) {
        Vocabulary vocab = load_vocab(cur_o.config);
        YearMonth month = YearMonth::parse(cur_o.month);
        auto alerts = alerts_for_month(load_alert_file(cur_alerts, vocab), month);
        auto events = events_for_month(load_gsr_file(cur_gsr, vocab), month);
        alerts = annotate_expected_quality(std::move(alerts), events, month);
        auto points = recall_quality_curve(alerts, events,
                                           parse_double_list(cur_thresholds), month);
        json doc = json::array();
        for (const auto& p : points) {
            json row;
            row["threshold"] = p.threshold;
            row["recall"] = p.recall ? json(*p.recall) : json(nullptr);
            row["mean_quality"] = p.mean_quality ? json(*p.mean_quality) : json(nullptr);
            doc.push_back(std::move(row));
        }
        if (cur_o.format == "table") {
            std::cout << "threshold\trecall\tmean_quality\n";
            for (const auto& p : points)
                std::cout << p.threshold << "\t" << fmt_opt(p.recall) << "\t"
                          << fmt_opt(p.mean_quality) << "\n";
        }
        emit_doc(doc, cur_o.out, cur_o.format);
        return 0;
    }

    if (*narrate) {
        Vocabulary vocab = load_vocab(nar_o.config);
        std::ifstream in(nar_alert);
        if (!in) throw ParseError("cannot open alert file: " + nar_alert);
        json rec;
        in >> rec;
        Alert alert = parse_alert_record(rec, vocab);
        NarrativeContext ctx;
        if (!nar_context.empty()) {
            std::ifstream cin_(nar_context);
            if (!cin_) throw ParseError("cannot open context file: " + nar_context);
            json c;
            cin_ >> c;
            if (c.contains("recent_alert_counts")) {
                auto v = c["recent_alert_counts"].get<std::vector<int>>();
                if (v.size() != 3)
                    throw ParseError("recent_alert_counts must have 3 entries (2d, 7d, 30d)");
                ctx.recent_alert_counts = {{v[0], v[1], v[2]}};
            }
            if (c.contains("week")) {
                const json& w = c["week"];
                if (w.contains("weekly_history"))
                    ctx.week_stats = week_significance(
                        w["weekly_history"].get<std::vector<double>>(),
                        w.at("observed").get<double>(), w.at("week_index").get<int>());
                else
                    ctx.week_stats = week_significance_from_stats(
                        w.at("history_mean").get<double>(),
                        w.at("history_std").get<double>(),
                        w.at("observed").get<double>(), w.at("week_index").get<int>());
            }
            auto strings = [&](const char* key) {
                return c.contains(key) ? c[key].get<std::vector<std::string>>()
                                       : std::vector<std::string>{};
            };
            ctx.audit_articles = strings("audit_articles");
            ctx.players = strings("players");
            ctx.reasons = strings("reasons");
            ctx.characterizations = strings("characterizations");
        }
        std::string text = generate_narrative(alert, ctx);
        if (nar_o.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(nar_o.out);
            out << text;
        }
        return 0;
    }

    if (*generate) {
        std::ifstream in(gen_profile);
        if (!in) throw ParseError("cannot open profile file: " + gen_profile);
        json p;
        in >> p;
        SyntheticProfile profile = SyntheticProfile::from_json(p);
        SyntheticCorpus corpus = generate_synthetic(profile, gen_o.seed);
        write_gsr_file(gen_gsr_out, corpus.events);
        write_alert_file(gen_alerts_out, corpus.alerts);
        std::cerr << "wrote " << corpus.events.size() << " events, "
                  << corpus.alerts.size() << " alerts\n";
        return 0;
    }

    if (*pipe) {
        Vocabulary vocab = load_vocab(pipe_o.config);
        std::ifstream in(pipe_input);
        if (!in) throw ParseError("cannot open input file: " + pipe_input);
        std::vector<Envelope> inputs;
        std::string line;
        int n = 0;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            Envelope env;
            env.message_id = "msg-" + std::to_string(++n);
            env.created_at = "1970-01-01";
            env.payload = RawRecord{line};
            inputs.push_back(std::move(env));
        }

        std::vector<StageSpec> stages = {
            {"ingest", StageKind::ingestion,
             [&vocab](const Envelope& e) -> std::vector<Envelope> {
                 Envelope out = e;
                 out.payload = parse_alert_record(
                     json::parse(std::get<RawRecord>(e.payload).text), vocab);
                 return {out};
             }},
            {"enrich", StageKind::enrichment,
             [](const Envelope& e) -> std::vector<Envelope> { return {e}; }},
            {"model", StageKind::modeling,
             [](const Envelope& e) -> std::vector<Envelope> { return {e}; }},
            {"select", StageKind::selection,
             [](const Envelope& e) -> std::vector<Envelope> { return {e}; }},
        };
        PipelineResult result = run_pipeline(stages, inputs);

        std::vector<Alert> alerts;
        for (const auto& env : result.outputs)
            alerts.push_back(std::get<Alert>(env.payload));
        ExpectedQualityModel model;
        alerts = suppress(deduplicate(alerts, model), model, pipe_threshold);

        if (pipe_o.out.empty()) {
            for (const auto& a : alerts) std::cout << alert_to_json(a).dump() << "\n";
        } else {
            write_alert_file(pipe_o.out, alerts);
        }
        std::string dead_path = pipe_dead.empty()
                                    ? (pipe_o.out.empty() ? "dead-letters.jsonl"
                                                          : pipe_o.out + ".dead-letters")
                                    : pipe_dead;
        std::ofstream dead(dead_path);
        for (const auto& d : result.dead_letters) {
            json j;
            j["stage"] = d.stage;
            j["message_id"] = d.message_id;
            j["error"] = d.error;
            dead << j.dump() << "\n";
        }
        std::cerr << alerts.size() << " alerts selected, " << result.dead_letters.size()
                  << " dead-lettered\n";
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const embers::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const embers::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const embers::VocabularyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const embers::DateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
