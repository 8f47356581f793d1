// Canonical alert/event data model, vocabularies, and JSONL (de)serialization.
#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "embers/date.hpp"

namespace embers {

using json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VocabularyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Case-folds, trims, strips common Latin diacritics, and collapses internal
// whitespace. Idempotent.
inline std::string normalize_place_name(const std::string& raw) {
    // Two-byte UTF-8 sequences for Latin-1 supplement / Latin extended-A
    // letters, transliterated to ASCII.
    static const std::map<std::string, std::string> kTranslit = {
        {"à", "a"}, {"á", "a"}, {"â", "a"}, {"ã", "a"},
        {"ä", "a"}, {"å", "a"}, {"À", "a"}, {"Á", "a"},
        {"Â", "a"}, {"Ã", "a"}, {"Ä", "a"}, {"Å", "a"},
        {"ç", "c"}, {"Ç", "c"},
        {"è", "e"}, {"é", "e"}, {"ê", "e"}, {"ë", "e"},
        {"È", "e"}, {"É", "e"}, {"Ê", "e"}, {"Ë", "e"},
        {"ì", "i"}, {"í", "i"}, {"î", "i"}, {"ï", "i"},
        {"Ì", "i"}, {"Í", "i"}, {"Î", "i"}, {"Ï", "i"},
        {"ñ", "n"}, {"Ñ", "n"},
        {"ò", "o"}, {"ó", "o"}, {"ô", "o"}, {"õ", "o"},
        {"ö", "o"}, {"Ò", "o"}, {"Ó", "o"}, {"Ô", "o"},
        {"Õ", "o"}, {"Ö", "o"},
        {"ù", "u"}, {"ú", "u"}, {"û", "u"}, {"ü", "u"},
        {"Ù", "u"}, {"Ú", "u"}, {"Û", "u"}, {"Ü", "u"},
        {"ý", "y"}, {"Ý", "y"},
    };
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    auto push = [&](char c) {
        if (c == ' ') {
            if (!out.empty()) pending_space = true;
            return;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += c;
    };
    for (size_t i = 0; i < raw.size();) {
        unsigned char c = static_cast<unsigned char>(raw[i]);
        if (c < 0x80) {
            if (c >= 'A' && c <= 'Z')
                push(static_cast<char>(c - 'A' + 'a'));
            else if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
                push(' ');
            else
                push(static_cast<char>(c));
            ++i;
            continue;
        }
        size_t len = (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : 4;
        len = std::min(len, raw.size() - i);
        std::string seq = raw.substr(i, len);
        auto it = kTranslit.find(seq);
        if (it != kTranslit.end())
            for (char t : it->second) push(t);
        else
            for (char t : seq) push(t);
        i += len;
    }
    return out;
}

// Run-level categorical vocabularies; closed per run.
struct Vocabulary {
    std::vector<std::string> countries;
    std::vector<std::string> event_classes;
    std::vector<std::string> populations;

    static Vocabulary from_json(const json& j) {
        Vocabulary v;
        v.countries = j.at("countries").get<std::vector<std::string>>();
        v.event_classes = j.at("event_classes").get<std::vector<std::string>>();
        v.populations = j.at("populations").get<std::vector<std::string>>();
        return v;
    }

    static Vocabulary load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open config file: " + path);
        json j;
        in >> j;
        return from_json(j);
    }

    // A permissive default for tests and synthetic corpora.
    static Vocabulary standard() {
        Vocabulary v;
        v.countries = {"Argentina", "Brazil",   "Chile",  "Colombia",
                       "Ecuador",   "Mexico",   "Paraguay", "Uruguay",
                       "Venezuela"};
        v.event_classes = {"employment", "housing", "energy",
                           "government-policy", "economic", "other"};
        v.populations = {"general-population", "business", "labor",
                         "education", "agricultural", "ethnic", "religious",
                         "medical"};
        return v;
    }

    std::string resolve_country(const std::string& raw) const {
        std::string n = normalize_place_name(raw);
        for (const auto& c : countries)
            if (normalize_place_name(c) == n) return c;
        throw VocabularyError("unknown country: '" + raw + "'");
    }
    std::string resolve_event_class(const std::string& raw) const {
        for (const auto& c : event_classes)
            if (c == raw) return c;
        throw VocabularyError("unknown event class: '" + raw + "'");
    }
    std::string resolve_population(const std::string& raw) const {
        for (const auto& p : populations)
            if (p == raw) return p;
        throw VocabularyError("unknown population group: '" + raw + "'");
    }
};

struct Location {
    std::string country;  // canonical name from the vocabulary
    std::string state;    // may be empty
    std::string city;     // may be empty

    friend bool operator==(const Location& a, const Location& b) = default;
};

struct EventType {
    std::string event_class;
    bool violent = false;

    friend bool operator==(const EventType& a, const EventType& b) = default;
};

struct Population {
    std::string group;

    friend bool operator==(const Population& a, const Population& b) = default;
};

struct Alert {
    std::string id;
    Date issued_at;       // t1
    Date predicted_date;  // t3
    Location location;
    Population population;
    EventType event_type;
    double probability = 0.0;
    std::string model;
    std::set<std::string> sources;

    // In-memory annotation from the selection stage; not part of the wire
    // record.
    std::optional<double> expected_quality;

    friend bool operator==(const Alert& a, const Alert& b) {
        return a.id == b.id && a.issued_at == b.issued_at &&
               a.predicted_date == b.predicted_date &&
               a.location == b.location && a.population == b.population &&
               a.event_type == b.event_type &&
               a.probability == b.probability && a.model == b.model &&
               a.sources == b.sources;
    }
};

struct GsrEvent {
    std::string id;
    Date event_date;   // t2
    Date report_date;  // t4
    Location location;
    Population population;
    EventType event_type;

    friend bool operator==(const GsrEvent& a, const GsrEvent& b) = default;
};

namespace detail {

inline const json& require_field(const json& rec, const char* name) {
    auto it = rec.find(name);
    if (it == rec.end() || it->is_null())
        throw ParseError(std::string("missing required field '") + name + "'");
    return *it;
}

inline std::string get_string(const json& rec, const char* name) {
    const json& f = require_field(rec, name);
    if (!f.is_string())
        throw ParseError(std::string("field '") + name + "' must be a string");
    return f.get<std::string>();
}

inline Date get_date(const json& rec, const char* name) {
    try {
        return Date::parse(get_string(rec, name));
    } catch (const DateError& e) {
        throw ParseError(std::string("field '") + name + "': " + e.what());
    }
}

}  // namespace detail

inline Alert parse_alert_record(const json& rec, const Vocabulary& vocab) {
    Alert a;
    a.id = detail::get_string(rec, "id");
    a.issued_at = detail::get_date(rec, "issued_at");
    a.predicted_date = detail::get_date(rec, "predicted_date");
    a.location.country = vocab.resolve_country(detail::get_string(rec, "country"));
    a.location.state = detail::get_string(rec, "state");
    a.location.city = detail::get_string(rec, "city");
    a.population.group = vocab.resolve_population(detail::get_string(rec, "population"));
    a.event_type.event_class = vocab.resolve_event_class(detail::get_string(rec, "event_class"));
    const json& v = detail::require_field(rec, "violent");
    if (!v.is_boolean()) throw ParseError("field 'violent' must be a boolean");
    a.event_type.violent = v.get<bool>();
    const json& p = detail::require_field(rec, "probability");
    if (!p.is_number()) throw ParseError("field 'probability' must be a number");
    a.probability = p.get<double>();
    if (a.probability < 0.0 || a.probability > 1.0)
        throw ValidationError("probability out of range [0,1] in alert '" + a.id + "'");
    a.model = detail::get_string(rec, "model");
    const json& s = detail::require_field(rec, "sources");
    if (!s.is_array()) throw ParseError("field 'sources' must be an array");
    for (const auto& tag : s) a.sources.insert(tag.get<std::string>());
    if (a.issued_at > a.predicted_date.plus_days(30))
        throw ValidationError("issued_at more than 30 days after predicted_date in alert '" + a.id + "'");
    return a;
}

inline GsrEvent parse_gsr_record(const json& rec, const Vocabulary& vocab) {
    GsrEvent e;
    e.id = detail::get_string(rec, "id");
    e.event_date = detail::get_date(rec, "event_date");
    if (rec.contains("report_date") && !rec["report_date"].is_null())
        e.report_date = detail::get_date(rec, "report_date");
    else
        e.report_date = e.event_date.plus_days(1);  // next-day reporting default
    if (e.report_date < e.event_date)
        throw ValidationError("report_date precedes event_date in event '" + e.id + "'");
    e.location.country = vocab.resolve_country(detail::get_string(rec, "country"));
    e.location.state = detail::get_string(rec, "state");
    e.location.city = detail::get_string(rec, "city");
    e.population.group = vocab.resolve_population(detail::get_string(rec, "population"));
    e.event_type.event_class = vocab.resolve_event_class(detail::get_string(rec, "event_class"));
    const json& v = detail::require_field(rec, "violent");
    if (!v.is_boolean()) throw ParseError("field 'violent' must be a boolean");
    e.event_type.violent = v.get<bool>();
    return e;
}

inline json alert_to_json(const Alert& a) {
    json j;
    j["id"] = a.id;
    j["issued_at"] = a.issued_at.to_string();
    j["predicted_date"] = a.predicted_date.to_string();
    j["country"] = a.location.country;
    j["state"] = a.location.state;
    j["city"] = a.location.city;
    j["population"] = a.population.group;
    j["event_class"] = a.event_type.event_class;
    j["violent"] = a.event_type.violent;
    j["probability"] = a.probability;
    j["model"] = a.model;
    j["sources"] = a.sources;
    return j;
}

inline json gsr_event_to_json(const GsrEvent& e) {
    json j;
    j["id"] = e.id;
    j["event_date"] = e.event_date.to_string();
    j["report_date"] = e.report_date.to_string();
    j["country"] = e.location.country;
    j["state"] = e.location.state;
    j["city"] = e.location.city;
    j["population"] = e.population.group;
    j["event_class"] = e.event_type.event_class;
    j["violent"] = e.event_type.violent;
    return j;
}

namespace detail {

template <class Record, class ParseFn>
std::vector<Record> load_jsonl(std::istream& in, const std::string& what,
                               ParseFn parse) {
    std::vector<Record> out;
    std::unordered_set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(what + " line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            Record r = parse(rec);
            if (!seen.insert(r.id).second)
                throw ValidationError("duplicate id '" + r.id + "'");
            out.push_back(std::move(r));
        } catch (const std::runtime_error& e) {
            throw ParseError(what + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace detail

inline std::vector<Alert> load_alert_corpus(std::istream& in, const Vocabulary& vocab) {
    return detail::load_jsonl<Alert>(in, "alert corpus", [&](const json& r) {
        return parse_alert_record(r, vocab);
    });
}

inline std::vector<GsrEvent> load_gsr_corpus(std::istream& in, const Vocabulary& vocab) {
    return detail::load_jsonl<GsrEvent>(in, "gsr corpus", [&](const json& r) {
        return parse_gsr_record(r, vocab);
    });
}

inline std::vector<Alert> load_alert_file(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open alert file: " + path);
    return load_alert_corpus(in, vocab);
}

inline std::vector<GsrEvent> load_gsr_file(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open gsr file: " + path);
    return load_gsr_corpus(in, vocab);
}

}  // namespace embers
