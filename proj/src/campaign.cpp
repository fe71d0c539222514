#include "mtaudit/campaign.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mtaudit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ValidationError(where + ": " + what);
}

json parse_line(const std::string& path, int line_no, const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        fail(path + " line " + std::to_string(line_no), "malformed JSON object");
    }
    return j;
}

std::string require_string(const json& j, const char* key,
                           const std::string& where) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        fail(where, std::string("missing or non-string field \"") + key + "\"");
    }
    return it->get<std::string>();
}

int require_int(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) {
        fail(where, std::string("missing or non-integer field \"") + key + "\"");
    }
    return it->get<int>();
}

std::optional<std::string> optional_string(const json& j, const char* key,
                                           const std::string& where) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(where, std::string("non-string field \"") + key + "\"");
    return it->get<std::string>();
}

// Everything not in `known` survives round-trips via the extra blob.
json take_extra(json j, std::initializer_list<const char*> known) {
    for (const char* k : known) j.erase(k);
    return j;
}

JudgmentKind parse_kind(const std::string& s, const std::string& where) {
    if (s == "GENUINE") return JudgmentKind::Genuine;
    if (s == "DEGRADED") return JudgmentKind::Degraded;
    if (s == "REPEAT") return JudgmentKind::Repeat;
    fail(where, "unknown kind \"" + s + "\"");
}

// Applies `fn` to each nonempty line. Blank lines are permitted so a
// trailing newline never matters.
template <typename Fn>
void for_each_line(const std::string& path, Fn fn) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        fn(line_no, line);
    }
}

json segment_to_json(const Segment& s) {
    json j = s.extra.is_object() ? s.extra : json::object();
    j["segment_id"] = s.segment_id;
    j["doc_id"] = s.doc_id;
    j["position"] = s.position;
    j["source_lang"] = s.source_lang;
    j["target_lang"] = s.target_lang;
    j["origin_lang"] = s.origin_lang;
    if (s.source_text) j["source"] = *s.source_text;
    j["reference"] = s.reference_text;
    return j;
}

json output_to_json(const SystemOutput& o) {
    json j = o.extra.is_object() ? o.extra : json::object();
    j["system_id"] = o.system_id;
    j["segment_id"] = o.segment_id;
    j["text"] = o.text;
    return j;
}

json judgment_to_json(const Judgment& jm) {
    json j = jm.extra.is_object() ? jm.extra : json::object();
    j["judgment_id"] = jm.judgment_id;
    j["worker_id"] = jm.worker_id;
    j["system_id"] = jm.system_id;
    j["segment_id"] = jm.segment_id;
    j["kind"] = to_string(jm.kind);
    if (jm.paired_with) j["paired_with"] = *jm.paired_with;
    j["score"] = jm.score;
    return j;
}

}  // namespace

std::string to_string(Direction d) {
    return d == Direction::Forward ? "forward" : "reverse";
}

std::string to_string(JudgmentKind k) {
    switch (k) {
        case JudgmentKind::Genuine: return "GENUINE";
        case JudgmentKind::Degraded: return "DEGRADED";
        default: return "REPEAT";
    }
}

Direction direction_of(const Segment& s) {
    return s.origin_lang == s.source_lang ? Direction::Forward : Direction::Reverse;
}

std::map<Direction, std::set<std::string>> split_segments(const Campaign& c) {
    std::map<Direction, std::set<std::string>> out;
    out[Direction::Forward];
    out[Direction::Reverse];
    for (const auto& s : c.segments) out[direction_of(s)].insert(s.segment_id);
    return out;
}

void validate(const Campaign& c) {
    std::unordered_map<std::string, const Segment*> seg_by_id;
    for (const auto& s : c.segments) {
        const std::string where = "segment \"" + s.segment_id + "\"";
        if (s.segment_id.empty()) fail("segment", "empty segment_id");
        if (!seg_by_id.emplace(s.segment_id, &s).second) {
            fail(where, "duplicate segment_id");
        }
        if (s.position < 0) fail(where, "negative position");
        if (s.origin_lang != s.source_lang && s.origin_lang != s.target_lang) {
            fail(where, "origin_lang \"" + s.origin_lang +
                            "\" is neither source_lang nor target_lang");
        }
        if (s.source_lang != c.source_lang || s.target_lang != c.target_lang) {
            fail(where, "language pair " + s.source_lang + "-" + s.target_lang +
                            " differs from campaign pair " + c.source_lang + "-" +
                            c.target_lang);
        }
    }
    std::unordered_set<std::string> doc_positions;
    for (const auto& s : c.segments) {
        std::string key = s.doc_id + "\x1f" + std::to_string(s.position);
        if (!doc_positions.insert(key).second) {
            fail("segment \"" + s.segment_id + "\"",
                 "duplicate position " + std::to_string(s.position) + " in doc \"" +
                     s.doc_id + "\"");
        }
    }

    std::unordered_set<std::string> output_keys;
    for (const auto& o : c.outputs) {
        const std::string where =
            "output (" + o.system_id + ", " + o.segment_id + ")";
        if (o.system_id.empty()) fail(where, "empty system_id");
        if (!seg_by_id.count(o.segment_id)) {
            fail(where, "output references unknown segment_id \"" + o.segment_id + "\"");
        }
        if (!output_keys.insert(o.system_id + "\x1f" + o.segment_id).second) {
            fail(where, "duplicate (system_id, segment_id)");
        }
    }

    std::unordered_map<std::string, const Judgment*> judgment_by_id;
    for (const auto& jm : c.judgments) {
        if (!judgment_by_id.emplace(jm.judgment_id, &jm).second) {
            fail("judgment \"" + jm.judgment_id + "\"", "duplicate judgment_id");
        }
    }
    for (const auto& jm : c.judgments) {
        const std::string where = "judgment \"" + jm.judgment_id + "\"";
        if (jm.score < 0 || jm.score > 100) {
            fail(where, "score " + std::to_string(jm.score) + " out of range [0, 100]");
        }
        if (!seg_by_id.count(jm.segment_id)) {
            fail(where, "references unknown segment_id \"" + jm.segment_id + "\"");
        }
        if (!output_keys.count(jm.system_id + "\x1f" + jm.segment_id)) {
            fail(where, "no system output for (" + jm.system_id + ", " +
                            jm.segment_id + ")");
        }
        if (jm.kind == JudgmentKind::Degraded) {
            if (!jm.paired_with) fail(where, "Degraded judgment without paired_with");
            auto it = judgment_by_id.find(*jm.paired_with);
            if (it == judgment_by_id.end()) {
                fail(where, "paired_with references unknown judgment \"" +
                                *jm.paired_with + "\"");
            }
            const Judgment& g = *it->second;
            if (g.kind != JudgmentKind::Genuine) {
                fail(where, "paired_with \"" + g.judgment_id + "\" is not Genuine");
            }
            if (g.worker_id != jm.worker_id || g.system_id != jm.system_id ||
                g.segment_id != jm.segment_id) {
                fail(where, "paired_with \"" + g.judgment_id +
                                "\" differs in worker, system, or segment");
            }
        }
    }
}

Campaign load_campaign(const std::string& segments_path,
                       const std::string& outputs_path,
                       const std::string& judgments_path,
                       const std::string& name) {
    Campaign c;
    for_each_line(segments_path, [&](int line_no, const std::string& line) {
        const std::string where = segments_path + " line " + std::to_string(line_no);
        json j = parse_line(segments_path, line_no, line);
        Segment s;
        s.segment_id = require_string(j, "segment_id", where);
        s.doc_id = require_string(j, "doc_id", where);
        s.position = require_int(j, "position", where);
        s.source_lang = require_string(j, "source_lang", where);
        s.target_lang = require_string(j, "target_lang", where);
        s.origin_lang = require_string(j, "origin_lang", where);
        s.source_text = optional_string(j, "source", where);
        s.reference_text = require_string(j, "reference", where);
        s.extra = take_extra(std::move(j),
                             {"segment_id", "doc_id", "position", "source_lang",
                              "target_lang", "origin_lang", "source", "reference"});
        c.segments.push_back(std::move(s));
    });
    for_each_line(outputs_path, [&](int line_no, const std::string& line) {
        const std::string where = outputs_path + " line " + std::to_string(line_no);
        json j = parse_line(outputs_path, line_no, line);
        SystemOutput o;
        o.system_id = require_string(j, "system_id", where);
        o.segment_id = require_string(j, "segment_id", where);
        o.text = require_string(j, "text", where);
        o.extra = take_extra(std::move(j), {"system_id", "segment_id", "text"});
        c.outputs.push_back(std::move(o));
    });
    for_each_line(judgments_path, [&](int line_no, const std::string& line) {
        const std::string where = judgments_path + " line " + std::to_string(line_no);
        json j = parse_line(judgments_path, line_no, line);
        Judgment jm;
        jm.judgment_id = require_string(j, "judgment_id", where);
        jm.worker_id = require_string(j, "worker_id", where);
        jm.system_id = require_string(j, "system_id", where);
        jm.segment_id = require_string(j, "segment_id", where);
        jm.kind = parse_kind(require_string(j, "kind", where), where);
        jm.paired_with = optional_string(j, "paired_with", where);
        jm.score = require_int(j, "score", where);
        jm.extra = take_extra(std::move(j),
                              {"judgment_id", "worker_id", "system_id", "segment_id",
                               "kind", "paired_with", "score"});
        c.judgments.push_back(std::move(jm));
    });

    if (c.segments.empty()) throw ValidationError(segments_path + ": no segments");
    c.source_lang = c.segments.front().source_lang;
    c.target_lang = c.segments.front().target_lang;
    c.name = name.empty() ? c.source_lang + "-" + c.target_lang : name;
    validate(c);
    return c;
}

std::string segments_to_jsonl(const Campaign& c) {
    std::ostringstream out;
    for (const auto& s : c.segments) out << segment_to_json(s).dump() << '\n';
    return out.str();
}

std::string outputs_to_jsonl(const Campaign& c) {
    std::ostringstream out;
    for (const auto& o : c.outputs) out << output_to_json(o).dump() << '\n';
    return out.str();
}

std::string judgments_to_jsonl(const Campaign& c) {
    std::ostringstream out;
    for (const auto& jm : c.judgments) out << judgment_to_json(jm).dump() << '\n';
    return out.str();
}

void save_campaign(const Campaign& c,
                   const std::string& segments_path,
                   const std::string& outputs_path,
                   const std::string& judgments_path) {
    auto write = [](const std::string& path, const std::string& content) {
        std::ofstream out(path);
        if (!out) throw ValidationError("cannot write " + path);
        out << content;
    };
    write(segments_path, segments_to_jsonl(c));
    write(outputs_path, outputs_to_jsonl(c));
    write(judgments_path, judgments_to_jsonl(c));
}

}  // namespace mtaudit
