#pragma once

// Campaign data model: evaluated segments, system outputs, and human
// judgments, together with JSONL (de)serialization and cross-record
// validation. A segment's origin language decides whether it belongs to
// the forward split (translated out of its original language) or the
// reverse split (the evaluated text is the original, the source was
// itself produced by translation).

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace mtaudit {

// Raised for any malformed or inconsistent campaign data. The message names
// the offending file/line or record id.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Direction { Forward, Reverse };

std::string to_string(Direction d);

struct Segment {
    std::string segment_id;
    std::string doc_id;
    int position = 0;             // 0-based order of the segment inside its document
    std::string source_lang;
    std::string target_lang;
    std::string origin_lang;      // must equal source_lang or target_lang
    std::optional<std::string> source_text;
    std::string reference_text;
    nlohmann::json extra = nlohmann::json::object();  // unknown fields, preserved on round-trip

    bool operator==(const Segment&) const = default;
};

struct SystemOutput {
    std::string system_id;
    std::string segment_id;
    std::string text;
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const SystemOutput&) const = default;
};

// Genuine: a normal judgment. Degraded: a quality-control item whose text was
// deliberately damaged, paired with the genuine judgment it was derived from.
// Repeat: a second look at the same item by the same worker.
enum class JudgmentKind { Genuine, Degraded, Repeat };

std::string to_string(JudgmentKind k);

struct Judgment {
    std::string judgment_id;
    std::string worker_id;
    std::string system_id;
    std::string segment_id;
    JudgmentKind kind = JudgmentKind::Genuine;
    std::optional<std::string> paired_with;  // required for Degraded
    int score = 0;                           // direct-assessment score, 0..100
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const Judgment&) const = default;
};

struct Campaign {
    std::string name;
    std::string source_lang;
    std::string target_lang;
    std::vector<Segment> segments;
    std::vector<SystemOutput> outputs;
    std::vector<Judgment> judgments;

    bool operator==(const Campaign&) const = default;
};

// Forward iff the segment originated in the campaign's source language.
Direction direction_of(const Segment& s);

// Segment ids grouped by direction. Both keys are always present.
std::map<Direction, std::set<std::string>> split_segments(const Campaign& c);

// Checks every structural invariant and throws ValidationError on the first
// violation: duplicate ids, dangling references, origin_lang outside the
// language pair, duplicate positions within a document, scores outside
// [0, 100], Degraded judgments without a matching Genuine counterpart
// (same worker, system, and segment), and mixed language pairs.
void validate(const Campaign& c);

// Reads the three JSONL files, assembles a Campaign, and validates it.
// `name` defaults to "<source_lang>-<target_lang>".
Campaign load_campaign(const std::string& segments_path,
                       const std::string& outputs_path,
                       const std::string& judgments_path,
                       const std::string& name = "");

// JSONL serialization, one record per line, unknown fields merged back in.
std::string segments_to_jsonl(const Campaign& c);
std::string outputs_to_jsonl(const Campaign& c);
std::string judgments_to_jsonl(const Campaign& c);

void save_campaign(const Campaign& c,
                   const std::string& segments_path,
                   const std::string& outputs_path,
                   const std::string& judgments_path);

}  // namespace mtaudit
