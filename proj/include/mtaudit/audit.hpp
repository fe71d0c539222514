#pragma once

// Campaign audit: a nine-item readiness checklist. Items 1 (test data
// direction), 6 (translation sample size n and power), 7 (judgment sample
// size N and worker QC), 8 (overall statistic), and 9 (significance
// clustering) are computed from the data; items 2-5 (judge reliability,
// testing level, language pairs, domain) are echoed from declarations.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtaudit/campaign.hpp"
#include "mtaudit/human_eval.hpp"

namespace mtaudit {

enum class AuditStatus { Pass, Warn, Fail, Declared, NotEvaluated };

std::string to_string(AuditStatus s);

struct AuditItem {
    int number = 0;         // 1..9
    std::string name;
    AuditStatus status = AuditStatus::NotEvaluated;
    std::string detail;     // human-readable evidence for the status
};

struct AuditOptions {
    QcOptions qc;
    double alpha = 0.05;
    double target_power = 0.8;
    int grid_step = 55;
    int max_n = 10000;
    // Declarations for items 2-5; an absent entry reports "not evaluated".
    std::optional<std::string> judge_reliability;
    std::optional<std::string> testing_level;
    std::optional<std::string> language_pairs;  // defaults to the campaign's pair
    std::optional<std::string> domain;
};

struct AuditReport {
    std::string campaign_name;
    std::vector<AuditItem> items;  // exactly nine, in checklist order
};

AuditReport audit_campaign(const Campaign& c, const AuditOptions& opt = {});

}  // namespace mtaudit
