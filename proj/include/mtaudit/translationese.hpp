#pragma once

// Forward/reverse split diagnostics: per-system scores on each split, the
// reverse-minus-forward gap summarized per language pair, pairwise relative
// differences for scatter plots, and split ranking agreement.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtaudit/campaign.hpp"
#include "mtaudit/human_eval.hpp"
#include "mtaudit/metrics.hpp"
#include "mtaudit/stats.hpp"

namespace mtaudit {

enum class SplitMetric { DaRaw, DaZ, Bleu, UnigramPrecision };

std::string to_string(SplitMetric m);

struct SplitScores {
    std::string system_id;
    SplitMetric metric = SplitMetric::DaRaw;
    std::optional<double> forward;
    std::optional<double> reverse;
    std::optional<double> diff;   // reverse - forward, defined when both sides are
};

// One entry per system (sorted by system_id). A side with no scorable
// segments stays empty. DA metrics honor the QC map; BLEU metrics use the
// given tokenizer scheme.
std::vector<SplitScores> split_scores(const Campaign& c,
                                      const std::map<std::string, WorkerQC>& qc,
                                      SplitMetric metric,
                                      TokenizerScheme scheme = TokenizerScheme::Default);

struct RFSummary {
    std::string language_pair;    // e.g. "zh-en"
    double pct_r_gt_f = 0.0;      // share of systems scoring higher on reverse
    double pct_f_gt_r = 0.0;
    std::optional<double> mean_diff;  // mean reverse - forward
    std::optional<double> sd_diff;    // sample SD, needs >= 2 systems
    int n_systems = 0;            // systems with a defined diff
};

// Summarizes diffs per language pair. Systems without a defined diff are
// skipped; exact ties land in neither percentage bucket. Pairs into English
// sort first, then ascending pct_r_gt_f, then name. Language pairs with no
// defined diff at all are dropped.
std::vector<RFSummary> rf_summary(
    const std::map<std::string, std::vector<SplitScores>>& by_language_pair);

struct PairDiff {
    std::string system_a;  // lexicographically before system_b
    std::string system_b;
    std::optional<double> forward_diff;  // forward_a - forward_b
    std::optional<double> reverse_diff;
};

struct QuadrantCounts {
    int pos_pos = 0;  // a beats b on both splits
    int pos_neg = 0;  // a beats b forward, loses reverse
    int neg_pos = 0;
    int neg_neg = 0;
    int on_axis = 0;  // either diff exactly zero or undefined
};

struct PairDiffReport {
    std::vector<PairDiff> pairs;  // all k*(k-1)/2 unordered pairs
    QuadrantCounts quadrants;
};

PairDiffReport pair_diffs(const std::vector<SplitScores>& scores);

// Correlation between forward and reverse scores over systems with both
// defined. Throws std::invalid_argument with fewer than 3 such systems.
Correlations ranking_correlation(const std::vector<SplitScores>& scores);

}  // namespace mtaudit
