#pragma once

// Direct-assessment aggregation: per-worker quality control against the
// degraded items, per-worker z-standardization, and system/segment score
// tables that keep distinct segments (n) separate from judgment counts (N).

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtaudit/campaign.hpp"

namespace mtaudit {

struct WorkerQC {
    std::string worker_id;
    int n_pairs = 0;        // degraded/genuine pairs found for this worker
    double p_value = 1.0;   // one-sided signed-rank, genuine above degraded
    bool passed = false;
};

struct QcOptions {
    double qc_alpha = 0.05;
    int min_pairs = 10;     // fewer pairs is an automatic fail
};

// One entry per worker appearing in the judgments. A worker passes when the
// signed-rank p-value on (genuine - degraded) score pairs is below qc_alpha
// and at least min_pairs pairs were available.
std::map<std::string, WorkerQC> qc_filter(const Campaign& c, const QcOptions& opt = {});

struct WorkerZ {
    // Mean/SD are computed from the worker's Genuine judgments only; the
    // resulting transform is applied to Genuine and Repeat judgments alike.
    bool constant_scorer = false;  // fewer than 2 genuine judgments or zero spread
    double mean = 0.0;
    double sd = 0.0;               // sample SD (n - 1)
    std::unordered_map<std::string, double> z_by_judgment;  // judgment_id -> z
};

// All judgments passed in must belong to a single worker.
WorkerZ z_normalize(std::span<const Judgment> judgments_of_one_worker);

enum class Split { Forward, Reverse, Both };

std::string to_string(Split s);

struct SystemScore {
    std::string system_id;
    std::optional<double> avg_raw;  // 0..100 scale
    std::optional<double> avg_z;    // missing when no z-scored judgment is available
    int n = 0;                      // distinct segments judged
    int N = 0;                      // judgments aggregated
};

// Average scores per system over Genuine and Repeat judgments from workers
// that passed QC, restricted to segments in the requested split. Degraded
// judgments never contribute. Repeats raise N but not n. Sorted by avg_z
// descending, systems without an avg_z last, ties broken by system_id.
std::vector<SystemScore> system_scores(const Campaign& c,
                                       const std::map<std::string, WorkerQC>& qc,
                                       Split split);

// Per-segment mean raw score for one system, same filtering rules as
// system_scores. Segments without a usable judgment are absent.
std::map<std::string, double> segment_scores(const Campaign& c,
                                             const std::map<std::string, WorkerQC>& qc,
                                             const std::string& system_id,
                                             Split split);

// Per-segment mean z-score for one system, same filtering rules. Judgments
// from constant scorers carry no z and are skipped.
std::map<std::string, double> segment_scores_z(const Campaign& c,
                                               const std::map<std::string, WorkerQC>& qc,
                                               const std::string& system_id,
                                               Split split);

}  // namespace mtaudit
