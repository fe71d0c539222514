#pragma once

// Rank-based significance tests, stochastic-superiority effect sizes,
// rank correlations, and significance clustering of system rankings.

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mtaudit {

enum class TestMethod { Exact, NormalApprox };

std::string to_string(TestMethod m);

struct RankSumResult {
    double u_statistic = 0.0;  // Mann-Whitney U of the first sample
    double z_value = 0.0;      // tie-corrected, continuity-corrected
    double p_value = 1.0;      // two-sided
    TestMethod method = TestMethod::NormalApprox;
};

// Two-sided Wilcoxon rank-sum test. Ties get midranks. The exact null
// distribution is enumerated when n + m <= 20 and there are no ties;
// otherwise the normal approximation with tie-corrected variance and
// continuity correction is used. Throws std::invalid_argument when either
// sample is empty.
RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b);

// One-sided Wilcoxon signed-rank p-value for the alternative that the paired
// differences are shifted above zero. Zero differences are dropped; ties in
// |diff| get midranks. Exact (conditional on the observed ranks) for up to
// 50 nonzero differences, normal approximation beyond. Returns 1.0 when all
// differences are zero.
double signed_rank_test_greater(const std::vector<double>& diffs);

// P(score_a < score_b) + 0.5 * P(score_a = score_b) over segments scored by
// both systems. 0.5 means indistinguishable. The complement identity
// effect_size(a, b) + effect_size(b, a) == 1.0 holds exactly in floating
// point. Throws std::invalid_argument when no segment is shared.
double effect_size(const std::map<std::string, double>& a,
                   const std::map<std::string, double>& b);

struct EffectMatrix {
    std::vector<std::string> system_ids;            // sorted ascending
    std::vector<std::vector<double>> values;        // [i][j]; diagonal is NaN
};

// Pairwise effect sizes for every ordered system pair. A pair without shared
// segments raises std::invalid_argument naming both systems.
EffectMatrix effect_matrix(
    const std::map<std::string, std::map<std::string, double>>& per_system_scores);

// nullopt marks an undefined coefficient (zero variance in either input, or
// an all-tied side for Kendall).
struct Correlations {
    std::optional<double> pearson;
    std::optional<double> spearman;   // Pearson on midranks
    std::optional<double> kendall;    // tau-b, tie-adjusted
};

// Throws std::invalid_argument when sizes differ or fewer than 2 points.
Correlations correlations(const std::vector<double>& x, const std::vector<double>& y);

struct ClusterEntry {
    std::string system_id;
    double mean_score = 0.0;
    int n_segments = 0;
    int cluster_index = 1;             // 1 = top cluster
    bool outperforms_all_lower = false;
};

struct Clustering {
    std::vector<ClusterEntry> entries;  // sorted by mean_score descending
    int n_clusters = 1;
};

// Sorts systems by the mean of their per-segment scores (ties broken by
// system_id) and marks a system when it beats every lower-ranked system:
// rank_sum_test p < alpha and a strictly greater mean, for all of them.
// A cluster boundary falls after each marked system. Throws
// std::invalid_argument on fewer than 2 systems or an empty score map.
Clustering cluster_systems(
    const std::map<std::string, std::map<std::string, double>>& per_system_scores,
    double alpha = 0.05);

}  // namespace mtaudit
