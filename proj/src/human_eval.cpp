#include "mtaudit/human_eval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mtaudit/stats.hpp"

namespace mtaudit {

namespace {

// Judgment pointers grouped by worker, in campaign order.
std::map<std::string, std::vector<const Judgment*>> by_worker(const Campaign& c) {
    std::map<std::string, std::vector<const Judgment*>> groups;
    for (const auto& jm : c.judgments) groups[jm.worker_id].push_back(&jm);
    return groups;
}

std::unordered_set<std::string> segments_in_split(const Campaign& c, Split split) {
    std::unordered_set<std::string> keep;
    for (const auto& s : c.segments) {
        if (split == Split::Both ||
            (split == Split::Forward) == (direction_of(s) == Direction::Forward)) {
            keep.insert(s.segment_id);
        }
    }
    return keep;
}

// z-scores per judgment_id for every worker, honoring nothing but the
// worker's own genuine score distribution.
std::unordered_map<std::string, double> all_worker_z(const Campaign& c) {
    std::unordered_map<std::string, double> z;
    for (const auto& [worker, judgments] : by_worker(c)) {
        std::vector<Judgment> own;
        own.reserve(judgments.size());
        for (const Judgment* j : judgments) own.push_back(*j);
        WorkerZ wz = z_normalize(own);
        z.insert(wz.z_by_judgment.begin(), wz.z_by_judgment.end());
    }
    return z;
}

}  // namespace

std::string to_string(Split s) {
    switch (s) {
        case Split::Forward: return "forward";
        case Split::Reverse: return "reverse";
        default: return "both";
    }
}

std::map<std::string, WorkerQC> qc_filter(const Campaign& c, const QcOptions& opt) {
    std::unordered_map<std::string, const Judgment*> by_id;
    for (const auto& jm : c.judgments) by_id.emplace(jm.judgment_id, &jm);

    std::map<std::string, std::vector<double>> diffs_by_worker;
    for (const auto& jm : c.judgments) diffs_by_worker[jm.worker_id];
    for (const auto& jm : c.judgments) {
        if (jm.kind != JudgmentKind::Degraded || !jm.paired_with) continue;
        auto it = by_id.find(*jm.paired_with);
        if (it == by_id.end()) continue;  // load-time validation rejects this
        diffs_by_worker[jm.worker_id].push_back(
            static_cast<double>(it->second->score - jm.score));
    }

    std::map<std::string, WorkerQC> out;
    for (const auto& [worker, diffs] : diffs_by_worker) {
        WorkerQC qc;
        qc.worker_id = worker;
        qc.n_pairs = static_cast<int>(diffs.size());
        qc.p_value = diffs.empty() ? 1.0 : signed_rank_test_greater(diffs);
        qc.passed = qc.n_pairs >= opt.min_pairs && qc.p_value < opt.qc_alpha;
        out.emplace(worker, std::move(qc));
    }
    return out;
}

WorkerZ z_normalize(std::span<const Judgment> judgments_of_one_worker) {
    WorkerZ out;
    double sum = 0.0;
    int n = 0;
    for (const auto& jm : judgments_of_one_worker) {
        if (jm.kind != JudgmentKind::Genuine) continue;
        sum += jm.score;
        ++n;
    }
    if (n < 2) {
        out.constant_scorer = true;
        out.mean = n == 1 ? sum : 0.0;
        return out;
    }
    out.mean = sum / n;
    double ss = 0.0;
    for (const auto& jm : judgments_of_one_worker) {
        if (jm.kind != JudgmentKind::Genuine) continue;
        const double d = jm.score - out.mean;
        ss += d * d;
    }
    out.sd = std::sqrt(ss / (n - 1));
    if (out.sd == 0.0) {
        out.constant_scorer = true;
        return out;
    }
    for (const auto& jm : judgments_of_one_worker) {
        if (jm.kind == JudgmentKind::Degraded) continue;
        out.z_by_judgment.emplace(jm.judgment_id, (jm.score - out.mean) / out.sd);
    }
    return out;
}

std::vector<SystemScore> system_scores(const Campaign& c,
                                       const std::map<std::string, WorkerQC>& qc,
                                       Split split) {
    const auto keep = segments_in_split(c, split);
    const auto z = all_worker_z(c);

    struct Acc {
        double raw_sum = 0.0;
        double z_sum = 0.0;
        int z_count = 0;
        int N = 0;
        std::unordered_set<std::string> segments;
    };
    std::map<std::string, Acc> acc;
    for (const auto& o : c.outputs) acc[o.system_id];

    for (const auto& jm : c.judgments) {
        if (jm.kind == JudgmentKind::Degraded) continue;
        if (!keep.count(jm.segment_id)) continue;
        auto qit = qc.find(jm.worker_id);
        if (qit == qc.end() || !qit->second.passed) continue;
        Acc& a = acc[jm.system_id];
        a.raw_sum += jm.score;
        a.N += 1;
        a.segments.insert(jm.segment_id);
        auto zit = z.find(jm.judgment_id);
        if (zit != z.end()) {
            a.z_sum += zit->second;
            a.z_count += 1;
        }
    }

    std::vector<SystemScore> out;
    for (const auto& [id, a] : acc) {
        SystemScore s;
        s.system_id = id;
        s.n = static_cast<int>(a.segments.size());
        s.N = a.N;
        if (a.N > 0) s.avg_raw = a.raw_sum / a.N;
        if (a.z_count > 0) s.avg_z = a.z_sum / a.z_count;
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const SystemScore& a, const SystemScore& b) {
        if (a.avg_z.has_value() != b.avg_z.has_value()) return a.avg_z.has_value();
        if (a.avg_z && b.avg_z && *a.avg_z != *b.avg_z) return *a.avg_z > *b.avg_z;
        return a.system_id < b.system_id;
    });
    return out;
}

namespace {

std::map<std::string, double> segment_means(const Campaign& c,
                                            const std::map<std::string, WorkerQC>& qc,
                                            const std::string& system_id, Split split,
                                            bool use_z) {
    const auto keep = segments_in_split(c, split);
    const auto z = use_z ? all_worker_z(c) : std::unordered_map<std::string, double>{};
    std::map<std::string, std::pair<double, int>> sums;
    for (const auto& jm : c.judgments) {
        if (jm.system_id != system_id || jm.kind == JudgmentKind::Degraded) continue;
        if (!keep.count(jm.segment_id)) continue;
        auto qit = qc.find(jm.worker_id);
        if (qit == qc.end() || !qit->second.passed) continue;
        if (use_z) {
            auto zit = z.find(jm.judgment_id);
            if (zit == z.end()) continue;
            auto& [sum, count] = sums[jm.segment_id];
            sum += zit->second;
            count += 1;
        } else {
            auto& [sum, count] = sums[jm.segment_id];
            sum += jm.score;
            count += 1;
        }
    }
    std::map<std::string, double> out;
    for (const auto& [seg, sc] : sums) out[seg] = sc.first / sc.second;
    return out;
}

}  // namespace

std::map<std::string, double> segment_scores(const Campaign& c,
                                             const std::map<std::string, WorkerQC>& qc,
                                             const std::string& system_id, Split split) {
    return segment_means(c, qc, system_id, split, /*use_z=*/false);
}

std::map<std::string, double> segment_scores_z(const Campaign& c,
                                               const std::map<std::string, WorkerQC>& qc,
                                               const std::string& system_id, Split split) {
    return segment_means(c, qc, system_id, split, /*use_z=*/true);
}

}  // namespace mtaudit
