#include "mtaudit/translationese.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace mtaudit {

namespace {

std::optional<double> bleu_side(const Campaign& c, const std::set<std::string>& segs,
                                const std::string& system_id, SplitMetric metric,
                                TokenizerScheme scheme) {
    std::unordered_map<std::string, const Segment*> seg_by_id;
    for (const auto& s : c.segments) seg_by_id.emplace(s.segment_id, &s);
    std::vector<SentencePair> pairs;
    for (const auto& o : c.outputs) {
        if (o.system_id != system_id || !segs.count(o.segment_id)) continue;
        const Segment* s = seg_by_id.at(o.segment_id);
        pairs.emplace_back(tokenize(o.text, scheme), tokenize(s->reference_text, scheme));
    }
    if (pairs.empty()) return std::nullopt;
    return metric == SplitMetric::Bleu ? corpus_bleu(pairs).score
                                       : unigram_precision(pairs);
}

}  // namespace

std::string to_string(SplitMetric m) {
    switch (m) {
        case SplitMetric::DaRaw: return "da_raw";
        case SplitMetric::DaZ: return "da_z";
        case SplitMetric::Bleu: return "bleu";
        default: return "unigram";
    }
}

std::vector<SplitScores> split_scores(const Campaign& c,
                                      const std::map<std::string, WorkerQC>& qc,
                                      SplitMetric metric, TokenizerScheme scheme) {
    std::set<std::string> ids;
    for (const auto& o : c.outputs) ids.insert(o.system_id);

    std::vector<SplitScores> out;
    if (metric == SplitMetric::DaRaw || metric == SplitMetric::DaZ) {
        auto side = [&](Split split) {
            std::map<std::string, std::optional<double>> values;
            for (const auto& s : system_scores(c, qc, split)) {
                values[s.system_id] =
                    metric == SplitMetric::DaRaw ? s.avg_raw : s.avg_z;
            }
            return values;
        };
        const auto fwd = side(Split::Forward);
        const auto rev = side(Split::Reverse);
        for (const auto& id : ids) {
            SplitScores s;
            s.system_id = id;
            s.metric = metric;
            if (auto it = fwd.find(id); it != fwd.end()) s.forward = it->second;
            if (auto it = rev.find(id); it != rev.end()) s.reverse = it->second;
            if (s.forward && s.reverse) s.diff = *s.reverse - *s.forward;
            out.push_back(std::move(s));
        }
        return out;
    }

    const auto splits = split_segments(c);
    for (const auto& id : ids) {
        SplitScores s;
        s.system_id = id;
        s.metric = metric;
        s.forward = bleu_side(c, splits.at(Direction::Forward), id, metric, scheme);
        s.reverse = bleu_side(c, splits.at(Direction::Reverse), id, metric, scheme);
        if (s.forward && s.reverse) s.diff = *s.reverse - *s.forward;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<RFSummary> rf_summary(
    const std::map<std::string, std::vector<SplitScores>>& by_language_pair) {
    std::vector<RFSummary> out;
    for (const auto& [pair, scores] : by_language_pair) {
        std::vector<double> diffs;
        for (const auto& s : scores) {
            if (s.diff) diffs.push_back(*s.diff);
        }
        if (diffs.empty()) continue;
        RFSummary row;
        row.language_pair = pair;
        row.n_systems = static_cast<int>(diffs.size());
        int gt = 0, lt = 0;
        double sum = 0.0;
        for (double d : diffs) {
            if (d > 0.0) ++gt;
            if (d < 0.0) ++lt;
            sum += d;
        }
        row.pct_r_gt_f = 100.0 * gt / row.n_systems;
        row.pct_f_gt_r = 100.0 * lt / row.n_systems;
        const double mean = sum / row.n_systems;
        row.mean_diff = mean;
        if (row.n_systems >= 2) {
            double ss = 0.0;
            for (double d : diffs) ss += (d - mean) * (d - mean);
            row.sd_diff = std::sqrt(ss / (row.n_systems - 1));
        }
        out.push_back(std::move(row));
    }
    std::sort(out.begin(), out.end(), [](const RFSummary& a, const RFSummary& b) {
        const bool a_en = a.language_pair.ends_with("-en");
        const bool b_en = b.language_pair.ends_with("-en");
        if (a_en != b_en) return a_en;
        if (a.pct_r_gt_f != b.pct_r_gt_f) return a.pct_r_gt_f < b.pct_r_gt_f;
        return a.language_pair < b.language_pair;
    });
    return out;
}

PairDiffReport pair_diffs(const std::vector<SplitScores>& scores) {
    std::vector<SplitScores> sorted = scores;
    std::sort(sorted.begin(), sorted.end(),
              [](const SplitScores& a, const SplitScores& b) {
                  return a.system_id < b.system_id;
              });
    PairDiffReport out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            PairDiff pd;
            pd.system_a = sorted[i].system_id;
            pd.system_b = sorted[j].system_id;
            if (sorted[i].forward && sorted[j].forward) {
                pd.forward_diff = *sorted[i].forward - *sorted[j].forward;
            }
            if (sorted[i].reverse && sorted[j].reverse) {
                pd.reverse_diff = *sorted[i].reverse - *sorted[j].reverse;
            }
            if (pd.forward_diff && pd.reverse_diff && *pd.forward_diff != 0.0 &&
                *pd.reverse_diff != 0.0) {
                const bool fpos = *pd.forward_diff > 0.0;
                const bool rpos = *pd.reverse_diff > 0.0;
                if (fpos && rpos) ++out.quadrants.pos_pos;
                else if (fpos) ++out.quadrants.pos_neg;
                else if (rpos) ++out.quadrants.neg_pos;
                else ++out.quadrants.neg_neg;
            } else {
                ++out.quadrants.on_axis;
            }
            out.pairs.push_back(std::move(pd));
        }
    }
    return out;
}

Correlations ranking_correlation(const std::vector<SplitScores>& scores) {
    std::vector<double> f, r;
    for (const auto& s : scores) {
        if (s.forward && s.reverse) {
            f.push_back(*s.forward);
            r.push_back(*s.reverse);
        }
    }
    if (f.size() < 3) {
        throw std::invalid_argument(
            "ranking_correlation: needs at least 3 systems scored on both splits");
    }
    return correlations(f, r);
}

}  // namespace mtaudit
