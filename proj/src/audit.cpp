#include "mtaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "mtaudit/power.hpp"
#include "mtaudit/stats.hpp"
#include "mtaudit/translationese.hpp"

namespace mtaudit {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

AuditItem declared_item(int number, const std::string& name,
                        const std::optional<std::string>& value) {
    AuditItem item;
    item.number = number;
    item.name = name;
    if (value) {
        item.status = AuditStatus::Declared;
        item.detail = *value;
    } else {
        item.status = AuditStatus::NotEvaluated;
        item.detail = "no declaration provided";
    }
    return item;
}

// Planning effect: the observed effect snapped toward 0.5 onto the 0.01
// grid. Rounding toward the null is the conservative direction, it never
// understates the required sample size. Complete separation (effect 0 or 1)
// is planned at the edge of the grid.
std::optional<double> snap_effect(double e) {
    double snapped;
    if (e < 0.5) {
        snapped = std::max(0.01, std::ceil(e * 100.0 - 1e-9) / 100.0);
        if (snapped >= 0.5) return std::nullopt;
    } else {
        snapped = std::min(0.99, std::floor(e * 100.0 + 1e-9) / 100.0);
        if (snapped <= 0.5) return std::nullopt;
    }
    return snapped;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

}  // namespace

std::string to_string(AuditStatus s) {
    switch (s) {
        case AuditStatus::Pass: return "pass";
        case AuditStatus::Warn: return "warn";
        case AuditStatus::Fail: return "fail";
        case AuditStatus::Declared: return "declared";
        default: return "not evaluated";
    }
}

AuditReport audit_campaign(const Campaign& c, const AuditOptions& opt) {
    AuditReport rep;
    rep.campaign_name = c.name;

    const auto qc = qc_filter(c, opt.qc);
    const auto scores_both = system_scores(c, qc, Split::Both);
    std::vector<SystemScore> with_data;
    for (const auto& s : scores_both) {
        if (s.N > 0) with_data.push_back(s);
    }

    // Item 1: test data creation direction.
    {
        AuditItem item;
        item.number = 1;
        item.name = "Test data creation direction";
        const auto splits = split_segments(c);
        const std::size_t fwd = splits.at(Direction::Forward).size();
        const std::size_t rev = splits.at(Direction::Reverse).size();
        const std::size_t total = fwd + rev;
        const double pct_rev = total ? 100.0 * static_cast<double>(rev) / total : 0.0;
        item.status = rev == 0 ? AuditStatus::Pass
                               : (fwd == 0 ? AuditStatus::Fail : AuditStatus::Warn);
        item.detail = std::to_string(fwd) + " forward, " + std::to_string(rev) +
                      " reverse segments (" + fmt("%.1f", pct_rev) +
                      "% reverse-created)";
        if (fwd > 0 && rev > 0) {
            try {
                const auto ss = split_scores(c, qc, SplitMetric::DaRaw);
                const Correlations corr = ranking_correlation(ss);
                item.detail += "; forward/reverse DA ranking agreement:";
                item.detail += " r=" + (corr.pearson ? fmt("%.3f", *corr.pearson)
                                                     : std::string("undefined"));
                item.detail += " rho=" + (corr.spearman ? fmt("%.3f", *corr.spearman)
                                                        : std::string("undefined"));
                item.detail += " tau=" + (corr.kendall ? fmt("%.3f", *corr.kendall)
                                                       : std::string("undefined"));
            } catch (const std::invalid_argument&) {
                // fewer than 3 systems scored on both splits; skip diagnostics
            }
        }
        rep.items.push_back(std::move(item));
    }

    rep.items.push_back(declared_item(2, "Human judge reliability", opt.judge_reliability));
    rep.items.push_back(declared_item(3, "Testing level", opt.testing_level));
    {
        std::optional<std::string> pairs = opt.language_pairs;
        if (!pairs) pairs = c.source_lang + "-" + c.target_lang + " (from campaign data)";
        rep.items.push_back(declared_item(4, "Test language pairs", pairs));
    }
    rep.items.push_back(declared_item(5, "Test domain", opt.domain));

    // Shared by items 6 and 9: per-segment mean raw scores per system.
    std::map<std::string, std::map<std::string, double>> per_system;
    for (const auto& s : with_data) {
        auto seg = segment_scores(c, qc, s.system_id, Split::Both);
        if (!seg.empty()) per_system.emplace(s.system_id, std::move(seg));
    }

    // Item 6: translation sample size n and the power it buys.
    bool item6_passed = false;
    {
        AuditItem item;
        item.number = 6;
        item.name = "Translation sample size (n)";
        if (with_data.size() < 2) {
            item.status = AuditStatus::NotEvaluated;
            item.detail = "fewer than 2 systems with judgments";
        } else {
            int min_n = std::numeric_limits<int>::max();
            std::string min_sys;
            for (const auto& s : with_data) {
                if (s.n < min_n) {
                    min_n = s.n;
                    min_sys = s.system_id;
                }
            }
            double best_dist = std::numeric_limits<double>::infinity();
            double best_effect = 0.5;
            std::string pair_a, pair_b;
            for (auto i = per_system.begin(); i != per_system.end(); ++i) {
                for (auto j = std::next(i); j != per_system.end(); ++j) {
                    double e;
                    try {
                        e = effect_size(i->second, j->second);
                    } catch (const std::invalid_argument&) {
                        continue;  // no shared segments for this pair
                    }
                    const double dist = std::fabs(e - 0.5);
                    if (dist < best_dist) {
                        best_dist = dist;
                        best_effect = e;
                        pair_a = i->first;
                        pair_b = j->first;
                    }
                }
            }
            if (pair_a.empty()) {
                item.status = AuditStatus::NotEvaluated;
                item.detail = "no system pair shares scored segments";
            } else {
                std::ostringstream d;
                d << "min n=" << min_n << " (" << min_sys << "); closest pair "
                  << pair_a << " vs " << pair_b << ": effect "
                  << fmt("%.3f", best_effect);
                const std::optional<double> planning = snap_effect(best_effect);
                if (!planning) {
                    item.status = AuditStatus::Fail;
                    d << "; effect indistinguishable from 0.5 at 0.01 resolution, no "
                         "finite n reaches "
                      << fmt("%.0f", opt.target_power * 100.0) << "% power";
                } else {
                    d << " (planning effect " << fmt("%.2f", *planning) << ")";
                    PlanOptions plan;
                    plan.target_power = opt.target_power;
                    plan.alpha = opt.alpha;
                    plan.grid_step = opt.grid_step;
                    plan.max_n = opt.max_n;
                    plan.method = PowerMethod::Analytic;
                    const std::optional<int> required = min_sample_size(*planning, plan);
                    if (min_n >= 10) {
                        d << "; power at n=" << min_n << ": "
                          << fmt("%.2f",
                                 analytic_power(*planning, min_n, opt.alpha).power);
                    }
                    if (!required) {
                        item.status = AuditStatus::Fail;
                        d << "; no n up to " << opt.max_n << " reaches "
                          << fmt("%.0f", opt.target_power * 100.0) << "% power";
                    } else if (min_n >= *required) {
                        item6_passed = true;
                        item.status = AuditStatus::Pass;
                        d << "; n meets required " << *required << " for "
                          << fmt("%.0f", opt.target_power * 100.0) << "% power";
                    } else {
                        item.status = AuditStatus::Fail;
                        d << "; n below required " << *required << " for "
                          << fmt("%.0f", opt.target_power * 100.0) << "% power";
                    }
                }
                item.detail = d.str();
            }
        }
        rep.items.push_back(std::move(item));
    }

    // Item 7: judgment sample size N and worker quality control.
    {
        AuditItem item;
        item.number = 7;
        item.name = "Human judgment sample size (N)";
        if (c.judgments.empty()) {
            item.status = AuditStatus::NotEvaluated;
            item.detail = "no judgments";
        } else {
            int passed = 0;
            for (const auto& [w, q] : qc) passed += q.passed ? 1 : 0;
            const int workers = static_cast<int>(qc.size());
            long excluded = 0;
            for (const auto& jm : c.judgments) {
                if (jm.kind == JudgmentKind::Degraded) continue;
                auto it = qc.find(jm.worker_id);
                if (it == qc.end() || !it->second.passed) ++excluded;
            }
            if (with_data.empty()) {
                item.status = AuditStatus::Fail;
                item.detail = "all " + std::to_string(workers) +
                              " workers failed quality control, no judgments usable";
            } else {
                long total_N = 0;
                int min_N = std::numeric_limits<int>::max();
                int max_N = 0;
                for (const auto& s : with_data) {
                    total_N += s.N;
                    min_N = std::min(min_N, s.N);
                    max_N = std::max(max_N, s.N);
                }
                std::ostringstream d;
                d << "N per system: min=" << min_N << " max=" << max_N
                  << " total=" << total_N << " over " << with_data.size()
                  << " systems; workers passing QC: " << passed << "/" << workers
                  << " (" << fmt("%.1f", 100.0 * passed / workers)
                  << "%); judgments excluded by QC: " << excluded;
                item.status = AuditStatus::Pass;
                item.detail = d.str();
            }
        }
        rep.items.push_back(std::move(item));
    }

    // Item 8: meaningful overall statistic (standardized scores available).
    {
        AuditItem item;
        item.number = 8;
        item.name = "Meaningful overall statistic";
        if (with_data.empty()) {
            item.status = AuditStatus::NotEvaluated;
            item.detail = "no usable judgments";
        } else {
            std::vector<std::string> missing;
            for (const auto& s : with_data) {
                if (!s.avg_z) missing.push_back(s.system_id);
            }
            if (missing.empty()) {
                item.status = AuditStatus::Pass;
                item.detail = "worker-standardized avg_z available for all " +
                              std::to_string(with_data.size()) +
                              " systems, ranked over distinct segments (n)";
            } else {
                item.status = AuditStatus::Warn;
                item.detail =
                    "avg_z unavailable for: " + join(missing) +
                    " (constant scorers or no z-scored judgments); raw averages only";
            }
        }
        rep.items.push_back(std::move(item));
    }

    // Item 9: clustering via significance testing.
    {
        AuditItem item;
        item.number = 9;
        item.name = "Clustering via significance testing";
        if (per_system.size() < 2) {
            item.status = AuditStatus::NotEvaluated;
            item.detail = "fewer than 2 systems with scored segments";
        } else {
            const Clustering cl = cluster_systems(per_system, opt.alpha);
            std::vector<std::string> top;
            for (const auto& e : cl.entries) {
                if (e.cluster_index == 1) top.push_back(e.system_id);
            }
            std::ostringstream d;
            d << cl.n_clusters << " clusters over " << cl.entries.size()
              << " systems at alpha=" << fmt("%g", opt.alpha);
            if (top.size() > 1) {
                d << "; top cluster tie: " << join(top);
                if (item6_passed) {
                    item.status = AuditStatus::Pass;
                    d << " (legitimate tie: sample size meets the power target)";
                } else {
                    item.status = AuditStatus::Warn;
                    d << " (tie may be a power artifact: see item 6)";
                }
            } else {
                item.status = AuditStatus::Pass;
                d << "; single top system: " << top.front();
            }
            item.detail = d.str();
        }
        rep.items.push_back(std::move(item));
    }

    return rep;
}

}  // namespace mtaudit
