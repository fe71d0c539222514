// Acceptance gate: ten end-to-end criteria, one PASS/FAIL line each.
// Exit code is the number of failed criteria. All tolerances are pinned
// here, next to the checks that use them.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mtaudit/human_eval.hpp"
#include "mtaudit/metrics.hpp"
#include "mtaudit/power.hpp"
#include "mtaudit/stats.hpp"
#include "mtaudit/translationese.hpp"

using namespace mtaudit;

namespace {

int failed = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    if (!ok) ++failed;
}

// Brute-force two-sided rank-sum p over all rank assignments, integral
// deviations on the doubled lattice.
double enumerated_rank_sum_p(int n, int m, long long w2_observed) {
    const int total = n + m;
    const long long center = static_cast<long long>(n) * (total + 1);
    const long long dev = std::llabs(w2_observed - center);
    long long count = 0, all = 0;
    for (unsigned mask = 0; mask < (1u << total); ++mask) {
        if (std::popcount(mask) != n) continue;
        ++all;
        long long w2 = 0;
        for (int r = 0; r < total; ++r) {
            if (mask & (1u << r)) w2 += 2 * (r + 1);
        }
        if (std::llabs(w2 - center) >= dev) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(all);
}

long long observed_w2(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int less = 0, equal = 0;
        for (double x : pooled) {
            if (x < a[i]) ++less;
            if (x == a[i]) ++equal;
        }
        w += less + (equal + 1) / 2.0;
    }
    return std::llround(2.0 * w);
}

void criterion_1_and_2() {
    struct Cell {
        int n;
        double effect;
        double expected;
    };
    // Monte Carlo power anchors, 20000 replications, tolerance 0.02.
    const std::vector<Cell> anchors{
        {55, 0.33, 0.886}, {55, 0.47, 0.081}, {110, 0.40, 0.730},
        {385, 0.44, 0.824}, {1485, 0.47, 0.809},
    };
    const auto t0 = std::chrono::steady_clock::now();
    bool all_ok = true;
    std::string detail;
    for (const auto& c : anchors) {
        const PowerEstimate est = simulate_power(c.effect, c.n, 0.05, 20000, 1);
        const bool ok = std::fabs(est.power - c.expected) <= 0.02;
        all_ok = all_ok && ok;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s(n=%d, e=%.2f: %.4f vs %.3f)",
                      detail.empty() ? "" : " ", c.n, c.effect, est.power, c.expected);
        detail += buf;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = elapsed < 300.0;
    char timing[64];
    std::snprintf(timing, sizeof timing, " in %.1fs (limit 300s)", elapsed);
    report(1, all_ok && in_time,
           "Monte Carlo power matches published anchors within 0.02:" + detail + timing);

    bool calibrated = true;
    std::string cal_detail;
    for (int n : {55, 550}) {
        const PowerEstimate est = simulate_power(0.5, n, 0.05, 20000, 1);
        const bool ok = est.power >= 0.04 && est.power <= 0.06;
        calibrated = calibrated && ok;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%sn=%d: %.4f", cal_detail.empty() ? "" : ", ", n,
                      est.power);
        cal_detail += buf;
    }
    report(2, calibrated,
           "null rejection rate within [0.04, 0.06] at 20000 reps: " + cal_detail);
}

void criterion_3() {
    const bool ok = min_sample_size(0.47) == 1485 && min_sample_size(0.44) == 385 &&
                    min_sample_size(0.33) == 55;
    report(3, ok,
           "sample size planner: effect 0.47 -> 1485, 0.44 -> 385, 0.33 -> 55 "
           "(55-step grid, 80% power)");
}

void criterion_4() {
    bool ok = true;
    const RankSumResult fixed = rank_sum_test({1, 2, 3}, {4, 5, 6});
    ok = fixed.method == TestMethod::Exact && fixed.p_value == 0.1;

    std::mt19937 rng(424242);
    int checked = 0;
    for (int n = 1; n <= 7 && ok; ++n) {
        for (int trial = 0; trial < 30 && ok; ++trial) {
            std::vector<int> base(60);
            for (int i = 0; i < 60; ++i) base[static_cast<std::size_t>(i)] = i;
            std::shuffle(base.begin(), base.end(), rng);
            std::vector<double> a(static_cast<std::size_t>(n)),
                b(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = 0.25 * base[static_cast<std::size_t>(i)] - 2.0;
            for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = 0.25 * base[static_cast<std::size_t>(n + i)] - 2.0;
            const RankSumResult r = rank_sum_test(a, b);
            ok = r.method == TestMethod::Exact &&
                 r.p_value == enumerated_rank_sum_p(n, n, observed_w2(a, b));
            ++checked;
        }
    }
    report(4, ok,
           "exact rank-sum p equals full enumeration on " + std::to_string(checked) +
               " tie-free fixtures up to 7 per side; [1,2,3] vs [4,5,6] -> 0.1");
}

void criterion_5() {
    bool ok = true;
    std::mt19937 rng(271828);
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const int n_segments = 1 + static_cast<int>(rng() % 8);
        std::map<std::string, double> a, b;
        for (int s = 0; s < n_segments; ++s) {
            const std::string id = "s" + std::to_string(s);
            a[id] = static_cast<double>(rng() % 6);
            b[id] = static_cast<double>(rng() % 6);
        }
        long long lt = 0, eq = 0;
        for (const auto& [seg, va] : a) {
            if (va < b.at(seg)) ++lt;
            if (va == b.at(seg)) ++eq;
        }
        const long long low2 = 2 * lt + eq;
        const long long high2 = 2 * n_segments - low2;
        const double expected =
            low2 <= high2
                ? static_cast<double>(low2) / (2.0 * n_segments)
                : 1.0 - static_cast<double>(high2) / (2.0 * n_segments);
        const double e_ab = effect_size(a, b);
        const double e_ba = effect_size(b, a);
        ok = e_ab == expected && e_ab + e_ba == 1.0;
    }
    report(5, ok,
           "effect size equals brute-force pair counting on 1000 fixtures, "
           "antisymmetry exact");
}

void criterion_6() {
    auto tok = [](const char* s) { return tokenize(s, TokenizerScheme::Default); };

    const BleuReport identity = corpus_bleu({
        {tok("the quick brown fox jumps over the lazy dog"),
         tok("the quick brown fox jumps over the lazy dog")},
    });
    bool ok = identity.score == 100.0;

    const BleuReport clipped =
        corpus_bleu({{tok("the the the the the"), tok("the cat sat")}});
    ok = ok && clipped.precisions[0] == 1.0 / 5.0;

    const BleuReport hand = corpus_bleu({
        {tok("the cat sat"), tok("the cat sat")},
        {tok("the big dog barks loudly"), tok("the big dog barks")},
    });
    const double expected =
        100.0 * std::exp(0.25 * (std::log(7.0 / 8.0) + std::log(5.0 / 6.0) +
                                 std::log(3.0 / 4.0) + std::log(1.0 / 2.0)));
    ok = ok && std::fabs(hand.score - expected) <= 1e-9 && hand.brevity_penalty == 1.0;

    char buf[96];
    std::snprintf(buf, sizeof buf, "identity 100, clipped p1 = 1/5, hand corpus %.6f",
                  hand.score);
    report(6, ok, std::string("corpus BLEU: ") + buf);
}

void criterion_7() {
    // 92 segments, 2 systems, 9 workers judging everything once: each system
    // collects N = 828 judgments over n = 92 distinct segments.
    Campaign c;
    c.name = "shape";
    c.source_lang = "zh";
    c.target_lang = "en";
    for (int i = 0; i < 92; ++i) {
        Segment s;
        s.segment_id = "s" + std::to_string(i);
        s.doc_id = "d" + std::to_string(i / 10);
        s.position = i % 10;
        s.source_lang = "zh";
        s.target_lang = "en";
        s.origin_lang = "zh";
        s.reference_text = "r";
        c.segments.push_back(std::move(s));
    }
    int jid = 0;
    std::map<std::string, WorkerQC> qc;
    for (const char* sys : {"sys-a", "sys-b"}) {
        for (const auto& seg : c.segments) {
            SystemOutput o;
            o.system_id = sys;
            o.segment_id = seg.segment_id;
            o.text = "t";
            c.outputs.push_back(std::move(o));
        }
    }
    for (int w = 0; w < 9; ++w) {
        const std::string worker = "w" + std::to_string(w);
        WorkerQC q;
        q.worker_id = worker;
        q.passed = true;
        qc[worker] = q;
        for (const char* sys : {"sys-a", "sys-b"}) {
            const int sys_base = sys[4] == 'a' ? 62 : 48;
            for (int i = 0; i < 92; ++i) {
                Judgment j;
                j.judgment_id = "j" + std::to_string(++jid);
                j.worker_id = worker;
                j.system_id = sys;
                j.segment_id = "s" + std::to_string(i);
                j.kind = JudgmentKind::Genuine;
                j.score = std::min(100, sys_base + (i * 5 + w * 3) % 31);
                c.judgments.push_back(std::move(j));
            }
        }
    }

    const auto scores = system_scores(c, qc, Split::Both);
    bool ok = scores.size() == 2;
    for (const auto& s : scores) {
        ok = ok && s.n == 92 && s.N == 828 && s.avg_raw && s.avg_z;
    }

    // Per worker, the z-scores over genuine judgments have sample mean 0 and
    // sample SD 1 (tolerance 1e-9).
    std::map<std::string, std::vector<Judgment>> per_worker;
    for (const auto& j : c.judgments) per_worker[j.worker_id].push_back(j);
    for (const auto& [worker, js] : per_worker) {
        const WorkerZ wz = z_normalize(js);
        ok = ok && !wz.constant_scorer;
        double sum = 0.0, sq = 0.0;
        for (const auto& [id, z] : wz.z_by_judgment) {
            sum += z;
            sq += z * z;
        }
        const double n = static_cast<double>(wz.z_by_judgment.size());
        const double mean = sum / n;
        const double sd = std::sqrt((sq - n * mean * mean) / (n - 1.0));
        ok = ok && std::fabs(mean) <= 1e-9 && std::fabs(sd - 1.0) <= 1e-9;
    }
    report(7, ok,
           "92 segments x 9 judgments aggregate to n=92, N=828 per system; "
           "per-worker z has mean 0, SD 1");
}

void criterion_8() {
    auto scores_with = [](double base, int phase) {
        std::map<std::string, double> m;
        for (int s = 0; s < 100; ++s) {
            m["s" + std::to_string(s)] = base + ((s + phase) % 5);
        }
        return m;
    };
    const Clustering separated = cluster_systems(
        {{"sys-a", scores_with(90, 0)},
         {"sys-b", scores_with(20, 0)},
         {"sys-c", scores_with(20, 2)}},
        0.05);
    bool ok = separated.n_clusters == 2 && separated.entries[0].system_id == "sys-a" &&
              separated.entries[0].cluster_index == 1 &&
              separated.entries[1].cluster_index == 2 &&
              separated.entries[2].cluster_index == 2;

    const Clustering identical = cluster_systems(
        {{"sys-a", scores_with(50, 0)}, {"sys-b", scores_with(50, 0)}}, 0.05);
    ok = ok && identical.n_clusters == 1;

    report(8, ok,
           "clustering: clear leader over two indistinguishable systems gives "
           "{A}, {B, C}; identical systems form one cluster");
}

void criterion_9() {
    bool ok = true;
    for (double delta : {5.0, 10.0, 18.0}) {
        std::vector<SplitScores> scores;
        for (int k = 0; k < 8; ++k) {
            SplitScores s;
            s.system_id = "sys-" + std::to_string(k);
            s.metric = SplitMetric::DaRaw;
            s.forward = 40.0 + 2.5 * k;
            s.reverse = *s.forward + delta;
            s.diff = *s.reverse - *s.forward;
            scores.push_back(std::move(s));
        }
        const auto rows = rf_summary({{"zh-en", scores}});
        ok = ok && rows.size() == 1 && rows[0].n_systems == 8 &&
             rows[0].pct_r_gt_f == 100.0 &&
             std::fabs(*rows[0].mean_diff - delta) <= 1e-9;
    }
    report(9, ok,
           "a constant reverse-side shift of 5, 10, 18 is recovered exactly "
           "(mean within 1e-9, 100% of systems higher on reverse)");
}

void criterion_10() {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.1, 9.0);
    std::vector<double> x(25), y(25);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = unif(rng);
        y[i] = std::exp(0.7 * x[i]) + 3.0;  // strictly monotone transform of x
    }
    const Correlations monotone = correlations(x, y);
    bool ok = monotone.kendall && *monotone.kendall == 1.0 && monotone.spearman &&
              std::fabs(*monotone.spearman - 1.0) <= 1e-12;

    const Correlations swapped = correlations({1, 2, 3, 4}, {2, 1, 3, 4});
    ok = ok && swapped.kendall && *swapped.kendall == 2.0 / 3.0;

    report(10, ok,
           "rank correlations: monotone transform gives tau = rho = 1; one "
           "adjacent swap in 4 gives tau = 2/3");
}

}  // namespace

int main() {
    criterion_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d of 10 criteria failed\n", failed);
    return failed;
}
