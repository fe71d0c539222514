#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "mtaudit/stats.hpp"

using namespace mtaudit;

namespace {

// Independent midranks: rank = (#smaller) + (#equal + 1) / 2.
std::vector<double> oracle_ranks(const std::vector<double>& v) {
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        int less = 0, equal = 0;
        for (double x : v) {
            if (x < v[i]) ++less;
            if (x == v[i]) ++equal;
        }
        ranks[i] = less + (equal + 1) / 2.0;
    }
    return ranks;
}

// Exact two-sided rank-sum p by full enumeration of rank assignments:
// the probability of a rank sum at least as far from its mean as observed,
// measured on the doubled lattice so every comparison is integral.
double oracle_rank_sum_p(int n, int m, long long w2_observed) {
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

// Observed doubled rank sum of sample a within the pooled ordering.
long long doubled_rank_sum(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::vector<double> ranks = oracle_ranks(pooled);
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w += ranks[i];
    return std::llround(2.0 * w);
}

double oracle_signed_rank_greater(const std::vector<double>& diffs) {
    std::vector<double> nz;
    for (double d : diffs) {
        if (d != 0.0) nz.push_back(d);
    }
    if (nz.empty()) return 1.0;
    std::vector<double> mags(nz.size());
    for (std::size_t i = 0; i < nz.size(); ++i) mags[i] = std::fabs(nz[i]);
    const std::vector<double> ranks = oracle_ranks(mags);
    double observed = 0.0;
    for (std::size_t i = 0; i < nz.size(); ++i) {
        if (nz[i] > 0.0) observed += ranks[i];
    }
    const int m = static_cast<int>(nz.size());
    long long count = 0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        double w = 0.0;
        for (int i = 0; i < m; ++i) {
            if (mask & (1u << i)) w += ranks[static_cast<std::size_t>(i)];
        }
        if (w >= observed - 1e-9) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(1u << m);
}

double oracle_effect(const std::map<std::string, double>& a,
                     const std::map<std::string, double>& b, long long& n_out) {
    long long lt = 0, eq = 0, n = 0;
    for (const auto& [seg, va] : a) {
        auto it = b.find(seg);
        if (it == b.end()) continue;
        ++n;
        if (va < it->second) ++lt;
        if (va == it->second) ++eq;
    }
    n_out = n;
    // Same orientation convention as the library: the smaller doubled count
    // is the one divided. The counting itself is the oracle.
    const long long low2 = 2 * lt + eq;
    const long long high2 = 2 * n - low2;
    if (low2 <= high2) return static_cast<double>(low2) / (2.0 * static_cast<double>(n));
    return 1.0 - static_cast<double>(high2) / (2.0 * static_cast<double>(n));
}

}  // namespace

TEST_SUITE("rank_sum_test") {
    TEST_CASE("spec fixture [1,2,3] vs [4,5,6] has exact two-sided p 0.1") {
        const RankSumResult r = rank_sum_test({1, 2, 3}, {4, 5, 6});
        CHECK(r.method == TestMethod::Exact);
        CHECK(r.p_value == 0.1);
        CHECK(r.u_statistic == 0.0);
    }

    TEST_CASE("exact p equals brute-force enumeration on random tie-free samples") {
        std::mt19937 rng(20240811);
        for (int trial = 0; trial < 400; ++trial) {
            const int n = 1 + static_cast<int>(rng() % 7);
            const int m = 1 + static_cast<int>(rng() % 7);
            std::vector<double> values(static_cast<std::size_t>(n + m));
            std::vector<int> base(50);
            for (int i = 0; i < 50; ++i) base[static_cast<std::size_t>(i)] = i + 1;
            std::shuffle(base.begin(), base.end(), rng);
            for (int i = 0; i < n + m; ++i) {
                values[static_cast<std::size_t>(i)] =
                    base[static_cast<std::size_t>(i)] * 0.37 - 3.1;
            }
            const std::vector<double> a(values.begin(), values.begin() + n);
            const std::vector<double> b(values.begin() + n, values.end());

            const RankSumResult r = rank_sum_test(a, b);
            REQUIRE(r.method == TestMethod::Exact);
            CHECK(r.p_value == oracle_rank_sum_p(n, m, doubled_rank_sum(a, b)));
        }
    }

    TEST_CASE("exact and normal approximation agree within 0.02 at n=m=10") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<double> a(10), b(10);
            const double shift = (trial % 5) * 0.15;
            for (auto& v : a) v = unif(rng);
            for (auto& v : b) v = unif(rng) + shift;
            const RankSumResult r = rank_sum_test(a, b);
            REQUIRE(r.method == TestMethod::Exact);
            const double approx =
                std::min(1.0, std::erfc(std::fabs(r.z_value) / std::sqrt(2.0)));
            CHECK(std::fabs(r.p_value - approx) <= 0.02);
        }
    }

    TEST_CASE("ties: midranks and tie-corrected variance, hand-checked") {
        // pooled [1, 2, 2, 3] -> ranks 1, 2.5, 2.5, 4; W = 3.5, mu = 5,
        // var = (4/12) * (5 - 6/12) = 1.5, z = -1/sqrt(1.5).
        const RankSumResult r = rank_sum_test({1, 2}, {2, 3});
        CHECK(r.method == TestMethod::NormalApprox);
        CHECK(r.u_statistic == doctest::Approx(0.5));
        CHECK(r.z_value == doctest::Approx(-1.0 / std::sqrt(1.5)));
        CHECK(r.p_value == doctest::Approx(std::erfc(1.0 / std::sqrt(1.5) / std::sqrt(2.0))));
    }

    TEST_CASE("all pooled values tied gives p 1") {
        const RankSumResult r = rank_sum_test({5, 5, 5}, {5, 5});
        CHECK(r.p_value == 1.0);
        CHECK(r.z_value == 0.0);
    }

    TEST_CASE("symmetry between the two samples") {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> a(8), b(13);
            for (auto& v : a) v = std::round(unif(rng) * 10.0);
            for (auto& v : b) v = std::round(unif(rng) * 10.0);
            const RankSumResult rab = rank_sum_test(a, b);
            const RankSumResult rba = rank_sum_test(b, a);
            CHECK(rab.p_value == rba.p_value);
            CHECK(rab.u_statistic + rba.u_statistic ==
                  doctest::Approx(static_cast<double>(a.size() * b.size())));
        }
    }

    TEST_CASE("invariant under joint strictly monotone transforms") {
        std::mt19937 rng(4242);
        std::uniform_real_distribution<double> unif(-2.0, 2.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> a(12), b(9);
            for (auto& v : a) v = unif(rng);
            for (auto& v : b) v = unif(rng);
            auto cube = [](double x) { return x * x * x; };
            std::vector<double> ta(a.size()), tb(b.size());
            std::transform(a.begin(), a.end(), ta.begin(), cube);
            std::transform(b.begin(), b.end(), tb.begin(), cube);
            const RankSumResult r1 = rank_sum_test(a, b);
            const RankSumResult r2 = rank_sum_test(ta, tb);
            CHECK(r1.p_value == r2.p_value);
            CHECK(r1.u_statistic == r2.u_statistic);
            CHECK(r1.method == r2.method);
        }
    }

    TEST_CASE("empty sample is rejected") {
        CHECK_THROWS_AS(rank_sum_test({}, {1.0}), std::invalid_argument);
        CHECK_THROWS_AS(rank_sum_test({1.0}, {}), std::invalid_argument);
    }

    TEST_CASE("null p-values are roughly uniform (KS sanity bound)") {
        std::mt19937 rng(123456);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const int reps = 400;
        std::vector<double> pvals;
        pvals.reserve(reps);
        for (int trial = 0; trial < reps; ++trial) {
            std::vector<double> a(30), b(30);
            for (auto& v : a) v = unif(rng);
            for (auto& v : b) v = unif(rng);
            pvals.push_back(rank_sum_test(a, b).p_value);
        }
        std::sort(pvals.begin(), pvals.end());
        double ks = 0.0;
        for (std::size_t i = 0; i < pvals.size(); ++i) {
            const double ecdf_hi = static_cast<double>(i + 1) / reps;
            const double ecdf_lo = static_cast<double>(i) / reps;
            ks = std::max(ks, std::fabs(ecdf_hi - pvals[i]));
            ks = std::max(ks, std::fabs(pvals[i] - ecdf_lo));
        }
        CHECK(ks < 0.1);
    }
}

TEST_SUITE("signed_rank_test_greater") {
    TEST_CASE("20 uniformly positive differences hit the extreme tail") {
        const std::vector<double> diffs(20, 30.0);
        CHECK(signed_rank_test_greater(diffs) == std::ldexp(1.0, -20));
    }

    TEST_CASE("matches brute-force sign enumeration on random small fixtures") {
        std::mt19937 rng(31337);
        for (int trial = 0; trial < 300; ++trial) {
            const int m = 1 + static_cast<int>(rng() % 12);
            std::vector<double> diffs(static_cast<std::size_t>(m));
            for (auto& d : diffs) d = static_cast<double>(static_cast<int>(rng() % 13) - 6);
            CHECK(signed_rank_test_greater(diffs) == oracle_signed_rank_greater(diffs));
        }
    }

    TEST_CASE("zero differences are dropped") {
        CHECK(signed_rank_test_greater({0, 0, 0}) == 1.0);
        // |5| and |-5| share midrank 1.5; assignments with W+ >= 1.5: 3 of 4.
        CHECK(signed_rank_test_greater({5, 0, -5}) == 0.75);
    }

    TEST_CASE("normal approximation branch is sane and one-sided") {
        std::vector<double> up(60), down(60);
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (std::size_t i = 0; i < up.size(); ++i) {
            const double noise = unif(rng);
            up[i] = 1.0 + noise;     // consistently positive
            down[i] = -1.0 - noise;  // consistently negative
        }
        const double p_up = signed_rank_test_greater(up);
        const double p_down = signed_rank_test_greater(down);
        CHECK(p_up < 1e-6);
        CHECK(p_down > 0.999);
    }
}

TEST_SUITE("effect_size") {
    TEST_CASE("brute-force pair counting with tie-halving, 1000 random fixtures") {
        std::mt19937 rng(271828);
        for (int trial = 0; trial < 1000; ++trial) {
            const int n_segments = 1 + static_cast<int>(rng() % 8);
            std::map<std::string, double> a, b;
            for (int s = 0; s < n_segments; ++s) {
                const std::string id = "s" + std::to_string(s);
                a[id] = static_cast<double>(rng() % 6);
                b[id] = static_cast<double>(rng() % 6);
            }
            long long n = 0;
            const double expected = oracle_effect(a, b, n);
            REQUIRE(n == n_segments);
            const double e_ab = effect_size(a, b);
            const double e_ba = effect_size(b, a);
            CHECK(e_ab == expected);
            CHECK(e_ab + e_ba == 1.0);  // antisymmetry, exact in floating point
        }
    }

    TEST_CASE("identical score maps give exactly one half") {
        const std::map<std::string, double> a{{"s1", 70.0}, {"s2", 55.0}, {"s3", 91.0}};
        CHECK(effect_size(a, a) == 0.5);
    }

    TEST_CASE("87 wins out of 200 disjoint comparisons gives 0.435") {
        std::map<std::string, double> a, b;
        for (int s = 0; s < 200; ++s) {
            const std::string id = "s" + std::to_string(s);
            a[id] = s < 87 ? 1.0 : 3.0;
            b[id] = 2.0;
        }
        CHECK(effect_size(a, b) == 0.435);
        CHECK(effect_size(b, a) == 0.565);
    }

    TEST_CASE("no shared segments is an error") {
        CHECK_THROWS_AS(effect_size({{"s1", 1.0}}, {{"s2", 1.0}}), std::invalid_argument);
    }

    TEST_CASE("effect_matrix: complement pairs, NaN diagonal, named error") {
        std::map<std::string, std::map<std::string, double>> scores;
        std::mt19937 rng(17);
        for (const char* id : {"sys-a", "sys-b", "sys-c"}) {
            for (int s = 0; s < 40; ++s) {
                scores[id]["s" + std::to_string(s)] = static_cast<double>(rng() % 100);
            }
        }
        const EffectMatrix em = effect_matrix(scores);
        REQUIRE(em.system_ids == std::vector<std::string>{"sys-a", "sys-b", "sys-c"});
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(std::isnan(em.values[i][i]));
            for (std::size_t j = 0; j < 3; ++j) {
                if (i == j) continue;
                CHECK(em.values[i][j] + em.values[j][i] == 1.0);
            }
        }

        scores["sys-d"] = {{"zzz", 1.0}};  // shares nothing with the others
        CHECK_THROWS_WITH_AS(effect_matrix(scores),
                             "effect_matrix: no shared segments for (sys-a, sys-d)",
                             std::invalid_argument);
    }
}

TEST_SUITE("correlations") {
    TEST_CASE("perfect linear relation") {
        const std::vector<double> x{1, 2, 3, 4, 5};
        std::vector<double> y;
        for (double v : x) y.push_back(2.0 * v + 1.0);
        const Correlations c = correlations(x, y);
        CHECK(*c.pearson == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(*c.spearman == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(*c.kendall == 1.0);
    }

    TEST_CASE("perfect inverse relation") {
        const std::vector<double> x{1, 2, 3, 4};
        const std::vector<double> y{8, 6, 4, 2};
        const Correlations c = correlations(x, y);
        CHECK(*c.pearson == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(*c.kendall == -1.0);
    }

    TEST_CASE("single adjacent swap in 4 elements gives tau 2/3") {
        const Correlations c = correlations({1, 2, 3, 4}, {2, 1, 3, 4});
        CHECK(*c.kendall == 2.0 / 3.0);
    }

    TEST_CASE("8 concordant and 2 discordant pairs of 5 give tau 0.6") {
        const Correlations c = correlations({1, 2, 3, 4, 5}, {1, 3, 4, 2, 5});
        CHECK(*c.kendall == 0.6);
    }

    TEST_CASE("tie handling, hand-computed tau-b, spearman, pearson") {
        const std::vector<double> x{1, 1, 2, 3};
        const std::vector<double> y{1, 2, 2, 3};
        const Correlations c = correlations(x, y);
        // C=4, D=0, n0=6, one tied pair per side: tau_b = 4/sqrt(25).
        CHECK(*c.kendall == 0.8);
        // midranks x: 1.5 1.5 3 4; y: 1 2.5 2.5 4 -> r = 3.75/4.5.
        CHECK(*c.spearman == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
        CHECK(*c.pearson == doctest::Approx(2.0 / std::sqrt(5.5)).epsilon(1e-12));
    }

    TEST_CASE("zero variance marks coefficients undefined") {
        const Correlations c = correlations({3, 3, 3}, {1, 2, 5});
        CHECK_FALSE(c.pearson.has_value());
        CHECK_FALSE(c.spearman.has_value());
        CHECK_FALSE(c.kendall.has_value());
    }

    TEST_CASE("input validation") {
        CHECK_THROWS_AS(correlations({1, 2}, {1, 2, 3}), std::invalid_argument);
        CHECK_THROWS_AS(correlations({1}, {1}), std::invalid_argument);
    }

    TEST_CASE("rank coefficients invariant under strictly monotone transforms") {
        std::mt19937 rng(55);
        std::uniform_real_distribution<double> unif(0.1, 9.0);
        std::vector<double> x(20), y(20);
        for (auto& v : x) v = unif(rng);
        for (auto& v : y) v = unif(rng);
        std::vector<double> tx(x.size()), ty(y.size());
        std::transform(x.begin(), x.end(), tx.begin(),
                       [](double v) { return std::exp(v); });
        std::transform(y.begin(), y.end(), ty.begin(),
                       [](double v) { return v * v * v; });
        const Correlations c1 = correlations(x, y);
        const Correlations c2 = correlations(tx, ty);
        CHECK(*c1.spearman == *c2.spearman);
        CHECK(*c1.kendall == *c2.kendall);
    }
}

TEST_SUITE("cluster_systems") {
    namespace {
        std::map<std::string, double> shifted_scores(double base, int phase) {
            std::map<std::string, double> m;
            for (int s = 0; s < 100; ++s) {
                m["s" + std::to_string(s)] = base + ((s + phase) % 5);
            }
            return m;
        }
    }

    TEST_CASE("clear leader over two indistinguishable systems: {A}, {B, C}") {
        const std::map<std::string, std::map<std::string, double>> scores{
            {"sys-a", shifted_scores(90.0, 0)},
            {"sys-b", shifted_scores(20.0, 0)},
            {"sys-c", shifted_scores(20.0, 2)},
        };
        const Clustering cl = cluster_systems(scores, 0.05);
        REQUIRE(cl.entries.size() == 3);
        CHECK(cl.n_clusters == 2);
        CHECK(cl.entries[0].system_id == "sys-a");
        CHECK(cl.entries[0].cluster_index == 1);
        CHECK(cl.entries[0].outperforms_all_lower);
        CHECK(cl.entries[1].cluster_index == 2);
        CHECK(cl.entries[2].cluster_index == 2);
        CHECK_FALSE(cl.entries[1].outperforms_all_lower);
    }

    TEST_CASE("identically distributed systems form a single cluster") {
        const std::map<std::string, std::map<std::string, double>> scores{
            {"sys-a", shifted_scores(50.0, 0)},
            {"sys-b", shifted_scores(50.0, 0)},
        };
        const Clustering cl = cluster_systems(scores, 0.05);
        CHECK(cl.n_clusters == 1);
        CHECK(cl.entries[0].cluster_index == 1);
        CHECK(cl.entries[1].cluster_index == 1);
    }

    TEST_CASE("every system separated: one cluster each") {
        const std::map<std::string, std::map<std::string, double>> scores{
            {"sys-a", shifted_scores(90.0, 0)},
            {"sys-b", shifted_scores(50.0, 1)},
            {"sys-c", shifted_scores(10.0, 2)},
        };
        const Clustering cl = cluster_systems(scores, 0.05);
        CHECK(cl.n_clusters == 3);
        CHECK(cl.entries[0].system_id == "sys-a");
        CHECK(cl.entries[1].system_id == "sys-b");
        CHECK(cl.entries[2].system_id == "sys-c");
    }

    TEST_CASE("marks are invariant under positive affine rescaling") {
        const std::map<std::string, std::map<std::string, double>> scores{
            {"sys-a", shifted_scores(90.0, 0)},
            {"sys-b", shifted_scores(20.0, 0)},
            {"sys-c", shifted_scores(20.0, 2)},
        };
        std::map<std::string, std::map<std::string, double>> rescaled;
        for (const auto& [id, m] : scores) {
            for (const auto& [seg, v] : m) rescaled[id][seg] = 0.01 * v + 3.0;
        }
        const Clustering c1 = cluster_systems(scores, 0.05);
        const Clustering c2 = cluster_systems(rescaled, 0.05);
        REQUIRE(c1.entries.size() == c2.entries.size());
        CHECK(c1.n_clusters == c2.n_clusters);
        for (std::size_t i = 0; i < c1.entries.size(); ++i) {
            CHECK(c1.entries[i].system_id == c2.entries[i].system_id);
            CHECK(c1.entries[i].cluster_index == c2.entries[i].cluster_index);
            CHECK(c1.entries[i].outperforms_all_lower ==
                  c2.entries[i].outperforms_all_lower);
        }
    }

    TEST_CASE("input validation") {
        CHECK_THROWS_AS(cluster_systems({{"only", {{"s1", 1.0}}}}, 0.05),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            cluster_systems({{"a", {{"s1", 1.0}}}, {"b", {}}}, 0.05),
            std::invalid_argument);
    }
}
