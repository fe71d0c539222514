#include "mtaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mtaudit/normal.hpp"

namespace mtaudit {

namespace {

struct RankInfo {
    std::vector<double> ranks;  // midranks, aligned with the input
    double tie_term = 0.0;      // sum of t^3 - t over tie groups
    bool has_ties = false;
};

RankInfo midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    RankInfo info;
    info.ranks.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double t = static_cast<double>(j - i + 1);
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) info.ranks[idx[k]] = rank;
        if (t > 1.0) {
            info.has_ties = true;
            info.tie_term += t * t * t - t;
        }
        i = j + 1;
    }
    return info;
}

// Counts k-subsets of {1..total} by rank sum. counts[s] is exact in a double
// for total <= 20 (the largest count is C(20,10) = 184756).
std::vector<double> rank_sum_counts(int total, int k) {
    const int max_sum = total * (total + 1) / 2;
    std::vector<std::vector<double>> f(
        static_cast<std::size_t>(k) + 1,
        std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    f[0][0] = 1.0;
    for (int r = 1; r <= total; ++r) {
        for (int c = std::min(k, r); c >= 1; --c) {
            for (int s = max_sum; s >= r; --s) {
                f[c][s] += f[c - 1][s - r];
            }
        }
    }
    return f[static_cast<std::size_t>(k)];
}

double pearson_impl(const std::vector<double>& x, const std::vector<double>& y,
                    bool& defined) {
    const std::size_t n = x.size();
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        defined = false;
        return 0.0;
    }
    defined = true;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

std::string to_string(TestMethod m) {
    return m == TestMethod::Exact ? "exact" : "normal_approx";
}

RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("rank_sum_test: both samples must be nonempty");
    }
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    const int total = n + m;

    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(total));
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const RankInfo info = midranks(pooled);

    double w = 0.0;  // rank sum of the first sample
    for (int i = 0; i < n; ++i) w += info.ranks[static_cast<std::size_t>(i)];

    RankSumResult res;
    res.u_statistic = w - static_cast<double>(n) * (n + 1) / 2.0;

    const double mu = static_cast<double>(n) * (total + 1) / 2.0;
    const double nd = n, md = m, totald = total;
    double var = nd * md / 12.0 * ((totald + 1.0) - info.tie_term / (totald * (totald - 1.0)));
    const double diff = w - mu;
    if (var > 0.0) {
        const double adj = std::max(std::fabs(diff) - 0.5, 0.0);
        const double sigma = std::sqrt(var);
        res.z_value = (diff < 0.0 ? -adj : adj) / sigma;
    } else {
        res.z_value = 0.0;
    }

    if (total <= 20 && !info.has_ties) {
        res.method = TestMethod::Exact;
        // All ranks are integers here, so the doubled deviation from the mean
        // rank sum, |2w - n(total+1)|, is an exact integer comparison.
        const std::vector<double> counts = rank_sum_counts(total, n);
        const long long center = static_cast<long long>(n) * (total + 1);
        const long long dev =
            std::llabs(2 * static_cast<long long>(std::llround(w)) - center);
        double tail = 0.0, all = 0.0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            all += counts[s];
            if (std::llabs(2 * static_cast<long long>(s) - center) >= dev) {
                tail += counts[s];
            }
        }
        res.p_value = tail / all;
    } else {
        res.method = TestMethod::NormalApprox;
        if (var <= 0.0) {
            res.p_value = 1.0;  // every pooled value tied
        } else {
            res.p_value = std::min(1.0, std::erfc(std::fabs(res.z_value) / std::sqrt(2.0)));
        }
    }
    return res;
}

double signed_rank_test_greater(const std::vector<double>& diffs) {
    std::vector<double> nonzero;
    nonzero.reserve(diffs.size());
    for (double d : diffs) {
        if (d != 0.0) nonzero.push_back(d);
    }
    const int m = static_cast<int>(nonzero.size());
    if (m == 0) return 1.0;

    std::vector<double> abs_vals(nonzero.size());
    for (std::size_t i = 0; i < nonzero.size(); ++i) abs_vals[i] = std::fabs(nonzero[i]);
    const RankInfo info = midranks(abs_vals);

    double w_plus = 0.0, rank_sum = 0.0, rank_sq_sum = 0.0;
    for (std::size_t i = 0; i < nonzero.size(); ++i) {
        const double r = info.ranks[i];
        rank_sum += r;
        rank_sq_sum += r * r;
        if (nonzero[i] > 0.0) w_plus += r;
    }

    if (m <= 50) {
        // Midranks are multiples of 1/2; doubling makes the lattice integral.
        // Conditional on the observed |diff| ranks, each of the 2^m sign
        // assignments is equally likely under the null.
        std::vector<long long> doubled(nonzero.size());
        long long sum2 = 0;
        for (std::size_t i = 0; i < nonzero.size(); ++i) {
            doubled[i] = std::llround(2.0 * info.ranks[i]);
            sum2 += doubled[i];
        }
        std::vector<double> g(static_cast<std::size_t>(sum2) + 1, 0.0);
        g[0] = 1.0;
        long long placed = 0;
        for (long long d : doubled) {
            placed += d;
            for (long long s = placed; s >= d; --s) {
                g[static_cast<std::size_t>(s)] += g[static_cast<std::size_t>(s - d)];
            }
        }
        const long long observed = std::llround(2.0 * w_plus);
        double tail = 0.0;
        for (long long s = observed; s <= sum2; ++s) {
            tail += g[static_cast<std::size_t>(s)];
        }
        return tail / std::pow(2.0, m);
    }

    const double mu = rank_sum / 2.0;
    const double var = rank_sq_sum / 4.0;
    const double z = (w_plus - mu - 0.5) / std::sqrt(var);
    return 1.0 - normal_cdf(z);
}

double effect_size(const std::map<std::string, double>& a,
                   const std::map<std::string, double>& b) {
    std::int64_t n = 0, a_low2 = 0, a_high2 = 0;  // doubled counts, ties split
    for (const auto& [seg, va] : a) {
        auto it = b.find(seg);
        if (it == b.end()) continue;
        ++n;
        if (va < it->second) {
            a_low2 += 2;
        } else if (va > it->second) {
            a_high2 += 2;
        } else {
            a_low2 += 1;
            a_high2 += 1;
        }
    }
    if (n == 0) throw std::invalid_argument("effect_size: no shared segments");
    // Dividing only the smaller doubled count and deriving the other side as
    // its complement keeps effect_size(a,b) + effect_size(b,a) == 1 exact.
    const double total = 2.0 * static_cast<double>(n);
    if (a_low2 <= a_high2) return static_cast<double>(a_low2) / total;
    return 1.0 - static_cast<double>(a_high2) / total;
}

EffectMatrix effect_matrix(
    const std::map<std::string, std::map<std::string, double>>& per_system_scores) {
    EffectMatrix em;
    for (const auto& [id, scores] : per_system_scores) em.system_ids.push_back(id);
    const std::size_t k = em.system_ids.size();
    em.values.assign(k, std::vector<double>(k, std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            try {
                em.values[i][j] = effect_size(per_system_scores.at(em.system_ids[i]),
                                              per_system_scores.at(em.system_ids[j]));
            } catch (const std::invalid_argument&) {
                throw std::invalid_argument("effect_matrix: no shared segments for (" +
                                            em.system_ids[i] + ", " + em.system_ids[j] +
                                            ")");
            }
        }
    }
    return em;
}

Correlations correlations(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("correlations: size mismatch");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("correlations: need at least 2 points");
    }
    Correlations out;

    bool defined = false;
    double r = pearson_impl(x, y, defined);
    if (defined) out.pearson = r;

    const std::vector<double> rx = midranks(x).ranks;
    const std::vector<double> ry = midranks(y).ranks;
    r = pearson_impl(rx, ry, defined);
    if (defined) out.spearman = r;

    const std::size_t n = x.size();
    double concordant = 0.0, discordant = 0.0, ties_x = 0.0, ties_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0) {
                ties_x += 1.0;
                ties_y += 1.0;
            } else if (dx == 0.0) {
                ties_x += 1.0;
            } else if (dy == 0.0) {
                ties_y += 1.0;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                concordant += 1.0;
            } else {
                discordant += 1.0;
            }
        }
    }
    const double n0 = static_cast<double>(n) * (n - 1) / 2.0;
    const double denom = (n0 - ties_x) * (n0 - ties_y);
    if (denom > 0.0) {
        out.kendall = std::clamp((concordant - discordant) / std::sqrt(denom), -1.0, 1.0);
    }
    return out;
}

Clustering cluster_systems(
    const std::map<std::string, std::map<std::string, double>>& per_system_scores,
    double alpha) {
    if (per_system_scores.size() < 2) {
        throw std::invalid_argument("cluster_systems: need at least 2 systems");
    }
    struct Sys {
        std::string id;
        double mean;
        std::vector<double> values;
    };
    std::vector<Sys> systems;
    for (const auto& [id, scores] : per_system_scores) {
        if (scores.empty()) {
            throw std::invalid_argument("cluster_systems: no scores for system \"" + id +
                                        "\"");
        }
        Sys s;
        s.id = id;
        for (const auto& [seg, v] : scores) s.values.push_back(v);
        s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) /
                 static_cast<double>(s.values.size());
        systems.push_back(std::move(s));
    }
    std::sort(systems.begin(), systems.end(), [](const Sys& a, const Sys& b) {
        if (a.mean != b.mean) return a.mean > b.mean;
        return a.id < b.id;
    });

    Clustering out;
    int cluster = 1;
    for (std::size_t i = 0; i < systems.size(); ++i) {
        bool beats_all = true;
        for (std::size_t j = i + 1; j < systems.size() && beats_all; ++j) {
            const RankSumResult rr = rank_sum_test(systems[i].values, systems[j].values);
            beats_all = rr.p_value < alpha && systems[i].mean > systems[j].mean;
        }
        ClusterEntry e;
        e.system_id = systems[i].id;
        e.mean_score = systems[i].mean;
        e.n_segments = static_cast<int>(systems[i].values.size());
        e.cluster_index = cluster;
        e.outperforms_all_lower = beats_all;
        if (beats_all) ++cluster;
        out.entries.push_back(std::move(e));
    }
    out.n_clusters = out.entries.back().cluster_index;
    return out;
}

}  // namespace mtaudit
