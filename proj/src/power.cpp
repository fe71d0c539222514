#include "mtaudit/power.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "mtaudit/normal.hpp"
#include "mtaudit/stats.hpp"

namespace mtaudit {

namespace {

// The (index+1)-th output of a splitmix64 generator seeded with `seed`.
// Used to give every Monte Carlo replication its own RNG stream, making
// results a pure function of (seed, index) regardless of thread count.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Box-Muller over a 53-bit uniform; u1 is kept in (0, 1] so the log is finite.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

void check_common(double effect, int n_per_group, double alpha) {
    if (!(effect > 0.0 && effect < 1.0)) {
        throw std::invalid_argument("power: effect must be in (0, 1)");
    }
    if (n_per_group < 1) {
        throw std::invalid_argument("power: n_per_group must be positive");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("power: alpha must be in (0, 1)");
    }
}

}  // namespace

std::string to_string(PowerMethod m) {
    return m == PowerMethod::MonteCarlo ? "mc" : "analytic";
}

double effect_to_shift(double effect) {
    if (!(effect > 0.0 && effect < 1.0)) {
        throw std::invalid_argument("effect_to_shift: effect must be in (0, 1)");
    }
    // P(X < Y) = Phi(delta / sqrt(2)) for X ~ N(0,1), Y ~ N(delta,1).
    return std::sqrt(2.0) * normal_quantile(effect);
}

PowerEstimate simulate_power(double effect, int n_per_group, double alpha, long reps,
                             std::uint64_t seed, int n_threads) {
    check_common(effect, n_per_group, alpha);
    if (reps < 1) throw std::invalid_argument("simulate_power: reps must be positive");
    const double delta = effect_to_shift(effect);
    const std::size_t n = static_cast<std::size_t>(n_per_group);

    auto run_range = [&](long begin, long end) {
        long rejections = 0;
        std::vector<double> a(n), b(n);
        for (long rep = begin; rep < end; ++rep) {
            NormalSampler draw(splitmix64_at(seed, static_cast<std::uint64_t>(rep)));
            for (std::size_t i = 0; i < n; ++i) a[i] = draw();
            for (std::size_t i = 0; i < n; ++i) b[i] = delta + draw();
            if (rank_sum_test(a, b).p_value < alpha) ++rejections;
        }
        return rejections;
    };

    int threads = n_threads > 0
                      ? n_threads
                      : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<int>(std::min<long>(threads, reps));

    long rejections = 0;
    if (threads <= 1) {
        rejections = run_range(0, reps);
    } else {
        std::vector<long> partial(static_cast<std::size_t>(threads), 0);
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            const long begin = reps * t / threads;
            const long end = reps * (t + 1) / threads;
            pool.emplace_back([&, t, begin, end] { partial[static_cast<std::size_t>(t)] = run_range(begin, end); });
        }
        for (auto& th : pool) th.join();
        for (long p : partial) rejections += p;
    }

    PowerEstimate est;
    est.effect = effect;
    est.n_per_group = n_per_group;
    est.alpha = alpha;
    est.power = static_cast<double>(rejections) / static_cast<double>(reps);
    est.reps = reps;
    est.half_width_95 =
        1.96 * std::sqrt(est.power * (1.0 - est.power) / static_cast<double>(reps));
    est.method = PowerMethod::MonteCarlo;
    return est;
}

PowerEstimate analytic_power(double effect, int n_per_group, double alpha) {
    check_common(effect, n_per_group, alpha);
    if (n_per_group < 10) {
        throw std::invalid_argument("analytic_power: needs n_per_group >= 10");
    }
    // Noncentrality of the equivalent-efficiency t comparison: the rank-sum
    // test keeps 3/pi ~ 0.955 of the two-sample t's efficiency when the
    // data really are normal.
    const double delta = effect == 0.5 ? 0.0 : effect_to_shift(effect);
    const double ncp =
        std::fabs(delta) * std::sqrt(0.955 * static_cast<double>(n_per_group) / 2.0);
    const double zc = normal_quantile(1.0 - alpha / 2.0);
    PowerEstimate est;
    est.effect = effect;
    est.n_per_group = n_per_group;
    est.alpha = alpha;
    est.power = normal_cdf(ncp - zc) + normal_cdf(-ncp - zc);
    est.reps = 0;
    est.half_width_95 = 0.0;
    est.method = PowerMethod::Analytic;
    return est;
}

std::optional<int> min_sample_size(double effect, const PlanOptions& opt) {
    if (!(effect > 0.0 && effect < 1.0)) {
        throw std::invalid_argument("min_sample_size: effect must be in (0, 1)");
    }
    if (effect == 0.5) {
        throw std::invalid_argument(
            "min_sample_size: at effect 0.5 power cannot exceed alpha under the null");
    }
    if (!(opt.target_power > 0.0 && opt.target_power < 1.0)) {
        throw std::invalid_argument("min_sample_size: target_power must be in (0, 1)");
    }
    if (opt.grid_step < 1 || opt.max_n < opt.grid_step) {
        throw std::invalid_argument("min_sample_size: bad grid");
    }
    for (int n = opt.grid_step; n <= opt.max_n; n += opt.grid_step) {
        if (opt.method == PowerMethod::Analytic) {
            if (n < 10) continue;
            if (analytic_power(effect, n, opt.alpha).power >= opt.target_power) return n;
        } else {
            const PowerEstimate est =
                simulate_power(effect, n, opt.alpha, opt.reps, opt.seed);
            // Accept only when the CI lower bound clears the target, so a
            // lucky draw cannot certify an undersized design.
            if (est.power - est.half_width_95 >= opt.target_power) return n;
        }
    }
    return std::nullopt;
}

PowerGrid power_grid(const std::vector<int>& sizes, const std::vector<double>& effects,
                     double alpha, PowerMethod method, long reps, std::uint64_t seed) {
    PowerGrid grid;
    grid.sizes = sizes;
    grid.effects = effects;
    grid.cells.reserve(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        std::vector<PowerEstimate> row;
        row.reserve(effects.size());
        for (std::size_t j = 0; j < effects.size(); ++j) {
            if (method == PowerMethod::Analytic) {
                row.push_back(analytic_power(effects[j], sizes[i], alpha));
            } else {
                const std::uint64_t cell_seed =
                    splitmix64_at(splitmix64_at(seed, i), j);
                row.push_back(
                    simulate_power(effects[j], sizes[i], alpha, reps, cell_seed));
            }
        }
        grid.cells.push_back(std::move(row));
    }
    return grid;
}

std::vector<int> default_grid_sizes() {
    std::vector<int> sizes;
    for (int n = 55; n <= 2970; n += 55) sizes.push_back(n);
    return sizes;
}

std::vector<double> default_grid_effects() {
    std::vector<double> effects;
    for (int e = 33; e <= 49; ++e) effects.push_back(static_cast<double>(e) / 100.0);
    return effects;
}

}  // namespace mtaudit
