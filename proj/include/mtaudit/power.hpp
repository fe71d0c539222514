#pragma once

// Power of the two-sided Wilcoxon rank-sum test under a normal location-shift
// alternative calibrated to a target stochastic-superiority effect size,
// by Monte Carlo simulation or a closed-form approximation, plus sample-size
// planning on a fixed grid.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mtaudit {

enum class PowerMethod { MonteCarlo, Analytic };

std::string to_string(PowerMethod m);

struct PowerEstimate {
    double effect = 0.5;
    int n_per_group = 0;
    double alpha = 0.05;
    double power = 0.0;
    long reps = 0;                // 0 for the analytic method
    double half_width_95 = 0.0;   // 0 for the analytic method
    PowerMethod method = PowerMethod::MonteCarlo;
};

// Location shift delta such that P(X < Y) = effect for X ~ N(0,1),
// Y ~ N(delta,1). Throws std::invalid_argument outside (0, 1).
double effect_to_shift(double effect);

// Draws `reps` pairs of samples of size n_per_group from N(0,1) and
// N(delta,1) and reports the rejection rate of the two-sided rank-sum test
// at level alpha. Each replication uses its own counter-derived RNG stream,
// so results depend only on (effect, n_per_group, alpha, reps, seed) and
// never on thread count. half_width_95 is the 95% binomial CI half-width.
// n_threads 0 means use the hardware concurrency.
PowerEstimate simulate_power(double effect, int n_per_group, double alpha = 0.05,
                             long reps = 20000, std::uint64_t seed = 1,
                             int n_threads = 0);

// Closed-form normal approximation to the same power, using the asymptotic
// efficiency of the rank-sum test relative to the t-test under normality
// (3/pi, approximately 0.955). Requires n_per_group >= 10; exact at
// effect = 0.5 where power equals alpha.
PowerEstimate analytic_power(double effect, int n_per_group, double alpha = 0.05);

struct PlanOptions {
    double target_power = 0.8;
    double alpha = 0.05;
    int grid_step = 55;        // candidate sizes are multiples of this
    int max_n = 10000;
    PowerMethod method = PowerMethod::Analytic;
    long reps = 20000;         // Monte Carlo only
    std::uint64_t seed = 1;    // Monte Carlo only
};

// Smallest grid size whose power reaches target_power, or nullopt when even
// max_n falls short. With the Monte Carlo method a size is accepted only
// when the lower 95% confidence bound (power - half_width_95) reaches the
// target, so noise cannot promote an undersized design. Grid sizes below
// the analytic method's minimum n are skipped. Throws std::invalid_argument
// at effect 0.5, where power never exceeds alpha.
std::optional<int> min_sample_size(double effect, const PlanOptions& opt = {});

struct PowerGrid {
    std::vector<int> sizes;
    std::vector<double> effects;
    std::vector<std::vector<PowerEstimate>> cells;  // [size_index][effect_index]
};

// Power at every (size, effect) grid point. Monte Carlo cells get distinct
// RNG streams derived from (seed, size index, effect index).
PowerGrid power_grid(const std::vector<int>& sizes, const std::vector<double>& effects,
                     double alpha = 0.05, PowerMethod method = PowerMethod::MonteCarlo,
                     long reps = 20000, std::uint64_t seed = 1);

// The customary reporting axes: sizes 55, 110, ..., 2970 and effects
// 0.33, 0.34, ..., 0.49.
std::vector<int> default_grid_sizes();
std::vector<double> default_grid_effects();

}  // namespace mtaudit
