#pragma once

// Seeded Monte Carlo experiments on the events I_i (some i-subtorus is
// internally spanned) and C_i (some i-subtorus ends fully open).

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hbp/ca_engine.hpp"
#include "hbp/span_engine.hpp"
#include "hbp/torus.hpp"

namespace hbp {

struct ExperimentConfig {
    Dimensions dims{3, 3};
    int j = 1;
    std::optional<double> amplitude = 1.0;  ///< p = a n^(-(d/(j+1)+j))
    std::optional<double> p_override;       ///< takes precedence over amplitude
    int theta = 2;
    std::int64_t trials = 1;
    std::uint64_t master_seed = 0;
    CountMode mode = CountMode::exact;
    std::optional<Subtorus> conditional_open;
    std::vector<int> record_dims;  ///< empty means {2j, d}
    std::size_t family_cap = kDefaultFamilyCap;
    bool record_timings = false;  ///< wall times make trial output nondeterministic

    /// Throws std::invalid_argument on any violated constraint.
    void validate() const;
    double probability() const;
    /// Sorted, unique, defaulted.
    std::vector<int> recorded_dims() const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Mixes (master_seed, trial_index) into an independent per-trial seed.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

/// How the number of open vertices was drawn.
enum class SeedCountLaw { binomial, poisson };

/// Binomial(N, p) when N = n^d fits in 64 bits, else Poisson(N p), which is
/// only allowed when N p^2 < 1e-3 (total variation error at most N p^2).
SeedCountLaw seed_count_law(const Dimensions& dims, double p);

/// Independent Bernoulli(p) open vertices, drawn sparsely: a count, then
/// that many distinct uniform vertices. Deterministic in (master_seed,
/// trial_index).
SeedSet sample_seeds(const ExperimentConfig& cfg, std::int64_t trial_index);

/// Same as above with an explicit generator.
SeedSet sample_seeds(const Dimensions& dims, double p, std::mt19937_64& rng);

struct TrialResult {
    std::int64_t trial_index = 0;
    std::uint64_t seed_count = 0;
    /// Per dimension 0..d. y_exact is empty when the family was truncated
    /// or exact counting was not requested.
    std::vector<std::int64_t> y_exact;
    std::vector<std::int64_t> y_maximal;
    std::vector<bool> event_I;  ///< per dimension 0..d
    std::vector<bool> event_C;  ///< per dimension 0..d
    int max_dim = -1;
    bool truncated = false;
    double wall_ms = 0.0;

    /// Count driving I_i and the Y histogram: exact when available.
    std::int64_t y(int dim) const;

    bool operator==(const TrialResult&) const = default;
};

TrialResult run_trial(const ExperimentConfig& cfg, std::int64_t trial_index);

/// Evaluates a trial on the given seeds instead of sampling them.
TrialResult evaluate_trial(const ExperimentConfig& cfg, std::int64_t trial_index,
                           const SeedSet& seeds);

struct Estimate {
    std::string event;
    std::int64_t successes = 0;
    std::int64_t trials = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;

    bool operator==(const Estimate&) const = default;
};

/// 95% Wilson score interval for k successes out of n.
Estimate wilson_estimate(std::string event, std::int64_t successes, std::int64_t trials);

struct Summary {
    double p = 0.0;
    std::string seed_count_law;  ///< "binomial" or "poisson"
    double le_cam_bound = 0.0;   ///< N p^2 when the Poisson law is used, else 0
    std::int64_t trials = 0;
    std::vector<Estimate> events;
    int y_dim = 0;                          ///< 2j
    std::vector<std::int64_t> y_histogram;  ///< trials with Y_(2j) = k
    double lambda_theory = 0.0;             ///< lambda(j, d, a), a implied by p
    double predicted_I_limit = 0.0;
    double lambda_hat = 0.0;  ///< mean Y
    double lambda_hat_se = 0.0;
    double tv_y_vs_poisson = 0.0;
    double tv_se = 0.0;  ///< bootstrap standard error of the tv estimate
    std::int64_t truncated_trials = 0;
    std::int64_t exact_vs_maximal_mismatches = 0;  ///< trials with Y_exact != Y_maximal at 2j
    double mean_seed_count = 0.0;

    const Estimate* find(const std::string& event) const;

    bool operator==(const Summary&) const = default;
};

struct ExperimentResult {
    Summary summary;
    std::vector<TrialResult> trials;  ///< by trial index
};

/// Runs every trial (across `workers` threads) and aggregates in index
/// order, so the output does not depend on the worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 1);

/// Aggregation of already computed trials.
Summary summarize(const ExperimentConfig& cfg, const std::vector<TrialResult>& trials);

/// Probability that one fixed dim-dimensional subtorus (dim >= 2) is
/// internally spanned under Bernoulli(p) seeds. Only seeds inside the
/// subtorus matter, so each trial samples an n^dim grid. Trial k uses
/// trial_seed(master_seed, k).
Estimate fixed_subtorus_span(int dim, int n, double p, std::int64_t trials,
                             std::uint64_t master_seed);

enum class SweepParameter { n, a };

struct SweepCell {
    double value = 0.0;
    std::optional<Summary> summary;
    std::string status = "ok";
};

std::vector<SweepCell> sweep(const ExperimentConfig& cfg, SweepParameter parameter,
                             const std::vector<double>& values, int workers = 1);

}  // namespace hbp
