#include "doctest.h"

#include <cmath>

#include "hbp/montecarlo.hpp"
#include "hbp/theory.hpp"

using namespace hbp;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.dims = Dimensions(3, 20);
    cfg.j = 1;
    cfg.amplitude = 1.0;
    cfg.trials = 300;
    cfg.master_seed = 42;
    return cfg;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("config validation") {
    auto cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.j = 2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // 2j > d
    cfg = small_config();
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.amplitude.reset();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.p_override = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.theta = 3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // exact counting needs threshold 2
    cfg.mode = CountMode::maximal;
    CHECK_NOTHROW(cfg.validate());
    cfg.dims = Dimensions(3, 1000);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // no fast path above threshold 2
    cfg = small_config();
    cfg.record_dims = {4};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.conditional_open = Subtorus::whole(Dimensions(3, 21));
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("probability and recorded dims") {
    auto cfg = small_config();
    CHECK(cfg.probability() == doctest::Approx(std::pow(20.0, -2.5)));
    CHECK(cfg.recorded_dims() == std::vector<int>{2, 3});
    cfg.p_override = 0.25;
    CHECK(cfg.probability() == 0.25);
    cfg.record_dims = {3, 1, 3};
    CHECK(cfg.recorded_dims() == std::vector<int>{1, 3});
}

TEST_CASE("seed count law") {
    CHECK(seed_count_law(Dimensions(3, 1000), 1e-8) == SeedCountLaw::binomial);
    CHECK(seed_count_law(Dimensions(10, 1000), 1e-26) == SeedCountLaw::poisson);
    CHECK_THROWS_AS(seed_count_law(Dimensions(10, 1000), 1e-12), std::invalid_argument);
}

TEST_CASE("sampling edge cases and determinism") {
    auto cfg = small_config();
    cfg.dims = Dimensions(3, 4);
    cfg.p_override = 0.0;
    CHECK(sample_seeds(cfg, 0).empty());
    cfg.p_override = 1.0;
    CHECK(sample_seeds(cfg, 0).points().size() == 64);
    cfg.p_override = 0.3;
    CHECK(sample_seeds(cfg, 5).points() == sample_seeds(cfg, 5).points());
    CHECK(sample_seeds(cfg, 5).points() != sample_seeds(cfg, 6).points());
    CHECK(trial_seed(1, 2) != trial_seed(2, 1));
}

TEST_CASE("sampler is an independent Bernoulli field") {
    const Dimensions dims(2, 3);
    const double p = 0.3;
    const int trials = 100'000;
    std::vector<double> freq(9, 0.0);
    std::vector<std::vector<double>> joint(9, std::vector<double>(9, 0.0));
    std::mt19937_64 rng(2024);
    for (int t = 0; t < trials; ++t) {
        const auto s = sample_seeds(dims, p, rng);
        std::vector<int> open(9, 0);
        for (const auto& u : s.points()) open[static_cast<std::size_t>(u[0] * 3 + u[1])] = 1;
        for (int a = 0; a < 9; ++a) {
            freq[a] += open[a];
            for (int b = a + 1; b < 9; ++b) joint[a][b] += open[a] * open[b];
        }
    }
    const double se = std::sqrt(p * (1 - p) / trials);
    // Covariance estimator of two independent Bernoulli(p) has sd p(1-p)/sqrt(T).
    const double cov_se = p * (1 - p) / std::sqrt(double(trials));
    for (int a = 0; a < 9; ++a) {
        CHECK(std::abs(freq[a] / trials - p) < 3 * se);
        for (int b = a + 1; b < 9; ++b) {
            const double cov = joint[a][b] / trials - (freq[a] / trials) * (freq[b] / trials);
            CHECK(std::abs(cov) < 3 * cov_se + 1e-4);
        }
    }
}

TEST_CASE("dense draws use the same law") {
    // 4m > N triggers selection sampling; the mean count must still be Np.
    const Dimensions dims(2, 10);
    std::mt19937_64 rng(9);
    double total = 0;
    const int trials = 20'000;
    for (int t = 0; t < trials; ++t) total += double(sample_seeds(dims, 0.6, rng).points().size());
    CHECK(total / trials == doctest::Approx(60).epsilon(0.005));
}

TEST_CASE("trial evaluation") {
    auto cfg = small_config();
    cfg.dims = Dimensions(3, 3);
    cfg.p_override = 0.0;
    const auto empty = run_trial(cfg, 0);
    CHECK(empty.seed_count == 0);
    for (bool b : empty.event_I) CHECK_FALSE(b);
    for (bool b : empty.event_C) CHECK_FALSE(b);
    CHECK(empty.max_dim == -1);

    const auto forced = evaluate_trial(cfg, 0, SeedSet(cfg.dims, {{0, 0, 0}, {1, 1, 0}}));
    CHECK(forced.event_I[2]);
    CHECK_FALSE(forced.event_C[3]);
    CHECK(forced.y_exact[2] == 1);
    CHECK(forced.max_dim == 2);
}

TEST_CASE("per-trial invariants") {
    auto cfg = small_config();
    cfg.dims = Dimensions(4, 5);
    cfg.p_override = 0.02;
    cfg.record_dims = {0, 1, 2, 3, 4};
    for (std::int64_t t = 0; t < 1000; ++t) {
        const auto r = run_trial(cfg, t);
        for (int i = 0; i <= 4; ++i) {
            const auto k = static_cast<std::size_t>(i);
            REQUIRE(r.y_exact[k] >= r.y_maximal[k]);
            REQUIRE((!r.event_I[k] || r.event_C[k]));
            if (i > 0) REQUIRE((!r.event_C[k] || r.event_C[k - 1]));
            REQUIRE(r.event_C[k] == (r.max_dim >= i));
        }
    }
}

TEST_CASE("threshold other than 2 goes through the dense engine") {
    auto cfg = small_config();
    cfg.dims = Dimensions(2, 4);
    cfg.theta = 1;
    cfg.mode = CountMode::maximal;
    cfg.p_override = 0.1;
    // At threshold 1 any seed opens the whole (connected) torus.
    const auto r = evaluate_trial(cfg, 0, SeedSet(cfg.dims, {{1, 2}}));
    CHECK(r.event_C[2]);
    CHECK(r.event_I[2]);
    CHECK(r.max_dim == 2);
}

TEST_CASE("wilson interval") {
    const auto one = wilson_estimate("x", 1, 1);
    CHECK(one.estimate == 1.0);
    CHECK(one.wilson_low < 1.0);
    CHECK(one.wilson_high == doctest::Approx(1.0));
    const auto zero = wilson_estimate("x", 0, 1);
    CHECK(zero.wilson_low == doctest::Approx(0.0));
    CHECK(zero.wilson_high > 0.0);
    const auto half = wilson_estimate("x", 50, 100);
    CHECK(half.wilson_low == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(half.wilson_high == doctest::Approx(0.5962).epsilon(1e-3));
}

TEST_CASE("experiment results do not depend on the worker count") {
    auto cfg = small_config();
    const auto a = run_experiment(cfg, 1);
    const auto b = run_experiment(cfg, 4);
    CHECK(a.summary == b.summary);
    CHECK(a.trials == b.trials);
    CHECK(a.summary.trials == 300);
    CHECK(a.summary.find("I_2") != nullptr);
    CHECK(a.summary.find("C_2\\I_2") != nullptr);
    CHECK(a.summary.find("I_2\\I_3") != nullptr);
    CHECK(a.summary.find("nope") == nullptr);
}

TEST_CASE("single trial summary") {
    auto cfg = small_config();
    cfg.trials = 1;
    const auto s = run_experiment(cfg).summary;
    const auto* I = s.find("I_2");
    REQUIRE(I);
    CHECK(I->wilson_low <= I->estimate);
    CHECK(I->estimate <= I->wilson_high);
}

TEST_CASE("mean Y equals the exact expected count of spanned planes") {
    // E[Y] = 3n P(a fixed plane is internally spanned), exactly, at any n.
    ExperimentConfig cfg;
    cfg.dims = Dimensions(3, 1000);
    cfg.j = 1;
    cfg.amplitude = 1.0;
    cfg.trials = 10'000;
    cfg.master_seed = 7;
    const auto s = run_experiment(cfg).summary;
    const double expected = 3 * 1000 * theory::plane_span_prob(1000, cfg.probability());
    CHECK(std::abs(s.lambda_hat - expected) < 3 * s.lambda_hat_se);
    CHECK(s.seed_count_law == "binomial");
    CHECK(s.truncated_trials == 0);
}

TEST_CASE("fixed plane spanning frequency matches the exact probability") {
    const int n = 10;
    const double p = 0.02;
    const auto e = fixed_subtorus_span(2, n, p, 100'000, 3);
    const double exact = theory::plane_span_prob(n, p);
    CHECK(std::abs(e.estimate - exact) < 3 * std::sqrt(exact * (1 - exact) / 100'000));
}

TEST_CASE("amplitude sweep is monotone") {
    auto cfg = small_config();
    cfg.dims = Dimensions(3, 50);
    cfg.trials = 2000;
    const auto cells = sweep(cfg, SweepParameter::a, {0.5, 1.0, 2.0});
    REQUIRE(cells.size() == 3);
    double last = -1;
    for (const auto& c : cells) {
        REQUIRE(c.summary);
        const double est = c.summary->find("I_2")->estimate;
        CHECK(est > last);
        last = est;
    }
    const auto single = sweep(cfg, SweepParameter::n, {30});
    CHECK(single.size() == 1);
    CHECK(single[0].summary->p == doctest::Approx(std::pow(30.0, -2.5)));
}

TEST_CASE("sweep rows report failures instead of aborting") {
    auto cfg = small_config();
    cfg.trials = 10;
    const auto cells = sweep(cfg, SweepParameter::n, {1, 10});
    REQUIRE(cells.size() == 2);
    CHECK_FALSE(cells[0].summary.has_value());
    CHECK(cells[0].status != "ok");
    CHECK(cells[1].status == "ok");
}

}  // TEST_SUITE
