#pragma once

// Closed-form quantities for threshold-2 percolation on the Hamming torus,
// plus brute-force combinatorial oracles for them.

#include <cstdint>
#include <span>
#include <vector>

#include "hbp/torus.hpp"

namespace hbp::theory {

/// Largest j with j(j+1) < d. Requires d > 2.
int J_of(int d);

/// Exact rational number with positive denominator, always reduced.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

/// p = a * n^(-exponent) with exponent = d/(j+1) + j. Valid for 1 <= j, 2j <= d.
class CriticalScaling {
public:
    CriticalScaling(int j, int d, double a);

    int j() const noexcept { return j_; }
    int d() const noexcept { return d_; }
    double amplitude() const noexcept { return a_; }
    Rational exponent() const noexcept { return exponent_; }

    /// Throws std::domain_error when the result exceeds 1.
    double p(int n) const;

private:
    int j_;
    int d_;
    double a_;
    Rational exponent_;
};

BigInt binomial(int n, int k);
BigInt factorial(int n);

/// C(d,2j) (2j)! 2^(-j-1) a^(j+1).
double lambda(int j, int d, double a);

double critical_p(int j, int d, double a, int n);

/// 1 - exp(-lambda(j, d, a)).
double predicted_I_limit(int j, int d, double a);

struct PoissonPrediction {
    double lambda;
    double limit_prob;
};

PoissonPrediction poisson_prediction(int j, int d, double a);

/// Leading-order probability that a fixed 2i-dimensional subtorus is
/// internally spanned: (2i)! 2^(-i-1) n^(i(i+3)) p^(i+1).
double m2i_leading(double n, double p, int i);

/// Exponents (of n, of p) in the upper bound for a fixed (2i+1)-subtorus;
/// no constant is known, so only the exponents are exposed.
struct PowerLaw {
    int n_exponent;
    int p_exponent;
};
PowerLaw odd_dimension_bound(int i);

/// P(Bin(n, p) >= 2): a fixed line is internally spanned.
double line_span_prob(int n, double p);

/// Exact probability that a fixed plane is internally spanned: at least two
/// seeds in it, not all on one line.
double plane_span_prob(int n, double p);

/// Unordered non-collinear vertex pairs in an n x n plane:
/// C(n^2, 2) - 2n C(n, 2).
BigInt perfect_count_plane(int n);

/// Lower bound (2i)! 2^(-i-1) n^(i(i+3)) (1 - 2^i / n) on perfect collections
/// in a 2i-dimensional subtorus. Negative or zero when 2^i >= n.
double perfect_lower_bound(int n, int i);

/// Counts (i+1)-subsets of the 2i-dimensional torus [n]^(2i) that admit a
/// perfect ordering v_1..v_(i+1): they span the whole torus,
/// dis(v_a, v_b) = 2(b-1) for a < b, and v_1 < v_2 lexicographically.
/// Throws BudgetExceeded if C(n^(2i), i+1) > budget.
std::uint64_t perfect_bruteforce(int n, int i, std::uint64_t budget = 2'000'000'000ULL);

/// x - 2 floor(x/2).
int sigma(int x);

struct ExponentEntry {
    int t;
    int r;
    int E;
    int e;
    bool operator==(const ExponentEntry&) const = default;
};

/// Exponent corrections for the conditional spanning probability of a
/// t-dimensional subtorus given an open r-dimensional one, 0 <= r < t.
ExponentEntry exponent_table(int t, int r);

/// Poisson(lambda) mass at k, evaluated in log space.
double poisson_pmf(double lambda, std::int64_t k);

/// Poisson(lambda) on {0..max_k}, with all mass above max_k folded into max_k.
std::vector<double> poisson_truncated(double lambda, std::int64_t max_k);

/// Half the l1 distance between two distributions on {0, 1, ...}. Shorter
/// inputs are padded with zeros. Each must sum to 1 within 1e-9.
double tv_distance(std::span<const double> p, std::span<const double> q);

}  // namespace hbp::theory
