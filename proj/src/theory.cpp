#include "hbp/theory.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hbp/span_engine.hpp"

namespace hbp::theory {

namespace {

void check_scaling_domain(int j, int d) {
    if (j < 1 || 2 * j > d) {
        throw std::domain_error("need 1 <= j and 2j <= d, got j=" + std::to_string(j) +
                                ", d=" + std::to_string(d));
    }
}

}  // namespace

int J_of(int d) {
    if (d <= 2) throw std::domain_error("J_d is defined for d > 2, got d=" + std::to_string(d));
    int j = 1;
    while ((j + 1) * (j + 2) < d) ++j;
    return j;
}

CriticalScaling::CriticalScaling(int j, int d, double a) : j_(j), d_(d), a_(a) {
    check_scaling_domain(j, d);
    if (!(a > 0) || !std::isfinite(a)) throw std::domain_error("amplitude must be positive");
    std::int64_t num = d + static_cast<std::int64_t>(j) * (j + 1);
    std::int64_t den = j + 1;
    const std::int64_t g = std::gcd(num, den);
    exponent_ = Rational{num / g, den / g};
}

double CriticalScaling::p(int n) const {
    if (n < 1) throw std::domain_error("n must be positive");
    const double p = a_ * std::pow(static_cast<double>(n), -exponent_.value());
    if (p > 1.0) {
        throw std::domain_error("critical p = " + std::to_string(p) + " exceeds 1 at n=" +
                                std::to_string(n));
    }
    return p;
}

BigInt binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    BigInt result = 1;
    for (int m = 1; m <= k; ++m) {
        result *= n - k + m;
        result /= m;
    }
    return result;
}

BigInt factorial(int n) {
    if (n < 0) throw std::domain_error("factorial of negative number");
    BigInt result = 1;
    for (int m = 2; m <= n; ++m) result *= m;
    return result;
}

double lambda(int j, int d, double a) {
    check_scaling_domain(j, d);
    if (!(a > 0)) throw std::domain_error("amplitude must be positive");
    const double combinatorial = binomial(d, 2 * j).convert_to<double>() *
                                 factorial(2 * j).convert_to<double>();
    return combinatorial * std::ldexp(1.0, -j - 1) * std::pow(a, j + 1);
}

double critical_p(int j, int d, double a, int n) { return CriticalScaling(j, d, a).p(n); }

double predicted_I_limit(int j, int d, double a) { return -std::expm1(-lambda(j, d, a)); }

PoissonPrediction poisson_prediction(int j, int d, double a) {
    const double l = lambda(j, d, a);
    return {l, -std::expm1(-l)};
}

double m2i_leading(double n, double p, int i) {
    if (i < 1) throw std::domain_error("m2i_leading needs i >= 1");
    return factorial(2 * i).convert_to<double>() * std::ldexp(1.0, -i - 1) *
           std::pow(n, i * (i + 3)) * std::pow(p, i + 1);
}

PowerLaw odd_dimension_bound(int i) {
    if (i < 1) throw std::domain_error("odd_dimension_bound needs i >= 1");
    return {(i + 1) * (i + 4) - 2, i + 2};
}

double line_span_prob(int n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must be in [0,1]");
    if (p == 1.0) return n >= 2 ? 1.0 : 0.0;
    const double log_q = std::log1p(-p);
    const double none = std::exp(n * log_q);
    const double one = n * p * std::exp((n - 1) * log_q);
    return std::max(0.0, 1.0 - none - one);
}

double plane_span_prob(int n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must be in [0,1]");
    if (p == 1.0) return 1.0;
    // Not spanned iff no seed, one seed, or >= 2 seeds all on a single line.
    // Two seeds determine their line, so the 2n line events are disjoint.
    const double log_q = std::log1p(-p);
    const double cells = static_cast<double>(n) * n;
    const double none = std::exp(cells * log_q);
    const double one = cells * p * std::exp((cells - 1) * log_q);
    const double rest_closed = std::exp((cells - n) * log_q);
    const double collinear = 2.0 * n * rest_closed * line_span_prob(n, p);
    return std::max(0.0, 1.0 - none - one - collinear);
}

BigInt perfect_count_plane(int n) {
    if (n < 2) throw std::domain_error("perfect_count_plane needs n >= 2");
    return binomial(n * n, 2) - 2 * n * binomial(n, 2);
}

double perfect_lower_bound(int n, int i) {
    return factorial(2 * i).convert_to<double>() * std::ldexp(1.0, -i - 1) *
           std::pow(static_cast<double>(n), i * (i + 3)) * (1.0 - std::ldexp(1.0, i) / n);
}

std::uint64_t perfect_bruteforce(int n, int i, std::uint64_t budget) {
    if (i < 1) throw std::domain_error("perfect_bruteforce needs i >= 1");
    const Dimensions dims(2 * i, n);
    const auto cells = dims.vertex_count_u64();
    if (!cells || binomial(static_cast<int>(std::min<std::uint64_t>(*cells, INT32_MAX)), i + 1) >
                      BigInt(budget)) {
        throw BudgetExceeded("perfect_bruteforce(n=" + std::to_string(n) + ", i=" +
                             std::to_string(i) + ") exceeds the enumeration budget");
    }
    // Row-major rank order is lexicographic order on coordinates.
    const std::vector<Vertex> all = vertices(Subtorus::whole(dims), *cells);
    const Subtorus whole = Subtorus::whole(dims);

    std::vector<std::size_t> chosen;
    std::uint64_t count = 0;
    // Depth-first over ordered sequences; the distance condition for the next
    // element prunes almost every branch.
    auto extend = [&](auto&& self) -> void {
        const std::size_t k = chosen.size();  // 0-based position of the next element
        if (k == static_cast<std::size_t>(i + 1)) {
            std::vector<Subtorus> pts;
            for (auto idx : chosen) pts.push_back(point_subtorus(dims, all[idx]));
            const auto span = closure_of(dims, std::move(pts));
            if (span.tori.size() == 1 && span.tori.front() == whole) ++count;
            return;
        }
        const int required = 2 * static_cast<int>(k);
        const std::size_t first = (k == 1) ? chosen[0] + 1 : 0;
        for (std::size_t cand = first; cand < all.size(); ++cand) {
            bool ok = true;
            for (auto prev : chosen) {
                if (vertex_distance(all[prev], all[cand]) != required) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            chosen.push_back(cand);
            self(self);
            chosen.pop_back();
        }
    };
    extend(extend);
    return count;
}

int sigma(int x) {
    if (x < 0) throw std::domain_error("sigma needs x >= 0");
    return x - 2 * (x / 2);
}

ExponentEntry exponent_table(int t, int r) {
    if (r < 0 || r >= t) {
        throw std::domain_error("exponent_table needs 0 <= r < t, got t=" + std::to_string(t) +
                                ", r=" + std::to_string(r));
    }
    const int i = (t + 1) / 2;
    const int l = (r + 1) / 2;
    const bool t_even = sigma(t) == 0;
    const bool r_even = sigma(r) == 0;
    if (t_even && r_even) return {t, r, i - l, 0};
    if (!t_even && r_even) return {t, r, i - l - 1, 0};
    if (t_even) return {t, r, 2 * i, 1};
    return {t, r, 0, 0};
}

double poisson_pmf(double lambda, std::int64_t k) {
    if (!(lambda >= 0.0)) throw std::domain_error("poisson_pmf needs lambda >= 0");
    if (k < 0) return 0.0;
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    const double kd = static_cast<double>(k);
    return std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0));
}

std::vector<double> poisson_truncated(double lambda, std::int64_t max_k) {
    if (max_k < 0) throw std::domain_error("poisson_truncated needs max_k >= 0");
    std::vector<double> out(static_cast<std::size_t>(max_k + 1));
    double head = 0.0;
    for (std::int64_t k = 0; k < max_k; ++k) {
        out[static_cast<std::size_t>(k)] = poisson_pmf(lambda, k);
        head += out[static_cast<std::size_t>(k)];
    }
    out.back() = std::max(0.0, 1.0 - head);
    return out;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
    auto check = [](std::span<const double> dist, const char* name) {
        double total = 0.0;
        for (double x : dist) {
            if (!(x >= 0.0)) throw std::domain_error(std::string(name) + " has a negative mass");
            total += x;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw std::domain_error(std::string(name) + " sums to " + std::to_string(total) +
                                    ", not 1");
        }
    };
    check(p, "first distribution");
    check(q, "second distribution");
    double sum = 0.0;
    const std::size_t len = std::max(p.size(), q.size());
    for (std::size_t k = 0; k < len; ++k) {
        const double a = k < p.size() ? p[k] : 0.0;
        const double b = k < q.size() ? q[k] : 0.0;
        sum += std::abs(a - b);
    }
    return std::min(1.0, 0.5 * sum);
}

}  // namespace hbp::theory
