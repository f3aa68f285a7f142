#include "hbp/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "hbp/theory.hpp"

namespace hbp {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr int kBootstrapReplicates = 200;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string event_name(int dim, char kind) { return std::string(1, kind) + "_" + std::to_string(dim); }

// Brute-force trial evaluation on the dense grid for thresholds other than 2.
void evaluate_dense(const ExperimentConfig& cfg, const SeedSet& seeds, TrialResult& out) {
    const Dimensions& dims = cfg.dims;
    const Threshold theta(cfg.theta);
    std::vector<Vertex> start = seeds.points();
    for (const auto& u : seeds.pre_open()) {
        for_each_vertex(u, kDefaultDenseBudget, [&](const Vertex& v) { start.push_back(v); });
    }
    const auto final = evolve_incremental(make_configuration(dims, start), theta).final;

    // True iff `open` is exactly the vertex set of v (or contains it, when !exact).
    auto matches = [&](const Configuration& open, const Subtorus& v, bool exact) {
        std::uint64_t inside = 0;
        bool all = true;
        for_each_vertex(v, kDefaultDenseBudget, [&](const Vertex& u) {
            all = all && open.is_open(u);
            ++inside;
        });
        return all && (!exact || open.open_count() == inside);
    };
    const int d = dims.d();
    std::vector<std::vector<Subtorus>> open_by_dim(static_cast<std::size_t>(d + 1));
    for (int i = 0; i <= d; ++i) {
        for_each_subtorus(dims, i, kDefaultDenseBudget, [&](const Subtorus& v) {
            if (matches(final, v, false)) open_by_dim[static_cast<std::size_t>(i)].push_back(v);
        });
    }
    for (int i = 0; i <= d; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const auto& here = open_by_dim[k];
        out.event_C[k] = !here.empty();
        if (!here.empty()) out.max_dim = i;
        for (const auto& v : here) {
            // Only fully open subtori can be internally spanned.
            std::vector<Vertex> inside;
            for (const auto& u : seeds.points()) {
                if (contains(v, u)) inside.push_back(u);
            }
            for (const auto& w : seeds.pre_open()) {
                if (contains(v, w)) for_each_vertex(w, kDefaultDenseBudget, [&](const Vertex& u) { inside.push_back(u); });
            }
            if (!inside.empty() &&
                matches(evolve_incremental(make_configuration(dims, inside), theta).final, v, true)) {
                ++out.y_exact[k];
            }
            const bool maximal =
                i == d || std::none_of(open_by_dim[k + 1].begin(), open_by_dim[k + 1].end(),
                                       [&](const Subtorus& w) { return contains(w, v); });
            out.y_maximal[k] += maximal;
        }
        out.event_I[k] = out.y_exact[k] > 0;
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (j < 1 || 2 * j > dims.d()) {
        throw std::invalid_argument("need 1 <= j and 2j <= d, got j=" + std::to_string(j));
    }
    if (theta < 1) throw std::invalid_argument("theta must be >= 1");
    if (!p_override && !amplitude) throw std::invalid_argument("either a or p must be given");
    if (p_override) {
        if (!(*p_override >= 0.0 && *p_override <= 1.0)) {
            throw std::invalid_argument("p must be in [0, 1]");
        }
    } else if (!(*amplitude > 0.0)) {
        throw std::invalid_argument("a must be positive");
    }
    const double p = probability();
    if (theta != 2) {
        if (mode == CountMode::exact) {
            throw std::invalid_argument("exact mode needs theta = 2 (no subtorus algebra otherwise)");
        }
        const auto count = dims.vertex_count_u64();
        if (!count || *count > kDefaultDenseBudget) {
            throw std::invalid_argument("theta != 2 needs n^d <= " + std::to_string(kDefaultDenseBudget) +
                                        " (dense engine only)");
        }
    }
    if (conditional_open && conditional_open->dims() != dims) {
        throw std::invalid_argument("conditional_open subtorus does not match the torus");
    }
    for (int i : record_dims) {
        if (i < 0 || i > dims.d()) {
            throw std::invalid_argument("record dimension " + std::to_string(i) + " out of range");
        }
    }
    if (family_cap == 0) throw std::invalid_argument("family cap must be positive");
    seed_count_law(dims, p);  // throws when neither law is admissible
}

double ExperimentConfig::probability() const {
    if (p_override) return *p_override;
    if (!amplitude) throw std::invalid_argument("either a or p must be given");
    try {
        return theory::critical_p(j, dims.d(), *amplitude, dims.n());
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(e.what());
    }
}

std::vector<int> ExperimentConfig::recorded_dims() const {
    std::vector<int> out = record_dims;
    if (out.empty()) out = {2 * j, dims.d()};
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(trial_index + 0x632be59bd9b4e019ULL));
}

SeedCountLaw seed_count_law(const Dimensions& dims, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p out of [0, 1]");
    if (dims.vertex_count_u64()) return SeedCountLaw::binomial;
    const double cells = dims.vertex_count().convert_to<double>();
    if (cells * p * p < 1e-3) return SeedCountLaw::poisson;
    throw std::invalid_argument("n^d exceeds 64 bits and N p^2 >= 1e-3; the Poisson count "
                                "approximation is not admissible");
}

SeedSet sample_seeds(const Dimensions& dims, double p, std::mt19937_64& rng) {
    SeedSet seeds(dims);
    seed_count_law(dims, p);  // validates p and the count law
    if (p == 0.0) return seeds;
    const auto cells = dims.vertex_count_u64();

    std::uint64_t m = 0;
    if (cells) {
        m = p == 1.0 ? *cells : std::binomial_distribution<std::uint64_t>(*cells, p)(rng);
    } else {
        const double mean = dims.vertex_count().convert_to<double>() * p;
        m = std::poisson_distribution<std::uint64_t>(mean)(rng);
    }
    if (m == 0) return seeds;

    const auto n = static_cast<std::uint64_t>(dims.n());
    const auto d = static_cast<std::size_t>(dims.d());
    // Dense draws go through selection sampling over ranks; sparse ones by
    // rejection of repeated vertices.
    if (cells && *cells <= (std::uint64_t{1} << 22) && m * 4 > *cells) {
        std::uint64_t needed = m;
        for (std::uint64_t r = 0; r < *cells && needed > 0; ++r) {
            const std::uint64_t remaining = *cells - r;
            if (std::uniform_int_distribution<std::uint64_t>(0, remaining - 1)(rng) < needed) {
                Vertex u;
                u.coords.resize(d);
                std::uint64_t rest = r;
                for (std::size_t k = d; k-- > 0;) {
                    u.coords[k] = static_cast<Coord>(rest % n);
                    rest /= n;
                }
                seeds.add(u);
                --needed;
            }
        }
        return seeds;
    }
    std::unordered_set<Vertex, VertexHash> taken;
    std::uniform_int_distribution<Coord> coord(0, static_cast<Coord>(n - 1));
    std::vector<Vertex> order;
    while (order.size() < m) {
        Vertex u;
        u.coords.resize(d);
        for (auto& c : u.coords) c = coord(rng);
        if (taken.insert(u).second) order.push_back(std::move(u));
    }
    return SeedSet(dims, order);
}

SeedSet sample_seeds(const ExperimentConfig& cfg, std::int64_t trial_index) {
    std::mt19937_64 rng(trial_seed(cfg.master_seed, static_cast<std::uint64_t>(trial_index)));
    return sample_seeds(cfg.dims, cfg.probability(), rng);
}

std::int64_t TrialResult::y(int dim) const {
    const auto k = static_cast<std::size_t>(dim);
    return y_exact.empty() ? y_maximal[k] : y_exact[k];
}

TrialResult evaluate_trial(const ExperimentConfig& cfg, std::int64_t trial_index,
                           const SeedSet& seeds) {
    const auto started = std::chrono::steady_clock::now();
    const auto slots = static_cast<std::size_t>(cfg.dims.d() + 1);
    TrialResult out;
    out.trial_index = trial_index;
    out.seed_count = seeds.points().size();
    out.event_I.assign(slots, false);
    out.event_C.assign(slots, false);

    SeedSet conditioned = seeds;
    if (cfg.conditional_open) conditioned.add_open(*cfg.conditional_open);

    if (cfg.theta == 2) {
        const auto analysis = analyze(conditioned, cfg.mode == CountMode::exact, cfg.family_cap);
        out.y_maximal = analysis.maximal_counts;
        out.y_exact = analysis.exact_counts;
        out.truncated = analysis.truncated;
        out.max_dim = analysis.max_dimension();
        for (std::size_t i = 0; i < slots; ++i) {
            out.event_I[i] = out.y(static_cast<int>(i)) > 0;
            out.event_C[i] = out.max_dim >= static_cast<int>(i);
        }
    } else {
        out.y_exact.assign(slots, 0);
        out.y_maximal.assign(slots, 0);
        evaluate_dense(cfg, conditioned, out);
    }
    if (cfg.record_timings) {
        out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    }
    return out;
}

TrialResult run_trial(const ExperimentConfig& cfg, std::int64_t trial_index) {
    const auto started = std::chrono::steady_clock::now();
    auto result = evaluate_trial(cfg, trial_index, sample_seeds(cfg, trial_index));
    if (cfg.record_timings) {
        result.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    }
    return result;
}

Estimate wilson_estimate(std::string event, std::int64_t successes, std::int64_t trials) {
    if (trials < 1 || successes < 0 || successes > trials) {
        throw std::invalid_argument("wilson_estimate: need 0 <= successes <= trials, trials >= 1");
    }
    Estimate e;
    e.event = std::move(event);
    e.successes = successes;
    e.trials = trials;
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(successes) / n;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (ph + z2 / (2.0 * n)) / denom;
    const double half = kZ95 * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
    e.estimate = ph;
    e.std_error = std::sqrt(ph * (1.0 - ph) / n);
    e.wilson_low = std::clamp(center - half, 0.0, ph);
    e.wilson_high = std::clamp(center + half, ph, 1.0);
    return e;
}

const Estimate* Summary::find(const std::string& event) const {
    for (const auto& e : events) {
        if (e.event == event) return &e;
    }
    return nullptr;
}

Summary summarize(const ExperimentConfig& cfg, const std::vector<TrialResult>& trials) {
    if (trials.empty()) throw std::invalid_argument("summarize: no trials");
    Summary s;
    s.p = cfg.probability();
    const auto law = seed_count_law(cfg.dims, s.p);
    s.seed_count_law = law == SeedCountLaw::binomial ? "binomial" : "poisson";
    if (law == SeedCountLaw::poisson) s.le_cam_bound = cfg.dims.vertex_count().convert_to<double>() * s.p * s.p;
    s.trials = static_cast<std::int64_t>(trials.size());
    s.y_dim = 2 * cfg.j;
    const int d = cfg.dims.d();
    const auto y_dim = static_cast<std::size_t>(s.y_dim);

    auto count_if = [&](auto pred) {
        return static_cast<std::int64_t>(std::count_if(trials.begin(), trials.end(), pred));
    };
    auto add = [&](std::string name, auto pred) {
        if (s.find(name)) return;
        s.events.push_back(wilson_estimate(std::move(name), count_if(pred), s.trials));
    };
    auto I = [](int i) { return [i](const TrialResult& t) { return bool(t.event_I[static_cast<std::size_t>(i)]); }; };
    auto C = [](int i) { return [i](const TrialResult& t) { return bool(t.event_C[static_cast<std::size_t>(i)]); }; };

    const int two_j = s.y_dim;
    add(event_name(two_j, 'I'), I(two_j));
    add(event_name(two_j, 'C'), C(two_j));
    add(event_name(two_j, 'C') + "\\" + event_name(two_j, 'I'),
        [&](const TrialResult& t) { return C(two_j)(t) && !I(two_j)(t); });
    add(event_name(two_j, 'I') + "\\" + event_name(d, 'I'),
        [&](const TrialResult& t) { return I(two_j)(t) && !I(d)(t); });
    const auto dims = cfg.recorded_dims();
    for (int i : dims) {
        add(event_name(i, 'I'), I(i));
        add(event_name(i, 'C'), C(i));
    }
    for (int a : dims) {
        for (int b : dims) {
            if (a == b) continue;
            add(event_name(a, 'I') + "\\" + event_name(b, 'I'),
                [&](const TrialResult& t) { return I(a)(t) && !I(b)(t); });
        }
    }

    std::vector<std::int64_t> ys;
    ys.reserve(trials.size());
    double seeds_total = 0.0;
    for (const auto& t : trials) {
        ys.push_back(t.y(s.y_dim));
        seeds_total += static_cast<double>(t.seed_count);
        s.truncated_trials += t.truncated;
        if (!t.y_exact.empty() && t.y_exact[y_dim] != t.y_maximal[y_dim]) ++s.exact_vs_maximal_mismatches;
    }
    s.mean_seed_count = seeds_total / static_cast<double>(trials.size());
    const std::int64_t max_y = *std::max_element(ys.begin(), ys.end());
    s.y_histogram.assign(static_cast<std::size_t>(max_y + 1), 0);
    for (auto y : ys) ++s.y_histogram[static_cast<std::size_t>(y)];

    const double n_trials = static_cast<double>(trials.size());
    double mean = 0.0;
    for (auto y : ys) mean += static_cast<double>(y);
    mean /= n_trials;
    double var = 0.0;
    for (auto y : ys) var += (static_cast<double>(y) - mean) * (static_cast<double>(y) - mean);
    var = trials.size() > 1 ? var / (n_trials - 1.0) : 0.0;
    s.lambda_hat = mean;
    s.lambda_hat_se = std::sqrt(var / n_trials);

    // lambda at the amplitude implied by p, so explicit-p runs also get a reference.
    const theory::CriticalScaling scaling(cfg.j, d, 1.0);
    const double implied_a =
        cfg.p_override ? s.p * std::pow(static_cast<double>(cfg.dims.n()), scaling.exponent().value())
                       : *cfg.amplitude;
    s.lambda_theory = implied_a > 0.0 ? theory::lambda(cfg.j, d, implied_a) : 0.0;
    s.predicted_I_limit = -std::expm1(-s.lambda_theory);

    const std::int64_t support = max_y + 10;
    const auto reference = theory::poisson_truncated(s.lambda_theory, support);
    auto empirical_of = [&](const std::vector<std::int64_t>& hist) {
        std::vector<double> out(static_cast<std::size_t>(support + 1), 0.0);
        for (std::size_t k = 0; k < hist.size(); ++k) out[k] = static_cast<double>(hist[k]) / n_trials;
        return out;
    };
    s.tv_y_vs_poisson = theory::tv_distance(empirical_of(s.y_histogram), reference);

    // Multinomial bootstrap of the histogram; its own stream off the master seed.
    std::mt19937_64 rng(trial_seed(cfg.master_seed, ~std::uint64_t{0}));
    std::discrete_distribution<std::size_t> draw(s.y_histogram.begin(), s.y_histogram.end());
    double sum = 0.0;
    double sum_sq = 0.0;
    std::vector<std::int64_t> resample(s.y_histogram.size());
    for (int b = 0; b < kBootstrapReplicates; ++b) {
        std::fill(resample.begin(), resample.end(), 0);
        for (std::size_t t = 0; t < trials.size(); ++t) ++resample[draw(rng)];
        const double tv = theory::tv_distance(empirical_of(resample), reference);
        sum += tv;
        sum_sq += tv * tv;
    }
    const double boot_mean = sum / kBootstrapReplicates;
    s.tv_se = std::sqrt(std::max(0.0, sum_sq / kBootstrapReplicates - boot_mean * boot_mean));
    return s;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers) {
    cfg.validate();
    const auto total = static_cast<std::size_t>(cfg.trials);
    std::vector<TrialResult> results(total);
    const auto threads = static_cast<std::size_t>(std::clamp<std::int64_t>(workers, 1, cfg.trials));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total) return;
            try {
                results[k] = run_trial(cfg, static_cast<std::int64_t>(k));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = total;
                return;
            }
        }
    };
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return ExperimentResult{summarize(cfg, results), std::move(results)};
}

Estimate fixed_subtorus_span(int dim, int n, double p, std::int64_t trials,
                             std::uint64_t master_seed) {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    const Dimensions dims(dim, n);
    const std::vector<Subtorus> whole{Subtorus::whole(dims)};
    std::int64_t spanned = 0;
    for (std::int64_t k = 0; k < trials; ++k) {
        std::mt19937_64 rng(trial_seed(master_seed, static_cast<std::uint64_t>(k)));
        if (closure(sample_seeds(dims, p, rng)).tori == whole) ++spanned;
    }
    return wilson_estimate("span_" + std::to_string(dim), spanned, trials);
}

std::vector<SweepCell> sweep(const ExperimentConfig& cfg, SweepParameter parameter,
                             const std::vector<double>& values, int workers) {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    std::vector<SweepCell> cells;
    for (double value : values) {
        SweepCell cell;
        cell.value = value;
        try {
            ExperimentConfig here = cfg;
            if (parameter == SweepParameter::n) {
                if (value != std::floor(value) || value < 2 || value > INT32_MAX) {
                    throw std::invalid_argument("n must be an integer >= 2");
                }
                here.dims = Dimensions(cfg.dims.d(), static_cast<int>(value));
                if (here.conditional_open) {
                    here.conditional_open = Subtorus(here.dims, here.conditional_open->fixed());
                }
            } else {
                here.amplitude = value;
                here.p_override.reset();
            }
            cell.summary = run_experiment(here, workers).summary;
        } catch (const std::exception& e) {
            cell.status = e.what();
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace hbp
