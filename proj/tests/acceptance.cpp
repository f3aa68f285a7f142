// Acceptance checks, one line per criterion:
//   acceptance [--criterion N] [--hbp PATH] [--seed S]
// Exit status is nonzero when any selected criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "hbp/ca_engine.hpp"
#include "hbp/montecarlo.hpp"
#include "hbp/span_engine.hpp"
#include "hbp/theory.hpp"
#include "hbp/verify.hpp"

using namespace hbp;

namespace {

enum class Status { pass, fail, info };

struct Outcome {
    Status status;
    std::string detail;
};

struct Context {
    std::uint64_t seed = 7;
    std::string hbp_binary;
    std::optional<ExperimentResult> d3_run;
    std::optional<ExperimentResult> d6_run;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double x, int precision = 4) {
    std::ostringstream os;
    os << std::setprecision(precision) << x;
    return os.str();
}

Outcome verdict(bool ok, const std::string& detail) { return {ok ? Status::pass : Status::fail, detail}; }

const ExperimentResult& d3_run(Context& ctx) {
    if (!ctx.d3_run) {
        ExperimentConfig cfg;
        cfg.dims = Dimensions(3, 1000);
        cfg.j = 1;
        cfg.amplitude = 1.0;
        cfg.trials = 10'000;
        cfg.master_seed = ctx.seed;
        cfg.record_dims = {2, 3};
        ctx.d3_run = run_experiment(cfg);
    }
    return *ctx.d3_run;
}

const ExperimentResult& d6_run(Context& ctx) {
    if (!ctx.d6_run) {
        ExperimentConfig cfg;
        cfg.dims = Dimensions(6, 20);
        cfg.j = 1;
        cfg.amplitude = 0.5;
        cfg.trials = 2000;
        cfg.master_seed = ctx.seed;
        cfg.record_dims = {2, 4, 6};
        ctx.d6_run = run_experiment(cfg);
    }
    return *ctx.d6_run;
}

std::string describe(const Estimate& e) {
    return e.event + " = " + fmt(e.estimate) + " [" + fmt(e.wilson_low) + ", " + fmt(e.wilson_high) + "]";
}

Outcome oracle_equivalence(Context& ctx) {
    const auto start = std::chrono::steady_clock::now();
    OracleSuite suite;
    suite.random_cases = 1000;
    const auto report = verify_oracle(suite, ctx.seed);
    const double secs = seconds_since(start);
    return verdict(report.passed() && report.cases == 351 + 1000 && secs < 60,
                   std::to_string(report.cases) + " cases, " + std::to_string(report.mismatches.size()) +
                       " mismatches, " + fmt(secs, 3) + " s");
}

// Two open subtori at distance <= 2 close to their enclosing subtorus, and
// are stable otherwise; exhaustive over all pairs on a tiny torus.
std::int64_t pair_merge_failures(const Dimensions& dims, std::int64_t& cases) {
    std::vector<Subtorus> tori;
    for (int k = 0; k <= dims.d(); ++k) {
        for_each_subtorus(dims, k, 1'000'000, [&](const Subtorus& v) { tori.push_back(v); });
    }
    const auto cells = *dims.vertex_count_u64();
    std::int64_t failures = 0;
    for (std::size_t a = 0; a < tori.size(); ++a) {
        for (std::size_t b = a; b < tori.size(); ++b) {
            const auto& v = tori[a];
            const auto& w = tori[b];
            auto both = vertices(v, cells);
            const auto ww = vertices(w, cells);
            both.insert(both.end(), ww.begin(), ww.end());
            const auto start = make_configuration(dims, both);
            const auto expected = subtorus_distance(v, w) <= 2
                                      ? make_configuration(dims, vertices(enclosing(v, w), cells))
                                      : start;
            ++cases;
            if (evolve(start, Threshold(2)).final != expected) ++failures;
        }
    }
    return failures;
}

Outcome merge_rules(Context& ctx) {
    std::int64_t pair_cases = 0;
    std::int64_t pair_failures = pair_merge_failures(Dimensions(3, 3), pair_cases);
    pair_failures += pair_merge_failures(Dimensions(2, 4), pair_cases);

    // Every seed set of size <= 3 at d=3, n=3.
    const Dimensions dims(3, 3);
    const auto all = vertices(Subtorus::whole(dims), 27);
    std::int64_t set_cases = 0;
    std::int64_t set_failures = 0;
    std::function<void(std::size_t, std::vector<Vertex>&)> visit = [&](std::size_t from,
                                                                         std::vector<Vertex>& chosen) {
        ++set_cases;
        const SeedSet s(dims, chosen);
        const auto dec = closure(s);
        bool ok = closure_matches_dense(dims, chosen);
        for (const auto& v : dec.tori) ok = ok && is_internally_spanned(v, s);
        for (auto order : {MergeOrder::insertion, MergeOrder::reversed, MergeOrder::shuffled}) {
            ClosureOptions options;
            options.order = order;
            options.shuffle_seed = static_cast<std::uint64_t>(set_cases);
            ok = ok && closure(s, options) == dec;
        }
        ok = ok && closure(SeedSet(dims, {}, dec.tori)) == dec;
        if (!ok) ++set_failures;
        if (chosen.size() == 3) return;
        for (std::size_t k = from; k < all.size(); ++k) {
            chosen.push_back(all[k]);
            visit(k + 1, chosen);
            chosen.pop_back();
        }
    };
    std::vector<Vertex> chosen;
    visit(0, chosen);

    const auto randomized = verify_properties(1000, ctx.seed);
    return verdict(pair_failures == 0 && set_failures == 0 && randomized.passed(),
                   "subtorus pairs " + std::to_string(pair_cases - pair_failures) + "/" +
                       std::to_string(pair_cases) + ", seed sets " +
                       std::to_string(set_cases - set_failures) + "/" + std::to_string(set_cases) +
                       ", randomized checks " + std::to_string(randomized.checks -
                       static_cast<std::int64_t>(randomized.failures.size())) + "/" +
                       std::to_string(randomized.checks));
}

Outcome limit_probability(Context& ctx) {
    const auto& s = d3_run(ctx).summary;
    const auto& I = *s.find("I_2");
    const double target = theory::predicted_I_limit(1, 3, 1.0);
    return verdict(std::abs(I.estimate - target) <= 0.03,
                   describe(I) + ", target " + fmt(target, 6) + " +- 0.03, se " + fmt(I.std_error, 3));
}

Outcome closed_not_spanned(Context& ctx) {
    const auto& e = *d3_run(ctx).summary.find("C_2\\I_2");
    return verdict(e.estimate <= 0.01, describe(e) + ", limit 0.01");
}

Outcome poisson_trend(Context& ctx) {
    ExperimentConfig cfg;
    cfg.dims = Dimensions(3, 100);
    cfg.j = 1;
    cfg.amplitude = 1.0;
    cfg.trials = 10'000;
    cfg.master_seed = ctx.seed;
    const auto cells = sweep(cfg, SweepParameter::n, {100, 1000, 10000});
    std::ostringstream detail;
    bool ok = true;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (!cells[k].summary) return {Status::fail, "n=" + fmt(cells[k].value) + ": " + cells[k].status};
        const auto& s = *cells[k].summary;
        detail << "n=" << fmt(cells[k].value, 6) << " tv " << fmt(s.tv_y_vs_poisson, 3) << "+-"
               << fmt(s.tv_se, 2) << "; ";
        if (k > 0) {
            const auto& prev = *cells[k - 1].summary;
            const double noise = 2 * std::hypot(s.tv_se, prev.tv_se);
            ok = ok && s.tv_y_vs_poisson <= prev.tv_y_vs_poisson + noise;
        }
    }
    const auto& mid = *cells[1].summary;
    const auto& big = *cells[2].summary;
    ok = ok && mid.tv_y_vs_poisson <= 0.08;
    ok = ok && std::abs(big.lambda_hat - big.lambda_theory) <= 3 * big.lambda_hat_se;
    detail << "lambda_hat(n=10000) " << fmt(big.lambda_hat) << " +- " << fmt(big.lambda_hat_se, 2)
           << " vs " << big.lambda_theory;
    return verdict(ok, detail.str());
}

Outcome spanned_plane_fills_torus(Context& ctx) {
    const auto& trials = d3_run(ctx).trials;
    std::int64_t with_plane = 0;
    std::int64_t with_both = 0;
    for (const auto& t : trials) {
        if (t.event_I[2]) {
            ++with_plane;
            with_both += t.event_I[3];
        }
    }
    const double frac = with_plane ? double(with_both) / double(with_plane) : 0.0;
    return verdict(with_plane > 0 && frac >= 0.95, "I_3 in " + std::to_string(with_both) + " of " +
                                                       std::to_string(with_plane) + " trials with I_2 (" +
                                                       fmt(frac) + ", need >= 0.95)");
}

Outcome separation(Context& ctx) {
    const auto& s = d6_run(ctx).summary;
    const auto& gap = *s.find("I_2\\I_4");
    const auto& four = *s.find("I_4");
    const auto& top = *s.find("I_4\\I_6");
    return verdict(gap.wilson_low > 0 && four.wilson_low > 0 && top.estimate <= 0.02,
                   describe(gap) + "; " + describe(four) + "; " + describe(top) + " (limit 0.02)");
}

Outcome top_without_middle(Context& ctx) {
    const auto& e = *d6_run(ctx).summary.find("I_6\\I_4");
    return {Status::info, describe(e) + " at d=6, n=20, a=0.5"};
}

Outcome perfect_collections(Context&) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream detail;
    for (int n = 2; n <= 5; ++n) {
        const auto brute = theory::perfect_bruteforce(n, 1);
        ok = ok && BigInt(brute) == theory::perfect_count_plane(n);
        detail << "i=1 n=" << n << ": " << brute << "; ";
    }
    const auto count = theory::perfect_bruteforce(5, 2);
    const double bound = theory::perfect_lower_bound(5, 2);
    const double secs = seconds_since(start);
    ok = ok && static_cast<double>(count) >= bound && secs < 600;
    detail << "i=2 n=5: " << count << " vs lower bound " << std::fixed << std::setprecision(0) << bound
           << "; " << std::setprecision(1) << secs << " s";
    return verdict(ok, detail.str());
}

Outcome plane_probability(Context& ctx) {
    const int n = 50;
    const double p = std::pow(double(n), -2.5);
    const std::int64_t trials = 1'000'000;
    const auto e = fixed_subtorus_span(2, n, p, trials, ctx.seed);
    const double leading = theory::m2i_leading(n, p, 1);
    const double exact = theory::plane_span_prob(n, p);
    return verdict(std::abs(e.estimate - leading) <= 0.1 * leading,
                   "M_2 estimate " + fmt(e.estimate, 5) + " +- " + fmt(e.std_error, 2) + " over " +
                       std::to_string(trials) + " trials; leading term " + fmt(leading, 5) +
                       " (band +-10%); exact " + fmt(exact, 5) + ", ratio exact/leading " +
                       fmt(exact / leading, 4));
}

int run_command(const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism(Context& ctx) {
    if (ctx.hbp_binary.empty()) return {Status::fail, "no --hbp binary given"};
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / ("hbp_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string base = ctx.hbp_binary + " simulate --d 3 --n 1000 --j 1 --a 1 --trials 2000 --seed " +
                             std::to_string(ctx.seed) + " --record-dims 2,3";
    const int rc1 = run_command(base + " --workers 1 --out " + (dir / "one").string());
    const int rc4 = run_command(base + " --workers 4 --out " + (dir / "four").string());
    bool ok = rc1 == 0 && rc4 == 0;
    const bool same_summary = slurp(dir / "one.summary.json") == slurp(dir / "four.summary.json");
    const bool same_trials = slurp(dir / "one.trials.csv") == slurp(dir / "four.trials.csv");
    const bool nonempty = !slurp(dir / "one.trials.csv").empty();
    ok = ok && same_summary && same_trials && nonempty;
    fs::remove_all(dir);
    return verdict(ok, std::string("workers 1 vs 4: summary ") + (same_summary ? "identical" : "DIFFERENT") +
                           ", trials " + (same_trials ? "identical" : "DIFFERENT") + ", exit codes " +
                           std::to_string(rc1) + "/" + std::to_string(rc4));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    int only = 0;
    Context ctx;
    app.add_option("--criterion", only, "run one criterion (1-11); default all")->check(CLI::Range(0, 11));
    app.add_option("--hbp", ctx.hbp_binary, "path to the hbp executable");
    app.add_option("--seed", ctx.seed, "master seed for randomized criteria");
    CLI11_PARSE(app, argc, argv);

    const std::map<int, std::pair<std::string, std::function<Outcome(Context&)>>> criteria = {
        {1, {"closure equals dense evolution", oracle_equivalence}},
        {2, {"pair merge rule, internal spanning, confluence, idempotence", merge_rules}},
        {3, {"P(I_2) near 1 - exp(-1.5) at d=3, n=1000", limit_probability}},
        {4, {"P(C_2 \\ I_2) small at d=3, n=1000", closed_not_spanned}},
        {5, {"tv(Y, Poisson) trend and lambda_hat", poisson_trend}},
        {6, {"I_2 implies I_3 at d=3", spanned_plane_fills_torus}},
        {7, {"d=6 separation of I_2, I_4, I_6", separation}},
        {8, {"d=6 P(I_6 \\ I_4), reported only", top_without_middle}},
        {9, {"perfect collection counts", perfect_collections}},
        {10, {"M_2 against its leading-order term", plane_probability}},
        {11, {"output independent of worker count", determinism}},
    };

    bool failed = false;
    for (const auto& [id, entry] : criteria) {
        if (only != 0 && id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = entry.second(ctx);
        } catch (const std::exception& e) {
            out = {Status::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = out.status == Status::pass ? "PASS" : out.status == Status::fail ? "FAIL" : "INFO";
        failed = failed || out.status == Status::fail;
        std::cout << "criterion " << id << " " << tag << "  " << entry.first << ": " << out.detail << "  ("
                  << fmt(seconds_since(start), 3) << " s)" << std::endl;
    }
    return failed ? 1 : 0;
}
