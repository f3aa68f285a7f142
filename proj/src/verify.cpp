#include "hbp/verify.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "hbp/ca_engine.hpp"
#include "hbp/span_engine.hpp"
#include "hbp/theory.hpp"

namespace hbp {

namespace {

std::string describe(const Dimensions& dims, const std::vector<Vertex>& seeds) {
    std::ostringstream os;
    os << to_string(dims) << " seeds [";
    for (std::size_t k = 0; k < seeds.size(); ++k) os << (k ? " " : "") << to_string(seeds[k]);
    os << ']';
    return os.str();
}

Vertex random_vertex(const Dimensions& dims, std::mt19937_64& rng) {
    std::uniform_int_distribution<Coord> coord(0, static_cast<Coord>(dims.n() - 1));
    Vertex u;
    u.coords.resize(static_cast<std::size_t>(dims.d()));
    for (auto& c : u.coords) c = coord(rng);
    return u;
}

std::vector<Vertex> random_seeds(const Dimensions& dims, int max_seeds, std::mt19937_64& rng) {
    const int count = std::uniform_int_distribution<int>(0, max_seeds)(rng);
    std::vector<Vertex> seeds;
    for (int k = 0; k < count; ++k) seeds.push_back(random_vertex(dims, rng));
    return seeds;
}

Configuration materialize(const Dimensions& dims, const MaximalDecomposition& dec) {
    Configuration c(dims);
    for (const auto& v : dec.tori) {
        for_each_vertex(v, c.size(), [&](const Vertex& u) { c.open(u); });
    }
    return c;
}

// Greedy one-at-a-time removal while the mismatch persists.
std::vector<Vertex> shrink(const Dimensions& dims, std::vector<Vertex> seeds) {
    for (std::size_t k = 0; k < seeds.size();) {
        auto candidate = seeds;
        candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(k));
        if (!closure_matches_dense(dims, candidate)) {
            seeds = std::move(candidate);
        } else {
            ++k;
        }
    }
    return seeds;
}

Subtorus random_subtorus(const Dimensions& dims, std::mt19937_64& rng) {
    std::vector<std::pair<int, Coord>> fixed;
    std::uniform_int_distribution<Coord> coord(0, static_cast<Coord>(dims.n() - 1));
    for (int l = 0; l < dims.d(); ++l) {
        if (std::bernoulli_distribution(0.5)(rng)) fixed.emplace_back(l, coord(rng));
    }
    return Subtorus(dims, fixed);
}

}  // namespace

bool closure_matches_dense(const Dimensions& dims, const std::vector<Vertex>& seeds,
                           std::string* detail) {
    const auto fast = materialize(dims, closure(SeedSet(dims, seeds)));
    const auto dense = evolve(make_configuration(dims, seeds), Threshold(2)).final;
    if (fast == dense) return true;
    if (detail) {
        *detail = "closure opens " + std::to_string(fast.open_count()) + " vertices, dense engine " +
                  std::to_string(dense.open_count());
    }
    return false;
}

OracleReport verify_oracle(const OracleSuite& suite, std::uint64_t master_seed) {
    OracleReport report;
    auto check = [&](const Dimensions& dims, const std::vector<Vertex>& seeds) {
        ++report.cases;
        std::string detail;
        if (!closure_matches_dense(dims, seeds, &detail)) {
            report.mismatches.push_back({dims, shrink(dims, seeds), detail});
        }
    };
    if (suite.exhaustive_pairs) {
        const Dimensions dims(3, 3);
        const auto all = vertices(Subtorus::whole(dims), 27);
        for (std::size_t a = 0; a < all.size(); ++a) {
            for (std::size_t b = a + 1; b < all.size(); ++b) check(dims, {all[a], all[b]});
        }
    }
    std::vector<Dimensions> sizes = suite.random_sizes;
    if (sizes.empty()) {
        for (int d : {3, 4}) {
            for (int n : {3, 4, 5}) sizes.emplace_back(d, n);
        }
    }
    std::mt19937_64 rng(master_seed);
    for (std::int64_t k = 0; k < suite.random_cases; ++k) {
        const auto& dims = sizes[static_cast<std::size_t>(k) % sizes.size()];
        check(dims, random_seeds(dims, suite.max_seeds, rng));
    }
    return report;
}

CheckReport verify_properties(std::int64_t cases, std::uint64_t master_seed) {
    CheckReport report;
    std::mt19937_64 rng(master_seed);
    auto expect = [&](bool ok, const std::string& what, const Dimensions& dims,
                      const std::vector<Vertex>& seeds) {
        ++report.checks;
        if (!ok) report.failures.push_back(what + ": " + describe(dims, seeds));
    };
    for (std::int64_t k = 0; k < cases; ++k) {
        const Dimensions dims(std::uniform_int_distribution<int>(2, 4)(rng),
                              std::uniform_int_distribution<int>(3, 5)(rng));
        const auto seeds = random_seeds(dims, 8, rng);
        const SeedSet s(dims, seeds);
        const auto dec = closure(s);

        for (auto order : {MergeOrder::insertion, MergeOrder::reversed, MergeOrder::shuffled}) {
            ClosureOptions options;
            options.order = order;
            options.shuffle_seed = rng();
            expect(closure(s, options) == dec, "confluence", dims, seeds);
        }
        expect(closure(SeedSet(dims, {}, dec.tori)) == dec, "idempotence", dims, seeds);

        bool separated = true;
        for (std::size_t a = 0; a < dec.tori.size(); ++a) {
            for (std::size_t b = a + 1; b < dec.tori.size(); ++b) {
                separated = separated && subtorus_distance(dec.tori[a], dec.tori[b]) > 2;
            }
        }
        expect(separated, "maximal subtori pairwise at distance > 2", dims, seeds);
        for (const auto& v : dec.tori) {
            expect(is_internally_spanned(v, s), "maximal subtorus " + to_string(v) + " internally spanned",
                   dims, seeds);
        }

        const auto analysis = analyze(s, true);
        for (int i = 0; i <= dims.d(); ++i) {
            const auto k2 = static_cast<std::size_t>(i);
            expect(analysis.exact_counts[k2] >= analysis.maximal_counts[k2], "exact >= maximal", dims, seeds);
            const bool I = analysis.exact_counts[k2] > 0;
            const bool C = analysis.max_dimension() >= i;
            expect(!I || C, "I_i implies C_i", dims, seeds);
            expect(C == event_C(s, i), "C_i via closure", dims, seeds);
        }

        // Seed monotonicity on a random superset.
        auto more = seeds;
        for (int extra = std::uniform_int_distribution<int>(1, 3)(rng); extra > 0; --extra) {
            more.push_back(random_vertex(dims, rng));
        }
        const auto bigger = closure(SeedSet(dims, more));
        const bool monotone = std::all_of(dec.tori.begin(), dec.tori.end(), [&](const Subtorus& v) {
            return std::any_of(bigger.tori.begin(), bigger.tori.end(),
                               [&](const Subtorus& w) { return contains(w, v); });
        });
        expect(monotone, "seed monotonicity", dims, seeds);

        const auto start = make_configuration(dims, seeds);
        const auto naive = evolve(start, Threshold(2));
        const auto fast = evolve_incremental(start, Threshold(2));
        expect(naive.final == fast.final && naive.rounds == fast.rounds,
               "evolve vs evolve_incremental", dims, seeds);

        const auto v = random_subtorus(dims, rng);
        const auto v_open = make_configuration(dims, vertices(v, start.size()));
        expect(evolve(v_open, Threshold(2)).final == v_open,
               "open subtorus " + to_string(v) + " is stable", dims, {});

        // Two open subtori: close ones fill their enclosing subtorus, far ones stay put.
        const auto w = random_subtorus(dims, rng);
        auto both = vertices(v, start.size());
        const auto w_points = vertices(w, start.size());
        both.insert(both.end(), w_points.begin(), w_points.end());
        const auto pair_open = make_configuration(dims, both);
        const auto expected = subtorus_distance(v, w) <= 2
                                  ? make_configuration(dims, vertices(enclosing(v, w), start.size()))
                                  : pair_open;
        expect(evolve(pair_open, Threshold(2)).final == expected,
               "pair " + to_string(v) + " " + to_string(w) + " closes to its enclosing subtorus iff distance <= 2",
               dims, {});
    }
    return report;
}

CheckReport verify_perfect() {
    CheckReport report;
    auto expect = [&](bool ok, const std::string& what) {
        ++report.checks;
        (ok ? report.notes : report.failures).push_back(what);
    };
    for (int n = 2; n <= 5; ++n) {
        const auto brute = theory::perfect_bruteforce(n, 1);
        const auto closed = theory::perfect_count_plane(n);
        expect(BigInt(brute) == closed, "i=1 n=" + std::to_string(n) + ": brute force " +
                                            std::to_string(brute) + " vs closed form " + closed.str());
    }
    for (int i = 1; i <= 2; ++i) {
        for (int n = 2; n <= 5; ++n) {
            const auto brute = theory::perfect_bruteforce(n, i);
            const double bound = theory::perfect_lower_bound(n, i);
            std::ostringstream os;
            os << "i=" << i << " n=" << n << ": count " << brute << " >= lower bound " << bound;
            if (bound <= 0) os << " (vacuous)";
            expect(static_cast<double>(brute) >= bound, os.str());
        }
    }
    return report;
}

}  // namespace hbp
