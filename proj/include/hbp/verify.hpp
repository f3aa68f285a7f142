#pragma once

// Self-check suites: the subtorus closure against the dense engine, algebraic
// properties of the closure, and the perfect-collection counts.

#include <cstdint>
#include <string>
#include <vector>

#include "hbp/torus.hpp"

namespace hbp {

/// Union of closure(seeds) equals evolve(seeds, theta=2) on the dense grid.
/// On mismatch, fills `detail` when given.
bool closure_matches_dense(const Dimensions& dims, const std::vector<Vertex>& seeds,
                           std::string* detail = nullptr);

struct OracleSuite {
    bool exhaustive_pairs = true;  ///< all C(27, 2) pairs at d=3, n=3
    std::int64_t random_cases = 1000;
    std::vector<Dimensions> random_sizes;  ///< empty means d in {3,4}, n in {3,4,5}
    int max_seeds = 8;
};

struct OracleMismatch {
    Dimensions dims;
    std::vector<Vertex> seeds;  ///< shrunk to a minimal reproducer
    std::string detail;
};

struct OracleReport {
    std::int64_t cases = 0;
    std::vector<OracleMismatch> mismatches;
    bool passed() const { return mismatches.empty(); }
};

OracleReport verify_oracle(const OracleSuite& suite, std::uint64_t master_seed);

struct CheckReport {
    std::int64_t checks = 0;
    std::vector<std::string> failures;
    std::vector<std::string> notes;
    bool passed() const { return failures.empty(); }
};

/// Confluence, idempotence, pairwise separation, internal spanning of every
/// maximal subtorus, exact >= maximal counts, event implications, seed
/// monotonicity, naive vs incremental dense evolution, subtorus stability.
CheckReport verify_properties(std::int64_t cases, std::uint64_t master_seed);

/// Perfect-collection brute force against the plane closed form (i = 1,
/// n = 2..5) and against the general lower bound for every (n, i) tested.
CheckReport verify_perfect();

}  // namespace hbp
