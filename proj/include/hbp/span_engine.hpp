#pragma once

// Exact threshold-2 closure on the Hamming torus without touching n^d cells.
//
// At threshold 2, two open subtori at distance <= 2 span exactly their
// enclosing subtorus, and open subtori pairwise at distance > 2 are stable.
// The final open set is therefore a set of subtori obtained by repeatedly
// merging close pairs, and that is what closure() computes.

#include <cstddef>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "hbp/torus.hpp"

namespace hbp {

inline constexpr std::size_t kDefaultMergeBudget = 1'000'000;
inline constexpr std::size_t kDefaultFamilyCap = 1'000'000;

/// Initially open vertices, plus optional subtori that start fully open.
class SeedSet {
public:
    explicit SeedSet(const Dimensions& dims) : dims_(dims) {}
    /// Validates every member. Duplicate points are dropped, keeping the
    /// first occurrence, so insertion order is preserved.
    SeedSet(const Dimensions& dims, const std::vector<Vertex>& points,
            const std::vector<Subtorus>& pre_open = {});

    void add(const Vertex& u);
    void add_open(const Subtorus& u);

    const Dimensions& dims() const noexcept { return dims_; }
    const std::vector<Vertex>& points() const noexcept { return points_; }
    const std::vector<Subtorus>& pre_open() const noexcept { return pre_open_; }
    bool empty() const noexcept { return points_.empty() && pre_open_.empty(); }

    /// Points as 0-dimensional subtori followed by the pre-open subtori.
    std::vector<Subtorus> initial_tori() const;

private:
    Dimensions dims_;
    std::vector<Vertex> points_;
    std::unordered_set<Vertex, VertexHash> seen_;
    std::vector<Subtorus> pre_open_;
};

/// Final open set as maximal subtori, pairwise at distance > 2, sorted.
struct MaximalDecomposition {
    std::vector<Subtorus> tori;

    /// -1 when empty.
    int max_dimension() const;
    bool covers(const Vertex& u) const;
    bool operator==(const MaximalDecomposition&) const = default;
};

/// Order in which pending subtori are fed to the merge loop. The result does
/// not depend on it; the options exist to test exactly that.
enum class MergeOrder { sorted, insertion, reversed, shuffled };

struct ClosureOptions {
    MergeOrder order = MergeOrder::sorted;
    std::uint64_t shuffle_seed = 0;
    std::size_t merge_budget = kDefaultMergeBudget;
};

/// Merges the given open subtori until all pairs are at distance > 2.
/// Throws BudgetExceeded when there are more than merge_budget inputs.
MaximalDecomposition closure_of(const Dimensions& dims, std::vector<Subtorus> open,
                                const ClosureOptions& options = {});

MaximalDecomposition closure(const SeedSet& s, const ClosureOptions& options = {});

/// Closure with U additionally fully open from the start.
MaximalDecomposition conditional_closure(const Subtorus& u, const SeedSet& s,
                                         const ClosureOptions& options = {});

/// True iff the seeds lying in V (and pre-open subtori contained in V) span
/// exactly V.
bool is_internally_spanned(const Subtorus& v, const SeedSet& s);

/// Saturation of the seed point subtori (and pre-open subtori) under
/// enclosing of pairs at distance <= 2.
struct GeneratedFamily {
    std::vector<Subtorus> tori;  ///< in discovery order
    bool truncated = false;
};

/// Stops and sets truncated once more than cap subtori have been found.
GeneratedFamily generated_family(const SeedSet& s, std::size_t cap = kDefaultFamilyCap);

enum class CountMode { exact, maximal };

/// Raised by exact-mode counting when the generated family was truncated.
class FamilyTruncated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Number of internally spanned subtori of the given dimension. Exact mode
/// counts members of generated_family(); maximal mode counts members of
/// closure(), which is a lower bound.
std::int64_t spanned_count(const SeedSet& s, int dim, CountMode mode,
                           std::size_t cap = kDefaultFamilyCap);

/// Some dim-dimensional subtorus is internally spanned.
bool event_I(const SeedSet& s, int i, CountMode mode, std::size_t cap = kDefaultFamilyCap);

/// Some i-dimensional subtorus ends fully open.
bool event_C(const SeedSet& s, int i);

/// Everything a trial needs from one seed set, computed in a single pass.
struct SpanAnalysis {
    MaximalDecomposition decomposition;
    std::vector<std::int64_t> exact_counts;    ///< per dimension 0..d; empty if truncated
    std::vector<std::int64_t> maximal_counts;  ///< per dimension 0..d
    bool truncated = false;

    int max_dimension() const { return decomposition.max_dimension(); }
};

SpanAnalysis analyze(const SeedSet& s, bool want_exact, std::size_t cap = kDefaultFamilyCap);

}  // namespace hbp
