#pragma once

// Naive bootstrap percolation on the full vertex grid, any threshold.
//
// This engine materializes all n^d vertices and exists to check the subtorus
// algebra in span_engine; it is not meant for production-scale runs.

#include <cstdint>
#include <vector>

#include "hbp/torus.hpp"

namespace hbp {

inline constexpr std::uint64_t kDefaultDenseBudget = 100'000'000;

class Threshold {
public:
    explicit Threshold(int value);
    int value() const noexcept { return value_; }
    auto operator<=>(const Threshold&) const = default;

private:
    int value_;
};

/// Open set over [n]^d, one bit per vertex in row-major rank order
/// (coordinate d-1 varies fastest).
class Configuration {
public:
    /// Throws BudgetExceeded when n^d > budget.
    explicit Configuration(const Dimensions& dims, std::uint64_t budget = kDefaultDenseBudget);

    const Dimensions& dims() const noexcept { return dims_; }
    std::uint64_t size() const noexcept { return size_; }

    std::uint64_t rank(const Vertex& u) const;
    Vertex unrank(std::uint64_t r) const;

    bool is_open(const Vertex& u) const { return open_[rank(u)]; }
    bool is_open_rank(std::uint64_t r) const { return open_[r]; }
    void open(const Vertex& u) { open_[rank(u)] = true; }
    void open_rank(std::uint64_t r) { open_[r] = true; }

    std::uint64_t open_count() const;
    std::vector<Vertex> open_vertices() const;

    bool operator==(const Configuration& other) const {
        return dims_ == other.dims_ && open_ == other.open_;
    }

private:
    Dimensions dims_;
    std::uint64_t size_;
    std::vector<bool> open_;
};

Configuration make_configuration(const Dimensions& dims, const std::vector<Vertex>& open,
                                 std::uint64_t budget = kDefaultDenseBudget);

/// The d(n-1) vertices differing from u in exactly one coordinate.
std::vector<Vertex> neighbors(const Dimensions& dims, const Vertex& u);

/// One synchronous round: opens every closed vertex with at least theta
/// open neighbors.
Configuration step(const Configuration& c, Threshold theta,
                   std::uint64_t budget = kDefaultDenseBudget);

struct Evolution {
    Configuration final;
    int rounds = 0;  ///< productive rounds only
};

/// Iterates step() to the fixpoint. budget bounds total vertex visits.
Evolution evolve(const Configuration& c, Threshold theta,
                 std::uint64_t budget = kDefaultDenseBudget);

/// Same result as evolve(), tracking open counts per axis-parallel line and
/// only revisiting vertices on lines whose count changed in the last round.
Evolution evolve_incremental(const Configuration& c, Threshold theta,
                             std::uint64_t budget = kDefaultDenseBudget);

}  // namespace hbp
