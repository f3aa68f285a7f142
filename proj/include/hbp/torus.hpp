#pragma once

// Vertices and axis-aligned subtori of the Hamming torus [n]^d.
//
// Two vertices are adjacent when they differ in exactly one coordinate, so
// every axis-parallel line is a clique. Coordinates are 0-based.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace hbp {

using Coord = std::uint32_t;
using BigInt = boost::multiprecision::cpp_int;

/// Thrown when two values built for different tori are combined.
class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an operation would need more work than its caller allowed.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape of the torus. d is limited to kMaxDim so that fixed-index sets fit
/// in a 32-bit mask.
class Dimensions {
public:
    static constexpr int kMaxDim = 32;

    Dimensions(int d, int n);

    int d() const noexcept { return d_; }
    int n() const noexcept { return n_; }

    /// n^d, exact.
    BigInt vertex_count() const;
    /// n^d when it fits in 64 bits.
    std::optional<std::uint64_t> vertex_count_u64() const;

    auto operator<=>(const Dimensions&) const = default;

private:
    int d_;
    int n_;
};

std::string to_string(const Dimensions& dims);

struct Vertex {
    std::vector<Coord> coords;

    Vertex() = default;
    explicit Vertex(std::vector<Coord> c) : coords(std::move(c)) {}
    Vertex(std::initializer_list<Coord> c) : coords(c) {}

    std::size_t size() const noexcept { return coords.size(); }
    Coord operator[](std::size_t i) const { return coords[i]; }

    auto operator<=>(const Vertex&) const = default;
};

std::string to_string(const Vertex& v);

struct VertexHash {
    std::size_t operator()(const Vertex& v) const noexcept;
};

/// Throws DimensionMismatch if v does not have exactly d coordinates in [0, n).
void check_vertex(const Dimensions& dims, const Vertex& v);

/// Number of coordinates where u and v differ.
int vertex_distance(const Vertex& u, const Vertex& v);

/// Axis-aligned subtorus: the set of vertices agreeing with fixed values on a
/// set of fixed coordinate indices.
///
/// Stored canonically as a bit mask of fixed indices plus a length-d value
/// array whose free positions are zero, so the defaulted comparison is
/// structural equality on the canonical form.
class Subtorus {
public:
    using Mask = std::uint32_t;

    /// The whole torus (nothing fixed).
    explicit Subtorus(const Dimensions& dims);
    /// Fixed index -> value pairs, in any order. Duplicate indices, indices
    /// outside [0, d) and values outside [0, n) throw std::invalid_argument.
    Subtorus(const Dimensions& dims, const std::vector<std::pair<int, Coord>>& fixed);

    static Subtorus whole(const Dimensions& dims) { return Subtorus(dims); }

    const Dimensions& dims() const noexcept { return dims_; }
    Mask fixed_mask() const noexcept { return mask_; }
    bool is_fixed(int index) const noexcept { return (mask_ >> index) & 1U; }
    /// Value at a fixed index; zero for free indices.
    Coord value(int index) const { return values_[static_cast<std::size_t>(index)]; }
    /// Fixed (index, value) pairs, indices ascending.
    std::vector<std::pair<int, Coord>> fixed() const;
    /// Number of free coordinates.
    int dimension() const noexcept;

    auto operator<=>(const Subtorus&) const = default;

private:
    friend Subtorus enclosing(const Subtorus&, const Subtorus&);
    friend Subtorus point_subtorus(const Dimensions&, const Vertex&);

    Subtorus(const Dimensions& dims, Mask mask, std::vector<Coord> values)
        : dims_(dims), mask_(mask), values_(std::move(values)) {}

    Dimensions dims_;
    Mask mask_ = 0;
    std::vector<Coord> values_;
};

std::string to_string(const Subtorus& v);

struct SubtorusHash {
    std::size_t operator()(const Subtorus& v) const noexcept;
};

/// The 0-dimensional subtorus {u}.
Subtorus point_subtorus(const Dimensions& dims, const Vertex& u);

/// Minimum vertex distance between V and W: the number of indices fixed in
/// both with different values.
int subtorus_distance(const Subtorus& v, const Subtorus& w);

/// Number of fixed indices of V where u disagrees; zero iff V contains u.
int point_distance(const Subtorus& v, const Vertex& u);

/// Smallest subtorus containing both arguments.
Subtorus enclosing(const Subtorus& v, const Subtorus& w);

bool contains(const Subtorus& v, const Vertex& u);
/// True when W is a subset of V.
bool contains(const Subtorus& v, const Subtorus& w);

/// Visits every vertex of V once, in row-major order. Throws BudgetExceeded
/// if n^dim(V) > budget.
void for_each_vertex(const Subtorus& v, std::uint64_t budget,
                     const std::function<void(const Vertex&)>& visit);

std::vector<Vertex> vertices(const Subtorus& v, std::uint64_t budget);

/// Visits every subtorus of the given dimension. Throws BudgetExceeded if
/// there are more than budget of them.
void for_each_subtorus(const Dimensions& dims, int dimension, std::uint64_t budget,
                       const std::function<void(const Subtorus&)>& visit);

}  // namespace hbp
