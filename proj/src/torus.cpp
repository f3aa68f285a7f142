#include "hbp/torus.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace hbp {

namespace {

void require_same(const Dimensions& a, const Dimensions& b) {
    if (a != b) {
        throw DimensionMismatch("dimension mismatch: " + to_string(a) + " vs " + to_string(b));
    }
}

void require_length(const Dimensions& dims, const Vertex& u) {
    if (u.size() != static_cast<std::size_t>(dims.d())) {
        throw DimensionMismatch("vertex " + to_string(u) + " has " + std::to_string(u.size()) +
                                " coordinates, expected " + std::to_string(dims.d()));
    }
}

// n^k, or nullopt when it exceeds limit.
std::optional<std::uint64_t> bounded_power(std::uint64_t n, int k, std::uint64_t limit) {
    std::uint64_t result = 1;
    for (int i = 0; i < k; ++i) {
        if (result > limit / n) return std::nullopt;
        result *= n;
    }
    return result <= limit ? std::optional(result) : std::nullopt;
}

}  // namespace

Dimensions::Dimensions(int d, int n) : d_(d), n_(n) {
    if (d < 2 || d > kMaxDim) {
        throw std::invalid_argument("d must be in [2, " + std::to_string(kMaxDim) +
                                    "], got " + std::to_string(d));
    }
    if (n < 2) throw std::invalid_argument("n must be >= 2, got " + std::to_string(n));
}

BigInt Dimensions::vertex_count() const {
    return boost::multiprecision::pow(BigInt(n_), static_cast<unsigned>(d_));
}

std::optional<std::uint64_t> Dimensions::vertex_count_u64() const {
    return bounded_power(static_cast<std::uint64_t>(n_), d_, UINT64_MAX);
}

std::string to_string(const Dimensions& dims) {
    return "(d=" + std::to_string(dims.d()) + ", n=" + std::to_string(dims.n()) + ")";
}

std::string to_string(const Vertex& v) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    os << ')';
    return os.str();
}

void check_vertex(const Dimensions& dims, const Vertex& v) {
    require_length(dims, v);
    for (Coord c : v.coords) {
        if (c >= static_cast<Coord>(dims.n())) {
            throw DimensionMismatch("vertex " + to_string(v) + " out of range for " +
                                    to_string(dims));
        }
    }
}

int vertex_distance(const Vertex& u, const Vertex& v) {
    if (u.size() != v.size()) {
        throw DimensionMismatch("vertex_distance: " + to_string(u) + " vs " + to_string(v));
    }
    int dist = 0;
    for (std::size_t i = 0; i < u.size(); ++i) dist += u[i] != v[i];
    return dist;
}

Subtorus::Subtorus(const Dimensions& dims)
    : dims_(dims), values_(static_cast<std::size_t>(dims.d()), 0) {}

Subtorus::Subtorus(const Dimensions& dims, const std::vector<std::pair<int, Coord>>& fixed)
    : Subtorus(dims) {
    for (auto [index, value] : fixed) {
        if (index < 0 || index >= dims.d()) {
            throw std::invalid_argument("fixed index " + std::to_string(index) +
                                        " out of range for " + to_string(dims));
        }
        if (value >= static_cast<Coord>(dims.n())) {
            throw std::invalid_argument("fixed value " + std::to_string(value) +
                                        " out of range for " + to_string(dims));
        }
        if (is_fixed(index)) {
            throw std::invalid_argument("index " + std::to_string(index) + " fixed twice");
        }
        mask_ |= Mask{1} << index;
        values_[static_cast<std::size_t>(index)] = value;
    }
}

std::vector<std::pair<int, Coord>> Subtorus::fixed() const {
    std::vector<std::pair<int, Coord>> out;
    for (int l = 0; l < dims_.d(); ++l) {
        if (is_fixed(l)) out.emplace_back(l, value(l));
    }
    return out;
}

int Subtorus::dimension() const noexcept { return dims_.d() - std::popcount(mask_); }

std::string to_string(const Subtorus& v) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (auto [l, a] : v.fixed()) {
        if (!first) os << ',';
        first = false;
        os << l << "->" << a;
    }
    os << '}';
    return os.str();
}

std::size_t VertexHash::operator()(const Vertex& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Coord c : v.coords) h = (h ^ c) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
}

std::size_t SubtorusHash::operator()(const Subtorus& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ v.fixed_mask();
    for (int l = 0; l < v.dims().d(); ++l) {
        h ^= v.value(l) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

Subtorus point_subtorus(const Dimensions& dims, const Vertex& u) {
    check_vertex(dims, u);
    const Subtorus::Mask mask =
        dims.d() == 32 ? ~Subtorus::Mask{0} : ((Subtorus::Mask{1} << dims.d()) - 1);
    return Subtorus(dims, mask, u.coords);
}

int subtorus_distance(const Subtorus& v, const Subtorus& w) {
    require_same(v.dims(), w.dims());
    int dist = 0;
    for (Subtorus::Mask common = v.fixed_mask() & w.fixed_mask(); common; common &= common - 1) {
        const int l = std::countr_zero(common);
        dist += v.value(l) != w.value(l);
    }
    return dist;
}

int point_distance(const Subtorus& v, const Vertex& u) {
    require_length(v.dims(), u);
    int dist = 0;
    for (Subtorus::Mask m = v.fixed_mask(); m; m &= m - 1) {
        const int l = std::countr_zero(m);
        dist += u[static_cast<std::size_t>(l)] != v.value(l);
    }
    return dist;
}

Subtorus enclosing(const Subtorus& v, const Subtorus& w) {
    require_same(v.dims(), w.dims());
    Subtorus::Mask mask = 0;
    std::vector<Coord> values(static_cast<std::size_t>(v.dims().d()), 0);
    for (Subtorus::Mask common = v.fixed_mask() & w.fixed_mask(); common; common &= common - 1) {
        const int l = std::countr_zero(common);
        if (v.value(l) == w.value(l)) {
            mask |= Subtorus::Mask{1} << l;
            values[static_cast<std::size_t>(l)] = v.value(l);
        }
    }
    return Subtorus(v.dims(), mask, std::move(values));
}

bool contains(const Subtorus& v, const Vertex& u) { return point_distance(v, u) == 0; }

bool contains(const Subtorus& v, const Subtorus& w) {
    require_same(v.dims(), w.dims());
    if ((v.fixed_mask() & ~w.fixed_mask()) != 0) return false;
    return subtorus_distance(v, w) == 0;
}

void for_each_vertex(const Subtorus& v, std::uint64_t budget,
                     const std::function<void(const Vertex&)>& visit) {
    const int dim = v.dimension();
    if (!bounded_power(static_cast<std::uint64_t>(v.dims().n()), dim, budget)) {
        throw BudgetExceeded("subtorus " + to_string(v) + " has more than " +
                             std::to_string(budget) + " vertices");
    }
    const int d = v.dims().d();
    const auto n = static_cast<Coord>(v.dims().n());
    std::vector<int> free_indices;
    Vertex u;
    u.coords.resize(static_cast<std::size_t>(d));
    for (int l = 0; l < d; ++l) {
        u.coords[static_cast<std::size_t>(l)] = v.value(l);
        if (!v.is_fixed(l)) free_indices.push_back(l);
    }
    // Odometer over the free coordinates, last index fastest.
    while (true) {
        visit(u);
        int k = dim - 1;
        while (k >= 0) {
            auto& c = u.coords[static_cast<std::size_t>(free_indices[static_cast<std::size_t>(k)])];
            if (++c < n) break;
            c = 0;
            --k;
        }
        if (k < 0) return;
    }
}

std::vector<Vertex> vertices(const Subtorus& v, std::uint64_t budget) {
    std::vector<Vertex> out;
    for_each_vertex(v, budget, [&](const Vertex& u) { out.push_back(u); });
    return out;
}

void for_each_subtorus(const Dimensions& dims, int dimension, std::uint64_t budget,
                       const std::function<void(const Subtorus&)>& visit) {
    const int d = dims.d();
    if (dimension < 0 || dimension > d) {
        throw std::invalid_argument("subtorus dimension " + std::to_string(dimension) +
                                    " out of range for " + to_string(dims));
    }
    const int fixed_count = d - dimension;
    const auto per_pattern = bounded_power(static_cast<std::uint64_t>(dims.n()), fixed_count, budget);
    if (!per_pattern) throw BudgetExceeded("too many subtori to enumerate");

    // Choose the fixed index set in lexicographic order, then all value tuples.
    std::vector<int> chosen(static_cast<std::size_t>(fixed_count));
    for (int k = 0; k < fixed_count; ++k) chosen[static_cast<std::size_t>(k)] = k;
    std::uint64_t visited = 0;
    while (true) {
        visited += *per_pattern;
        if (visited > budget) throw BudgetExceeded("too many subtori to enumerate");
        // The subtorus fixing exactly `chosen` is itself a (d - fixed_count)-torus in
        // the quotient; enumerate its value tuples with a point odometer.
        std::vector<std::pair<int, Coord>> fixed;
        for (int l : chosen) fixed.emplace_back(l, 0);
        while (true) {
            visit(Subtorus(dims, fixed));
            int k = fixed_count - 1;
            while (k >= 0) {
                auto& value = fixed[static_cast<std::size_t>(k)].second;
                if (++value < static_cast<Coord>(dims.n())) break;
                value = 0;
                --k;
            }
            if (k < 0) break;
        }
        // Next combination.
        int k = fixed_count - 1;
        while (k >= 0 && chosen[static_cast<std::size_t>(k)] == d - fixed_count + k) --k;
        if (k < 0) return;
        ++chosen[static_cast<std::size_t>(k)];
        for (int m = k + 1; m < fixed_count; ++m) {
            chosen[static_cast<std::size_t>(m)] = chosen[static_cast<std::size_t>(m - 1)] + 1;
        }
    }
}

}  // namespace hbp
