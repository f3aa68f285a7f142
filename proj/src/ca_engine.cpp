#include "hbp/ca_engine.hpp"

#include <algorithm>
#include <string>

namespace hbp {

namespace {

std::vector<std::uint64_t> strides(const Dimensions& dims) {
    std::vector<std::uint64_t> s(static_cast<std::size_t>(dims.d()));
    std::uint64_t stride = 1;
    for (int k = dims.d() - 1; k >= 0; --k) {
        s[static_cast<std::size_t>(k)] = stride;
        stride *= static_cast<std::uint64_t>(dims.n());
    }
    return s;
}

void charge(std::uint64_t& spent, std::uint64_t amount, std::uint64_t budget) {
    spent += amount;
    if (spent > budget) {
        throw BudgetExceeded("dense evolution exceeded " + std::to_string(budget) +
                             " vertex visits");
    }
}

// Synchronous round over every vertex. Returns the ranks that open.
std::vector<std::uint64_t> naive_round(const Configuration& c, int theta,
                                       const std::vector<std::uint64_t>& stride) {
    const int d = c.dims().d();
    const auto n = static_cast<std::uint64_t>(c.dims().n());
    std::vector<std::uint64_t> opened;
    for (std::uint64_t r = 0; r < c.size(); ++r) {
        if (c.is_open_rank(r)) continue;
        int count = 0;
        for (int k = 0; k < d && count < theta; ++k) {
            const std::uint64_t s = stride[static_cast<std::size_t>(k)];
            const std::uint64_t coord = (r / s) % n;
            const std::uint64_t base = r - coord * s;
            for (std::uint64_t t = 0; t < n && count < theta; ++t) {
                if (t != coord && c.is_open_rank(base + t * s)) ++count;
            }
        }
        if (count >= theta) opened.push_back(r);
    }
    return opened;
}

}  // namespace

Threshold::Threshold(int value) : value_(value) {
    if (value < 1) throw std::invalid_argument("threshold must be >= 1, got " + std::to_string(value));
}

Configuration::Configuration(const Dimensions& dims, std::uint64_t budget) : dims_(dims) {
    const auto count = dims.vertex_count_u64();
    if (!count || *count > budget) {
        throw BudgetExceeded("torus " + to_string(dims) + " exceeds the dense-grid budget of " +
                             std::to_string(budget) + " vertices");
    }
    size_ = *count;
    open_.assign(size_, false);
}

std::uint64_t Configuration::rank(const Vertex& u) const {
    check_vertex(dims_, u);
    std::uint64_t r = 0;
    for (Coord c : u.coords) r = r * static_cast<std::uint64_t>(dims_.n()) + c;
    return r;
}

Vertex Configuration::unrank(std::uint64_t r) const {
    Vertex u;
    u.coords.resize(static_cast<std::size_t>(dims_.d()));
    for (int k = dims_.d() - 1; k >= 0; --k) {
        u.coords[static_cast<std::size_t>(k)] = static_cast<Coord>(r % static_cast<std::uint64_t>(dims_.n()));
        r /= static_cast<std::uint64_t>(dims_.n());
    }
    return u;
}

std::uint64_t Configuration::open_count() const {
    return static_cast<std::uint64_t>(std::count(open_.begin(), open_.end(), true));
}

std::vector<Vertex> Configuration::open_vertices() const {
    std::vector<Vertex> out;
    for (std::uint64_t r = 0; r < size_; ++r) {
        if (open_[r]) out.push_back(unrank(r));
    }
    return out;
}

Configuration make_configuration(const Dimensions& dims, const std::vector<Vertex>& open,
                                 std::uint64_t budget) {
    Configuration c(dims, budget);
    for (const auto& u : open) c.open(u);
    return c;
}

std::vector<Vertex> neighbors(const Dimensions& dims, const Vertex& u) {
    check_vertex(dims, u);
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(dims.d()) * static_cast<std::size_t>(dims.n() - 1));
    for (std::size_t k = 0; k < u.size(); ++k) {
        for (Coord t = 0; t < static_cast<Coord>(dims.n()); ++t) {
            if (t == u[k]) continue;
            Vertex w = u;
            w.coords[k] = t;
            out.push_back(std::move(w));
        }
    }
    return out;
}

Configuration step(const Configuration& c, Threshold theta, std::uint64_t budget) {
    std::uint64_t spent = 0;
    charge(spent, c.size(), budget);
    Configuration next = c;
    for (auto r : naive_round(c, theta.value(), strides(c.dims()))) next.open_rank(r);
    return next;
}

Evolution evolve(const Configuration& c, Threshold theta, std::uint64_t budget) {
    const auto stride = strides(c.dims());
    Evolution result{c, 0};
    std::uint64_t spent = 0;
    while (true) {
        charge(spent, c.size(), budget);
        const auto opened = naive_round(result.final, theta.value(), stride);
        if (opened.empty()) return result;
        for (auto r : opened) result.final.open_rank(r);
        ++result.rounds;
    }
}

Evolution evolve_incremental(const Configuration& c, Threshold theta, std::uint64_t budget) {
    const int d = c.dims().d();
    const auto n = static_cast<std::uint64_t>(c.dims().n());
    const auto stride = strides(c.dims());
    const std::uint64_t lines_per_direction = c.size() / n;

    // Line through rank r in direction k: k * n^(d-1) + (r with coordinate k dropped).
    auto line_of = [&](std::uint64_t r, int k) {
        const std::uint64_t s = stride[static_cast<std::size_t>(k)];
        return static_cast<std::uint64_t>(k) * lines_per_direction + (r / (s * n)) * s + r % s;
    };
    // First rank on a line and the step along it.
    auto line_start = [&](std::uint64_t line) {
        const auto k = static_cast<int>(line / lines_per_direction);
        const std::uint64_t rest = line % lines_per_direction;
        const std::uint64_t s = stride[static_cast<std::size_t>(k)];
        return std::pair{(rest / s) * s * n + rest % s, s};
    };

    Evolution result{c, 0};
    Configuration& cur = result.final;
    std::vector<std::uint32_t> count(static_cast<std::size_t>(d) * lines_per_direction, 0);
    std::vector<char> dirty_flag(count.size(), 0);
    std::vector<std::uint64_t> dirty;
    for (std::uint64_t r = 0; r < cur.size(); ++r) {
        if (!cur.is_open_rank(r)) continue;
        for (int k = 0; k < d; ++k) {
            const auto line = line_of(r, k);
            ++count[line];
            if (!dirty_flag[line]) {
                dirty_flag[line] = 1;
                dirty.push_back(line);
            }
        }
    }

    std::uint64_t spent = 0;
    std::vector<char> queued(cur.size(), 0);
    while (!dirty.empty()) {
        std::vector<std::uint64_t> opened;
        for (auto line : dirty) {
            dirty_flag[line] = 0;
            const auto [start, s] = line_start(line);
            charge(spent, n, budget);
            for (std::uint64_t t = 0; t < n; ++t) {
                const std::uint64_t r = start + t * s;
                if (cur.is_open_rank(r) || queued[r]) continue;
                std::uint64_t open_neighbors = 0;
                for (int k = 0; k < d; ++k) open_neighbors += count[line_of(r, k)];
                if (open_neighbors >= static_cast<std::uint64_t>(theta.value())) {
                    queued[r] = 1;
                    opened.push_back(r);
                }
            }
        }
        dirty.clear();
        if (opened.empty()) break;
        ++result.rounds;
        for (auto r : opened) {
            queued[r] = 0;
            cur.open_rank(r);
            for (int k = 0; k < d; ++k) {
                const auto line = line_of(r, k);
                ++count[line];
                if (!dirty_flag[line]) {
                    dirty_flag[line] = 1;
                    dirty.push_back(line);
                }
            }
        }
    }
    return result;
}

}  // namespace hbp
