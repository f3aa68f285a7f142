#include "hbp/span_engine.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <unordered_set>

namespace hbp {

SeedSet::SeedSet(const Dimensions& dims, const std::vector<Vertex>& points,
                 const std::vector<Subtorus>& pre_open)
    : dims_(dims) {
    for (const auto& u : points) add(u);
    for (const auto& u : pre_open) add_open(u);
}

void SeedSet::add(const Vertex& u) {
    check_vertex(dims_, u);
    if (seen_.insert(u).second) points_.push_back(u);
}

void SeedSet::add_open(const Subtorus& u) {
    if (u.dims() != dims_) throw DimensionMismatch("pre-open subtorus built for another torus");
    if (std::find(pre_open_.begin(), pre_open_.end(), u) == pre_open_.end()) {
        pre_open_.push_back(u);
    }
}

std::vector<Subtorus> SeedSet::initial_tori() const {
    std::vector<Subtorus> out;
    out.reserve(points_.size() + pre_open_.size());
    for (const auto& u : points_) out.push_back(point_subtorus(dims_, u));
    out.insert(out.end(), pre_open_.begin(), pre_open_.end());
    return out;
}

int MaximalDecomposition::max_dimension() const {
    int best = -1;
    for (const auto& v : tori) best = std::max(best, v.dimension());
    return best;
}

bool MaximalDecomposition::covers(const Vertex& u) const {
    return std::any_of(tori.begin(), tori.end(), [&](const Subtorus& v) { return contains(v, u); });
}

MaximalDecomposition closure_of(const Dimensions& dims, std::vector<Subtorus> open,
                                const ClosureOptions& options) {
    if (open.size() > options.merge_budget) {
        throw BudgetExceeded("closure input of " + std::to_string(open.size()) +
                             " subtori exceeds the merge budget of " +
                             std::to_string(options.merge_budget));
    }
    for (const auto& v : open) {
        if (v.dims() != dims) throw DimensionMismatch("closure input built for another torus");
    }
    switch (options.order) {
        case MergeOrder::sorted: std::sort(open.begin(), open.end()); break;
        case MergeOrder::insertion: break;
        case MergeOrder::reversed: std::reverse(open.begin(), open.end()); break;
        case MergeOrder::shuffled: {
            std::mt19937_64 rng(options.shuffle_seed);
            std::shuffle(open.begin(), open.end(), rng);
            break;
        }
    }

    // Invariant: members of `active` are pairwise at distance > 2.
    std::vector<Subtorus> active;
    for (auto& pending : open) {
        Subtorus x = std::move(pending);
        for (std::size_t k = 0; k < active.size();) {
            if (subtorus_distance(x, active[k]) <= 2) {
                x = enclosing(x, active[k]);
                active[k] = std::move(active.back());
                active.pop_back();
                k = 0;  // x grew; earlier members may now be close
            } else {
                ++k;
            }
        }
        active.push_back(std::move(x));
    }
    std::sort(active.begin(), active.end());
    return MaximalDecomposition{std::move(active)};
}

MaximalDecomposition closure(const SeedSet& s, const ClosureOptions& options) {
    return closure_of(s.dims(), s.initial_tori(), options);
}

MaximalDecomposition conditional_closure(const Subtorus& u, const SeedSet& s,
                                         const ClosureOptions& options) {
    SeedSet conditioned = s;
    conditioned.add_open(u);
    return closure(conditioned, options);
}

bool is_internally_spanned(const Subtorus& v, const SeedSet& s) {
    if (v.dims() != s.dims()) throw DimensionMismatch("is_internally_spanned: torus mismatch");
    std::vector<Subtorus> inside;
    for (const auto& u : s.points()) {
        if (point_distance(v, u) == 0) inside.push_back(point_subtorus(s.dims(), u));
    }
    for (const auto& u : s.pre_open()) {
        if (contains(v, u)) inside.push_back(u);
    }
    if (inside.empty()) return false;
    const auto spanned = closure_of(s.dims(), std::move(inside));
    return spanned.tori.size() == 1 && spanned.tori.front() == v;
}

GeneratedFamily generated_family(const SeedSet& s, std::size_t cap) {
    GeneratedFamily family;
    std::unordered_set<Subtorus, SubtorusHash> seen;
    for (auto& v : s.initial_tori()) {
        if (seen.insert(v).second) family.tori.push_back(std::move(v));
    }
    if (family.tori.size() > cap) {
        family.truncated = true;
        return family;
    }
    // Each unordered pair is examined once, when its later member is reached.
    for (std::size_t k = 0; k < family.tori.size(); ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            const Subtorus& x = family.tori[k];
            const Subtorus& y = family.tori[j];
            if (subtorus_distance(x, y) > 2) continue;
            Subtorus w = enclosing(x, y);
            if (!seen.insert(w).second) continue;
            family.tori.push_back(std::move(w));
            if (family.tori.size() > cap) {
                family.truncated = true;
                return family;
            }
        }
    }
    return family;
}

namespace {

void check_dim(const SeedSet& s, int dim) {
    if (dim < 0 || dim > s.dims().d()) {
        throw std::invalid_argument("dimension " + std::to_string(dim) + " out of range for " +
                                    to_string(s.dims()));
    }
}

std::vector<std::int64_t> exact_counts(const SeedSet& s, const GeneratedFamily& family) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(s.dims().d() + 1), 0);
    for (const auto& v : family.tori) {
        if (is_internally_spanned(v, s)) ++counts[static_cast<std::size_t>(v.dimension())];
    }
    return counts;
}

std::vector<std::int64_t> maximal_counts(const SeedSet& s, const MaximalDecomposition& dec) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(s.dims().d() + 1), 0);
    for (const auto& v : dec.tori) ++counts[static_cast<std::size_t>(v.dimension())];
    return counts;
}

}  // namespace

std::int64_t spanned_count(const SeedSet& s, int dim, CountMode mode, std::size_t cap) {
    check_dim(s, dim);
    if (mode == CountMode::maximal) {
        return maximal_counts(s, closure(s))[static_cast<std::size_t>(dim)];
    }
    const auto family = generated_family(s, cap);
    if (family.truncated) {
        throw FamilyTruncated("generated family exceeded " + std::to_string(cap) + " subtori");
    }
    return exact_counts(s, family)[static_cast<std::size_t>(dim)];
}

bool event_I(const SeedSet& s, int i, CountMode mode, std::size_t cap) {
    return spanned_count(s, i, mode, cap) > 0;
}

bool event_C(const SeedSet& s, int i) {
    check_dim(s, i);
    return closure(s).max_dimension() >= i;
}

SpanAnalysis analyze(const SeedSet& s, bool want_exact, std::size_t cap) {
    SpanAnalysis result;
    result.decomposition = closure(s);
    result.maximal_counts = maximal_counts(s, result.decomposition);
    if (want_exact) {
        const auto family = generated_family(s, cap);
        result.truncated = family.truncated;
        if (!family.truncated) result.exact_counts = exact_counts(s, family);
    }
    return result;
}

}  // namespace hbp
