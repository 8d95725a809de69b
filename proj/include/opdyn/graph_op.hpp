#pragma once

// The graph of ordered pairs: floor n holds the 2^{2^n} configurations on
// D_n, and a floor-(n+1) vertex (v0, v1) is entered from v0 by edge 0 and
// from v1 by edge 1. A path of depth N is stored canonically as its top
// vertex together with the edge indices alpha_1..alpha_N; every lower
// vertex is recomputed from these.

#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

#include "opdyn/config.hpp"
#include "opdyn/dyadic_group.hpp"

namespace opdyn {

inline constexpr int kExhaustiveDepth = 4;

struct Vertex {
    int floor = 0;
    Config label;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

class PathPrefix {
public:
    PathPrefix() : top_(0) {}
    PathPrefix(Config top, DigitSeq edges) : top_(std::move(top)), edges_(std::move(edges))
    {
        if (edges_.size() != static_cast<std::size_t>(top_.depth()))
            throw DomainError("path needs one edge index per floor below the top vertex");
    }

    int depth() const noexcept { return top_.depth(); }
    const Config& top() const noexcept { return top_; }
    const DigitSeq& edges() const noexcept { return edges_; }

    /// Label of v_n: v_n(h) = v_N(h + sum_{i=n}^{N-1} alpha_{i+1} g_i).
    Config vertex_label(int n) const
    {
        if (n < 0 || n > depth())
            throw DomainError("floor outside path");
        Config v = top_;
        for (int i = depth() - 1; i >= n; --i)
            v = v.half(edges_.digit(static_cast<std::size_t>(i) + 1));
        return v;
    }

    Vertex vertex(int n) const { return Vertex{n, vertex_label(n)}; }

    std::vector<Vertex> vertices() const
    {
        std::vector<Vertex> out(static_cast<std::size_t>(depth()) + 1);
        Config v = top_;
        out.back() = Vertex{depth(), v};
        for (int i = depth() - 1; i >= 0; --i) {
            v = v.half(edges_.digit(static_cast<std::size_t>(i) + 1));
            out[static_cast<std::size_t>(i)] = Vertex{i, v};
        }
        return out;
    }

    friend bool operator==(const PathPrefix&, const PathPrefix&) = default;

private:
    Config top_;
    DigitSeq edges_;
};

/// v_n is the alpha_{n+1}-half of v_{n+1} for every n.
inline bool is_consistent(const std::vector<Vertex>& vs, const DigitSeq& edges)
{
    if (vs.size() != edges.size() + 1)
        return false;
    for (std::size_t n = 0; n + 1 < vs.size(); ++n) {
        const Config& lo = vs[n].label;
        const Config& hi = vs[n + 1].label;
        for (std::uint64_t h = 0; h < lo.size(); ++h)
            if (lo[h] != hi[h ^ (std::uint64_t{edges.digit(n + 1)} << n)])
                return false;
    }
    return true;
}

/// 2^{2^n}, for n <= 5.
inline std::uint64_t vertex_count(int n)
{
    if (n < 0 || n > 5)
        throw LimitError("vertex_count formula limited to n <= 5");
    return std::uint64_t{1} << (1u << n);
}

/// Number of paths from floor 0 into v: one per choice of alpha_1..alpha_n.
inline std::uint64_t paths_into(const Vertex& v)
{
    if (v.floor < 0 || v.floor > 63)
        throw LimitError("paths_into formula limited to floor < 64");
    return std::uint64_t{1} << v.floor;
}

/// Calls fn(v) for every floor-n vertex.
inline void for_each_vertex(int n, const std::function<void(const Vertex&)>& fn)
{
    if (n < 0 || n > kExhaustiveDepth)
        throw LimitError("exhaustive vertex enumeration limited to floor " + std::to_string(kExhaustiveDepth));
    const std::uint64_t count = vertex_count(n);
    for (std::uint64_t bits = 0; bits < count; ++bits)
        fn(Vertex{n, Config::from_word(n, bits)});
}

/// Counts paths into v by walking down the graph: paths into a floor-0
/// vertex = 1, paths into (v0, v1) = paths into v0 + paths into v1.
inline std::uint64_t count_paths_by_descent(const Config& v)
{
    if (v.depth() == 0)
        return 1;
    return count_paths_by_descent(v.half(0)) + count_paths_by_descent(v.half(1));
}

/// Calls fn(x) for every depth-N path, grouped by top vertex.
inline void for_each_path(int depth, const std::function<void(const PathPrefix&)>& fn)
{
    for_each_vertex(depth, [&](const Vertex& v) {
        const std::uint64_t count = std::uint64_t{1} << depth;
        for (std::uint64_t a = 0; a < count; ++a)
            fn(PathPrefix(v.label, DigitSeq::from_value(a, static_cast<std::size_t>(depth))));
    });
}

/// Adic successor: the first 0-edge becomes 1 and every edge below it 0.
inline PathPrefix adic_successor(const PathPrefix& x)
{
    DigitSeq a = x.edges();
    for (std::size_t i = 1; i <= a.size(); ++i) {
        if (a.digit(i) == 0) {
            a.set_digit(i, 1);
            for (std::size_t j = 1; j < i; ++j)
                a.set_digit(j, 0);
            return PathPrefix(x.top(), std::move(a));
        }
    }
    throw ResolutionError("adic successor undefined at this resolution (all edge indices are 1)");
}

/// Inverse of adic_successor.
inline PathPrefix adic_predecessor(const PathPrefix& x)
{
    DigitSeq a = x.edges();
    for (std::size_t i = 1; i <= a.size(); ++i) {
        if (a.digit(i) == 1) {
            a.set_digit(i, 0);
            for (std::size_t j = 1; j < i; ++j)
                a.set_digit(j, 1);
            return PathPrefix(x.top(), std::move(a));
        }
    }
    throw ResolutionError("adic predecessor undefined at this resolution (all edge indices are 0)");
}

/// Action of D: kappa(g_m) changes the edge entering floor m+1 and keeps
/// everything from floor m+1 upward.
inline PathPrefix kappa(GroupElem g, const PathPrefix& x)
{
    require_in_subgroup(g, x.depth(), "kappa");
    return PathPrefix(x.top(), digit_xor(x.edges(), tau(g, x.edges().size())));
}

/// Reverse-lexicographic order. Paths with different top vertices lie in
/// different tail classes and are unordered.
inline std::partial_ordering adic_compare(const PathPrefix& x, const PathPrefix& y)
{
    if (x.depth() != y.depth() || !(x.top() == y.top()))
        return std::partial_ordering::unordered;
    for (std::size_t i = x.edges().size(); i >= 1; --i) {
        const auto a = x.edges().digit(i);
        const auto b = y.edges().digit(i);
        if (a != b)
            return a < b ? std::partial_ordering::less : std::partial_ordering::greater;
    }
    return std::partial_ordering::equivalent;
}

} // namespace opdyn
