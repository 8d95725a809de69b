#pragma once

// Exhaustive small-depth checks shared by the command-line tool and the
// acceptance binary. Each check reports the first counterexample it meets.

#include <chrono>
#include <set>
#include <string>
#include <vector>

#include "opdyn/coding.hpp"
#include "opdyn/filtration.hpp"
#include "opdyn/graph_op.hpp"

namespace opdyn {

inline constexpr int kOracleMaxDepth = 4;

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;       // counterexample or summary
    double seconds = 0.0;
};

enum class Mutation {
    none,
    /// Flip bit 1 of the shift used by the coding map (needs depth >= 2).
    psi_xor_bit,
};

inline CodedPoint psi_under(const PathPrefix& x, Mutation mut)
{
    std::uint32_t a = prefix_elem(x.edges(), x.depth()).mask;
    if (mut == Mutation::psi_xor_bit && x.depth() >= 2)
        a ^= 2u;
    return CodedPoint{x.top().shifted(GroupElem{a}), x.edges()};
}

namespace detail {

inline std::string describe(const PathPrefix& x)
{
    return "depth " + std::to_string(x.depth()) + " top=" + x.top().to_hex() + " alpha=" + x.edges().to_string();
}

template <class Fn>
CheckResult timed(std::string name, Fn&& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r{std::move(name), true, "", 0.0};
    fn(r);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace detail

/// vertex_count(n) = 2^{2^n} and 2^n paths into every vertex.
inline CheckResult check_vertex_counts(int depth)
{
    return detail::timed("vertex-counts", [&](CheckResult& r) {
        for (int n = 0; n <= depth && r.pass; ++n) {
            std::uint64_t seen = 0;
            for_each_vertex(n, [&](const Vertex& v) {
                ++seen;
                if (r.pass && paths_into(v) != (std::uint64_t{1} << n)) {
                    r.pass = false;
                    r.detail = "paths_into mismatch at floor " + std::to_string(n) + " label " + v.label.to_hex();
                }
            });
            const std::uint64_t expect = std::uint64_t{1} << (std::uint64_t{1} << n);
            if (r.pass && (seen != expect || vertex_count(n) != expect)) {
                r.pass = false;
                r.detail = "vertex count mismatch at floor " + std::to_string(n);
            }
        }
        if (r.pass)
            r.detail = "floors 0.." + std::to_string(depth);
    });
}

/// The coding map is a bijection with inverse psi_inv on all paths of
/// depth <= `depth` (depths scanned in increasing order).
inline CheckResult check_psi_bijection(int depth, Mutation mut = Mutation::none)
{
    return detail::timed("psi-bijection", [&](CheckResult& r) {
        std::uint64_t total = 0;
        for (int n = 0; n <= depth && r.pass; ++n) {
            std::set<std::pair<std::string, std::string>> images;
            for_each_path(n, [&](const PathPrefix& x) {
                if (!r.pass)
                    return;
                ++total;
                const auto p = psi_under(x, mut);
                if (!(psi_inv(p) == x)) {
                    r.pass = false;
                    r.detail = "round trip fails at " + detail::describe(x);
                    return;
                }
                if (n <= 3 && !images.insert({p.w.to_hex(), p.alpha.to_string()}).second) {
                    r.pass = false;
                    r.detail = "image collision at " + detail::describe(x);
                }
            });
        }
        if (r.pass)
            r.detail = std::to_string(total) + " paths";
    });
}

/// psi(kappa(g, x)) = diag(g, psi(x)) for every path of the given depth and
/// every g ∈ D_depth.
inline CheckResult check_equivariance(int depth)
{
    return detail::timed("diag-equivariance", [&](CheckResult& r) {
        std::uint64_t total = 0;
        for_each_path(depth, [&](const PathPrefix& x) {
            if (!r.pass)
                return;
            const auto p = psi(x);
            for (std::uint32_t g = 0; g < (1u << depth); ++g) {
                ++total;
                if (!(psi(kappa(GroupElem{g}, x)) == diag(GroupElem{g}, p))) {
                    r.pass = false;
                    r.detail = "g=" + std::to_string(g) + " at " + detail::describe(x);
                    return;
                }
            }
        });
        if (r.pass)
            r.detail = std::to_string(total) + " (path, g) pairs at depth " + std::to_string(depth);
    });
}

/// w ∘ lambda commutes with (adic map, S × O) on `points` random points of
/// resolution 10 over the window [-16, 16].
inline CheckResult check_lambda_diagram(std::uint64_t points, std::uint64_t seed)
{
    return detail::timed("lambda-diagram", [&](CheckResult& r) {
        Rng rng = make_rng(seed, 0);
        std::uint64_t compared = 0;
        for (std::uint64_t i = 0; i < points && r.pass; ++i) {
            Config w(10);
            for (std::uint64_t h = 0; h < w.size(); ++h)
                w.set(h, coin(rng));
            DigitSeq alpha = DigitSeq::from_value(rng(), 10);
            if (alpha.all_ones())
                alpha.flip_digit(10);
            const CodedPoint p{w, alpha};
            const auto left = lambda_values(adic_on_coded(p), -16, 16);
            const auto right = lambda_values(p, -15, 17);
            for (std::size_t j = 0; j < left.size(); ++j) {
                if (left[j].has_value() != right[j].has_value() || (left[j] && *left[j] != *right[j])) {
                    r.pass = false;
                    r.detail = "point " + std::to_string(i) + " alpha=" + alpha.to_string() + " index " +
                               std::to_string(static_cast<int>(j) - 16);
                    break;
                }
                compared += left[j].has_value();
            }
        }
        if (r.pass)
            r.detail = std::to_string(points) + " points, " + std::to_string(compared) + " coordinates";
    });
}

/// The successor enumerates a full tail class of depth n in the
/// reverse-lexicographic order.
inline CheckResult check_adic_order(int n)
{
    return detail::timed("adic-order", [&](CheckResult& r) {
        Config top(n);
        top.set(0, true);
        std::vector<PathPrefix> sorted;
        for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a)
            sorted.emplace_back(top, DigitSeq::from_value(a, static_cast<std::size_t>(n)));
        std::sort(sorted.begin(), sorted.end(), [](const PathPrefix& a, const PathPrefix& b) {
            return adic_compare(a, b) == std::partial_ordering::less;
        });
        PathPrefix cur = sorted.front();
        for (std::size_t i = 1; i < sorted.size(); ++i) {
            cur = adic_successor(cur);
            if (!(cur == sorted[i])) {
                r.pass = false;
                r.detail = "position " + std::to_string(i) + " " + detail::describe(cur);
                return;
            }
        }
        r.detail = std::to_string(sorted.size()) + "-element tail class";
    });
}

/// Orbit counts, M_2 = 4 and M_{m+1} <= 2 M_m^2 for m <= 3.
inline CheckResult check_orbit_sizes()
{
    return detail::timed("orbit-sizes", [&](CheckResult& r) {
        std::vector<std::uint64_t> M;
        for (int m = 0; m <= 4; ++m)
            M.push_back(max_orbit_size(m, 2));
        if (M[2] != 4) {
            r.pass = false;
            r.detail = "M_2 = " + std::to_string(M[2]);
            return;
        }
        for (int m = 2; m <= 3; ++m)
            if (M[m + 1] > 2 * M[m] * M[m]) {
                r.pass = false;
                r.detail = "M_" + std::to_string(m + 1) + " = " + std::to_string(M[m + 1]);
                return;
            }
        r.detail = "M_0..4 = " + std::to_string(M[0]) + "," + std::to_string(M[1]) + "," + std::to_string(M[2]) + "," +
                   std::to_string(M[3]) + "," + std::to_string(M[4]);
    });
}

/// Child-swap recursion equals the minimum over all |T_3| = 128 automorphisms.
inline CheckResult check_kantorovich_dp(int instances, std::uint64_t seed)
{
    return detail::timed("kantorovich-dp", [&](CheckResult& r) {
        Rng rng = make_rng(seed, 1);
        for (int i = 0; i < instances; ++i) {
            std::vector<std::vector<std::int64_t>> t(8, std::vector<std::int64_t>(8));
            for (auto& row : t)
                for (auto& v : row)
                    v = static_cast<std::int64_t>(uniform_below(rng, 1000));
            const auto dp = kantorovich_sum(t);
            const auto bf = kantorovich_sum_brute(t);
            if (dp != bf) {
                r.pass = false;
                r.detail = "instance " + std::to_string(i) + ": dp " + std::to_string(dp) + " vs " + std::to_string(bf);
                return;
            }
        }
        r.detail = std::to_string(instances) + " depth-3 instances";
    });
}

/// The full oracle suite at the given depth (<= 4).
inline std::vector<CheckResult> run_oracle(int depth, Mutation mut = Mutation::none, std::uint64_t seed = 1)
{
    if (depth < 0 || depth > kOracleMaxDepth)
        throw LimitError("oracle depth " + std::to_string(depth) + " exceeds the exhaustive limit " +
                         std::to_string(kOracleMaxDepth));
    std::vector<CheckResult> out;
    out.push_back(check_vertex_counts(depth));
    out.push_back(check_psi_bijection(std::min(depth, 3), mut));
    out.push_back(check_equivariance(depth));
    out.push_back(check_lambda_diagram(10000, seed));
    out.push_back(check_adic_order(10));
    out.push_back(check_orbit_sizes());
    out.push_back(check_kantorovich_dp(200, seed));
    return out;
}

} // namespace opdyn
