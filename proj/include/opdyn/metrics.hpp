#pragma once

// Admissible semimetrics on coded points and windows, their averages along
// Z-orbits and over the finite groups D_n, and the deterministic
// inequalities used to test them.

#include <cstdint>
#include <functional>
#include <vector>

#include "opdyn/coding.hpp"
#include "opdyn/config.hpp"

namespace opdyn {

template <class P>
using Semimetric = std::function<double(const P&, const P&)>;

/// Cut semimetric on coordinate c of a window: [w(c) != w'(c)].
inline Semimetric<ZPoint> cut_window(std::int64_t c)
{
    return [c](const ZPoint& x, const ZPoint& y) { return x.w(c) != y.w(c) ? 1.0 : 0.0; };
}

/// Cut on the restriction to D_j: [w|_{D_j} != w'|_{D_j}].
inline Semimetric<CodedPoint> cut_restriction(int j)
{
    return [j](const CodedPoint& x, const CodedPoint& y) { return x.w.hamming(y.w, j) != 0 ? 1.0 : 0.0; };
}

/// rho_k: zero iff the restrictions to D_k and the first k digits agree.
inline Semimetric<CodedPoint> rho_k(int k)
{
    return [k](const CodedPoint& x, const CodedPoint& y) {
        if (x.w.hamming(y.w, k) != 0)
            return 1.0;
        for (std::size_t i = 1; i <= static_cast<std::size_t>(k); ++i)
            if (x.alpha.digit(i) != y.alpha.digit(i))
                return 1.0;
        return 0.0;
    };
}

/// Normalized Hamming distance between restrictions to D_n.
inline Semimetric<CodedPoint> hamming_config(int n)
{
    return [n](const CodedPoint& x, const CodedPoint& y) {
        return static_cast<double>(x.w.hamming(y.w, n)) / static_cast<double>(std::uint64_t{1} << n);
    };
}

/// Normalized Hamming distance on window coordinates [a, b].
inline Semimetric<ZPoint> hamming_window(std::int64_t a, std::int64_t b)
{
    return [a, b](const ZPoint& x, const ZPoint& y) {
        int d = 0;
        for (std::int64_t k = a; k <= b; ++k)
            d += x.w(k) != y.w(k);
        return static_cast<double>(d) / static_cast<double>(b - a + 1);
    };
}

/// (1/t) sum_{j<t} rho(T^j x, T^j y).
template <class P, class Map>
Semimetric<P> average_z(Semimetric<P> rho, int t, Map T)
{
    if (t < 1)
        throw DomainError("average_z needs t >= 1");
    return [rho = std::move(rho), t, T = std::move(T)](const P& x, const P& y) {
        P a = x;
        P b = y;
        double s = rho(a, b);
        for (int j = 1; j < t; ++j) {
            a = T(a);
            b = T(b);
            s += rho(a, b);
        }
        return s / t;
    };
}

/// Average under S × O on I^Z × I^N.
inline Semimetric<ZPoint> average_z(Semimetric<ZPoint> rho, int t)
{
    return average_z<ZPoint>(std::move(rho), t, [](const ZPoint& p) { return shift_odometer(p); });
}

/// Average under the adic map in coded form.
inline Semimetric<CodedPoint> average_z_coded(Semimetric<CodedPoint> rho, int t)
{
    return average_z<CodedPoint>(std::move(rho), t, [](const CodedPoint& p) { return adic_on_coded(p); });
}

/// (1/2^n) sum_{g ∈ D_n} rho(diag(g) x, diag(g) y).
inline Semimetric<CodedPoint> average_group(Semimetric<CodedPoint> rho, int n)
{
    return [rho = std::move(rho), n](const CodedPoint& x, const CodedPoint& y) {
        require_in_subgroup(GroupElem{(1u << n) - 1u}, x.resolution(), "average_group");
        double s = 0.0;
        for (std::uint32_t g = 0; g < (1u << n); ++g)
            s += rho(diag(GroupElem{g}, x), diag(GroupElem{g}, y));
        return s / static_cast<double>(std::uint64_t{1} << n);
    };
}

template <class P>
Semimetric<P> weighted_sum(Semimetric<P> a, double ca, Semimetric<P> b, double cb)
{
    return [a = std::move(a), ca, b = std::move(b), cb](const P& x, const P& y) { return ca * a(x, y) + cb * b(x, y); };
}

/// For an integer semimetric table rho[j][k] = rho(x_j, y_k):
/// N · sum_j rho(x_j, y_j) <= 3 · sum_{j,k} rho(x_j, y_k).
inline bool pairing_bound_holds(const std::vector<std::vector<std::int64_t>>& rho)
{
    const auto N = static_cast<std::int64_t>(rho.size());
    std::int64_t diag_sum = 0;
    std::int64_t all = 0;
    for (std::size_t j = 0; j < rho.size(); ++j) {
        diag_sum += rho[j][j];
        for (auto v : rho[j])
            all += v;
    }
    return N * diag_sum <= 3 * all;
}

} // namespace opdyn
