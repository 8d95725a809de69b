#pragma once

// Coding of paths as pairs (configuration, digit sequence), the diagonal
// action of D, the odometer, the adic map in coded form, and the fibrewise
// change of variables onto I^Z × I^N.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "opdyn/config.hpp"
#include "opdyn/dyadic_group.hpp"
#include "opdyn/graph_op.hpp"

namespace opdyn {

struct CodedPoint {
    Config w;
    DigitSeq alpha;

    int N() const noexcept { return w.depth(); }
    int M() const noexcept { return static_cast<int>(alpha.size()); }
    int resolution() const noexcept { return std::min(N(), M()); }

    friend bool operator==(const CodedPoint&, const CodedPoint&) = default;
};

/// Mask of sum_{i<n} alpha_{i+1} g_i.
inline GroupElem prefix_elem(const DigitSeq& alpha, int n)
{
    return GroupElem{static_cast<std::uint32_t>(alpha.prefix_value(static_cast<std::size_t>(n)))};
}

/// F[x](g) = v_N(g + a_N), A[x] = edge indices.
inline CodedPoint psi(const PathPrefix& x)
{
    return CodedPoint{x.top().shifted(prefix_elem(x.edges(), x.depth())), x.edges()};
}

inline PathPrefix psi_inv(const CodedPoint& p)
{
    if (p.N() != p.M())
        throw DomainError("psi_inv needs matching resolutions, got N=" + std::to_string(p.N()) +
                          " M=" + std::to_string(p.M()));
    return PathPrefix(p.w.shifted(prefix_elem(p.alpha, p.N())), p.alpha);
}

/// diag(g): (w(· + g), alpha + tau(g)).
inline CodedPoint diag(GroupElem g, const CodedPoint& p)
{
    require_in_subgroup(g, p.resolution(), "diag");
    return CodedPoint{p.w.shifted(g), digit_xor(p.alpha, tau(g, p.alpha.size()))};
}

/// Adds one to alpha with carry toward higher digits.
inline DigitSeq odometer(const DigitSeq& alpha)
{
    DigitSeq out = alpha;
    for (std::size_t i = 1; i <= out.size(); ++i) {
        if (out.digit(i) == 0) {
            out.set_digit(i, 1);
            return out;
        }
        out.set_digit(i, 0);
    }
    throw ResolutionError("odometer undefined at this resolution (all digits are 1)");
}

inline DigitSeq odometer_inv(const DigitSeq& alpha)
{
    DigitSeq out = alpha;
    for (std::size_t i = 1; i <= out.size(); ++i) {
        if (out.digit(i) == 1) {
            out.set_digit(i, 0);
            return out;
        }
        out.set_digit(i, 1);
    }
    throw ResolutionError("inverse odometer undefined at this resolution (all digits are 0)");
}

/// Adic map in coded form: (w(· + g), O[alpha]) with g = tau^{-1}(O[alpha] - alpha).
inline CodedPoint adic_on_coded(const CodedPoint& p)
{
    DigitSeq next = odometer(p.alpha);
    const GroupElem g = tau_inv(digit_xor(next, p.alpha), 31);
    if (!g.in_subgroup(p.N()))
        throw ResolutionError("adic carry reaches beyond the configuration depth");
    return CodedPoint{p.w.shifted(g), std::move(next)};
}

/// lambda_alpha(k) with n usable digits: k + a_n = sum (beta_i XOR alpha_{i+1}) 2^i,
/// so the image is (k + a_n) XOR a_n. Defined for -a_n <= k < 2^n - a_n.
inline std::optional<GroupElem> try_lambda_alpha(const DigitSeq& alpha, std::int64_t k, int n)
{
    if (n < 0 || n > 31 || static_cast<std::size_t>(n) > alpha.size())
        throw DomainError("lambda_alpha: usable depth exceeds alpha resolution");
    const auto a = static_cast<std::int64_t>(alpha.prefix_value(static_cast<std::size_t>(n)));
    const std::int64_t s = k + a;
    if (s < 0 || s >= (std::int64_t{1} << n))
        return std::nullopt;
    return GroupElem{static_cast<std::uint32_t>(s ^ a)};
}

inline GroupElem lambda_alpha(const DigitSeq& alpha, std::int64_t k, int n)
{
    if (auto g = try_lambda_alpha(alpha, k, n))
        return *g;
    throw ResolutionError("lambda_alpha: k = " + std::to_string(k) + " outside the representable segment at depth " +
                          std::to_string(n));
}

inline GroupElem lambda_alpha(const DigitSeq& alpha, std::int64_t k)
{
    return lambda_alpha(alpha, k, static_cast<int>(alpha.size()));
}

/// lambda_alpha^{-1}(D_n) = {-a_n, ..., -a_n + 2^n - 1}.
inline std::pair<std::int64_t, std::int64_t> lambda_segment(const DigitSeq& alpha, int n)
{
    const auto a = static_cast<std::int64_t>(alpha.prefix_value(static_cast<std::size_t>(n)));
    return {-a, -a + (std::int64_t{1} << n) - 1};
}

/// Finite window of a point of I^Z. Shifts share the underlying bits.
class ZWindow {
public:
    ZWindow() : bits_(std::make_shared<const std::vector<std::uint8_t>>()) {}
    ZWindow(std::int64_t lo, std::vector<std::uint8_t> bits)
        : lo_(lo), offset_(0), length_(static_cast<std::int64_t>(bits.size())),
          bits_(std::make_shared<const std::vector<std::uint8_t>>(std::move(bits)))
    {
    }

    std::int64_t lo() const noexcept { return lo_; }
    std::int64_t hi() const noexcept { return lo_ + length_ - 1; }
    std::int64_t length() const noexcept { return length_; }
    bool covers(std::int64_t a, std::int64_t b) const noexcept { return a >= lo_ && b <= hi(); }

    std::uint8_t operator()(std::int64_t k) const
    {
        if (k < lo_ || k > hi())
            throw ResolutionError("window index " + std::to_string(k) + " outside [" + std::to_string(lo_) + ", " +
                                  std::to_string(hi()) + "]");
        return (*bits_)[static_cast<std::size_t>(offset_ + (k - lo_))];
    }

    /// S^s: (S^s w)(k) = w(k + s).
    ZWindow shifted(std::int64_t s) const
    {
        ZWindow out = *this;
        out.lo_ = lo_ - s;
        return out;
    }

    /// Restriction to [a, b].
    ZWindow restrict(std::int64_t a, std::int64_t b) const
    {
        if (!covers(a, b) || b < a)
            throw ResolutionError("window restriction outside stored range");
        ZWindow out = *this;
        out.offset_ = offset_ + (a - lo_);
        out.lo_ = a;
        out.length_ = b - a + 1;
        return out;
    }

    /// Word w(a) w(a+1) ... w(a+L-1) packed with w(a) as bit 0.
    std::uint64_t word(std::int64_t a, int L) const
    {
        if (L > 64 || !covers(a, a + L - 1))
            throw ResolutionError("cylinder word outside stored window");
        std::uint64_t v = 0;
        const auto base = static_cast<std::size_t>(offset_ + (a - lo_));
        for (int i = 0; i < L; ++i)
            v |= std::uint64_t{(*bits_)[base + static_cast<std::size_t>(i)]} << i;
        return v;
    }

    friend bool operator==(const ZWindow& a, const ZWindow& b)
    {
        if (a.lo_ != b.lo_ || a.length_ != b.length_)
            return false;
        for (std::int64_t k = a.lo(); k <= a.hi(); ++k)
            if (a(k) != b(k))
                return false;
        return true;
    }

private:
    std::int64_t lo_ = 0;
    std::int64_t offset_ = 0;
    std::int64_t length_ = 0;
    std::shared_ptr<const std::vector<std::uint8_t>> bits_;
};

/// Point of I^Z × I^N.
struct ZPoint {
    ZWindow w;
    DigitSeq alpha;
};

/// S × O.
inline ZPoint shift_odometer(const ZPoint& p)
{
    return ZPoint{p.w.shifted(1), odometer(p.alpha)};
}

/// w ∘ lambda_alpha on [lo, hi]; usable depth n = min(N, M).
inline ZWindow lambda_window(const CodedPoint& p, std::int64_t lo, std::int64_t hi)
{
    const int n = p.resolution();
    std::vector<std::uint8_t> bits;
    bits.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t k = lo; k <= hi; ++k)
        bits.push_back(p.w[lambda_alpha(p.alpha, k, n).mask] ? 1 : 0);
    return ZWindow(lo, std::move(bits));
}

inline ZWindow lambda_window(const CodedPoint& p, std::int64_t half_width)
{
    return lambda_window(p, -half_width, half_width);
}

/// Per-index values of w ∘ lambda_alpha on [lo, hi], empty where undefined.
inline std::vector<std::optional<std::uint8_t>> lambda_values(const CodedPoint& p, std::int64_t lo, std::int64_t hi)
{
    std::vector<std::optional<std::uint8_t>> out;
    out.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t k = lo; k <= hi; ++k) {
        if (auto g = try_lambda_alpha(p.alpha, k, p.resolution()))
            out.emplace_back(p.w[g->mask] ? 1 : 0);
        else
            out.emplace_back(std::nullopt);
    }
    return out;
}

} // namespace opdyn
