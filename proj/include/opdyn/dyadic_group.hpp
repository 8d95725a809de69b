#pragma once

// The group D = ⊕ Z/2Z with generators g_0, g_1, ..., its finite subgroups
// D_n = <g_0, ..., g_{n-1}>, the embedding tau of D into binary digit
// sequences, and the subgroups D^sigma selected by a 0/1 sequence sigma.
//
// Indexing convention: generators are 0-based (g_0 is bit 0 of a mask) and
// digit sequences are 1-based (alpha_1 is the first digit). tau sends bit
// i-1 of a mask to digit i.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "opdyn/errors.hpp"

namespace opdyn {

inline constexpr int kDefaultMaxDepth = 20;

/// Element of D, stored as the mask of generators in its expansion.
struct GroupElem {
    std::uint32_t mask = 0;

    static constexpr GroupElem generator(int i) { return GroupElem{std::uint32_t{1} << i}; }

    /// Rejects masks at or beyond `max_depth` generators.
    static GroupElem checked(std::uint64_t mask, int max_depth = kDefaultMaxDepth)
    {
        if (max_depth < 0 || max_depth > 31 || (mask >> max_depth) != 0)
            throw DomainError("group element mask " + std::to_string(mask) + " exceeds depth " +
                              std::to_string(max_depth));
        return GroupElem{static_cast<std::uint32_t>(mask)};
    }

    constexpr bool in_subgroup(int n) const noexcept
    {
        return n >= 32 || (mask >> n) == 0;
    }

    friend constexpr GroupElem operator+(GroupElem a, GroupElem b) noexcept
    {
        return GroupElem{a.mask ^ b.mask};
    }
    friend constexpr bool operator==(GroupElem, GroupElem) = default;
};

inline void require_in_subgroup(GroupElem g, int n, const char* where)
{
    if (!g.in_subgroup(n))
        throw ResolutionError(std::string(where) + ": element " + std::to_string(g.mask) +
                              " is outside D_" + std::to_string(n));
}

/// Finite prefix (alpha_1, ..., alpha_M) of a point of I^N.
class DigitSeq {
public:
    DigitSeq() = default;
    explicit DigitSeq(std::size_t length) : digits_(length, 0) {}
    explicit DigitSeq(std::vector<std::uint8_t> digits) : digits_(std::move(digits))
    {
        for (auto& d : digits_)
            if (d > 1)
                throw DomainError("digit sequence entries must be 0 or 1");
    }

    /// Digits of `value` in increasing significance: alpha_i = bit (i-1).
    static DigitSeq from_value(std::uint64_t value, std::size_t length)
    {
        DigitSeq out(length);
        for (std::size_t i = 0; i < length && i < 64; ++i)
            out.digits_[i] = static_cast<std::uint8_t>((value >> i) & 1u);
        return out;
    }

    /// Parses "0110" as alpha_1 = 0, alpha_2 = 1, ...
    static DigitSeq parse(std::string_view text)
    {
        DigitSeq out(text.size());
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] != '0' && text[i] != '1')
                throw DomainError("digit string must contain only 0 and 1");
            out.digits_[i] = static_cast<std::uint8_t>(text[i] - '0');
        }
        return out;
    }

    std::size_t size() const noexcept { return digits_.size(); }
    bool empty() const noexcept { return digits_.empty(); }

    /// alpha_i, 1-based; digits beyond the stored prefix read as 0.
    std::uint8_t digit(std::size_t i) const noexcept
    {
        return (i >= 1 && i <= digits_.size()) ? digits_[i - 1] : std::uint8_t{0};
    }
    void set_digit(std::size_t i, std::uint8_t v)
    {
        if (i < 1 || i > digits_.size())
            throw DomainError("digit index out of range");
        digits_[i - 1] = v & 1u;
    }
    void flip_digit(std::size_t i) { set_digit(i, static_cast<std::uint8_t>(digit(i) ^ 1u)); }

    /// a_n = sum_{i<=n} alpha_i 2^{i-1}, the integer read off the first n digits.
    std::uint64_t prefix_value(std::size_t n) const
    {
        if (n > 64)
            throw DomainError("prefix_value supports at most 64 digits");
        std::uint64_t v = 0;
        for (std::size_t i = 1; i <= n && i <= digits_.size(); ++i)
            v |= std::uint64_t{digits_[i - 1]} << (i - 1);
        return v;
    }

    bool all_ones() const noexcept
    {
        for (auto d : digits_)
            if (d == 0)
                return false;
        return true;
    }
    bool all_zeros() const noexcept
    {
        for (auto d : digits_)
            if (d != 0)
                return false;
        return true;
    }

    std::string to_string() const
    {
        std::string s(digits_.size(), '0');
        for (std::size_t i = 0; i < digits_.size(); ++i)
            s[i] = static_cast<char>('0' + digits_[i]);
        return s;
    }

    const std::vector<std::uint8_t>& raw() const noexcept { return digits_; }

    friend bool operator==(const DigitSeq&, const DigitSeq&) = default;

private:
    std::vector<std::uint8_t> digits_;
};

/// Digitwise sum mod 2; the result has the length of the longer operand.
inline DigitSeq digit_xor(const DigitSeq& a, const DigitSeq& b)
{
    DigitSeq out(std::max(a.size(), b.size()));
    for (std::size_t i = 1; i <= out.size(); ++i)
        out.set_digit(i, static_cast<std::uint8_t>(a.digit(i) ^ b.digit(i)));
    return out;
}

/// tau(g): digit i equals bit i-1 of the mask. Without `length` the output
/// stops at the top set bit; all further digits are zero.
inline DigitSeq tau(GroupElem g)
{
    return DigitSeq::from_value(g.mask, static_cast<std::size_t>(std::bit_width(g.mask)));
}

inline DigitSeq tau(GroupElem g, std::size_t length)
{
    if (length < static_cast<std::size_t>(std::bit_width(g.mask)))
        throw ResolutionError("tau: element does not fit in " + std::to_string(length) + " digits");
    return DigitSeq::from_value(g.mask, length);
}

/// Inverse of tau on finite sequences.
inline GroupElem tau_inv(const DigitSeq& alpha, int max_depth = kDefaultMaxDepth)
{
    std::uint64_t mask = 0;
    for (std::size_t i = 1; i <= alpha.size(); ++i) {
        if (alpha.digit(i) == 0)
            continue;
        if (i > static_cast<std::size_t>(max_depth))
            throw ResolutionError("tau_inv: digit " + std::to_string(i) + " beyond maximum depth");
        mask |= std::uint64_t{1} << (i - 1);
    }
    return GroupElem{static_cast<std::uint32_t>(mask)};
}

/// Extracts the bits of `value` selected by `select`, packing them in
/// increasing position order.
constexpr std::uint64_t extract_bits(std::uint64_t value, std::uint64_t select) noexcept
{
    std::uint64_t out = 0;
    int k = 0;
    while (select != 0) {
        const int pos = std::countr_zero(select);
        out |= ((value >> pos) & 1u) << k;
        ++k;
        select &= select - 1;
    }
    return out;
}

/// Inverse of extract_bits: scatters the low bits of `packed` onto `select`.
constexpr std::uint64_t deposit_bits(std::uint64_t packed, std::uint64_t select) noexcept
{
    std::uint64_t out = 0;
    int k = 0;
    while (select != 0) {
        const int pos = std::countr_zero(select);
        out |= ((packed >> k) & 1u) << pos;
        ++k;
        select &= select - 1;
    }
    return out;
}

/// Finite 0/1 sequence (sigma_0, ..., sigma_{L-1}). D^sigma is generated by
/// the g_i with sigma_i = 0 and its complement by the g_i with sigma_i = 1.
/// Positions at or beyond L read as 0, so a finite sigma defines a
/// configuration measure on all of D that is constant along g_i, i >= L.
class SigmaSeq {
public:
    SigmaSeq() = default;
    explicit SigmaSeq(std::vector<std::uint8_t> bits) : bits_(std::move(bits))
    {
        for (auto b : bits_)
            if (b > 1)
                throw DomainError("sigma entries must be 0 or 1");
        if (bits_.size() > 31)
            throw DomainError("sigma longer than 31 entries");
    }

    /// "10101010" -> sigma_0 = 1, sigma_1 = 0, ...
    static SigmaSeq parse(std::string_view text)
    {
        std::vector<std::uint8_t> bits;
        for (char c : text) {
            if (c != '0' && c != '1')
                throw DomainError("sigma string must contain only 0 and 1");
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return SigmaSeq(std::move(bits));
    }

    static SigmaSeq all_ones(std::size_t n) { return SigmaSeq(std::vector<std::uint8_t>(n, 1)); }
    static SigmaSeq all_zeros(std::size_t n) { return SigmaSeq(std::vector<std::uint8_t>(n, 0)); }

    /// sigma for m^H where H is generated by the g_i with bit i of `h_mask` set.
    static SigmaSeq complement_of(std::uint32_t h_mask, std::size_t n)
    {
        std::vector<std::uint8_t> bits(n);
        for (std::size_t i = 0; i < n; ++i)
            bits[i] = ((h_mask >> i) & 1u) ? 0 : 1;
        return SigmaSeq(std::move(bits));
    }

    std::size_t size() const noexcept { return bits_.size(); }
    std::uint8_t operator[](std::size_t i) const noexcept { return i < bits_.size() ? bits_[i] : 0; }

    /// Generator mask of the complement subgroup intersected with D_n.
    std::uint32_t free_mask(int n) const noexcept
    {
        std::uint32_t m = 0;
        for (int i = 0; i < n; ++i)
            if ((*this)[static_cast<std::size_t>(i)])
                m |= std::uint32_t{1} << i;
        return m;
    }
    /// Generator mask of D^sigma intersected with D_n.
    std::uint32_t subgroup_mask(int n) const noexcept
    {
        const std::uint32_t all = n >= 32 ? ~0u : ((std::uint32_t{1} << n) - 1u);
        return all & ~free_mask(n);
    }
    /// sum_{i<n} sigma_i
    int ones_below(int n) const noexcept { return std::popcount(free_mask(n)); }

    std::string to_string() const
    {
        std::string s;
        for (auto b : bits_)
            s.push_back(static_cast<char>('0' + b));
        return s;
    }

    friend bool operator==(const SigmaSeq&, const SigmaSeq&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// Canonical index of the coset of D^sigma ∩ D_n containing g: the bits of g
/// at positions with sigma_i = 1, packed in increasing position order.
inline std::uint64_t coset_index(GroupElem g, const SigmaSeq& sigma, int n)
{
    require_in_subgroup(g, n, "coset_index");
    return extract_bits(g.mask, sigma.free_mask(n));
}

} // namespace opdyn
