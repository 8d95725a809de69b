#pragma once

// Configurations w ∈ I^{D_N}: bit vectors of length 2^N indexed by masks.
// A Config is also the label of a floor-N vertex of the graph of ordered
// pairs (lower half = first component, upper half = second component).

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "opdyn/dyadic_group.hpp"

namespace opdyn {

class Config {
public:
    static constexpr int kMaxDepth = 24;

    Config() : Config(0) {}
    explicit Config(int depth) : depth_(depth)
    {
        if (depth < 0 || depth > kMaxDepth)
            throw LimitError("config depth " + std::to_string(depth) + " out of range");
        words_.assign(word_count(depth), 0);
    }

    /// Depth-n config whose bits are the low 2^n bits of `bits` (n <= 6).
    static Config from_word(int depth, std::uint64_t bits)
    {
        if (depth > 6)
            throw DomainError("from_word needs depth <= 6");
        Config c(depth);
        c.words_[0] = bits & c.tail_mask();
        return c;
    }

    static Config constant(int depth, bool value)
    {
        Config c(depth);
        if (value) {
            for (auto& w : c.words_)
                w = ~std::uint64_t{0};
            c.words_.back() &= c.tail_mask();
        }
        return c;
    }

    int depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return std::size_t{1} << depth_; }

    bool operator[](std::uint64_t h) const noexcept { return (words_[h >> 6] >> (h & 63)) & 1u; }
    bool at(GroupElem g) const
    {
        require_in_subgroup(g, depth_, "Config::at");
        return (*this)[g.mask];
    }
    void set(std::uint64_t h, bool v) noexcept
    {
        const std::uint64_t bit = std::uint64_t{1} << (h & 63);
        if (v)
            words_[h >> 6] |= bit;
        else
            words_[h >> 6] &= ~bit;
    }
    void flip(std::uint64_t h) noexcept { words_[h >> 6] ^= std::uint64_t{1} << (h & 63); }

    /// w(· + g): result[h] = w[h XOR g].
    Config shifted(GroupElem g) const
    {
        require_in_subgroup(g, depth_, "Config::shifted");
        Config out(depth_);
        const std::uint64_t hi = g.mask >> 6;
        const unsigned lo = g.mask & 63u;
        for (std::size_t i = 0; i < words_.size(); ++i)
            out.words_[i ^ hi] = permute_word(words_[i], lo);
        return out;
    }

    /// The beta-half: h ↦ w(h + beta·g_{N-1}) on D_{N-1}.
    Config half(int beta) const
    {
        if (depth_ == 0)
            throw DomainError("floor-0 label has no halves");
        Config out(depth_ - 1);
        const std::size_t n = out.size();
        if (depth_ - 1 >= 6) {
            const std::size_t nw = out.words_.size();
            for (std::size_t i = 0; i < nw; ++i)
                out.words_[i] = words_[i + (beta ? nw : 0)];
        } else {
            out.words_[0] = (words_[0] >> (beta ? n : 0)) & out.tail_mask();
        }
        return out;
    }

    /// Label of the pair (lower, upper).
    static Config concat(const Config& lower, const Config& upper)
    {
        if (lower.depth_ != upper.depth_)
            throw DomainError("concat of labels on different floors");
        Config out(lower.depth_ + 1);
        if (lower.depth_ >= 6) {
            const std::size_t nw = lower.words_.size();
            for (std::size_t i = 0; i < nw; ++i) {
                out.words_[i] = lower.words_[i];
                out.words_[i + nw] = upper.words_[i];
            }
        } else {
            out.words_[0] = lower.words_[0] | (upper.words_[0] << lower.size());
        }
        return out;
    }

    /// w restricted to D_n.
    Config restrict(int n) const
    {
        if (n > depth_)
            throw ResolutionError("restrict beyond config depth");
        Config out(n);
        for (std::size_t i = 0; i < out.words_.size(); ++i)
            out.words_[i] = words_[i];
        out.words_.back() &= out.tail_mask();
        return out;
    }

    /// Number of h ∈ D_n with w(h) != v(h).
    std::size_t hamming(const Config& v, int n) const
    {
        if (n > depth_ || n > v.depth_)
            throw ResolutionError("hamming beyond config depth");
        const std::size_t nw = word_count(n);
        const std::uint64_t last = n >= 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (1u << n)) - 1u);
        std::size_t d = 0;
        for (std::size_t i = 0; i + 1 < nw; ++i)
            d += static_cast<std::size_t>(std::popcount(words_[i] ^ v.words_[i]));
        d += static_cast<std::size_t>(std::popcount((words_[nw - 1] ^ v.words_[nw - 1]) & last));
        return d;
    }

    std::size_t popcount() const noexcept
    {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    /// Hex nibbles, first character = bits 0..3, bit h at weight 2^(h mod 4).
    std::string to_hex() const
    {
        static constexpr char digits[] = "0123456789abcdef";
        const std::size_t nibbles = (size() + 3) / 4;
        std::string s(nibbles, '0');
        for (std::size_t i = 0; i < nibbles; ++i)
            s[i] = digits[(words_[(4 * i) >> 6] >> ((4 * i) & 63)) & 0xf];
        return s;
    }

    static Config from_hex(int depth, std::string_view hex)
    {
        Config c(depth);
        if (hex.size() != (c.size() + 3) / 4)
            throw DomainError("hex label has wrong length for depth " + std::to_string(depth));
        for (std::size_t i = 0; i < hex.size(); ++i) {
            const char ch = hex[i];
            std::uint64_t v;
            if (ch >= '0' && ch <= '9')
                v = static_cast<std::uint64_t>(ch - '0');
            else if (ch >= 'a' && ch <= 'f')
                v = static_cast<std::uint64_t>(ch - 'a' + 10);
            else
                throw DomainError("bad hex digit in label");
            c.words_[(4 * i) >> 6] |= v << ((4 * i) & 63);
        }
        if ((c.words_.back() & ~c.tail_mask()) != 0)
            throw DomainError("hex label sets bits beyond the config");
        return c;
    }

    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    friend bool operator==(const Config&, const Config&) = default;
    friend bool operator<(const Config& a, const Config& b)
    {
        if (a.depth_ != b.depth_)
            return a.depth_ < b.depth_;
        return a.words_ < b.words_;
    }

private:
    static std::size_t word_count(int depth) { return depth >= 6 ? (std::size_t{1} << (depth - 6)) : 1; }

    std::uint64_t tail_mask() const noexcept
    {
        return depth_ >= 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (1u << depth_)) - 1u);
    }

    /// Bit permutation h ↦ h XOR lo inside one 64-bit word.
    static std::uint64_t permute_word(std::uint64_t x, unsigned lo) noexcept
    {
        static constexpr std::uint64_t masks[6] = {
            0x5555555555555555ULL, 0x3333333333333333ULL, 0x0f0f0f0f0f0f0f0fULL,
            0x00ff00ff00ff00ffULL, 0x0000ffff0000ffffULL, 0x00000000ffffffffULL,
        };
        for (unsigned j = 0; j < 6; ++j) {
            if ((lo >> j) & 1u) {
                const unsigned s = 1u << j;
                x = ((x & masks[j]) << s) | ((x >> s) & masks[j]);
            }
        }
        return x;
    }

    int depth_;
    std::vector<std::uint64_t> words_;
};

} // namespace opdyn
