#include <gtest/gtest.h>

#include <set>

#include "opdyn/config.hpp"
#include "opdyn/dyadic_group.hpp"
#include "opdyn/rng.hpp"

using namespace opdyn;

TEST(GroupElem, GroupLawsExhaustive)
{
    for (std::uint32_t a = 0; a < 256; ++a) {
        const GroupElem ga{a};
        EXPECT_EQ(ga + GroupElem{}, ga);
        EXPECT_EQ(ga + ga, GroupElem{});
        for (std::uint32_t b = 0; b < 256; b += 7)
            for (std::uint32_t c = 0; c < 256; c += 13)
                EXPECT_EQ((ga + GroupElem{b}) + GroupElem{c}, ga + (GroupElem{b} + GroupElem{c}));
    }
}

TEST(GroupElem, SubgroupMembershipIsMaskBound)
{
    EXPECT_TRUE(GroupElem{3}.in_subgroup(2));
    EXPECT_FALSE(GroupElem{4}.in_subgroup(2));
    EXPECT_THROW(GroupElem::checked(std::uint64_t{1} << 20), DomainError);
    EXPECT_NO_THROW(GroupElem::checked((std::uint64_t{1} << 20) - 1));
}

TEST(Tau, Examples)
{
    EXPECT_TRUE(tau(GroupElem{}).all_zeros());
    EXPECT_EQ(tau(GroupElem{0b101}, 4).to_string(), "1010");
    EXPECT_EQ(tau(GroupElem::generator(0) + GroupElem::generator(2)).to_string(), "101");
}

TEST(Tau, InjectiveAndAdditive)
{
    std::set<std::string> seen;
    for (std::uint32_t a = 0; a < (1u << 16); ++a) {
        const auto t = tau(GroupElem{a}, 16);
        EXPECT_TRUE(seen.insert(t.to_string()).second);
        EXPECT_EQ(tau_inv(t), GroupElem{a});
    }
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const GroupElem a{static_cast<std::uint32_t>(rng() & 0xffff)};
        const GroupElem b{static_cast<std::uint32_t>(rng() & 0xffff)};
        EXPECT_EQ(tau(a + b, 16), digit_xor(tau(a, 16), tau(b, 16)));
    }
}

TEST(Tau, RoundTripOnFiniteSequences)
{
    for (std::uint64_t v = 0; v < 512; ++v) {
        const auto alpha = DigitSeq::from_value(v, 9);
        EXPECT_EQ(tau(tau_inv(alpha), 9), alpha);
    }
}

TEST(CosetIndex, Examples)
{
    EXPECT_EQ(coset_index(GroupElem::generator(1), SigmaSeq::parse("11"), 2), 2u);
    const auto s = SigmaSeq::parse("01");
    EXPECT_EQ(coset_index(GroupElem::generator(0), s, 2), 0u);
    EXPECT_EQ(coset_index(GroupElem{}, s, 2), 0u);
    EXPECT_THROW(coset_index(GroupElem{4}, s, 2), ResolutionError);
}

// Same index iff the difference lies in the subgroup generated by the
// zero positions of sigma.
TEST(CosetIndex, MatchesSubgroupMembershipExhaustive)
{
    for (int n = 0; n <= 8; ++n) {
        for (std::uint32_t sbits = 0; sbits < (1u << n); ++sbits) {
            std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
            int ones = 0;
            for (int i = 0; i < n; ++i) {
                bits[static_cast<std::size_t>(i)] = (sbits >> i) & 1u;
                ones += bits[static_cast<std::size_t>(i)];
            }
            const SigmaSeq sigma(bits);
            std::set<std::uint64_t> idx;
            for (std::uint32_t g = 0; g < (1u << n); ++g) {
                const auto c = coset_index(GroupElem{g}, sigma, n);
                EXPECT_LT(c, std::uint64_t{1} << ones);
                idx.insert(c);
            }
            EXPECT_EQ(idx.size(), std::size_t{1} << ones);
            if (n <= 4) {
                for (std::uint32_t g = 0; g < (1u << n); ++g)
                    for (std::uint32_t h = 0; h < (1u << n); ++h) {
                        const bool same = coset_index(GroupElem{g}, sigma, n) == coset_index(GroupElem{h}, sigma, n);
                        // g - h in the subgroup: no set bit at a sigma = 1 position
                        bool member = true;
                        for (int i = 0; i < n; ++i)
                            if (((g ^ h) >> i & 1u) && bits[static_cast<std::size_t>(i)])
                                member = false;
                        EXPECT_EQ(same, member);
                    }
            }
        }
    }
}

TEST(CosetIndex, TwoClassesForSigma01)
{
    std::set<std::uint64_t> idx;
    for (std::uint32_t g = 0; g < 4; ++g)
        idx.insert(coset_index(GroupElem{g}, SigmaSeq::parse("01"), 2));
    EXPECT_EQ(idx.size(), 2u);
}

TEST(SigmaSeq, ZeroPaddedBeyondLength)
{
    const auto s = SigmaSeq::parse("101");
    EXPECT_EQ(s[5], 0);
    EXPECT_EQ(s.ones_below(10), 2);
    EXPECT_EQ(s.free_mask(10), 0b101u);
    EXPECT_EQ(s.subgroup_mask(4), 0b1010u);
    EXPECT_EQ(SigmaSeq::complement_of(0b1, 4).to_string(), "0111");
}

TEST(Config, ShiftMatchesFormula)
{
    Rng rng(11);
    for (int depth : {0, 1, 3, 6, 7, 9}) {
        Config w(depth);
        for (std::uint64_t h = 0; h < w.size(); ++h)
            w.set(h, coin(rng));
        for (int rep = 0; rep < 20; ++rep) {
            const GroupElem g{static_cast<std::uint32_t>(uniform_below(rng, w.size()))};
            const Config s = w.shifted(g);
            for (std::uint64_t h = 0; h < w.size(); ++h)
                ASSERT_EQ(s[h], w[h ^ g.mask]);
        }
    }
}

TEST(Config, HalvesConcatAndHex)
{
    Rng rng(3);
    for (int depth : {1, 2, 6, 7, 8}) {
        Config w(depth);
        for (std::uint64_t h = 0; h < w.size(); ++h)
            w.set(h, coin(rng));
        EXPECT_EQ(Config::concat(w.half(0), w.half(1)), w);
        EXPECT_EQ(Config::from_hex(depth, w.to_hex()), w);
        const Config up = w.half(1);
        for (std::uint64_t h = 0; h < up.size(); ++h)
            EXPECT_EQ(up[h], w[h + up.size()]);
    }
    EXPECT_EQ(Config::from_word(2, 0b1000).to_hex(), "8");
}
