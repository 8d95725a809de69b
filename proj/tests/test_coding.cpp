#include <gtest/gtest.h>

#include <set>

#include "opdyn/coding.hpp"
#include "opdyn/rng.hpp"

using namespace opdyn;

namespace {

CodedPoint random_point(int N, int M, Rng& rng)
{
    Config w(N);
    for (std::uint64_t h = 0; h < w.size(); ++h)
        w.set(h, coin(rng));
    return CodedPoint{w, DigitSeq::from_value(rng(), static_cast<std::size_t>(M))};
}

// F[x](g) = v_N(g + sum alpha_{i+1} g_i), evaluated bit by bit.
CodedPoint psi_reference(const PathPrefix& x)
{
    const int N = x.depth();
    std::uint64_t a = 0;
    for (int i = 0; i < N; ++i)
        a |= std::uint64_t{x.edges().digit(static_cast<std::size_t>(i) + 1)} << i;
    Config F(N);
    for (std::uint64_t g = 0; g < F.size(); ++g)
        F.set(g, x.top()[g ^ a]);
    return CodedPoint{F, x.edges()};
}

} // namespace

TEST(Psi, DepthOneExamples)
{
    const Config v1 = Config::concat(Config::from_word(0, 0), Config::from_word(0, 1));
    const auto p0 = psi(PathPrefix(v1, DigitSeq::parse("0")));
    EXPECT_EQ(p0.alpha.to_string(), "0");
    EXPECT_FALSE(p0.w[0]);
    EXPECT_TRUE(p0.w[1]);
    const auto p1 = psi(PathPrefix(v1, DigitSeq::parse("1")));
    EXPECT_TRUE(p1.w[0]);
    EXPECT_FALSE(p1.w[1]);
}

TEST(Psi, RoundTripAndReferenceExhaustive)
{
    for (int depth = 0; depth <= 4; ++depth) {
        std::set<std::pair<std::string, std::string>> images;
        for_each_path(depth, [&](const PathPrefix& x) {
            const auto p = psi(x);
            ASSERT_EQ(p, psi_reference(x));
            ASSERT_EQ(psi_inv(p), x);
            images.insert({p.w.to_hex(), p.alpha.to_string()});
        });
        EXPECT_EQ(images.size(), vertex_count(depth) << depth);
    }
    EXPECT_THROW(psi_inv(CodedPoint{Config(3), DigitSeq(2)}), DomainError);
}

TEST(Diag, EquivarianceWithKappaExhaustive)
{
    for_each_path(4, [&](const PathPrefix& x) {
        const auto p = psi(x);
        for (int m = 0; m < 4; ++m) {
            const auto g = GroupElem::generator(m);
            ASSERT_EQ(psi(kappa(g, x)), diag(g, p));
        }
    });
}

TEST(Diag, ActionLaws)
{
    Rng rng(4);
    for (int rep = 0; rep < 500; ++rep) {
        const auto p = random_point(8, 10, rng);
        EXPECT_EQ(diag(GroupElem{}, p), p);
        const GroupElem g{static_cast<std::uint32_t>(rng() & 0xff)};
        const GroupElem h{static_cast<std::uint32_t>(rng() & 0xff)};
        EXPECT_EQ(diag(g, diag(h, p)), diag(g + h, p));
        for (std::uint64_t k = 0; k < 256; k += 17)
            EXPECT_EQ(diag(g, p).w[k], p.w[k ^ g.mask]);
    }
    EXPECT_THROW(diag(GroupElem{1u << 8}, random_point(8, 10, rng)), ResolutionError);
}

TEST(Odometer, Examples)
{
    EXPECT_EQ(odometer(DigitSeq::parse("0110")).to_string(), "1110");
    EXPECT_EQ(odometer(DigitSeq::parse("1101")).to_string(), "0011");
    EXPECT_EQ(odometer_inv(DigitSeq::parse("0011")).to_string(), "1101");
    EXPECT_THROW(odometer(DigitSeq::parse("111")), ResolutionError);
    EXPECT_THROW(odometer_inv(DigitSeq::parse("000")), ResolutionError);

    for (int M = 1; M <= 8; ++M) {
        DigitSeq a(static_cast<std::size_t>(M));
        for (std::uint64_t i = 0; i + 1 < (std::uint64_t{1} << M); ++i) {
            a = odometer(a);
            EXPECT_EQ(a.prefix_value(static_cast<std::size_t>(M)), i + 1);
        }
        EXPECT_THROW(odometer(a), ResolutionError);
    }
}

TEST(AdicOnCoded, FirstStepExample)
{
    Rng rng(8);
    const auto p = CodedPoint{random_point(4, 4, rng).w, DigitSeq(4)};
    const auto q = adic_on_coded(p);
    EXPECT_EQ(q.alpha.to_string(), "1000");
    EXPECT_EQ(q.w, p.w.shifted(GroupElem::generator(0)));
}

TEST(AdicOnCoded, AgreesWithGraphSuccessorExhaustive)
{
    for_each_path(4, [&](const PathPrefix& x) {
        if (x.edges().all_ones()) {
            EXPECT_THROW(adic_on_coded(psi(x)), ResolutionError);
            return;
        }
        ASSERT_EQ(adic_on_coded(psi(x)), psi(adic_successor(x)));
    });
}

// Composing the coded adic map from alpha = 0: after 2^n - 1 steps the
// accumulated shift is g_0 + ... + g_{n-1} (alpha = 1^n 0...), and one
// more step carries into digit n+1 with total shift g_n.
TEST(AdicOnCoded, IteratedShiftFromZero)
{
    Rng rng(12);
    const int N = 8;
    const auto start = CodedPoint{random_point(N, N, rng).w, DigitSeq(N)};
    for (int n = 1; n < N; ++n) {
        CodedPoint p = start;
        for (std::uint64_t i = 0; i + 1 < (std::uint64_t{1} << n); ++i)
            p = adic_on_coded(p);
        EXPECT_EQ(p.w, start.w.shifted(GroupElem{(1u << n) - 1u}));
        EXPECT_EQ(p.alpha.prefix_value(N), (std::uint64_t{1} << n) - 1u);
        p = adic_on_coded(p);
        EXPECT_EQ(p.w, start.w.shifted(GroupElem::generator(n)));
        EXPECT_EQ(p.alpha, tau(GroupElem::generator(n), N));
    }
}

TEST(AdicOnCoded, CounterLaw)
{
    Rng rng(13);
    const int M = 6;
    for (std::uint64_t v = 0; v < (1u << M); ++v) {
        CodedPoint p{random_point(M, M, rng).w, DigitSeq::from_value(v, M)};
        std::uint64_t steps = 0;
        try {
            for (;;) {
                p = adic_on_coded(p);
                ++steps;
            }
        } catch (const ResolutionError&) {
        }
        EXPECT_EQ(steps, (std::uint64_t{1} << M) - 1 - v);
    }
}

TEST(AdicOnCoded, CarryBeyondDepthIsResolutionError)
{
    const CodedPoint p{Config(2), DigitSeq::parse("1100")};
    EXPECT_THROW(adic_on_coded(p), ResolutionError);
}

TEST(Lambda, Examples)
{
    const auto zero = DigitSeq(8);
    EXPECT_EQ(lambda_alpha(zero, 0), GroupElem{});
    EXPECT_EQ(lambda_alpha(zero, 1), GroupElem::generator(0));
    EXPECT_EQ(lambda_alpha(zero, 2), GroupElem::generator(1));
    EXPECT_EQ(lambda_alpha(zero, 3), GroupElem::generator(0) + GroupElem::generator(1));
    EXPECT_EQ(lambda_alpha(DigitSeq::parse("10000000"), -1), GroupElem::generator(0));
    EXPECT_THROW(lambda_alpha(zero, -1), ResolutionError);
}

// Brute force: enumerate beta and evaluate sum (-1)^{alpha_{i+1}} beta_i 2^i.
TEST(Lambda, MatchesSignedExpansion)
{
    for (int n = 1; n <= 6; ++n) {
        for (std::uint64_t av = 0; av < (1u << n); ++av) {
            const auto alpha = DigitSeq::from_value(av, static_cast<std::size_t>(n));
            std::set<std::int64_t> ks;
            for (std::uint32_t beta = 0; beta < (1u << n); ++beta) {
                std::int64_t k = 0;
                for (int i = 0; i < n; ++i)
                    if ((beta >> i) & 1u)
                        k += (alpha.digit(static_cast<std::size_t>(i) + 1) ? -1 : 1) * (std::int64_t{1} << i);
                ks.insert(k);
                ASSERT_EQ(lambda_alpha(alpha, k, n), GroupElem{beta});
            }
            const auto [lo, hi] = lambda_segment(alpha, n);
            EXPECT_EQ(*ks.begin(), lo);
            EXPECT_EQ(*ks.rbegin(), hi);
            EXPECT_EQ(ks.size(), std::size_t{1} << n);
        }
    }
}

TEST(Lambda, SegmentAtDepthTwo)
{
    for (std::uint64_t av = 0; av < 4; ++av) {
        const auto alpha = DigitSeq::from_value(av, 2);
        const auto a2 = static_cast<std::int64_t>(av);
        for (std::int64_t k = -8; k <= 8; ++k) {
            const bool inside = k >= -a2 && k <= -a2 + 3;
            EXPECT_EQ(try_lambda_alpha(alpha, k, 2).has_value(), inside);
        }
    }
}

// Lambda(A p) = (S × O) Lambda(p) on windows.
TEST(Lambda, CommutesWithShiftOdometer)
{
    Rng rng(99);
    const int L = 16;
    int compared = 0;
    int undefined = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const auto p = random_point(10, 10, rng);
        if (p.alpha.all_ones())
            continue;
        const auto q = adic_on_coded(p);
        const auto left = lambda_values(q, -L, L);
        const auto right = lambda_values(p, -L + 1, L + 1);
        for (std::size_t i = 0; i < left.size(); ++i) {
            ASSERT_EQ(left[i].has_value(), right[i].has_value());
            if (left[i]) {
                ASSERT_EQ(*left[i], *right[i]);
                ++compared;
            } else {
                ++undefined;
            }
        }
    }
    EXPECT_GT(compared, 300000);
    EXPECT_LT(undefined, compared / 50);
}

TEST(ZWindow, ShiftAndRestrict)
{
    const ZWindow w(-2, {1, 0, 0, 1, 1});
    EXPECT_EQ(w.hi(), 2);
    const auto s = w.shifted(1);
    EXPECT_EQ(s(-3), w(-2));
    EXPECT_EQ(s(1), w(2));
    const auto r = w.restrict(0, 2);
    EXPECT_EQ(r.word(0, 3), 0b110u);
    EXPECT_THROW(w(3), ResolutionError);
}
