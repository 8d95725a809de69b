#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "opdyn/measures.hpp"

using namespace opdyn;

namespace {

const std::string kWord = "00010111";

std::shared_ptr<const BaseSampler> bernoulli() { return std::make_shared<BernoulliBase>(0.5); }
std::shared_ptr<const BaseSampler> orbit_pair() { return std::make_shared<PeriodicOrbitBase>(kWord, std::vector<std::int64_t>{0, 4}); }

std::shared_ptr<AperiodicSampler> toeplitz_aperiodic(const std::string& alpha = "00000000")
{
    return make_aperiodic(std::make_shared<ToeplitzBase>(), std::make_shared<ToeplitzEigen>(8), DigitSeq::parse(alpha), -16, 40, 8);
}

// Exact law of the length-L word at `offset` under D_k[eta] conditioned on
// A_{r,kk}, eta = uniform over the given phases of the periodic word.
EmpiricalMeasure exact_periodic(int k, int kk, std::uint64_t r, int L, std::int64_t offset)
{
    const PeriodicOrbitBase base(kWord, {0, 4});
    EmpiricalMeasure out(L);
    const std::uint64_t J = std::uint64_t{1} << k;
    for (std::uint64_t j = 0; j < J; ++j) {
        // alpha uniform in A_{j,k}; weight of A_{r,kk} inside it
        double w = 0;
        if (kk <= k)
            w = ((j & ((std::uint64_t{1} << kk) - 1)) == r) ? 1.0 : 0.0;
        else
            w = ((r & (J - 1)) == j) ? std::ldexp(1.0, -(kk - k)) : 0.0;
        if (w == 0)
            continue;
        for (auto p : base.phases())
            out.add(base.window_at(p + static_cast<std::int64_t>(j), offset, offset + L - 1).word(offset, L), w);
    }
    return out;
}

} // namespace

TEST(OmegaSigma, ZeroSigmaGivesConstantConfigurations)
{
    const OmegaSigmaSampler s(SigmaSeq::all_zeros(6), 6, 6);
    int ones = 0;
    for (int i = 0; i < 200; ++i) {
        Rng rng = make_rng(1, static_cast<std::uint64_t>(i));
        const auto p = s.draw(rng);
        EXPECT_TRUE(p.w.popcount() == 0 || p.w.popcount() == 64);
        ones += p.w.popcount() == 64;
    }
    EXPECT_GT(ones, 60);
    EXPECT_LT(ones, 140);
}

TEST(OmegaSigma, AllOnesBitsAreFairCoins)
{
    const auto s = OmegaSigmaSampler::lebesgue(4, 4);
    const int n = 10000;
    std::vector<int> count(16, 0);
    for (int i = 0; i < n; ++i) {
        Rng rng = make_rng(2, static_cast<std::uint64_t>(i));
        const auto p = s.draw(rng);
        for (std::uint64_t h = 0; h < 16; ++h)
            count[h] += p.w[h];
    }
    const double sd = std::sqrt(n * 0.25);
    for (int c : count)
        EXPECT_LT(std::abs(c - n / 2.0), 3.5 * sd);
}

TEST(OmegaSigma, ConstantOnCosets)
{
    const auto sigma = SigmaSeq::parse("1010011");
    const OmegaSigmaSampler s(sigma, 7, 3);
    for (int i = 0; i < 50; ++i) {
        Rng rng = make_rng(3, static_cast<std::uint64_t>(i));
        const auto w = s.draw_config(rng);
        for (std::uint32_t h = 0; h < 128; ++h)
            for (std::uint32_t g = 0; g < 128; ++g) {
                if ((g & sigma.free_mask(7)) == 0) {
                    ASSERT_EQ(w[h], w[h ^ g]);
                }
            }
    }
}

TEST(OmegaSigma, SubgroupMeasure)
{
    const auto s = OmegaSigmaSampler::m_H(0b1, 5, 2);
    EXPECT_EQ(s.free_bits(), 4);
    Rng rng(5);
    const auto w = s.draw_config(rng);
    for (std::uint64_t h = 0; h < 32; ++h)
        EXPECT_EQ(w[h], w[h ^ 1]);
}

TEST(Toeplitz, DecodesLevelUniquely)
{
    const ToeplitzEigen eig(8);
    Rng rng(17);
    for (int i = 0; i < 20000; ++i) {
        const std::uint64_t b = rng();
        const auto y = ToeplitzBase::window_for(b, -64, 64);
        ASSERT_EQ(eig.decode(y), b & 255u);
        for (int n = 0; n <= 8; ++n)
            ASSERT_EQ(eig.level(y, n), b & ((1u << n) - 1));
    }
}

TEST(Toeplitz, ShiftAdvancesLevel)
{
    const ToeplitzEigen eig(8);
    const std::uint64_t b = 0x123456789abcdefULL;
    const auto y = ToeplitzBase::window_for(b, -80, 80);
    EXPECT_EQ(eig.decode(y.shifted(1).restrict(-64, 64)), (b + 1) & 255u);
    EXPECT_EQ(eig.decode(y.shifted(-3).restrict(-64, 64)), (b - 3) & 255u);
}

// The coding w_j = [beta_1 = beta_2] of O^j beta only sees beta mod 4 and
// is therefore 4-periodic; it cannot separate levels beyond depth 2.
TEST(Toeplitz, EqualDigitsCodingIsFourPeriodic)
{
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t b = rng();
        auto g = [&](std::int64_t j) {
            const std::uint64_t x = b + static_cast<std::uint64_t>(j);
            return (x & 1u) == ((x >> 1) & 1u);
        };
        for (std::int64_t j = -20; j < 20; ++j)
            EXPECT_EQ(g(j), g(j + 4));
    }
}

TEST(Toeplitz, PaperfoldingIsNotPeriodic)
{
    const auto y = ToeplitzBase::window_for(0, 1, 1024);
    for (std::int64_t p = 1; p <= 256; ++p) {
        bool periodic = true;
        for (std::int64_t k = 1; k + p <= 1024 && periodic; ++k)
            periodic = y(k) == y(k + p);
        EXPECT_FALSE(periodic) << "period " << p;
    }
}

TEST(MakeAperiodic, ZeroAlphaFibreIsTheLevel)
{
    const auto s = toeplitz_aperiodic();
    const ToeplitzEigen eig(8);
    for (int i = 0; i < 200; ++i) {
        Rng rng = make_rng(4, static_cast<std::uint64_t>(i));
        const auto p = s->draw(rng);
        // the fibre is recoverable from any window covering [-64, 64]; here
        // check against an independent decode of a re-drawn window
        Rng again = make_rng(4, static_cast<std::uint64_t>(i));
        const auto y = ToeplitzBase().draw(again, -64, 64);
        EXPECT_EQ(p.alpha.prefix_value(8), eig.decode(y));
        EXPECT_EQ(p.w.word(-16, 40), y.word(-16, 40));
    }
}

TEST(MakeAperiodic, RejectsInconsistentLevels)
{
    class Wrong : public EigenStructure {
    public:
        std::uint64_t level(const ZWindow&, int) const override { return 0; }
        int max_level() const override { return 8; }
        std::pair<std::int64_t, std::int64_t> required_window() const override { return {-4, 4}; }
    };
    EXPECT_THROW(make_aperiodic(std::make_shared<ToeplitzBase>(), std::make_shared<Wrong>(), DigitSeq(8), 0, 8, 8),
                 DomainError);
}

TEST(MakeAperiodic, ProjectionIsRestrictedBase)
{
    const auto alpha = DigitSeq::parse("10110000");
    const auto s = toeplitz_aperiodic(alpha.to_string());
    const ToeplitzEigen eig(8);
    const ToeplitzBase base;
    for (int n : {1, 2, 3}) {
        const auto theta = project_theta(*s, n, 0, 6, 20000, 7);
        // eta restricted to B(r(n, alpha), n), by rejection on decoded levels
        EmpiricalMeasure ref(6);
        const std::uint64_t target = digit_level(alpha, n);
        for (std::uint64_t i = 0; ref.total() < 20000; ++i) {
            Rng rng = make_rng(8, i);
            const auto y = base.draw(rng, -64, 64);
            if (eig.level(y, n) == target)
                ref.add(y.word(0, 6));
        }
        EXPECT_LT(total_variation(theta.table, ref), 0.05) << "n=" << n;
        EXPECT_DOUBLE_EQ(theta.acceptance(), 1.0);
    }
}

TEST(Periodic, TypeZeroIsProduct)
{
    const PeriodicTypeSampler d0(bernoulli(), 0, 0, 16, 8);
    const ProductSampler prod(bernoulli(), 0, 16, 8);
    const auto a = project_theta(d0, 0, 0, 6, 100000, 1);
    const auto b = project_theta(prod, 0, 0, 6, 100000, 2);
    EXPECT_LT(total_variation(a.table, b.table), 0.02);
}

TEST(Periodic, ProjectionsMatchExactLaw)
{
    const PeriodicTypeSampler d2(orbit_pair(), 2, 0, 24, 8);
    for (int kk = 0; kk <= 4; ++kk)
        for (std::uint64_t r = 0; r < (1u << kk); r += 3) {
            const auto pr = project_theta(d2, kk, r, 6, 20000, 10 + r);
            EXPECT_LT(total_variation(pr.table, exact_periodic(2, kk, r, 6, 0)), 0.03) << kk << ' ' << r;
        }
}

TEST(Projection, ProductConditioningIsIndependent)
{
    const ProductSampler prod(bernoulli(), 0, 16, 8);
    const auto eta = project_theta(prod, 0, 0, 6, 100000, 3);
    for (int k = 1; k <= 3; ++k) {
        const auto th = project_theta(prod, k, 0, 6, 100000, 30 + static_cast<std::uint64_t>(k));
        EXPECT_LT(total_variation(eta.table, th.table), 0.03);
        EXPECT_NEAR(th.acceptance(), std::ldexp(1.0, -k), 0.01);
        EXPECT_FALSE(th.direct);
    }
}

TEST(Projection, ReproducibleAcrossWorkerCounts)
{
    const auto s = toeplitz_aperiodic();
    const auto a = project_theta(*s, 2, 1, CylinderSpec{6, 3, 0}, 5000, 99, 1);
    const auto b = project_theta(*s, 2, 1, CylinderSpec{6, 3, 0}, 5000, 99, 4);
    EXPECT_EQ(a.table.counts(), b.table.counts());
    const ProductSampler prod(bernoulli(), 0, 16, 8);
    const auto c = project_theta(prod, 3, 5, 6, 3000, 5, 0, 1);
    const auto d = project_theta(prod, 3, 5, 6, 3000, 5, 0, 3);
    EXPECT_EQ(c.table.counts(), d.table.counts());
    EXPECT_EQ(c.draws, d.draws);
}

TEST(Projection, RelationsOnPeriodicType)
{
    const PeriodicTypeSampler d2(orbit_pair(), 2, 0, 40, 8);
    const int L = 6;
    const std::uint64_t n = 20000;
    for (int k = 0; k <= 3; ++k) {
        const std::uint64_t K = std::uint64_t{1} << k;
        const auto th = project_theta(d2, k, 0, L, n, 1);
        const auto th_shift = project_theta(d2, k, 0, L, n, 2, static_cast<std::int64_t>(K));
        EXPECT_LT(total_variation(th.table, th_shift.table), 0.03);

        const auto next = project_theta(d2, k + 1, 0, L, n, 3);
        const auto next_shift = project_theta(d2, k + 1, 0, L, n, 4, static_cast<std::int64_t>(K));
        EXPECT_LT(total_variation(th.table, next.table.mixed_with(next_shift.table, 0.5)), 0.03);

        for (std::uint64_t r = 0; r < K; ++r) {
            const auto P = project_theta(d2, k, r, L, n, 5 + r);
            const auto SP = project_theta(d2, k, r, L, n, 6 + r, 1);
            const auto P1 = project_theta(d2, k, (r + 1) % K, L, n, 7 + r);
            EXPECT_LT(total_variation(SP.table, P1.table), 0.03);
            const auto Pa = project_theta(d2, k + 1, r, L, n, 8 + r);
            const auto Pb = project_theta(d2, k + 1, r + K, L, n, 9 + r);
            EXPECT_LT(total_variation(P.table, Pa.table.mixed_with(Pb.table, 0.5)), 0.03);
        }
    }
}

TEST(Classifier, Verdicts)
{
    const ProductSampler prod(bernoulli(), 0, 16, 8);
    const PeriodicTypeSampler d2(orbit_pair(), 2, 0, 16, 8);
    const auto ap = toeplitz_aperiodic();
    const auto a = classify_periodic_type(prod, 4, 6, 50000, 0.03, 1);
    const auto b = classify_periodic_type(d2, 4, 6, 50000, 0.03, 1);
    const auto c = classify_periodic_type(*ap, 4, 6, 50000, 0.03, 1);
    EXPECT_EQ(a.verdict(), "type 0");
    EXPECT_EQ(b.verdict(), "type 2");
    EXPECT_EQ(c.verdict(), "aperiodic-up-to-4");
    EXPECT_EQ(b.tv_ladder.size(), 4u);
    EXPECT_NEAR(b.tv_ladder[0], 0.5, 0.03);
    EXPECT_NEAR(b.tv_ladder[1], 0.5, 0.03);
}

// D_3[eta] and D_2[eta] coincide when eta is already S^4-invariant; compare
// joint tables of the window and the first three digits.
TEST(Classifier, HigherPeriodicTypeOfInvariantBaseCoincides)
{
    const PeriodicTypeSampler d2(orbit_pair(), 2, 0, 16, 8);
    const PeriodicTypeSampler d3(orbit_pair(), 3, 0, 16, 8);
    const CylinderSpec joint{6, 0, 3};
    const auto a = project_theta(d2, 0, 0, joint, 50000, 1);
    const auto b = project_theta(d3, 0, 0, joint, 50000, 2);
    EXPECT_LT(total_variation(a.table, b.table), 0.03);
}

TEST(Classifier, DichotomyClusters)
{
    const auto ap = toeplitz_aperiodic();
    for (const auto& e : dichotomy_report(*ap, 2, 6, 20000, 0.05, 3)) {
        EXPECT_FALSE(e.coincide);
        EXPECT_GT(e.tv, 0.3);
    }
    const ProductSampler prod(bernoulli(), 0, 16, 8);
    for (const auto& e : dichotomy_report(prod, 2, 6, 20000, 0.05, 3))
        EXPECT_TRUE(e.coincide);
}

TEST(EmpiricalMeasure, TotalVariationAndCsv)
{
    EmpiricalMeasure a(2), b(2);
    a.add(0b00, 3);
    a.add(0b01, 1);
    b.add(0b01, 1);
    b.add(0b10, 1);
    EXPECT_DOUBLE_EQ(total_variation(a, b), 0.75);
    EXPECT_DOUBLE_EQ(total_variation(a, a), 0.0);
    std::ostringstream os;
    a.write_csv(os);
    EXPECT_EQ(os.str(), "word,frequency\n00,0.75\n10,0.25\n");
    EXPECT_THROW(total_variation(a, EmpiricalMeasure(2)), DomainError);
}
