#pragma once

// Samplers for invariant measures on I^D × I^N and I^Z × I^N, empirical
// cylinder tables, the projections P_{r,k} / theta_k, the periodic-type
// classifier and the skew-product construction with delta fibres.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "opdyn/coding.hpp"
#include "opdyn/config.hpp"
#include "opdyn/dyadic_group.hpp"
#include "opdyn/rng.hpp"

namespace opdyn {

// ---------------------------------------------------------------------------
// Configuration measures on I^D

/// omega^sigma = m^sigma × m truncated to (D_N, M digits): one uniform bit
/// per coset of D^sigma, digits uniform. sigma all ones gives Lebesgue
/// measure; sigma = complement of a generator set H gives m^H.
class OmegaSigmaSampler {
public:
    OmegaSigmaSampler(SigmaSeq sigma, int N, int M) : sigma_(std::move(sigma)), N_(N), M_(M)
    {
        if (N < 0 || N > Config::kMaxDepth || M < 0 || M > 64)
            throw DomainError("omega sampler resolution out of range");
        free_ = sigma_.free_mask(N);
    }

    static OmegaSigmaSampler lebesgue(int N, int M) { return OmegaSigmaSampler(SigmaSeq::all_ones(static_cast<std::size_t>(N)), N, M); }
    static OmegaSigmaSampler m_H(std::uint32_t h_mask, int N, int M)
    {
        return OmegaSigmaSampler(SigmaSeq::complement_of(h_mask, static_cast<std::size_t>(N)), N, M);
    }

    const SigmaSeq& sigma() const noexcept { return sigma_; }
    int N() const noexcept { return N_; }
    int M() const noexcept { return M_; }
    int free_bits() const noexcept { return std::popcount(free_); }

    /// Coset bits, one per coset index.
    std::vector<std::uint8_t> draw_coset_bits(Rng& rng) const
    {
        std::vector<std::uint8_t> bits(std::size_t{1} << free_bits());
        for (auto& b : bits)
            b = coin(rng) ? 1 : 0;
        return bits;
    }

    Config lift(const std::vector<std::uint8_t>& coset_bits) const
    {
        Config w(N_);
        for (std::uint64_t h = 0; h < w.size(); ++h)
            if (coset_bits[extract_bits(h, free_)])
                w.set(h, true);
        return w;
    }

    Config draw_config(Rng& rng) const { return lift(draw_coset_bits(rng)); }

    CodedPoint draw(Rng& rng) const
    {
        Config w = draw_config(rng);
        return CodedPoint{std::move(w), DigitSeq::from_value(M_ >= 64 ? rng() : (rng() & ((std::uint64_t{1} << M_) - 1)),
                                                           static_cast<std::size_t>(M_))};
    }

private:
    SigmaSeq sigma_;
    int N_;
    int M_;
    std::uint32_t free_ = 0;
};

// ---------------------------------------------------------------------------
// Base measures on I^Z

class BaseSampler {
public:
    virtual ~BaseSampler() = default;
    /// A draw restricted to [lo, hi].
    virtual ZWindow draw(Rng& rng, std::int64_t lo, std::int64_t hi) const = 0;
    virtual std::string describe() const = 0;
};

class BernoulliBase : public BaseSampler {
public:
    explicit BernoulliBase(double p) : p_(p)
    {
        if (!(p >= 0.0 && p <= 1.0))
            throw DomainError("Bernoulli parameter must lie in [0, 1]");
    }
    ZWindow draw(Rng& rng, std::int64_t lo, std::int64_t hi) const override
    {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(hi - lo + 1));
        if (p_ == 0.5) {
            std::uint64_t word = 0;
            for (std::size_t i = 0; i < bits.size(); ++i) {
                if (i % 64 == 0)
                    word = rng();
                bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
            }
        } else {
            std::bernoulli_distribution d(p_);
            for (auto& b : bits)
                b = d(rng) ? 1 : 0;
        }
        return ZWindow(lo, std::move(bits));
    }
    std::string describe() const override { return "bernoulli " + std::to_string(p_); }

private:
    double p_;
};

/// Uniform mixture of delta measures at S^p of the periodic extension of
/// `word`, p over `phases`. With phases {0, P/2} and an even period P the
/// measure is S^{P/2}-invariant.
class PeriodicOrbitBase : public BaseSampler {
public:
    PeriodicOrbitBase(std::string word, std::vector<std::int64_t> phases) : word_(std::move(word)), phases_(std::move(phases))
    {
        if (word_.empty() || phases_.empty())
            throw DomainError("periodic base needs a word and at least one phase");
        for (char c : word_)
            if (c != '0' && c != '1')
                throw DomainError("periodic word must be binary");
    }
    ZWindow draw(Rng& rng, std::int64_t lo, std::int64_t hi) const override
    {
        const std::int64_t phase = phases_[uniform_below(rng, phases_.size())];
        return window_at(phase, lo, hi);
    }
    ZWindow window_at(std::int64_t phase, std::int64_t lo, std::int64_t hi) const
    {
        const auto P = static_cast<std::int64_t>(word_.size());
        std::vector<std::uint8_t> bits;
        bits.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (std::int64_t k = lo; k <= hi; ++k)
            bits.push_back(static_cast<std::uint8_t>(word_[static_cast<std::size_t>(((k + phase) % P + P) % P)] - '0'));
        return ZWindow(lo, std::move(bits));
    }
    const std::string& word() const noexcept { return word_; }
    const std::vector<std::int64_t>& phases() const noexcept { return phases_; }
    std::string describe() const override { return "periodic-orbit " + word_; }

private:
    std::string word_;
    std::vector<std::int64_t> phases_;
};

/// Paperfolding sequence read along an odometer orbit: w(k) = g(b + k) with
/// b a uniform 2-adic integer (truncated to 64 bits) and g(x) the binary
/// digit just above the lowest set digit of x. The level of a point at
/// depth n is b mod 2^n; the shift adds one to it.
class ToeplitzBase : public BaseSampler {
public:
    static std::uint8_t symbol(std::uint64_t x) noexcept
    {
        if (x == 0)
            return 0;
        return static_cast<std::uint8_t>((x >> (std::countr_zero(x) + 1)) & 1u);
    }
    ZWindow draw(Rng& rng, std::int64_t lo, std::int64_t hi) const override { return window_for(rng(), lo, hi); }
    /// Draw conditioned on b ≡ c (mod 2^n).
    ZWindow draw_at_level(Rng& rng, std::uint64_t c, int n, std::int64_t lo, std::int64_t hi) const
    {
        const std::uint64_t low = n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
        return window_for((rng() & ~low) | (c & low), lo, hi);
    }
    static ZWindow window_for(std::uint64_t b, std::int64_t lo, std::int64_t hi)
    {
        std::vector<std::uint8_t> bits;
        bits.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (std::int64_t k = lo; k <= hi; ++k)
            bits.push_back(symbol(b + static_cast<std::uint64_t>(k)));
        return ZWindow(lo, std::move(bits));
    }
    std::string describe() const override { return "toeplitz paperfolding"; }
};

/// Level-set oracle: level(y, n) = r with y ∈ B(r, n).
class EigenStructure {
public:
    virtual ~EigenStructure() = default;
    virtual std::uint64_t level(const ZWindow& y, int n) const = 0;
    virtual int max_level() const = 0;
    /// Window a draw must cover for level() to be defined at max_level().
    virtual std::pair<std::int64_t, std::int64_t> required_window() const = 0;
};

/// Recovers b mod 2^n from a paperfolding window by extending candidate
/// residues one binary digit at a time and discarding those that
/// contradict an observed symbol. Exactly one residue must survive.
class ToeplitzEigen : public EigenStructure {
public:
    explicit ToeplitzEigen(int levels = 8) : levels_(levels)
    {
        if (levels < 1 || levels > 16)
            throw DomainError("toeplitz decoder supports 1..16 levels");
    }
    int max_level() const override { return levels_; }
    std::pair<std::int64_t, std::int64_t> required_window() const override
    {
        const std::int64_t h = std::int64_t{1} << (levels_ - 2 < 0 ? 0 : levels_ - 2);
        return {-h, h};
    }

    std::uint64_t decode(const ZWindow& y) const
    {
        std::vector<std::uint64_t> cands{0, 1};
        for (int m = 1; m < levels_; ++m) {
            std::vector<std::uint64_t> next;
            for (std::uint64_t c : cands)
                for (std::uint64_t top : {std::uint64_t{0}, std::uint64_t{1} << m})
                    if (consistent(y, c | top, m + 1))
                        next.push_back(c | top);
            cands.swap(next);
            if (cands.empty())
                break;
        }
        if (cands.size() != 1)
            throw DomainError("toeplitz window decodes to " + std::to_string(cands.size()) + " levels, expected exactly 1");
        return cands.front();
    }

    std::uint64_t level(const ZWindow& y, int n) const override
    {
        if (n > levels_)
            throw ResolutionError("level beyond decoder depth");
        return decode(y) & ((std::uint64_t{1} << n) - 1);
    }

private:
    // Checks positions whose symbol first becomes determined by c mod 2^m:
    // those x = c + j with lowest set digit m - 2 (symbol = digit m - 1).
    static bool consistent(const ZWindow& y, std::uint64_t c, int m)
    {
        const int t = m - 2;
        const std::uint64_t mod = std::uint64_t{1} << m;
        const std::uint64_t step = std::uint64_t{1} << (t + 1);
        // j ≡ 2^t - c (mod 2^{t+1})
        const std::uint64_t res = ((std::uint64_t{1} << t) - c) & (step - 1);
        std::int64_t j = y.lo() + static_cast<std::int64_t>((res - static_cast<std::uint64_t>(y.lo())) & (step - 1));
        for (; j <= y.hi(); j += static_cast<std::int64_t>(step)) {
            const std::uint64_t x = (c + static_cast<std::uint64_t>(j)) & (mod - 1);
            if (((x >> (t + 1)) & 1u) != y(j))
                return false;
        }
        return true;
    }

    int levels_;
};

// ---------------------------------------------------------------------------
// Invariant measures on I^Z × I^N

class ZSampler {
public:
    ZSampler(std::int64_t lo, std::int64_t hi, int M) : lo_(lo), hi_(hi), M_(M)
    {
        if (hi < lo || M < 1 || M > 62)
            throw DomainError("sampler window or digit resolution out of range");
    }
    virtual ~ZSampler() = default;

    virtual ZPoint draw(Rng& rng) const = 0;
    /// Draw conditioned on alpha ∈ A_{r,k}; empty when a rejection step fails.
    virtual std::optional<ZPoint> draw_in_cylinder(Rng& rng, std::uint64_t r, int k) const
    {
        ZPoint p = draw(rng);
        if (p.alpha.prefix_value(static_cast<std::size_t>(k)) == r)
            return p;
        return std::nullopt;
    }
    /// True if draw_in_cylinder generates the fibre digits directly.
    virtual bool direct_conditioning() const { return false; }
    virtual std::string describe() const = 0;

    std::int64_t lo() const noexcept { return lo_; }
    std::int64_t hi() const noexcept { return hi_; }
    int M() const noexcept { return M_; }

protected:
    DigitSeq uniform_digits(Rng& rng) const
    {
        return DigitSeq::from_value(rng() & ((std::uint64_t{1} << M_) - 1), static_cast<std::size_t>(M_));
    }
    /// Uniform digits with the first k fixed to the binary digits of r.
    DigitSeq digits_in_cylinder(Rng& rng, std::uint64_t r, int k) const
    {
        const std::uint64_t low = (std::uint64_t{1} << k) - 1;
        return DigitSeq::from_value(((rng() & ~low) | (r & low)) & ((std::uint64_t{1} << M_) - 1), static_cast<std::size_t>(M_));
    }

    std::int64_t lo_;
    std::int64_t hi_;
    int M_;
};

/// eta × m.
class ProductSampler : public ZSampler {
public:
    ProductSampler(std::shared_ptr<const BaseSampler> base, std::int64_t lo, std::int64_t hi, int M)
        : ZSampler(lo, hi, M), base_(std::move(base))
    {
        if (!base_)
            throw DomainError("product sampler needs a base sampler");
    }
    ZPoint draw(Rng& rng) const override
    {
        ZWindow w = base_->draw(rng, lo_, hi_);
        return ZPoint{std::move(w), uniform_digits(rng)};
    }
    std::string describe() const override { return "product " + base_->describe(); }

private:
    std::shared_ptr<const BaseSampler> base_;
};

/// D_k[eta] = 2^{-k} sum_{i<2^k} S^i eta × (m restricted to A_{i,k}) for an
/// S^{2^k}-invariant eta.
class PeriodicTypeSampler : public ZSampler {
public:
    PeriodicTypeSampler(std::shared_ptr<const BaseSampler> base, int k, std::int64_t lo, std::int64_t hi, int M)
        : ZSampler(lo, hi, M), base_(std::move(base)), k_(k)
    {
        if (!base_)
            throw DomainError("periodic-type sampler needs a base sampler");
        if (k < 0 || k > M || k > 20)
            throw DomainError("periodic type k must lie in [0, min(M, 20)]");
    }
    ZPoint draw(Rng& rng) const override
    {
        const std::uint64_t j = uniform_below(rng, std::uint64_t{1} << k_);
        return at_phase(rng, j);
    }
    std::optional<ZPoint> draw_in_cylinder(Rng& rng, std::uint64_t r, int k) const override
    {
        if (k <= k_) {
            // j ≡ r mod 2^k, uniform among the 2^{k_-k} such phases
            const std::uint64_t j = (uniform_below(rng, std::uint64_t{1} << (k_ - k)) << k) | r;
            return at_phase(rng, j);
        }
        const std::uint64_t j = r & ((std::uint64_t{1} << k_) - 1);
        ZWindow y = base_->draw(rng, lo_ + static_cast<std::int64_t>(j), hi_ + static_cast<std::int64_t>(j));
        return ZPoint{y.shifted(static_cast<std::int64_t>(j)), digits_in_cylinder(rng, r, k)};
    }
    bool direct_conditioning() const override { return true; }
    int k() const noexcept { return k_; }
    std::string describe() const override { return "periodic-type k=" + std::to_string(k_) + " over " + base_->describe(); }

private:
    ZPoint at_phase(Rng& rng, std::uint64_t j) const
    {
        ZWindow y = base_->draw(rng, lo_ + static_cast<std::int64_t>(j), hi_ + static_cast<std::int64_t>(j));
        return ZPoint{y.shifted(static_cast<std::int64_t>(j)), digits_in_cylinder(rng, j, k_)};
    }

    std::shared_ptr<const BaseSampler> base_;
    int k_;
};

/// r(n, alpha) = sum_{i<n} 2^i alpha_{i+1}.
inline std::uint64_t digit_level(const DigitSeq& alpha, int n) { return alpha.prefix_value(static_cast<std::size_t>(n)); }

/// Skew product nu^(alpha)[eta]: draws y ~ eta and sets the fibre digits
/// beta to the binary digits of (r_M(y) - r(M, alpha)) mod 2^M, so that
/// the point lies in A_{rho_n, n} with rho_n = r_n(y) - r(n, alpha) for all n <= M.
class AperiodicSampler : public ZSampler {
public:
    AperiodicSampler(std::shared_ptr<const ToeplitzBase> base, std::shared_ptr<const EigenStructure> eig, DigitSeq alpha,
                     std::int64_t lo, std::int64_t hi, int M)
        : ZSampler(lo, hi, M), base_(std::move(base)), eig_(std::move(eig)), alpha_(std::move(alpha))
    {
        if (!base_ || !eig_)
            throw DomainError("aperiodic sampler needs a base and a level oracle");
        if (M > eig_->max_level())
            throw DomainError("fibre resolution exceeds the level oracle depth");
        const auto [a, b] = eig_->required_window();
        draw_lo_ = std::min(lo, a);
        draw_hi_ = std::max(hi, b);
    }

    ZPoint draw(Rng& rng) const override { return finish(base_->draw(rng, draw_lo_, draw_hi_)); }

    std::optional<ZPoint> draw_in_cylinder(Rng& rng, std::uint64_t r, int k) const override
    {
        // beta ∈ A_{r,k}  <=>  r_k(y) ≡ r + r(k, alpha)
        const std::uint64_t c = (r + digit_level(alpha_, k)) & ((std::uint64_t{1} << k) - 1);
        ZPoint p = finish(base_->draw_at_level(rng, c, k, draw_lo_, draw_hi_));
        if (p.alpha.prefix_value(static_cast<std::size_t>(k)) != r)
            throw DomainError("decoded level disagrees with the conditioned draw");
        return p;
    }
    bool direct_conditioning() const override { return true; }
    const DigitSeq& alpha() const noexcept { return alpha_; }
    std::string describe() const override { return "aperiodic alpha=" + alpha_.to_string() + " over " + base_->describe(); }

private:
    ZPoint finish(const ZWindow& y) const
    {
        const std::uint64_t mod = std::uint64_t{1} << M_;
        const std::uint64_t level = eig_->level(y, M_);
        const std::uint64_t beta = (level + mod - (digit_level(alpha_, M_) & (mod - 1))) & (mod - 1);
        return ZPoint{y.restrict(lo_, hi_), DigitSeq::from_value(beta, static_cast<std::size_t>(M_))};
    }

    std::shared_ptr<const ToeplitzBase> base_;
    std::shared_ptr<const EigenStructure> eig_;
    DigitSeq alpha_;
    std::int64_t draw_lo_ = 0;
    std::int64_t draw_hi_ = 0;
};

/// Checks that the level oracle is consistent with the base measure (level
/// masses 2^{-n} within 4 binomial standard deviations, nested levels,
/// shift increments the level) and builds the skew product.
inline std::shared_ptr<AperiodicSampler> make_aperiodic(std::shared_ptr<const ToeplitzBase> eta,
                                                        std::shared_ptr<const EigenStructure> eig, DigitSeq alpha,
                                                        std::int64_t lo, std::int64_t hi, int M,
                                                        std::uint64_t seed = 1, int n_check = 4000)
{
    if (!eta || !eig)
        throw DomainError("make_aperiodic needs a base and a level oracle");
    const auto [a, b] = eig->required_window();
    const int levels = std::min(M, eig->max_level());
    std::vector<std::vector<int>> counts(static_cast<std::size_t>(levels) + 1);
    for (int n = 0; n <= levels; ++n)
        counts[static_cast<std::size_t>(n)].assign(std::size_t{1} << n, 0);
    for (int i = 0; i < n_check; ++i) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
        const ZWindow y = eta->draw(rng, a, b + 1);
        const std::uint64_t top = eig->level(y.restrict(a, b), levels);
        const std::uint64_t next = eig->level(y.shifted(1).restrict(a, b), levels);
        if (next != ((top + 1) & ((std::uint64_t{1} << levels) - 1)))
            throw DomainError("level oracle does not advance by one under the shift");
        for (int n = 0; n <= levels; ++n) {
            if (eig->level(y.restrict(a, b), n) != (top & ((std::uint64_t{1} << n) - 1)))
                throw DomainError("level oracle is not nested across depths");
            ++counts[static_cast<std::size_t>(n)][top & ((std::uint64_t{1} << n) - 1)];
        }
    }
    for (int n = 1; n <= std::min(levels, 6); ++n) {
        const double p = std::ldexp(1.0, -n);
        const double mean = p * n_check;
        const double sd = std::sqrt(n_check * p * (1 - p));
        for (int c : counts[static_cast<std::size_t>(n)])
            if (std::abs(c - mean) > 4 * sd)
                throw DomainError("level set mass at depth " + std::to_string(n) + " deviates from 2^-n");
    }
    return std::make_shared<AperiodicSampler>(std::move(eta), std::move(eig), std::move(alpha), lo, hi, M);
}

// ---------------------------------------------------------------------------
// Empirical measures

/// Frequencies of length-L words (bit i = position offset + i).
class EmpiricalMeasure {
public:
    EmpiricalMeasure() = default;
    explicit EmpiricalMeasure(int length) : length_(length) {}

    void add(std::uint64_t word, double weight = 1.0)
    {
        counts_[word] += weight;
        total_ += weight;
    }
    void merge(const EmpiricalMeasure& other)
    {
        for (const auto& [w, c] : other.counts_)
            add(w, c);
    }

    int length() const noexcept { return length_; }
    double total() const noexcept { return total_; }
    double frequency(std::uint64_t word) const
    {
        auto it = counts_.find(word);
        return (it == counts_.end() || total_ == 0) ? 0.0 : it->second / total_;
    }
    const std::map<std::uint64_t, double>& counts() const noexcept { return counts_; }

    /// a·this + (1 - a)·other, as a normalized table.
    EmpiricalMeasure mixed_with(const EmpiricalMeasure& other, double a) const
    {
        EmpiricalMeasure out(length_);
        for (const auto& [w, c] : counts_)
            out.add(w, a * c / total_);
        for (const auto& [w, c] : other.counts_)
            out.add(w, (1 - a) * c / other.total_);
        return out;
    }

    std::string word_string(std::uint64_t word) const
    {
        std::string s(static_cast<std::size_t>(length_), '0');
        for (int i = 0; i < length_; ++i)
            s[static_cast<std::size_t>(i)] = static_cast<char>('0' + ((word >> i) & 1u));
        return s;
    }

    void write_csv(std::ostream& os) const
    {
        os << "word,frequency\n";
        for (const auto& [w, c] : counts_)
            os << word_string(w) << ',' << c / total_ << '\n';
    }

private:
    int length_ = 0;
    std::map<std::uint64_t, double> counts_;
    double total_ = 0.0;
};

inline double total_variation(const EmpiricalMeasure& a, const EmpiricalMeasure& b)
{
    if (a.total() <= 0 || b.total() <= 0)
        throw DomainError("total variation of an empty table");
    double s = 0.0;
    auto ia = a.counts().begin();
    auto ib = b.counts().begin();
    while (ia != a.counts().end() || ib != b.counts().end()) {
        if (ib == b.counts().end() || (ia != a.counts().end() && ia->first < ib->first)) {
            s += ia->second / a.total();
            ++ia;
        } else if (ia == a.counts().end() || ib->first < ia->first) {
            s += ib->second / b.total();
            ++ib;
        } else {
            s += std::abs(ia->second / a.total() - ib->second / b.total());
            ++ia;
            ++ib;
        }
    }
    return 0.5 * s;
}

struct CylinderSpec {
    int length = 6;
    std::int64_t offset = 0;
    /// If positive, the first `alpha_digits` digits are appended above the word.
    int alpha_digits = 0;
};

inline std::uint64_t cylinder_key(const ZPoint& p, const CylinderSpec& c)
{
    std::uint64_t key = p.w.word(c.offset, c.length);
    if (c.alpha_digits > 0)
        key |= p.alpha.prefix_value(static_cast<std::size_t>(c.alpha_digits)) << c.length;
    return key;
}

struct Projection {
    EmpiricalMeasure table;
    std::uint64_t accepted = 0;
    std::uint64_t draws = 0;
    bool direct = false;
    double acceptance() const { return draws == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(draws); }
};

/// Runs fn(i) for i in [begin, end) on `workers` threads, each writing only
/// to its own index-addressed slot.
template <class Fn>
void parallel_for(std::uint64_t begin, std::uint64_t end, int workers, Fn&& fn)
{
    if (workers <= 1 || end - begin < 2) {
        for (std::uint64_t i = begin; i < end; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint64_t n = end - begin;
    const auto w = static_cast<std::uint64_t>(workers);
    for (std::uint64_t t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            for (std::uint64_t i = begin + t; i < begin + n; i += w)
                fn(i);
        });
    }
    for (auto& th : pool)
        th.join();
}

/// P_{r,k}[nu] tabulated on one cylinder family: draws conditioned on
/// alpha ∈ A_{r,k}, projected to the window. `n_samples` counts accepted
/// draws; draw i uses the stream derive_seed(seed, i), so the table does
/// not depend on the worker count.
inline Projection project_theta(const ZSampler& s, int k, std::uint64_t r, const CylinderSpec& cyl, std::uint64_t n_samples,
                                std::uint64_t seed, int workers = 1)
{
    if (k < 0 || k > s.M())
        throw DomainError("projection depth exceeds digit resolution");
    if (r >= (std::uint64_t{1} << k))
        throw DomainError("cylinder index r must be below 2^k");
    if (n_samples == 0)
        throw DomainError("project_theta needs at least one sample");
    if (!(cyl.offset >= s.lo() && cyl.offset + cyl.length - 1 <= s.hi()))
        throw DomainError("cylinder lies outside the sampler window");

    Projection out;
    out.table = EmpiricalMeasure(cyl.length + cyl.alpha_digits);
    out.direct = s.direct_conditioning();
    const std::uint64_t block = 4096;
    const std::uint64_t max_draws = (n_samples << std::min(k, 20)) * 64 + 100000;
    std::vector<std::optional<std::uint64_t>> keys(block);
    std::uint64_t next = 0;
    while (out.accepted < n_samples) {
        if (next >= max_draws)
            throw DomainError("no accepted samples for cylinder A_{" + std::to_string(r) + "," + std::to_string(k) + "}");
        parallel_for(0, block, workers, [&](std::uint64_t j) {
            Rng rng = make_rng(seed, next + j);
            auto p = s.draw_in_cylinder(rng, r, k);
            keys[j] = p ? std::optional<std::uint64_t>(cylinder_key(*p, cyl)) : std::nullopt;
        });
        for (std::uint64_t j = 0; j < block && out.accepted < n_samples; ++j) {
            ++out.draws;
            if (keys[j]) {
                out.table.add(*keys[j]);
                ++out.accepted;
            }
        }
        next += block;
    }
    return out;
}

inline Projection project_theta(const ZSampler& s, int k, std::uint64_t r, int L, std::uint64_t n_samples, std::uint64_t seed,
                                std::int64_t shift = 0, int workers = 1)
{
    return project_theta(s, k, r, CylinderSpec{L, shift, 0}, n_samples, seed, workers);
}

struct ClassifierReport {
    std::vector<double> tv_ladder;         // TV(theta_j, theta_{j+1}), j < k_max
    std::vector<double> acceptance;        // per theta_j
    std::optional<int> type;               // empty: aperiodic up to k_max
    int k_max = 0;
    double tol = 0.0;
    std::uint64_t seed = 0;

    std::string verdict() const
    {
        return type ? "type " + std::to_string(*type) : "aperiodic-up-to-" + std::to_string(k_max);
    }
};

/// theta_0, ..., theta_{k_max}; the type is the smallest k with
/// TV(theta_j, theta_{j+1}) <= tol for all k <= j < k_max.
inline ClassifierReport classify_periodic_type(const ZSampler& s, int k_max, int L, std::uint64_t n_samples, double tol,
                                               std::uint64_t seed, int workers = 1)
{
    if (k_max < 1 || k_max > s.M())
        throw DomainError("k_max must lie in [1, M]");
    ClassifierReport rep;
    rep.k_max = k_max;
    rep.tol = tol;
    rep.seed = seed;
    std::vector<EmpiricalMeasure> theta;
    for (int k = 0; k <= k_max; ++k) {
        auto pr = project_theta(s, k, 0, CylinderSpec{L, 0, 0}, n_samples, derive_seed(seed, static_cast<std::uint64_t>(k)), workers);
        if (pr.accepted < n_samples)
            throw DomainError("insufficient samples after conditioning");
        rep.acceptance.push_back(pr.acceptance());
        theta.push_back(std::move(pr.table));
    }
    for (int j = 0; j < k_max; ++j)
        rep.tv_ladder.push_back(total_variation(theta[static_cast<std::size_t>(j)], theta[static_cast<std::size_t>(j) + 1]));
    for (int k = 0; k < k_max; ++k) {
        bool stable = true;
        for (int j = k; j < k_max; ++j)
            stable = stable && rep.tv_ladder[static_cast<std::size_t>(j)] <= tol;
        if (stable) {
            rep.type = k;
            break;
        }
    }
    return rep;
}

struct DichotomyEntry {
    std::uint64_t r1 = 0;
    std::uint64_t r2 = 0;
    double tv = 0.0;
    bool coincide = false;
};

/// Pairwise TV between the projections P_{r,k}, r < 2^k, each classified as
/// "coincide" (TV <= tol) or "separated". For an ergodic measure the
/// values cluster at these two ends.
inline std::vector<DichotomyEntry> dichotomy_report(const ZSampler& s, int k, int L, std::uint64_t n_samples, double tol,
                                                    std::uint64_t seed, int workers = 1)
{
    std::vector<EmpiricalMeasure> P;
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << k); ++r)
        P.push_back(project_theta(s, k, r, CylinderSpec{L, 0, 0}, n_samples, derive_seed(seed, r), workers).table);
    std::vector<DichotomyEntry> out;
    for (std::uint64_t a = 0; a < P.size(); ++a)
        for (std::uint64_t b = a + 1; b < P.size(); ++b) {
            const double tv = total_variation(P[a], P[b]);
            out.push_back(DichotomyEntry{a, b, tv, tv <= tol});
        }
    return out;
}

} // namespace opdyn
