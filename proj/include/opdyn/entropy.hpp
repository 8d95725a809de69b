#pragma once

// epsilon-entropy estimators and scaling curves.
//
// Three estimators share the convention that a cell has diameter < eps:
//   * greedy_cover_entropy: greedy covering of an i.i.d. sample by balls of
//     radius < eps/2 until the uncovered fraction drops below eps. It can
//     never report more than log2(sample size) bits.
//   * exact_cover_entropy: minimum number of cliques (diameter < eps)
//     covering mass > 1 - eps of a small weighted point set.
//   * ball_mass_bits: -log2 mu{y : d(x0, y) < eps/2} estimated by adaptive
//     multilevel splitting over a latent-variable model of mu. Its median
//     over centers measures entropy well beyond the sample size.

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "opdyn/errors.hpp"
#include "opdyn/measures.hpp"
#include "opdyn/rng.hpp"

namespace opdyn {

// ---------------------------------------------------------------------------
// Greedy covering

struct CoverResult {
    double bits = 0.0;
    std::size_t balls = 0;
    std::size_t points = 0;
    /// True when the cover used one ball per sample point, i.e. the estimate
    /// is bounded by the sample size rather than by the space.
    bool saturated = false;
};

/// Greedy cover of points 0..n-1 given a symmetric distance callback.
inline CoverResult greedy_cover(std::size_t n, const std::function<double(std::size_t, std::size_t)>& dist, double eps)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("eps must lie in (0, 1)");
    if (n == 0)
        throw DomainError("greedy cover of an empty sample");
    const std::size_t words = (n + 63) / 64;
    std::vector<std::uint64_t> ball(n * words, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ball[i * words + i / 64] |= std::uint64_t{1} << (i % 64);
        for (std::size_t j = i + 1; j < n; ++j)
            if (dist(i, j) < eps / 2) {
                ball[i * words + j / 64] |= std::uint64_t{1} << (j % 64);
                ball[j * words + i / 64] |= std::uint64_t{1} << (i % 64);
            }
    }
    std::vector<std::uint64_t> uncovered(words, ~std::uint64_t{0});
    if (n % 64)
        uncovered.back() = (std::uint64_t{1} << (n % 64)) - 1;
    auto gain = [&](std::size_t c) {
        std::size_t g = 0;
        for (std::size_t w = 0; w < words; ++w)
            g += static_cast<std::size_t>(std::popcount(ball[c * words + w] & uncovered[w]));
        return g;
    };
    // lazy greedy: cached gains only decrease
    std::vector<std::size_t> cached(n);
    for (std::size_t i = 0; i < n; ++i)
        cached[i] = gain(i);
    std::size_t left = n;
    CoverResult res;
    res.points = n;
    while (static_cast<double>(left) >= eps * static_cast<double>(n)) {
        std::size_t best = n;
        for (;;) {
            best = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (cached[i] > cached[best])
                    best = i;
            const std::size_t fresh = gain(best);
            if (fresh == cached[best])
                break;
            cached[best] = fresh;
        }
        for (std::size_t w = 0; w < words; ++w)
            uncovered[w] &= ~ball[best * words + w];
        left -= cached[best];
        cached[best] = 0;
        ++res.balls;
    }
    res.bits = std::log2(static_cast<double>(res.balls));
    res.saturated = res.balls + static_cast<std::size_t>(eps * static_cast<double>(n)) >= n;
    return res;
}

/// Covering-number estimate from n_samples i.i.d. draws; draw i uses
/// derive_seed(seed, i).
template <class P, class Draw>
CoverResult epsilon_entropy(Draw&& draw, const std::function<double(const P&, const P&)>& rho, double eps,
                            std::size_t n_samples, std::uint64_t seed)
{
    std::vector<P> pts;
    pts.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        Rng rng = make_rng(seed, i);
        pts.push_back(draw(rng));
    }
    return greedy_cover(n_samples, [&](std::size_t a, std::size_t b) { return rho(pts[a], pts[b]); }, eps);
}

// ---------------------------------------------------------------------------
// Exact covering of small weighted sets

namespace detail {

inline void bron_kerbosch(std::uint64_t R, std::uint64_t P, std::uint64_t X, const std::vector<std::uint64_t>& adj,
                          std::vector<std::uint64_t>& out)
{
    if (P == 0 && X == 0) {
        out.push_back(R);
        return;
    }
    const int pivot = std::countr_zero(P | X);
    std::uint64_t cand = P & ~adj[static_cast<std::size_t>(pivot)];
    while (cand) {
        const int v = std::countr_zero(cand);
        const std::uint64_t bit = std::uint64_t{1} << v;
        bron_kerbosch(R | bit, P & adj[static_cast<std::size_t>(v)], X & adj[static_cast<std::size_t>(v)], adj, out);
        P &= ~bit;
        X |= bit;
        cand &= ~bit;
    }
}

} // namespace detail

struct ExactCoverResult {
    double bits = 0.0;
    std::size_t cells = 0;
    std::vector<std::uint64_t> chosen;   // member masks of the chosen cliques
};

/// Minimum k such that k sets of diameter < eps cover mass > 1 - eps.
/// Weights need not be normalized. At most 64 points.
inline ExactCoverResult exact_cover_entropy(const std::vector<double>& weight,
                                            const std::function<double(std::size_t, std::size_t)>& dist, double eps)
{
    const std::size_t n = weight.size();
    if (n == 0 || n > 64)
        throw LimitError("exact cover supports 1..64 points");
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("eps must lie in (0, 1)");
    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    std::vector<std::uint64_t> adj(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && dist(i, j) < eps)
                adj[i] |= std::uint64_t{1} << j;
    std::vector<std::uint64_t> cliques;
    const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    detail::bron_kerbosch(0, all, 0, adj, cliques);

    auto mass = [&](std::uint64_t m) {
        double s = 0;
        while (m) {
            s += weight[static_cast<std::size_t>(std::countr_zero(m))];
            m &= m - 1;
        }
        return s;
    };
    std::vector<double> cmass(cliques.size());
    for (std::size_t i = 0; i < cliques.size(); ++i)
        cmass[i] = mass(cliques[i]);
    std::vector<std::size_t> order(cliques.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cmass[a] > cmass[b]; });

    const double need = (1.0 - eps) * total;
    std::vector<std::uint64_t> pick;
    std::function<bool(std::size_t, std::size_t, std::uint64_t)> search = [&](std::size_t k, std::size_t from,
                                                                               std::uint64_t covered) -> bool {
        const double have = mass(covered);
        if (have > need * (1 + 1e-12) || (have > need && have - need > 1e-12 * total))
            return true;
        if (k == 0)
            return false;
        // bound: k best remaining cliques cannot reach the target
        double bound = have;
        std::size_t taken = 0;
        for (std::size_t i = from; i < order.size() && taken < k; ++i, ++taken)
            bound += cmass[order[i]];
        if (bound <= need)
            return false;
        for (std::size_t i = from; i < order.size(); ++i) {
            const std::uint64_t c = cliques[order[i]];
            if ((c & ~covered) == 0)
                continue;
            pick.push_back(c);
            if (search(k - 1, i + 1, covered | c))
                return true;
            pick.pop_back();
        }
        return false;
    };
    for (std::size_t k = 1; k <= cliques.size(); ++k) {
        pick.clear();
        if (search(k, 0, 0)) {
            ExactCoverResult r;
            r.cells = k;
            r.bits = std::log2(static_cast<double>(k));
            r.chosen = pick;
            return r;
        }
    }
    throw DomainError("exact cover failed to reach the required mass");
}

// ---------------------------------------------------------------------------
// Ball mass by adaptive multilevel splitting

/// A probability measure given as the law of a latent state, with a walker
/// that keeps its distance to a fixed center up to date under symmetric
/// single-coordinate proposals.
template <class M>
concept LatentModel = requires(const M& m, const typename M::Latent& a, Rng& rng) {
    typename M::Latent;
    typename M::Walker;
    { m.draw(rng) } -> std::same_as<typename M::Latent>;
    { m.distance(a, a) } -> std::convertible_to<double>;
    { m.walker(a, a) } -> std::same_as<typename M::Walker>;
} && requires(typename M::Walker& w, Rng& rng, double level) {
    { w.distance() } -> std::convertible_to<double>;
    { w.step(rng, level) } -> std::same_as<bool>;
};

struct SplittingParams {
    std::size_t particles = 200;
    /// Constrained Metropolis proposals per particle per stage.
    std::size_t moves = 64;
    double p0 = 0.5;
    std::size_t max_stages = 4000;
};

struct BallMass {
    double bits = 0.0;
    std::size_t stages = 0;
};

/// -log2 mu{y : d(center, y) < radius}.
template <LatentModel M>
BallMass ball_mass_bits(const M& model, const typename M::Latent& center, double radius, const SplittingParams& prm,
                        Rng& rng)
{
    using Walker = typename M::Walker;
    const std::size_t N = prm.particles;
    if (N < 2)
        throw DomainError("splitting needs at least two particles");
    std::vector<Walker> ps;
    ps.reserve(N);
    for (std::size_t i = 0; i < N; ++i)
        ps.push_back(model.walker(center, model.draw(rng)));

    BallMass out;
    double level = INFINITY;
    std::size_t stuck = 0;
    while (out.stages < prm.max_stages) {
        std::vector<double> d(N);
        for (std::size_t i = 0; i < N; ++i)
            d[i] = ps[i].distance();
        std::vector<double> sorted = d;
        std::sort(sorted.begin(), sorted.end());
        auto frac_below = [&](double t) {
            return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin()) /
                   static_cast<double>(N);
        };
        const double final_frac = frac_below(radius);
        double tau;
        double q;
        if (final_frac >= prm.p0) {
            tau = radius;
            q = final_frac;
        } else {
            // candidate thresholds: the target radius and every observed value above it
            tau = NAN;
            q = 0.0;
            double fallback = NAN;
            double fallback_q = 0.0;
            std::vector<double> cands{radius};
            for (double v : sorted)
                if (v > radius && (cands.empty() || v != cands.back()))
                    cands.push_back(v);
            for (double c : cands) {
                const double f = frac_below(c);
                if (f <= 0.0)
                    continue;
                if (f <= prm.p0) {
                    tau = c;
                    q = f;
                } else if (std::isnan(fallback) && f < 1.0) {
                    fallback = c;
                    fallback_q = f;
                }
            }
            if (std::isnan(tau) && !std::isnan(fallback)) {
                tau = fallback;
                q = fallback_q;
            }
        }
        if (std::isnan(tau) || q <= 0.0) {
            // every particle sits at one distance above the target: mix longer
            if (++stuck > 50)
                throw DomainError("splitting stalled: no particle below the current level");
            for (auto& p : ps)
                for (std::size_t m = 0; m < prm.moves; ++m)
                    p.step(rng, level);
            continue;
        }
        stuck = 0;
        out.bits -= std::log2(q);
        ++out.stages;
        if (tau == radius)
            return out;
        level = tau;
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < N; ++i)
            if (d[i] < tau)
                keep.push_back(i);
        std::vector<Walker> next;
        next.reserve(N);
        for (std::size_t i = 0; i < N; ++i)
            next.push_back(ps[keep[i < keep.size() ? i : uniform_below(rng, keep.size())]]);
        ps = std::move(next);
        for (auto& p : ps)
            for (std::size_t m = 0; m < prm.moves; ++m)
                p.step(rng, level);
    }
    throw DomainError("splitting exceeded the stage limit");
}

inline double median(std::vector<double> v)
{
    if (v.empty())
        throw DomainError("median of an empty set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct BallEntropy {
    double bits = 0.0;                  // median over centers
    std::vector<double> per_center;
};

/// Median over `centers` independent centers of the ball-mass bits at
/// radius eps/2. Center c uses the stream derive_seed(seed, c).
template <LatentModel M>
BallEntropy ball_entropy(const M& model, double eps, std::size_t centers, const SplittingParams& prm, std::uint64_t seed,
                         int workers = 1)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("eps must lie in (0, 1)");
    if (centers == 0)
        throw DomainError("need at least one center");
    BallEntropy out;
    out.per_center.assign(centers, 0.0);
    parallel_for(0, centers, workers, [&](std::uint64_t c) {
        Rng rng = make_rng(seed, c);
        const auto center = model.draw(rng);
        out.per_center[c] = ball_mass_bits(model, center, eps / 2, prm, rng).bits;
    });
    out.bits = median(out.per_center);
    return out;
}

/// Generic walker for models exposing flip(latent, i), flips(latent) and
/// admissible(latent): full distance recomputation after each proposal.
template <class M>
class FlipWalker {
public:
    FlipWalker(const M* model, typename M::Latent center, typename M::Latent y)
        : model_(model), center_(std::make_shared<const typename M::Latent>(std::move(center))), y_(std::move(y))
    {
        d_ = model_->distance(*center_, y_);
    }
    double distance() const { return d_; }
    const typename M::Latent& latent() const { return y_; }
    bool step(Rng& rng, double level)
    {
        const std::size_t i = uniform_below(rng, model_->flips(y_));
        model_->flip(y_, i);
        if (model_->admissible(y_)) {
            const double nd = model_->distance(*center_, y_);
            if (nd < level) {
                d_ = nd;
                return true;
            }
        }
        model_->flip(y_, i);
        return false;
    }

private:
    const M* model_;
    std::shared_ptr<const typename M::Latent> center_;
    typename M::Latent y_;
    double d_ = 0.0;
};

// ---------------------------------------------------------------------------
// Latent models for the D- and Z-actions of omega^sigma

/// omega^sigma restricted to D_n, with the D_n-averaged cut on w|_{D_j}:
/// d(x, y) = 2^{-n} |{g ∈ D_n : w_x|_{g+D_j} != w_y|_{g+D_j}}|. The latent
/// state is the configuration on D_n; a move flips one coset bit, i.e. the
/// whole coset of D^sigma ∩ D_n.
class DActionModel {
public:
    using Latent = Config;
    using Walker = FlipWalker<DActionModel>;

    DActionModel(SigmaSeq sigma, int n, int cut_level = 0) : sampler_(std::move(sigma), n, 0), n_(n), j_(cut_level)
    {
        if (cut_level < 0 || cut_level > n)
            throw DomainError("cut level must lie in [0, n]");
        const std::uint32_t free = sampler_.sigma().free_mask(n);
        cosets_.assign(std::size_t{1} << sampler_.free_bits(), {});
        for (std::uint64_t h = 0; h < (std::uint64_t{1} << n); ++h)
            cosets_[extract_bits(h, free)].push_back(h);
    }

    int n() const noexcept { return n_; }
    Config draw(Rng& rng) const { return sampler_.draw_config(rng); }
    double distance(const Config& a, const Config& b) const
    {
        if (j_ == 0)
            return static_cast<double>(a.hamming(b, n_)) / static_cast<double>(a.size());
        // a block g + D_j differs iff some element differs
        std::uint64_t differ = 0;
        for (std::uint64_t h = 0; h < a.size(); h += std::uint64_t{1} << j_) {
            bool any = false;
            for (std::uint64_t u = 0; u < (std::uint64_t{1} << j_) && !any; ++u)
                any = a[h + u] != b[h + u];
            differ += any;
        }
        return static_cast<double>(differ) / static_cast<double>(a.size() >> j_);
    }
    std::size_t flips(const Config&) const { return cosets_.size(); }
    void flip(Config& w, std::size_t i) const
    {
        for (auto h : cosets_[i])
            w.flip(h);
    }
    bool admissible(const Config&) const { return true; }
    Walker walker(const Config& center, Config y) const { return Walker(this, center, std::move(y)); }

    /// Lift to a coded point on D_n with zero digits (digits do not enter d).
    CodedPoint point(const Config& w) const { return CodedPoint{w, DigitSeq(static_cast<std::size_t>(n_))}; }

private:
    OmegaSigmaSampler sampler_;
    int n_;
    int j_;
    std::vector<std::vector<std::uint64_t>> cosets_;
};

/// Lambda ∘ omega^sigma at resolution N = M = r, averaged cut on the window
/// coordinate 0 over t steps of S × O: the normalized Hamming distance
/// between the windows w(lambda_alpha(k)), 0 <= k < t. The latent state is
/// (coset bits, alpha) conditioned on alpha + t <= 2^r, so that the window
/// never needs digits beyond r. The default r = log2(t) + 6 excludes a
/// fraction 2^-6 of alphas.
class ZActionModel {
public:
    struct Latent {
        std::vector<std::uint8_t> coset_bits;
        std::uint64_t alpha = 0;
        std::vector<std::uint8_t> window;
        std::vector<std::uint32_t> window_coset;
    };

    /// Metropolis walker: with probability 1/2 flip the coset read at a
    /// uniform window position, otherwise flip a uniform digit of alpha.
    /// Both proposals are symmetric.
    class Walker {
    public:
        Walker(const ZActionModel* m, const Latent& center, Latent y)
            : m_(m), center_(std::make_shared<const std::vector<std::uint8_t>>(center.window)), y_(std::move(y))
        {
            recount();
        }
        double distance() const { return static_cast<double>(diff_) / m_->t_; }
        const Latent& latent() const { return y_; }
        bool step(Rng& rng, double level)
        {
            const auto t = static_cast<std::size_t>(m_->t_);
            if (coin(rng)) {
                const std::uint32_t c = y_.window_coset[uniform_below(rng, t)];
                int nd = diff_;
                for (std::size_t k = 0; k < t; ++k)
                    if (y_.window_coset[k] == c)
                        nd += y_.window[k] == (*center_)[k] ? 1 : -1;
                if (!(static_cast<double>(nd) / m_->t_ < level))
                    return false;
                y_.coset_bits[c] ^= 1u;
                for (std::size_t k = 0; k < t; ++k)
                    if (y_.window_coset[k] == c)
                        y_.window[k] ^= 1u;
                diff_ = nd;
                return true;
            }
            const std::uint64_t bit = std::uint64_t{1} << uniform_below(rng, static_cast<std::uint64_t>(m_->res_));
            Latent z = y_;
            z.alpha ^= bit;
            if (!m_->admissible(z))
                return false;
            m_->refresh(z);
            int nd = 0;
            for (std::size_t k = 0; k < t; ++k)
                nd += z.window[k] != (*center_)[k];
            if (!(static_cast<double>(nd) / m_->t_ < level))
                return false;
            y_ = std::move(z);
            diff_ = nd;
            return true;
        }

    private:
        void recount()
        {
            diff_ = 0;
            for (std::size_t k = 0; k < y_.window.size(); ++k)
                diff_ += y_.window[k] != (*center_)[k];
        }
        const ZActionModel* m_;
        std::shared_ptr<const std::vector<std::uint8_t>> center_;
        Latent y_;
        int diff_ = 0;
    };

    ZActionModel(SigmaSeq sigma, int t, int resolution = 0) : sigma_(std::move(sigma)), t_(t), res_(resolution)
    {
        if (t < 1)
            throw DomainError("Z-action model needs t >= 1");
        if (res_ == 0)
            res_ = std::bit_width(static_cast<unsigned>(t - 1)) + 6;
        if (res_ > 30 || (std::int64_t{1} << res_) <= t)
            throw DomainError("Z-action model needs t < 2^resolution <= 2^30");
        free_ = sigma_.free_mask(res_);
        ncos_ = std::size_t{1} << std::popcount(free_);
    }

    int t() const noexcept { return t_; }
    int resolution() const noexcept { return res_; }

    bool admissible(const Latent& y) const { return y.alpha + static_cast<std::uint64_t>(t_) <= (std::uint64_t{1} << res_); }

    Latent draw(Rng& rng) const
    {
        Latent y;
        y.coset_bits.resize(ncos_);
        for (auto& b : y.coset_bits)
            b = coin(rng) ? 1 : 0;
        do
            y.alpha = rng() & ((std::uint64_t{1} << res_) - 1);
        while (!admissible(y));
        refresh(y);
        return y;
    }

    double distance(const Latent& a, const Latent& b) const
    {
        int d = 0;
        for (int k = 0; k < t_; ++k)
            d += a.window[static_cast<std::size_t>(k)] != b.window[static_cast<std::size_t>(k)];
        return static_cast<double>(d) / t_;
    }

    Walker walker(const Latent& center, Latent y) const { return Walker(this, center, std::move(y)); }

    /// Value of the configuration at a group element.
    std::uint8_t value(const Latent& y, std::uint64_t h) const { return y.coset_bits[extract_bits(h, free_)]; }

    /// The full coded point (requires resolution <= Config::kMaxDepth).
    CodedPoint point(const Latent& y) const
    {
        Config w(res_);
        for (std::uint64_t h = 0; h < w.size(); ++h)
            w.set(h, value(y, h));
        return CodedPoint{std::move(w), DigitSeq::from_value(y.alpha, static_cast<std::size_t>(res_))};
    }

private:
    void refresh(Latent& y) const
    {
        y.window.resize(static_cast<std::size_t>(t_));
        y.window_coset.resize(static_cast<std::size_t>(t_));
        for (int k = 0; k < t_; ++k) {
            const std::uint64_t h = (static_cast<std::uint64_t>(k) + y.alpha) ^ y.alpha;
            const auto c = static_cast<std::uint32_t>(extract_bits(h, free_));
            y.window_coset[static_cast<std::size_t>(k)] = c;
            y.window[static_cast<std::size_t>(k)] = y.coset_bits[c];
        }
    }

    SigmaSeq sigma_;
    int t_;
    int res_;
    std::uint32_t free_ = 0;
    std::size_t ncos_ = 0;
};

/// Exact ball bits for the uniform measure on {0,1}^d with normalized
/// Hamming distance: -log2(|{i < eps d / 2}| ball volume / 2^d).
inline double cube_ball_bits(int d, double eps)
{
    double log_vol = -INFINITY;
    for (int i = 0; i <= d; ++i) {
        if (!(static_cast<double>(i) < eps * d / 2))
            break;
        const double lc = (std::lgamma(d + 1.0) - std::lgamma(i + 1.0) - std::lgamma(d - i + 1.0)) / std::log(2.0);
        log_vol = std::max(log_vol, lc) + std::log2(1.0 + std::exp2(std::min(log_vol, lc) - std::max(log_vol, lc)));
    }
    return d - log_vol;
}

// ---------------------------------------------------------------------------
// Curves and asymptotic comparison

struct CurvePoint {
    std::int64_t scale = 0;
    double eps = 0.0;
    double bits = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct EntropyCurve {
    std::vector<CurvePoint> points;

    void write_csv(std::ostream& os) const
    {
        os << "scale,eps,bits,samples,seed\n";
        for (const auto& p : points)
            os << p.scale << ',' << p.eps << ',' << p.bits << ',' << p.samples << ',' << p.seed << '\n';
    }
};

struct CompareReport {
    std::vector<double> gaps;   // log2 H - log2 target
    double spread = 0.0;
    double drift = 0.0;         // |last - first| over the top half when monotone, else 0
    bool pass = false;
    std::string reason;
};

/// H ≍ target on the tested range: gap spread <= max_spread bits and no
/// monotone drift above max_drift bits across the top half of the scales.
inline CompareReport asymp_compare(const std::vector<double>& H, const std::vector<double>& target, double max_spread = 2.0,
                                   double max_drift = 1.0)
{
    if (H.size() != target.size())
        throw DomainError("curve and target lengths differ");
    if (H.size() < 4)
        throw DomainError("asymptotic comparison needs at least 4 scales");
    CompareReport r;
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (!(H[i] > 0.0) || !(target[i] > 0.0)) {
            r.reason = "non-positive value at scale index " + std::to_string(i);
            r.gaps.push_back(NAN);
            continue;
        }
        r.gaps.push_back(std::log2(H[i]) - std::log2(target[i]));
    }
    if (!r.reason.empty())
        return r;
    const auto [mn, mx] = std::minmax_element(r.gaps.begin(), r.gaps.end());
    r.spread = *mx - *mn;
    const std::size_t start = r.gaps.size() / 2;
    bool up = true;
    bool down = true;
    for (std::size_t i = start + 1; i < r.gaps.size(); ++i) {
        up = up && r.gaps[i] >= r.gaps[i - 1];
        down = down && r.gaps[i] <= r.gaps[i - 1];
    }
    if (up || down)
        r.drift = std::abs(r.gaps.back() - r.gaps[start]);
    if (r.spread > max_spread)
        r.reason = "gap spread above " + std::to_string(max_spread) + " bits";
    else if (r.drift > max_drift)
        r.reason = "monotone drift above " + std::to_string(max_drift) + " bits";
    r.pass = r.reason.empty();
    return r;
}

/// 2^{sum_{i<n} sigma_i}
inline double sigma_target(const SigmaSeq& sigma, int n) { return std::exp2(sigma.ones_below(n)); }

struct ScalingParams {
    double eps = 0.25;
    std::size_t centers = 5;
    SplittingParams splitting{};
    std::uint64_t seed = 1;
    int workers = 1;
};

/// D-action curve: ball entropy of the D_n-averaged cut metric for each level n.
inline EntropyCurve scaling_curve_d(const SigmaSeq& sigma, const std::vector<int>& levels, const ScalingParams& prm,
                                    int cut_level = 0)
{
    EntropyCurve c;
    for (int n : levels) {
        const DActionModel model(sigma, n, cut_level);
        const std::uint64_t seed = derive_seed(prm.seed, static_cast<std::uint64_t>(n));
        const auto e = ball_entropy(model, prm.eps, prm.centers, prm.splitting, seed, prm.workers);
        c.points.push_back(CurvePoint{n, prm.eps, e.bits, prm.splitting.particles, seed});
    }
    return c;
}

/// Z-action curve at dyadic times t = 2^m.
inline EntropyCurve scaling_curve_z(const SigmaSeq& sigma, const std::vector<int>& log2_times, const ScalingParams& prm,
                                    int resolution = 0)
{
    EntropyCurve c;
    for (int m : log2_times) {
        if (resolution > 0 && m > resolution - 1)
            throw DomainError("dyadic time beyond the odometer resolution");
        const ZActionModel model(sigma, 1 << m, resolution);
        const std::uint64_t seed = derive_seed(prm.seed, static_cast<std::uint64_t>(m));
        const auto e = ball_entropy(model, prm.eps, prm.centers, prm.splitting, seed, prm.workers);
        c.points.push_back(CurvePoint{std::int64_t{1} << m, prm.eps, e.bits, prm.splitting.particles, seed});
    }
    return c;
}

} // namespace opdyn
