#pragma once

// Dyadic filtration: orbit trees under D_n, the Kantorovich iteration K_n by
// a child-swap dynamic program, the orbit distance dist_m on Q^{D_m}, orbit
// counting, and the filtration scaling curve.
//
// Leaf layout: a tree of depth n has 2^n leaves indexed by masks g ∈ D_n;
// siblings at height j+1 differ in bit j, so the root splits on bit n-1 and
// every dyadic block [a 2^j, (a+1) 2^j) is a coset of D_j.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "opdyn/coding.hpp"
#include "opdyn/entropy.hpp"
#include "opdyn/errors.hpp"

namespace opdyn {

inline constexpr int kMaxTreeDepth = 12;
inline constexpr int kBruteTreeDepth = 4;

namespace detail {

inline int tree_depth_of(std::size_t leaves)
{
    if (leaves == 0 || !std::has_single_bit(leaves))
        throw DomainError("leaf count must be a power of two");
    return std::countr_zero(leaves);
}

} // namespace detail

/// Unnormalized Kantorovich value: min over tree automorphisms S of
/// sum_j cost[j][S j], where cost[a][b] compares leaf a of the first tree
/// with leaf b of the second. Exact for integer T.
template <class T>
T kantorovich_sum(const std::vector<std::vector<T>>& cost)
{
    const int n = detail::tree_depth_of(cost.size());
    if (n > kMaxTreeDepth)
        throw LimitError("tree depth above the supported range");
    std::size_t blocks = cost.size();
    std::vector<T> cur(blocks * blocks);
    for (std::size_t a = 0; a < blocks; ++a) {
        if (cost[a].size() != blocks)
            throw DomainError("cost table is not square");
        for (std::size_t b = 0; b < blocks; ++b)
            cur[a * blocks + b] = cost[a][b];
    }
    while (blocks > 1) {
        const std::size_t nb = blocks / 2;
        std::vector<T> next(nb * nb);
        for (std::size_t A = 0; A < nb; ++A)
            for (std::size_t B = 0; B < nb; ++B) {
                auto at = [&](std::size_t a, std::size_t b) { return cur[a * blocks + b]; };
                const T keep = at(2 * A, 2 * B) + at(2 * A + 1, 2 * B + 1);
                const T swap = at(2 * A, 2 * B + 1) + at(2 * A + 1, 2 * B);
                next[A * nb + B] = std::min(keep, swap);
            }
        cur = std::move(next);
        blocks = nb;
    }
    return cur[0];
}

/// Leaf index S(g) for the automorphism with one swap flag per internal
/// node; the node above bit j is numbered (2^{n-1-j} - 1) + (g >> (j+1)).
inline std::uint64_t apply_automorphism(std::uint64_t flags, int n, std::uint64_t g)
{
    std::uint64_t out = 0;
    for (int j = 0; j < n; ++j) {
        const std::uint64_t node = ((std::uint64_t{1} << (n - 1 - j)) - 1) + (g >> (j + 1));
        const std::uint64_t bit = ((g >> j) ^ (flags >> node)) & 1u;
        out |= bit << j;
    }
    return out;
}

/// |T_n| = 2^{2^n - 1}
inline std::uint64_t automorphism_count(int n)
{
    if (n < 0 || n > kBruteTreeDepth + 1)
        throw LimitError("automorphism count only for small depths");
    return std::uint64_t{1} << ((std::uint64_t{1} << n) - 1);
}

/// Same value as kantorovich_sum by explicit minimization over T_n.
template <class T>
T kantorovich_sum_brute(const std::vector<std::vector<T>>& cost)
{
    const int n = detail::tree_depth_of(cost.size());
    if (n > kBruteTreeDepth)
        throw LimitError("brute-force Kantorovich is limited to depth 4");
    T best{};
    bool first = true;
    for (std::uint64_t f = 0; f < automorphism_count(n); ++f) {
        T s{};
        for (std::uint64_t j = 0; j < cost.size(); ++j)
            s += cost[j][apply_automorphism(f, n, j)];
        if (first || s < best)
            best = s;
        first = false;
    }
    return best;
}

template <class Leaf>
struct OrbitTree {
    std::vector<Leaf> leaves;
    int depth() const { return detail::tree_depth_of(leaves.size()); }
};

/// Orbit tree of x under D_n: leaf g holds diag(g) x.
inline OrbitTree<CodedPoint> orbit_tree(const CodedPoint& x, int n)
{
    require_in_subgroup(GroupElem{(1u << n) - 1u}, x.resolution(), "orbit_tree");
    OrbitTree<CodedPoint> t;
    for (std::uint32_t g = 0; g < (1u << n); ++g)
        t.leaves.push_back(diag(GroupElem{g}, x));
    return t;
}

/// K_n[rho](c1, c2) by the recursion K_{j+1} = ½ min(keep, swap).
template <class Leaf>
double kantorovich(const std::function<double(const Leaf&, const Leaf&)>& rho, const OrbitTree<Leaf>& c1,
                   const OrbitTree<Leaf>& c2)
{
    if (c1.leaves.size() != c2.leaves.size())
        throw DomainError("Kantorovich distance needs equal depths");
    const std::size_t N = c1.leaves.size();
    std::vector<std::vector<double>> cost(N, std::vector<double>(N));
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b)
            cost[a][b] = rho(c1.leaves[a], c2.leaves[b]);
    return kantorovich_sum(cost) / static_cast<double>(N);
}

/// Words over a finite alphabet {0, ..., q-1} on the leaves of a tree.
struct SymbolTree {
    std::vector<std::uint64_t> symbols;
    std::uint64_t alphabet = 2;

    int depth() const { return detail::tree_depth_of(symbols.size()); }
};

/// Number of mismatched leaves under the best automorphism.
inline std::int64_t dist_count(const SymbolTree& a, const SymbolTree& b)
{
    if (a.alphabet != b.alphabet)
        throw DomainError("symbol trees over different alphabets");
    if (a.symbols.size() != b.symbols.size())
        throw DomainError("symbol trees of different depths");
    const std::size_t N = a.symbols.size();
    std::vector<std::vector<std::int64_t>> cost(N, std::vector<std::int64_t>(N));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            cost[i][j] = a.symbols[i] != b.symbols[j];
    return kantorovich_sum(cost);
}

inline double dist_m(const SymbolTree& a, const SymbolTree& b)
{
    return static_cast<double>(dist_count(a, b)) / static_cast<double>(a.symbols.size());
}

/// Canonical labels of T_m-orbits: two words get the same id iff they lie
/// in one orbit. Ids are assigned level by level to sorted child pairs.
class OrbitCanon {
public:
    /// Returns (canonical id, orbit size) of the word.
    std::pair<std::uint64_t, std::uint64_t> classify(const std::vector<std::uint64_t>& word)
    {
        const int m = detail::tree_depth_of(word.size());
        if (static_cast<int>(ids_.size()) < m)
            ids_.resize(static_cast<std::size_t>(m));
        std::vector<std::uint64_t> id = word;
        std::vector<std::uint64_t> size(word.size(), 1);
        for (int j = 0; j < m; ++j) {
            std::vector<std::uint64_t> nid(id.size() / 2);
            std::vector<std::uint64_t> nsize(id.size() / 2);
            for (std::size_t i = 0; i < nid.size(); ++i) {
                const auto lo = std::min(id[2 * i], id[2 * i + 1]);
                const auto hi = std::max(id[2 * i], id[2 * i + 1]);
                auto& table = ids_[static_cast<std::size_t>(j)];
                auto [it, fresh] = table.try_emplace({lo, hi}, table.size());
                nid[i] = it->second;
                nsize[i] = lo == hi ? size[2 * i] * size[2 * i + 1] : 2 * size[2 * i] * size[2 * i + 1];
            }
            id = std::move(nid);
            size = std::move(nsize);
        }
        return {id[0], size[0]};
    }

private:
    std::vector<std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t>> ids_;
};

namespace detail {

inline std::uint64_t word_space_size(int m, std::uint64_t q, std::uint64_t limit)
{
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << m); ++i) {
        if (total > limit / q)
            throw LimitError("word space too large for exhaustive enumeration");
        total *= q;
    }
    return total;
}

inline std::vector<std::uint64_t> decode_word(std::uint64_t code, std::size_t len, std::uint64_t q)
{
    std::vector<std::uint64_t> w(len);
    for (std::size_t i = 0; i < len; ++i) {
        w[i] = code % q;
        code /= q;
    }
    return w;
}

} // namespace detail

/// Largest T_m-orbit in Q^{D_m}, by enumeration of all |Q|^{2^m} <= 2^20 words.
inline std::uint64_t max_orbit_size(int m, std::uint64_t q)
{
    if (m < 0 || q < 1)
        throw DomainError("max_orbit_size needs m >= 0 and a non-empty alphabet");
    const std::uint64_t total = detail::word_space_size(m, q, std::uint64_t{1} << 20);
    OrbitCanon canon;
    std::uint64_t best = 0;
    for (std::uint64_t c = 0; c < total; ++c)
        best = std::max(best, canon.classify(detail::decode_word(c, std::size_t{1} << m, q)).second);
    return best;
}

/// Number of T_m-orbits in Q^{D_m}, by enumeration.
inline std::uint64_t orbit_count(int m, std::uint64_t q)
{
    const std::uint64_t total = detail::word_space_size(m, q, std::uint64_t{1} << 20);
    OrbitCanon canon;
    std::vector<bool> seen;
    std::uint64_t count = 0;
    for (std::uint64_t c = 0; c < total; ++c) {
        const auto id = canon.classify(detail::decode_word(c, std::size_t{1} << m, q)).first;
        if (id >= seen.size())
            seen.resize(id + 1, false);
        if (!seen[id]) {
            seen[id] = true;
            ++count;
        }
    }
    return count;
}

// ---------------------------------------------------------------------------
// Orbit spaces of tree words and the filtration model

/// The representative of the D_n-orbit of x: the member whose first n
/// digits vanish.
inline CodedPoint phi_rep(const CodedPoint& x, int n)
{
    require_in_subgroup(GroupElem{(1u << n) - 1u}, x.resolution(), "phi_rep");
    return diag(prefix_elem(x.alpha, n), x);
}

/// Symbols w|_{g̃ + D_k} for g̃ = i 2^k, i < 2^{n-k}; bit u of symbol i is
/// w(i 2^k + u).
inline SymbolTree block_symbols(const Config& w, int n, int k)
{
    if (k < 0 || k > 5 || k > n || n > w.depth())
        throw DomainError("block symbols need 0 <= k <= min(5, n) and n within the configuration");
    SymbolTree t;
    t.alphabet = std::uint64_t{1} << (std::uint64_t{1} << k);
    const std::uint64_t width = std::uint64_t{1} << k;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << (n - k)); ++i) {
        std::uint64_t s = 0;
        for (std::uint64_t u = 0; u < width; ++u)
            s |= std::uint64_t{w[i * width + u]} << u;
        t.symbols.push_back(s);
    }
    return t;
}

/// K_n[rho_k] between the orbits of two coded points through the block
/// reduction: dist_{n-k} between the block symbols of the representatives.
inline double filtration_distance(const CodedPoint& x, const CodedPoint& y, int n, int k)
{
    if (k < 1 || k > n)
        throw DomainError("filtration distance needs 1 <= k <= n");
    return dist_m(block_symbols(phi_rep(x, n).w, n, k), block_symbols(phi_rep(y, n).w, n, k));
}

/// omega^sigma pushed to the orbit space of D_n with K_n[rho_k]: the latent
/// state is w on D_n (uniform on sigma-invariant configurations), and the
/// distance is dist_{n-k} between block-symbol trees. With k = 0 this is the
/// space (I^{D_m}, dist_m, uniform on W) with G_m generated by the g_i
/// having sigma_i = 0.
class FiltrationModel {
public:
    using Latent = Config;

    class Walker;

    FiltrationModel(SigmaSeq sigma, int n, int k) : sampler_(std::move(sigma), n, 0), n_(n), k_(k)
    {
        if (k < 0 || k > 5 || k > n || n - k > kMaxTreeDepth)
            throw DomainError("filtration model needs 0 <= k <= min(5, n) and n - k <= 12");
        const std::uint32_t free = sampler_.sigma().free_mask(n);
        cosets_.assign(std::size_t{1} << sampler_.free_bits(), {});
        for (std::uint64_t h = 0; h < (std::uint64_t{1} << n); ++h)
            cosets_[extract_bits(h, free)].push_back(h);
    }

    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }
    int m() const noexcept { return n_ - k_; }

    Config draw(Rng& rng) const { return sampler_.draw_config(rng); }
    std::uint64_t symbol(const Config& w, std::uint64_t i) const
    {
        const std::uint64_t width = std::uint64_t{1} << k_;
        const std::uint64_t first = i * width;
        const std::uint64_t word = w.words()[first / 64] >> (first % 64);
        return word & ((std::uint64_t{1} << width) - 1);
    }
    double distance(const Config& a, const Config& b) const
    {
        return dist_m(block_symbols(a, n_, k_), block_symbols(b, n_, k_));
    }
    std::size_t flips() const { return cosets_.size(); }
    const std::vector<std::uint64_t>& coset(std::size_t i) const { return cosets_[i]; }
    Walker walker(const Config& center, Config y) const;

private:
    OmegaSigmaSampler sampler_;
    int n_;
    int k_;
    std::vector<std::vector<std::uint64_t>> cosets_;
};

/// Keeps the child-swap tables K_j(A, B), A a block of the center and B a
/// block of the walker, so that flipping one coset updates only the columns
/// above the changed leaves.
class FiltrationModel::Walker {
public:
    Walker(const FiltrationModel* model, const Config& center, Config y) : model_(model), y_(std::move(y))
    {
        const int m = model_->m();
        const std::uint64_t L = std::uint64_t{1} << m;
        auto c = std::make_shared<std::vector<std::uint64_t>>(L);
        for (std::uint64_t i = 0; i < L; ++i)
            (*c)[i] = model_->symbol(center, i);
        center_ = std::move(c);
        sym_.resize(L);
        for (std::uint64_t i = 0; i < L; ++i)
            sym_[i] = model_->symbol(y_, i);
        tables_.resize(static_cast<std::size_t>(m) + 1);
        for (int j = 1; j <= m; ++j) {
            const std::uint64_t b = L >> j;
            tables_[static_cast<std::size_t>(j)].assign(b * b, 0);
            for (std::uint64_t A = 0; A < b; ++A)
                for (std::uint64_t B = 0; B < b; ++B)
                    recompute(j, A, B);
        }
    }

    double distance() const { return static_cast<double>(top()) / static_cast<double>(std::uint64_t{1} << model_->m()); }
    const Config& latent() const { return y_; }

    bool step(Rng& rng, double level)
    {
        const std::size_t c = uniform_below(rng, model_->flips());
        apply(c);
        if (distance() < level)
            return true;
        apply(c);
        return false;
    }

private:
    std::uint32_t leaf(std::uint64_t A, std::uint64_t B) const { return (*center_)[A] != sym_[B]; }
    std::uint32_t at(int j, std::uint64_t A, std::uint64_t B) const
    {
        if (j == 0)
            return leaf(A, B);
        const std::uint64_t b = (std::uint64_t{1} << model_->m()) >> j;
        return tables_[static_cast<std::size_t>(j)][A * b + B];
    }
    void recompute(int j, std::uint64_t A, std::uint64_t B)
    {
        const std::uint32_t keep = at(j - 1, 2 * A, 2 * B) + at(j - 1, 2 * A + 1, 2 * B + 1);
        const std::uint32_t swap = at(j - 1, 2 * A, 2 * B + 1) + at(j - 1, 2 * A + 1, 2 * B);
        const std::uint64_t b = (std::uint64_t{1} << model_->m()) >> j;
        tables_[static_cast<std::size_t>(j)][A * b + B] = std::min(keep, swap);
    }
    std::uint32_t top() const { return model_->m() == 0 ? leaf(0, 0) : tables_.back()[0]; }

    void apply(std::size_t c)
    {
        std::vector<std::uint64_t> changed;
        for (auto h : model_->coset(c)) {
            y_.flip(h);
            changed.push_back(h >> model_->k());
        }
        std::sort(changed.begin(), changed.end());
        changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
        for (auto i : changed)
            sym_[i] = model_->symbol(y_, i);
        const int m = model_->m();
        for (int j = 1; j <= m; ++j) {
            for (auto& B : changed)
                B >>= 1;
            changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
            const std::uint64_t b = (std::uint64_t{1} << m) >> j;
            for (auto B : changed)
                for (std::uint64_t A = 0; A < b; ++A)
                    recompute(j, A, B);
        }
    }

    const FiltrationModel* model_;
    std::shared_ptr<const std::vector<std::uint64_t>> center_;
    Config y_;
    std::vector<std::uint64_t> sym_;
    std::vector<std::vector<std::uint32_t>> tables_;
};

inline FiltrationModel::Walker FiltrationModel::walker(const Config& center, Config y) const
{
    return Walker(this, center, std::move(y));
}

/// sigma with zeros at the generators of G_m (given as a mask) and ones
/// elsewhere below m.
inline SigmaSeq lemma17_sigma(int m, std::uint32_t g_mask)
{
    std::string s;
    for (int i = 0; i < m; ++i)
        s += (g_mask >> i) & 1u ? '0' : '1';
    return SigmaSeq::parse(s);
}

struct Lemma17Result {
    double bits = 0.0;
    bool exact = false;
    std::size_t orbits = 0;    // orbit classes meeting W (exact mode)
};

/// eps-entropy of (Q^{D_m}, dist_m, uniform on W) with G_m generated by the
/// first r generators. Exact covering over orbit classes when W has at most
/// 2^12 points and at most 64 orbit classes; otherwise the splitting
/// estimator (|Q| = 2 only).
inline Lemma17Result lemma17_entropy(int m, int r, std::uint64_t q, double eps, std::size_t centers = 5,
                                     std::uint64_t seed = 1)
{
    if (r < 0 || r > m || q < 1)
        throw DomainError("lemma17_entropy needs 0 <= r <= m and a non-empty alphabet");
    const std::uint32_t g_mask = (1u << r) - 1u;
    const int free_dim = m - r;
    bool small = true;
    std::uint64_t total = 0;
    try {
        total = detail::word_space_size(free_dim, q, std::uint64_t{1} << 12);
    } catch (const LimitError&) {
        small = false;
    }
    if (small) {
        // a G_m-invariant word is determined by its values on the free generators
        const std::uint32_t free = ((1u << m) - 1u) & ~g_mask;
        OrbitCanon canon;
        std::map<std::uint64_t, std::size_t> index;
        std::vector<std::vector<std::uint64_t>> reps;
        std::vector<double> weight;
        for (std::uint64_t c = 0; c < total; ++c) {
            const auto free_word = detail::decode_word(c, std::size_t{1} << free_dim, q);
            std::vector<std::uint64_t> w(std::size_t{1} << m);
            for (std::uint64_t h = 0; h < w.size(); ++h)
                w[h] = free_word[extract_bits(h, free)];
            const auto id = canon.classify(w).first;
            auto [it, fresh] = index.try_emplace(id, reps.size());
            if (fresh) {
                reps.push_back(w);
                weight.push_back(0.0);
            }
            weight[it->second] += 1.0;
        }
        if (reps.size() <= 64) {
            auto d = [&](std::size_t a, std::size_t b) {
                return dist_m(SymbolTree{reps[a], q}, SymbolTree{reps[b], q});
            };
            const auto e = exact_cover_entropy(weight, d, eps);
            return Lemma17Result{e.bits, true, reps.size()};
        }
    }
    if (q != 2)
        throw LimitError("the estimator covers binary alphabets only");
    const FiltrationModel model(lemma17_sigma(m, g_mask), m, 0);
    const auto e = ball_entropy(model, eps, centers, SplittingParams{}, seed);
    return Lemma17Result{e.bits, false, 0};
}

/// Filtration curve: ball entropy of (orbit space of D_n, K_n[rho_k]) under
/// omega^sigma for each level n > k.
inline EntropyCurve filtration_scaling(const SigmaSeq& sigma, int k, const std::vector<int>& levels,
                                       const ScalingParams& prm)
{
    EntropyCurve c;
    for (int n : levels) {
        if (n <= k)
            throw DomainError("filtration levels must exceed the cut level");
        const FiltrationModel model(sigma, n, k);
        const std::uint64_t seed = derive_seed(prm.seed, static_cast<std::uint64_t>(n));
        const auto e = ball_entropy(model, prm.eps, prm.centers, prm.splitting, seed, prm.workers);
        c.points.push_back(CurvePoint{n, prm.eps, e.bits, prm.splitting.particles, seed});
    }
    return c;
}

/// Pointwise form of the Lipschitz bound on K_n: with rho >= |rho1 - rho2|
/// a semimetric, K[rho2](c1, c2) <= K[rho1](c1, c2) + 3 rho~(c1, c2), where
/// rho~ is the all-pairs average. Inputs are the N × N cross tables between
/// the leaves of c1 and c2; exact for integer T.
template <class T>
bool lipschitz_bound_check(const std::vector<std::vector<T>>& rho1, const std::vector<std::vector<T>>& rho2,
                           const std::vector<std::vector<T>>& rho)
{
    const std::size_t N = rho.size();
    if (rho1.size() != N || rho2.size() != N)
        throw DomainError("tables of different sizes");
    T all{};
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b) {
            const T diff = rho1[a][b] > rho2[a][b] ? rho1[a][b] - rho2[a][b] : rho2[a][b] - rho1[a][b];
            if (diff > rho[a][b])
                throw DomainError("rho does not dominate |rho1 - rho2|");
            all += rho[a][b];
        }
    // N K[rho2] <= N K[rho1] + 3 all / N, scaled by N^2 / N
    const T n = static_cast<T>(N);
    return n * kantorovich_sum(rho2) <= n * kantorovich_sum(rho1) + 3 * all;
}

} // namespace opdyn
