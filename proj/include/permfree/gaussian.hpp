#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "permfree/entry_permutation.hpp"
#include "permfree/error.hpp"
#include "permfree/pairing.hpp"
#include "permfree/wick.hpp"
#include "permfree/word.hpp"

namespace permfree {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/**
 * Counter-based 64-bit generator: output k of stream s under seed x is
 * splitmix64(key(x, s) + k * golden). Streams are independent of each other
 * and of the order in which they are consumed.
 */
class CounterStream {
public:
    using result_type = std::uint64_t;

    CounterStream(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + 0x6a09e667f3bcc909ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Hermitian Gaussian matrix with E(g_ij g_kl) = (1/n) delta_il delta_jk.
using GaussianSample = DenseMatrix;

/// Off-diagonal entries (x + iy)/sqrt(2n), diagonal entries x/sqrt(n), x, y standard normal.
inline GaussianSample sample_gaussian(int n, CounterStream& rng) {
    if (n < 1) throw InvalidArgument("sample_gaussian: side must be positive");
    std::normal_distribution<double> normal;
    double const diag = 1.0 / std::sqrt(static_cast<double>(n));
    double const off = 1.0 / std::sqrt(2.0 * n);
    GaussianSample g(n, n);
    for (int i = 0; i < n; ++i) {
        g(i, i) = Complex(normal(rng) * diag, 0.0);
        for (int j = i + 1; j < n; ++j) {
            double const x = normal(rng);
            double const y = normal(rng);
            g(i, j) = Complex(x * off, y * off);
            g(j, i) = std::conj(g(i, j));
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Constant matrices.

/// Named deterministic matrices, built per side on demand.
class ConstantLibrary {
public:
    using Builder = std::function<SparseMatrix(int)>;

    void add(std::string label, Builder build) { builders_[std::move(label)] = std::move(build); }
    bool contains(std::string const& label) const { return builders_.count(label) > 0; }

    SparseMatrix at(std::string const& label, int side) const {
        auto const it = builders_.find(label);
        if (it == builders_.end()) throw InvalidArgument("unknown constant matrix '" + label + "'");
        SparseMatrix m = it->second(side);
        if (m.rows() != side || m.cols() != side) {
            throw SizeMismatch("constant '" + label + "' has the wrong size at side " + std::to_string(side));
        }
        return m;
    }

private:
    std::map<std::string, Builder> builders_;
};

namespace detail {

/// Side-2n matrix made of n x n scalar blocks [[a, b], [c, d]] (times I_n).
inline SparseMatrix block_scalar_matrix(int side, char const* label, double a, double b, double c, double d) {
    if (side % 2 != 0) {
        throw InadmissibleSize(std::string("constant ") + label + " needs an even side, got " + std::to_string(side));
    }
    int const n = side / 2;
    std::vector<Eigen::Triplet<Complex>> entries;
    for (int i = 0; i < n; ++i) {
        if (a != 0) entries.emplace_back(i, i, a);
        if (b != 0) entries.emplace_back(i, n + i, b);
        if (c != 0) entries.emplace_back(n + i, i, c);
        if (d != 0) entries.emplace_back(n + i, n + i, d);
    }
    SparseMatrix m(side, side);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

} // namespace detail

/// I (every side), Z = [[I, 2I], [0, I]] and T = [[I, -I], [2I, -I]] (even sides).
inline ConstantLibrary standard_constants() {
    ConstantLibrary lib;
    lib.add("I", [](int side) {
        SparseMatrix m(side, side);
        m.setIdentity();
        return m;
    });
    lib.add("Z", [](int side) { return detail::block_scalar_matrix(side, "Z", 1, 2, 0, 1); });
    lib.add("T", [](int side) { return detail::block_scalar_matrix(side, "T", 1, -1, 2, -1); });
    return lib;
}

/// Dense copies of the standard constants at one side (Z, T only for even sides).
inline std::map<std::string, DenseMatrix> constant_library(int side) {
    ConstantLibrary const lib = standard_constants();
    std::map<std::string, DenseMatrix> out;
    out["I"] = DenseMatrix(lib.at("I", side));
    if (side % 2 == 0) {
        out["Z"] = DenseMatrix(lib.at("Z", side));
        out["T"] = DenseMatrix(lib.at("T", side));
    }
    return out;
}

/// (1/n) * sum of the diagonal.
template <typename Derived>
Complex normalized_trace(Eigen::MatrixBase<Derived> const& a) {
    return a.trace() / static_cast<double>(a.rows());
}

// ---------------------------------------------------------------------------
// Word evaluation.

/// Everything a word needs at one side, resolved once and shared by all samples.
class WordContext {
public:
    WordContext(MomentWord word, int side, SchemeResolver const& resolve = default_resolver(),
                ConstantLibrary const& constants = standard_constants())
        : word_(std::move(word)), side_(side) {
        if (word_.factors.empty()) throw InvalidArgument("empty word");
        for (auto const& f : word_.factors) {
            if (auto const* g = std::get_if<PermutedGaussian>(&f)) {
                if (perms_.count(g->label) == 0) perms_.emplace(g->label, resolve(g->label).build(side));
            } else {
                auto const& c = std::get<ConstantMatrix>(f);
                if (constants_.count(c.label) == 0) {
                    SparseMatrix m = constants.at(c.label, side);
                    constants_.emplace(c.label, m);
                    constants_adj_.emplace(c.label, SparseMatrix(m.adjoint()));
                }
            }
        }
        choose_split();
    }

    MomentWord const& word() const noexcept { return word_; }
    int side() const noexcept { return side_; }
    EntryPermutation const& permutation(std::string const& label) const { return perms_.at(label); }

    /// The dense realization of one factor for the sample g.
    DenseMatrix realize(Factor const& f, GaussianSample const& g) const {
        if (g.rows() != side_ || g.cols() != side_) throw SizeMismatch("realize_factor: sample has the wrong side");
        if (auto const* pg = std::get_if<PermutedGaussian>(&f)) {
            DenseMatrix a = apply_to_matrix(g, perms_.at(pg->label));
            if (pg->star) a.adjointInPlace();
            return a;
        }
        auto const& c = std::get<ConstantMatrix>(f);
        return DenseMatrix(c.star ? constants_adj_.at(c.label) : constants_.at(c.label));
    }

    /// tr of the word for the sample g (normalized trace).
    Complex trace(GaussianSample const& g) const {
        int const m = word_.size();
        std::map<std::pair<std::string, bool>, DenseMatrix> cache;
        auto dense_of = [&](PermutedGaussian const& pg) -> DenseMatrix const& {
            auto key = std::make_pair(pg.label, pg.star);
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(key, realize(Factor{pg}, g)).first;
            return it->second;
        };
        auto product = [&](int lo, int hi) {
            DenseMatrix acc;
            for (int k = lo; k < hi; ++k) {
                Factor const& f = word_.factors[k];
                if (auto const* pg = std::get_if<PermutedGaussian>(&f)) {
                    DenseMatrix const& a = dense_of(*pg);
                    if (k == lo) {
                        acc = a;
                    } else {
                        DenseMatrix next(side_, side_);
                        next.noalias() = acc * a;
                        acc.swap(next);
                    }
                } else {
                    auto const& c = std::get<ConstantMatrix>(f);
                    SparseMatrix const& s = c.star ? constants_adj_.at(c.label) : constants_.at(c.label);
                    if (k == lo) {
                        acc = DenseMatrix(s);
                    } else {
                        DenseMatrix next = acc * s;
                        acc.swap(next);
                    }
                }
            }
            return acc;
        };
        if (m == 1) return normalized_trace(product(0, 1));
        DenseMatrix const left = product(0, split_);
        DenseMatrix const right = product(split_, m);
        return left.cwiseProduct(right.transpose()).sum() / static_cast<double>(side_);
    }

private:
    /// Splits the word into two products so that tr(LR) needs the fewest dense products.
    void choose_split() {
        int const m = word_.size();
        split_ = m / 2 == 0 ? 1 : m / 2;
        if (m < 2) return;
        auto dense_after_first = [&](int lo, int hi) {
            int c = 0;
            for (int k = lo + 1; k < hi; ++k) c += std::holds_alternative<PermutedGaussian>(word_.factors[k]) ? 1 : 0;
            return c;
        };
        int best = std::numeric_limits<int>::max();
        for (int h = 1; h < m; ++h) {
            int const cost = dense_after_first(0, h) + dense_after_first(h, m);
            int const off = std::abs(2 * h - m);
            if (cost < best || (cost == best && off < std::abs(2 * split_ - m))) {
                best = cost;
                split_ = h;
            }
        }
    }

    MomentWord word_;
    int side_;
    int split_ = 1;
    std::map<std::string, EntryPermutation> perms_;
    std::map<std::string, SparseMatrix> constants_;
    std::map<std::string, SparseMatrix> constants_adj_;
};

/// G^{mu}, its adjoint for a starred factor, or the stored constant.
inline DenseMatrix realize_factor(Factor const& factor, GaussianSample const& g, SchemeResolver const& resolve = default_resolver(),
                                  ConstantLibrary const& constants = standard_constants()) {
    WordContext const ctx(MomentWord{{factor}}, static_cast<int>(g.rows()), resolve, constants);
    return ctx.realize(factor, g);
}

// ---------------------------------------------------------------------------
// Monte Carlo estimation.

struct MomentEstimate {
    int side = 0;
    std::uint64_t samples = 0;
    Complex mean;
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::uint64_t seed = 0;
};

struct MonteCarloOptions {
    /// Worker threads; results do not depend on this.
    unsigned threads = 1;
    SchemeResolver resolve = default_resolver();
    ConstantLibrary constants = standard_constants();
};

inline MomentEstimate summarize(std::vector<Complex> const& values, int side, std::uint64_t seed) {
    MomentEstimate e;
    e.side = side;
    e.samples = values.size();
    e.seed = seed;
    Complex sum = 0;
    for (auto const& v : values) sum += v;
    e.mean = sum / static_cast<double>(values.size());
    double sre = 0, sim = 0;
    for (auto const& v : values) {
        double const dr = v.real() - e.mean.real();
        double const di = v.imag() - e.mean.imag();
        sre += dr * dr;
        sim += di * di;
    }
    double const denom = static_cast<double>(values.size() - 1);
    double const root = std::sqrt(static_cast<double>(values.size()));
    e.stderr_re = std::sqrt(sre / denom) / root;
    e.stderr_im = std::sqrt(sim / denom) / root;
    return e;
}

/**
 * Per-sample traces of several words, all evaluated on the same Gaussian
 * sample for each sample index. Sample s uses CounterStream(seed, s), so the
 * values do not depend on the number of threads.
 */
inline std::vector<std::vector<Complex>> sample_traces(std::vector<MomentWord> const& words, int side,
                                                       std::uint64_t samples, std::uint64_t seed,
                                                       MonteCarloOptions const& options = {}) {
    std::vector<WordContext> contexts;
    for (auto const& w : words) contexts.emplace_back(w, side, options.resolve, options.constants);
    std::vector<std::vector<Complex>> values(words.size(), std::vector<Complex>(samples));
    auto run = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t s = begin; s < end; ++s) {
            CounterStream rng(seed, s);
            GaussianSample const g = sample_gaussian(side, rng);
            for (std::size_t w = 0; w < contexts.size(); ++w) values[w][s] = contexts[w].trace(g);
        }
    };
    unsigned const threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(samples)));
    if (threads == 1) {
        run(0, samples);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t const chunk = (samples + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::uint64_t const b = t * chunk;
            std::uint64_t const e = std::min<std::uint64_t>(samples, b + chunk);
            if (b < e) pool.emplace_back(run, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return values;
}

/// Joint estimates of several words from shared samples.
inline std::vector<MomentEstimate> mc_moments(std::vector<MomentWord> const& words, int side, std::uint64_t samples,
                                              std::uint64_t seed, MonteCarloOptions const& options = {}) {
    if (samples < 2) throw InvalidArgument("mc_moment: need at least 2 samples");
    auto const values = sample_traces(words, side, samples, seed, options);
    std::vector<MomentEstimate> out;
    for (auto const& v : values) out.push_back(summarize(v, side, seed));
    return out;
}

inline MomentEstimate mc_moment(MomentWord const& word, int side, std::uint64_t samples, std::uint64_t seed,
                                MonteCarloOptions const& options = {}) {
    return mc_moments({word}, side, samples, seed, options).front();
}

struct StudyRow {
    MomentEstimate estimate;
    std::optional<Rational> exact;
    std::optional<std::uint64_t> prediction;
};

/**
 * Monte Carlo estimate per side, with the exact Wick value when the word is
 * constant-free and fits the budget, and the free-limit prediction for
 * constant-free words.
 */
inline std::vector<StudyRow> convergence_study(MomentWord const& word, std::vector<int> const& sides,
                                               std::uint64_t samples, std::uint64_t seed,
                                               MonteCarloOptions const& options = {}, WickBudget budget = {}) {
    std::vector<StudyRow> rows;
    for (int side : sides) {
        StudyRow row;
        row.estimate = mc_moment(word, side, samples, seed, options);
        if (word.constant_free()) {
            row.prediction = free_limit_prediction(signature_at(word, side, options.resolve));
            if (word.size() <= max_enumerated_length) {
                try {
                    row.exact = exact_moment(word, side, budget, options.resolve).value;
                } catch (BudgetExceeded const&) {
                    row.exact.reset();
                }
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace permfree
