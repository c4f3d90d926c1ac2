#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "permfree/entry_permutation.hpp"
#include "permfree/error.hpp"
#include "permfree/pairing.hpp"
#include "permfree/word.hpp"

namespace permfree {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// "p/q", or "p" when the denominator is 1.
inline std::string to_string(Rational const& r) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(Rational const& r) { return r.convert_to<double>(); }

/// Caps the work of one exact evaluation, in elementary constraint checks.
struct WickBudget {
    std::uint64_t max_checks = 100'000'000;
};

namespace detail {

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

/// (m-1)!! * n^m, saturated.
inline std::uint64_t naive_wick_work(int m, int n, bool all_pairings) {
    std::uint64_t w = 1;
    if (all_pairings) {
        for (int k = m - 1; k > 1; k -= 2) w = saturating_mul(w, static_cast<std::uint64_t>(k));
    }
    for (int k = 0; k < m; ++k) w = saturating_mul(w, static_cast<std::uint64_t>(n));
    return w;
}

/**
 * Exhaustive depth-first count of index tuples (i_1..i_m) satisfying every
 * block equation  sigma_k(i_k, i_{k+1}) = t(sigma_l(i_l, i_{l+1})).
 *
 * A block equation fixes both indices of one factor once both indices of its
 * mate are known, so assignments are propagated through a worklist and the
 * search only branches on indices nothing else determines.
 */
class TupleCounter {
public:
    TupleCounter(PairPartition const& pi, std::span<EntryPermutation const> sigmas, std::uint64_t& checks,
                 std::uint64_t budget, bool all_pairings)
        : m_(pi.size()), n_(sigmas.front().side()), checks_(checks), budget_(budget), all_pairings_(all_pairings),
          value_(m_, -1) {
        mate_.resize(m_);
        forward_.resize(m_);
        std::vector<EntryPermutation> inverses;
        inverses.reserve(m_);
        for (auto const& s : sigmas) inverses.push_back(s.inverse());
        auto const n = static_cast<EntryPermutation::Index>(n_);
        for (int k = 0; k < m_; ++k) {
            int const l = pi.mate(k + 1) - 1;
            mate_[k] = l;
            auto const sk = sigmas[k].flat_image();
            auto const li = inverses[l].flat_image();
            auto& fwd = forward_[k];
            fwd.resize(sk.size());
            for (std::size_t x = 0; x < sk.size(); ++x) {
                auto const y = sk[x];
                fwd[x] = li[(y % n) * n + y / n];
            }
        }
    }

    std::uint64_t count() {
        int var = 0;
        while (var < m_ && value_[var] >= 0) ++var;
        if (var == m_) return 1;
        std::uint64_t total = 0;
        for (int v = 0; v < n_; ++v) {
            std::size_t const mark = trail_.size();
            work_.clear();
            if (assign(var, v) && propagate()) total += count();
            undo(mark);
        }
        return total;
    }

private:
    void charge() {
        if (++checks_ > budget_) {
            throw BudgetExceeded("exact Wick evaluation exceeded its budget of " + std::to_string(budget_) +
                                     " constraint checks (naive bound " +
                                     std::to_string(naive_wick_work(m_, n_, all_pairings_)) + ")",
                                 budget_, naive_wick_work(m_, n_, all_pairings_));
        }
    }

    bool assign(int var, int v) {
        charge();
        value_[var] = v;
        trail_.push_back(var);
        work_.push_back((var + m_ - 1) % m_);
        work_.push_back(var);
        return true;
    }

    bool set_or_check(int var, int v) {
        if (value_[var] < 0) return assign(var, v);
        return value_[var] == v;
    }

    bool propagate() {
        while (!work_.empty()) {
            int const k = work_.back();
            work_.pop_back();
            int const a = value_[k];
            int const b = value_[(k + 1) % m_];
            if (a < 0 || b < 0) continue;
            charge();
            auto const y = forward_[k][static_cast<std::size_t>(a) * n_ + b];
            int const l = mate_[k];
            if (!set_or_check(l, static_cast<int>(y / n_))) return false;
            if (!set_or_check((l + 1) % m_, static_cast<int>(y % n_))) return false;
        }
        return true;
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            value_[trail_.back()] = -1;
            trail_.pop_back();
        }
    }

    int m_;
    int n_;
    std::uint64_t& checks_;
    std::uint64_t budget_;
    bool all_pairings_;
    std::vector<int> value_;
    std::vector<int> mate_;
    /// forward_[k][x]: the cell of factor mate(k) forced by cell x of factor k.
    std::vector<std::vector<EntryPermutation::Index>> forward_;
    std::vector<int> trail_;
    std::vector<int> work_;
};

inline void check_wick_inputs(PairPartition const& pi, std::span<EntryPermutation const> sigmas) {
    if (static_cast<int>(sigmas.size()) != pi.size()) {
        throw SizeMismatch("Wick term: pairing has length " + std::to_string(pi.size()) + " but " +
                           std::to_string(sigmas.size()) + " permutations were given");
    }
    for (auto const& s : sigmas) require_same_side(s.side(), sigmas.front().side(), "Wick term");
}

inline std::uint64_t tuple_count_impl(PairPartition const& pi, std::span<EntryPermutation const> sigmas,
                                      std::uint64_t& checks, std::uint64_t budget, bool all_pairings) {
    check_wick_inputs(pi, sigmas);
    TupleCounter counter(pi, sigmas, checks, budget, all_pairings);
    return counter.count();
}

} // namespace detail

/// #{(i_1..i_m) in [n]^m : sigma_k(i_k, i_{k+1}) = t(sigma_l(i_l, i_{l+1})) for every block (k,l)}, i_{m+1} = i_1.
inline BigInt tuple_count(PairPartition const& pi, std::span<EntryPermutation const> sigmas,
                          WickBudget budget = {}) {
    std::uint64_t checks = 0;
    return BigInt(detail::tuple_count_impl(pi, sigmas, checks, budget.max_checks, false));
}

/// The Wick weight of one pairing: tuple_count * n^{-m/2-1}.
inline Rational pairing_weight(PairPartition const& pi, std::span<EntryPermutation const> sigmas,
                               WickBudget budget = {}) {
    BigInt const count = tuple_count(pi, sigmas, budget);
    int const n = sigmas.front().side();
    BigInt const denom = boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(pi.size() / 2 + 1));
    return Rational(count, denom);
}

struct PairingTerm {
    PairPartition pairing;
    BigInt count;
    Rational weight;
};

/// E o tr(G^{sigma_1} ... G^{sigma_m}) with its per-pairing breakdown.
struct ExactMoment {
    int side = 0;
    int length = 0;
    Rational value;
    std::vector<PairingTerm> terms;
    /// Constraint checks spent.
    std::uint64_t checks = 0;
};

/// Sums the Wick weights of all pairings in canonical order. Odd lengths give exactly 0.
inline ExactMoment exact_moment(std::span<EntryPermutation const> sigmas, WickBudget budget = {}) {
    if (sigmas.empty()) throw InvalidArgument("exact_moment: empty word");
    ExactMoment out;
    out.side = sigmas.front().side();
    out.length = static_cast<int>(sigmas.size());
    for (auto const& s : sigmas) require_same_side(s.side(), out.side, "exact_moment");
    if (out.length % 2 != 0) return out;
    BigInt const denom = boost::multiprecision::pow(BigInt(out.side), static_cast<unsigned>(out.length / 2 + 1));
    for (auto const& pi : enumerate_pairings(out.length)) {
        std::uint64_t const c = detail::tuple_count_impl(pi, sigmas, out.checks, budget.max_checks, true);
        PairingTerm term{pi, BigInt(c), Rational(BigInt(c), denom)};
        out.value += term.weight;
        out.terms.push_back(std::move(term));
    }
    return out;
}

/// Substitutes t o mu o t for every starred factor. Constants are rejected.
inline std::vector<EntryPermutation> word_to_perms(MomentWord const& word, int side,
                                                   SchemeResolver const& resolve = default_resolver()) {
    std::vector<EntryPermutation> out;
    std::map<std::string, EntryPermutation> built;
    for (auto const& f : word.factors) {
        auto const* g = std::get_if<PermutedGaussian>(&f);
        if (g == nullptr) {
            throw InvalidArgument("word_to_perms: constant factor '" + std::get<ConstantMatrix>(f).label +
                                  "' cannot be evaluated exactly");
        }
        auto it = built.find(g->label);
        if (it == built.end()) it = built.emplace(g->label, resolve(g->label).build(side)).first;
        out.push_back(g->star ? conjugate_by_t(it->second) : it->second);
    }
    return out;
}

inline ExactMoment exact_moment(MomentWord const& word, int side, WickBudget budget = {},
                                SchemeResolver const& resolve = default_resolver()) {
    auto const perms = word_to_perms(word, side, resolve);
    return exact_moment(std::span<EntryPermutation const>(perms), budget);
}

struct AsymptoticRow {
    int side = 0;
    Rational value;
    std::uint64_t prediction = 0;
    /// |value - prediction|.
    double gap = 0.0;
};

/// Exact values of a constant-free word over a grid next to the free-limit prediction.
inline std::vector<AsymptoticRow> asymptotic_check(MomentWord const& word, std::vector<int> const& grid,
                                                   WickBudget budget = {},
                                                   SchemeResolver const& resolve = default_resolver()) {
    std::vector<AsymptoticRow> rows;
    for (int side : grid) {
        AsymptoticRow row;
        row.side = side;
        row.value = exact_moment(word, side, budget, resolve).value;
        row.prediction = free_limit_prediction(signature_at(word, side, resolve));
        row.gap = std::abs(to_double(row.value - Rational(row.prediction)));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace permfree
