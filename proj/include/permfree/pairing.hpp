#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "permfree/error.hpp"

namespace permfree {

/// A fixed-point-free involution of [m]; blocks are {k, mate(k)}.
class PairPartition {
public:
    /// From 1-based mates: mates[k-1] is the partner of k.
    explicit PairPartition(std::vector<int> mates) : mate_(std::move(mates)) {
        int const m = size();
        if (m == 0 || m % 2 != 0) {
            throw InvalidArgument("pair partition: length must be even and positive, got " + std::to_string(m));
        }
        for (int k = 1; k <= m; ++k) {
            int const l = mate_[k - 1];
            if (l < 1 || l > m || l == k || mate_[l - 1] != k) {
                throw InvalidArgument("pair partition: position " + std::to_string(k) +
                                      " is not part of a proper block");
            }
        }
    }

    /// From a list of 1-based blocks.
    static PairPartition from_blocks(int m, std::vector<std::pair<int, int>> const& blocks) {
        std::vector<int> mates(m, 0);
        for (auto [k, l] : blocks) {
            if (k < 1 || k > m || l < 1 || l > m) throw InvalidArgument("pair partition: block out of range");
            if (mates[k - 1] != 0 || mates[l - 1] != 0) throw InvalidArgument("pair partition: overlapping blocks");
            mates[k - 1] = l;
            mates[l - 1] = k;
        }
        return PairPartition(std::move(mates));
    }

    int size() const noexcept { return static_cast<int>(mate_.size()); }
    int mate(int k) const { return mate_.at(k - 1); }

    /// Blocks (k, l) with k < l, ordered by k.
    std::vector<std::pair<int, int>> blocks() const {
        std::vector<std::pair<int, int>> out;
        for (int k = 1; k <= size(); ++k) {
            if (k < mate(k)) out.emplace_back(k, mate(k));
        }
        return out;
    }

    std::string to_string() const {
        std::string s;
        for (auto [k, l] : blocks()) s += "(" + std::to_string(k) + "," + std::to_string(l) + ")";
        return s;
    }

    friend bool operator==(PairPartition const&, PairPartition const&) = default;

private:
    std::vector<int> mate_;
};

/// Largest length enumerate_pairings accepts: 15!! = 2,027,025 pairings.
inline constexpr int max_enumerated_length = 16;

namespace detail {

/// Pairs the smallest open position with each later open position, in increasing order.
inline void pairings_rec(std::vector<int>& mates, std::vector<PairPartition>& out) {
    int const m = static_cast<int>(mates.size());
    int first = 0;
    while (first < m && mates[first] != 0) ++first;
    if (first == m) {
        out.emplace_back(mates);
        return;
    }
    for (int second = first + 1; second < m; ++second) {
        if (mates[second] != 0) continue;
        mates[first] = second + 1;
        mates[second] = first + 1;
        pairings_rec(mates, out);
        mates[first] = 0;
        mates[second] = 0;
    }
}

/// Non-crossing pairings of the interval [lo, hi) visited in canonical order.
/// `accept(k, l)` may veto a block before recursing.
template <typename Accept, typename Emit>
void noncrossing_rec(std::vector<int>& mates, int lo, int hi, std::vector<std::pair<int, int>>& pending,
                     Accept& accept, Emit& emit) {
    if (lo >= hi) {
        if (pending.empty()) {
            emit(mates);
            return;
        }
        auto const [nlo, nhi] = pending.back();
        pending.pop_back();
        noncrossing_rec(mates, nlo, nhi, pending, accept, emit);
        pending.emplace_back(nlo, nhi);
        return;
    }
    for (int partner = lo + 1; partner < hi; partner += 2) {
        if (!accept(lo + 1, partner + 1)) continue;
        mates[lo] = partner + 1;
        mates[partner] = lo + 1;
        pending.emplace_back(partner + 1, hi);
        noncrossing_rec(mates, lo + 1, partner, pending, accept, emit);
        pending.pop_back();
    }
}

inline void require_even(int m, char const* where) {
    if (m <= 0 || m % 2 != 0) {
        throw InvalidArgument(std::string(where) + ": length must be even and positive, got " + std::to_string(m));
    }
}

} // namespace detail

/// All (m-1)!! pairings of [m], lexicographic by smallest unpaired element first.
inline std::vector<PairPartition> enumerate_pairings(int m) {
    detail::require_even(m, "enumerate_pairings");
    if (m > max_enumerated_length) {
        throw InvalidArgument("enumerate_pairings: length " + std::to_string(m) + " exceeds the limit " +
                              std::to_string(max_enumerated_length));
    }
    std::vector<PairPartition> out;
    std::vector<int> mates(m, 0);
    detail::pairings_rec(mates, out);
    return out;
}

/// True iff there is no a < b < pi(a) < pi(b).
inline bool is_noncrossing(PairPartition const& pi) {
    int const m = pi.size();
    for (int a = 1; a <= m; ++a) {
        int const c = pi.mate(a);
        if (c < a) continue;
        for (int b = a + 1; b < c; ++b) {
            if (pi.mate(b) > c) return false;
        }
    }
    return true;
}

/// All non-crossing pairings of [m] in the same canonical order as enumerate_pairings.
inline std::vector<PairPartition> enumerate_noncrossing(int m) {
    detail::require_even(m, "enumerate_noncrossing");
    std::vector<PairPartition> out;
    std::vector<int> mates(m, 0);
    std::vector<std::pair<int, int>> pending;
    auto accept = [](int, int) { return true; };
    auto emit = [&](std::vector<int> const& x) { out.emplace_back(x); };
    detail::noncrossing_rec(mates, 0, m, pending, accept, emit);
    return out;
}

/// #NC_2(m); equals Catalan(m/2).
inline std::uint64_t count_nc2(int m) {
    detail::require_even(m, "count_nc2");
    std::uint64_t count = 0;
    std::vector<int> mates(m, 0);
    std::vector<std::pair<int, int>> pending;
    auto accept = [](int, int) { return true; };
    auto emit = [&](std::vector<int> const&) { ++count; };
    detail::noncrossing_rec(mates, 0, m, pending, accept, emit);
    return count;
}

enum class LimitKind { semicircular, circular };

/**
 * A word over free variables: position s carries label f(s) and a star flag.
 * Semicircular labels never carry a star.
 */
class WordSignature {
public:
    WordSignature(std::vector<std::string> labels, std::vector<bool> stars, std::map<std::string, LimitKind> kinds)
        : labels_(std::move(labels)), stars_(std::move(stars)), kinds_(std::move(kinds)) {
        if (labels_.size() != stars_.size()) throw SizeMismatch("word signature: labels and stars differ in length");
        for (std::size_t s = 0; s < labels_.size(); ++s) {
            auto const it = kinds_.find(labels_[s]);
            if (it == kinds_.end()) {
                throw InvalidArgument("word signature: no kind declared for label '" + labels_[s] + "'");
            }
            if (it->second == LimitKind::semicircular && stars_[s]) {
                throw InvalidArgument("word signature: semicircular label '" + labels_[s] +
                                      "' cannot carry a star (position " + std::to_string(s + 1) + ")");
            }
        }
    }

    int size() const noexcept { return static_cast<int>(labels_.size()); }
    std::string const& label(int s) const { return labels_.at(s - 1); }
    bool star(int s) const { return stars_.at(s - 1); }
    LimitKind kind(int s) const { return kinds_.at(label(s)); }

private:
    std::vector<std::string> labels_;
    std::vector<bool> stars_;
    std::map<std::string, LimitKind> kinds_;
};

/// Non-crossing pairings whose blocks join equal labels, with opposite stars on circular labels.
inline std::uint64_t count_nc2_constrained(WordSignature const& sig) {
    int const m = sig.size();
    if (m == 0) return 1;
    if (m % 2 != 0) return 0;
    std::uint64_t count = 0;
    std::vector<int> mates(m, 0);
    std::vector<std::pair<int, int>> pending;
    auto accept = [&](int k, int l) {
        if (sig.label(k) != sig.label(l)) return false;
        return sig.kind(k) == LimitKind::semicircular || sig.star(k) != sig.star(l);
    };
    auto emit = [&](std::vector<int> const&) { ++count; };
    detail::noncrossing_rec(mates, 0, m, pending, accept, emit);
    return count;
}

/// Limit of E o tr of the word for a free family of variance-1 semicircular and circular elements.
inline std::uint64_t free_limit_prediction(WordSignature const& sig) { return count_nc2_constrained(sig); }

} // namespace permfree
