#pragma once

// Brute-force reference implementations written straight from the definitions.
// They share nothing with the library beyond the EntryPermutation accessors.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "permfree/entry_permutation.hpp"

namespace oracle {

using permfree::Cell;
using permfree::EntryPermutation;

inline Cell t(Cell c) { return {c.col, c.row}; }

/// t o tau o t evaluated at (i, j).
inline Cell conj_t(EntryPermutation const& tau, int i, int j) { return t(tau(j, i)); }

/// #{(i,j,k) : sigma(i,j) = t tau t (k,j)}, O(N^3).
inline std::uint64_t j_count(EntryPermutation const& sigma, EntryPermutation const& tau) {
    int const n = sigma.side();
    std::uint64_t c = 0;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) c += sigma(i, j) == conj_t(tau, k, j) ? 1 : 0;
    return c;
}

/// Cross-pair count over the four candidates a(i,j) = b(i,k), b(k,j), tbt(i,k), tbt(k,j).
/// With `multiplicity` each matching candidate counts; otherwise each triple counts once.
inline std::uint64_t cross_count(EntryPermutation const& a, EntryPermutation const& b, bool multiplicity) {
    int const n = a.side();
    std::uint64_t c = 0;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                Cell const x = a(i, j);
                int hits = (x == b(i, k)) + (x == b(k, j)) + (x == conj_t(b, i, k)) + (x == conj_t(b, k, j));
                c += multiplicity ? hits : (hits > 0 ? 1 : 0);
            }
    return c;
}

/// mates: 1-based partner of each position. Scans all N^m tuples.
inline std::uint64_t tuple_count(std::vector<int> const& mates, std::vector<EntryPermutation> const& s) {
    int const m = static_cast<int>(mates.size());
    int const n = s.front().side();
    std::vector<int> idx(m, 1);
    std::uint64_t count = 0;
    while (true) {
        bool ok = true;
        for (int k = 0; k < m && ok; ++k) {
            int const l = mates[k] - 1;
            Cell const lhs = s[k](idx[k], idx[(k + 1) % m]);
            Cell const rhs = t(s[l](idx[l], idx[(l + 1) % m]));
            ok = lhs == rhs;
        }
        count += ok ? 1 : 0;
        int p = 0;
        while (p < m && ++idx[p] > n) idx[p++] = 1;
        if (p == m) break;
    }
    return count;
}

/// All pairings of [m] as mate vectors, in no particular order.
inline void all_pairings(std::vector<int>& mates, std::vector<std::vector<int>>& out) {
    auto it = std::find(mates.begin(), mates.end(), 0);
    if (it == mates.end()) {
        out.push_back(mates);
        return;
    }
    int const a = static_cast<int>(it - mates.begin());
    for (int b = a + 1; b < static_cast<int>(mates.size()); ++b) {
        if (mates[b] != 0) continue;
        mates[a] = b + 1;
        mates[b] = a + 1;
        all_pairings(mates, out);
        mates[a] = mates[b] = 0;
    }
}

inline std::vector<std::vector<int>> all_pairings(int m) {
    std::vector<int> mates(m, 0);
    std::vector<std::vector<int>> out;
    all_pairings(mates, out);
    return out;
}

/// Walking left to right, every closing position must close the most recent open one.
inline bool noncrossing_by_stack(std::vector<int> const& mates) {
    std::vector<int> stack;
    for (int k = 1; k <= static_cast<int>(mates.size()); ++k) {
        if (mates[k - 1] > k) {
            stack.push_back(k);
        } else {
            if (stack.empty() || stack.back() != mates[k - 1]) return false;
            stack.pop_back();
        }
    }
    return true;
}

inline std::uint64_t catalan(int n) {
    std::vector<std::uint64_t> c(n + 1, 0);
    c[0] = 1;
    for (int k = 1; k <= n; ++k)
        for (int i = 0; i < k; ++i) c[k] += c[i] * c[k - 1 - i];
    return c[n];
}

inline std::uint64_t double_factorial(int k) {
    std::uint64_t r = 1;
    for (; k > 1; k -= 2) r *= static_cast<std::uint64_t>(k);
    return r;
}

/// [A^sigma]_ij = A_{sigma(i,j)}, entry by entry.
inline Eigen::MatrixXcd permuted(Eigen::MatrixXcd const& a, EntryPermutation const& s) {
    int const n = s.side();
    Eigen::MatrixXcd out(n, n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            Cell const c = s(i, j);
            out(i - 1, j - 1) = a(c.row - 1, c.col - 1);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Random generators.

using Rng = std::mt19937_64;

inline EntryPermutation random_entry_perm(int n, Rng& rng) {
    std::vector<EntryPermutation::Index> image(static_cast<std::size_t>(n) * n);
    for (std::size_t f = 0; f < image.size(); ++f) image[f] = static_cast<EntryPermutation::Index>(f);
    std::shuffle(image.begin(), image.end(), rng);
    return EntryPermutation::from_flat(n, image);
}

/// 1-based images.
inline std::vector<int> random_line_perm(int n, Rng& rng) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i + 1;
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Eigen::MatrixXcd random_hermitian(int n, Rng& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd h(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = g(rng);
        for (int j = i + 1; j < n; ++j) {
            h(i, j) = {g(rng), g(rng)};
            h(j, i) = std::conj(h(i, j));
        }
    }
    return h;
}

inline Eigen::MatrixXcd random_matrix(int n, Rng& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
    return a;
}

} // namespace oracle
