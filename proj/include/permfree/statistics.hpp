#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "permfree/entry_permutation.hpp"
#include "permfree/error.hpp"
#include "permfree/schemes.hpp"

namespace permfree {

/**
 * j(sigma : tau) = #{(i,j,k) : sigma(i,j) = (t o tau o t)(k,j)}.
 *
 * Both sides are bijections, so every target cell p contributes at most one
 * triple: the one with sigma^{-1}(p) and (t o tau o t)^{-1}(p) in the same
 * column. That makes the count O(n^2).
 */
inline std::uint64_t j_statistic(EntryPermutation const& sigma, EntryPermutation const& tau) {
    require_same_side(sigma.side(), tau.side(), "j_statistic");
    auto const n = static_cast<EntryPermutation::Index>(sigma.side());
    EntryPermutation const s_inv = sigma.inverse();
    EntryPermutation const r_inv = conjugate_by_t(tau).inverse();
    auto const a = s_inv.flat_image();
    auto const b = r_inv.flat_image();
    std::uint64_t count = 0;
    for (std::size_t p = 0; p < a.size(); ++p) {
        if (a[p] % n == b[p] % n) ++count;
    }
    return count;
}

/// c(phi, psi) = #{i : phi(i) = psi(i)}, the number of fixed points of phi^{-1} psi.
inline std::uint64_t c_statistic(LinePermutation const& phi, LinePermutation const& psi) {
    if (phi.size() != psi.size()) {
        throw SizeMismatch("c_statistic: permutations act on sets of different size");
    }
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (phi[i] == psi[i]) ++count;
    }
    return count;
}

namespace detail {

/// For each (i,j), collects the k solving each of the four cross-pair equations
///   a(i,j) = b(i,k),  a(i,j) = b(k,j),  a(i,j) = b'(i,k),  a(i,j) = b'(k,j)
/// with b' = t o b o t, and hands them to `visit(slots, hits)`.
template <typename Visit>
void for_each_cross_match(EntryPermutation const& a, EntryPermutation const& b, Visit&& visit) {
    require_same_side(a.side(), b.side(), "condition (ii) count");
    auto const n = static_cast<EntryPermutation::Index>(a.side());
    EntryPermutation const b_inv = b.inverse();
    EntryPermutation const bt_inv = conjugate_by_t(b).inverse();
    auto const img = a.flat_image();
    auto const bi = b_inv.flat_image();
    auto const bti = bt_inv.flat_image();
    for (EntryPermutation::Index i = 0; i < n; ++i) {
        for (EntryPermutation::Index j = 0; j < n; ++j) {
            auto const p = img[i * n + j];
            auto const q = bi[p];
            auto const r = bti[p];
            std::array<std::int64_t, 4> k{-1, -1, -1, -1};
            if (q / n == i) k[0] = q % n;
            if (q % n == j) k[1] = q / n;
            if (r / n == i) k[2] = r % n;
            if (r % n == j) k[3] = r / n;
            visit(k);
        }
    }
}

inline int distinct_hits(std::array<std::int64_t, 4> const& k, std::size_t used = 4) {
    int distinct = 0;
    for (std::size_t s = 0; s < used; ++s) {
        if (k[s] < 0) continue;
        bool repeat = false;
        for (std::size_t r = 0; r < s; ++r) repeat = repeat || k[r] == k[s];
        if (!repeat) ++distinct;
    }
    return distinct;
}

} // namespace detail

/**
 * Cross-pair growth statistic
 *   #{(i,j,k) : a(i,j) in [b(i,k), b(k,j), b'(i,k), b'(k,j)]},   b' = t o b o t,
 * counted with multiplicity over the four list entries. This is exactly half
 * the sum of the eight j-terms returned by condition_ii_decomposition.
 */
inline std::uint64_t condition_ii_count(EntryPermutation const& a, EntryPermutation const& b) {
    std::uint64_t count = 0;
    detail::for_each_cross_match(a, b, [&](auto const& k) {
        for (auto v : k) count += v >= 0 ? 1 : 0;
    });
    return count;
}

/// Same statistic counting each triple (i,j,k) once. Lies between 1/4 and 1 times condition_ii_count.
inline std::uint64_t condition_ii_distinct_count(EntryPermutation const& a, EntryPermutation const& b) {
    std::uint64_t count = 0;
    detail::for_each_cross_match(a, b, [&](auto const& k) { count += detail::distinct_hits(k); });
    return count;
}

/// The eight j-terms j(x:y), j(y:x) for x in {sigma, t sigma t}, y in {mu, t mu t}.
struct ConditionIiDecomposition {
    /// Order: for x in (sigma, tst), y in (mu, tmt): j(x:y), then j(y:x).
    std::array<std::uint64_t, 8> terms{};

    std::uint64_t sum() const {
        std::uint64_t s = 0;
        for (auto v : terms) s += v;
        return s;
    }
    /// The half-sum; the full sum is always even.
    std::uint64_t half_sum() const { return sum() / 2; }
};

inline ConditionIiDecomposition condition_ii_decomposition(EntryPermutation const& sigma,
                                                           EntryPermutation const& mu) {
    require_same_side(sigma.side(), mu.side(), "condition_ii_decomposition");
    std::array<EntryPermutation, 2> const xs{sigma, conjugate_by_t(sigma)};
    std::array<EntryPermutation, 2> const ys{mu, conjugate_by_t(mu)};
    ConditionIiDecomposition d;
    std::size_t at = 0;
    for (auto const& x : xs) {
        for (auto const& y : ys) {
            d.terms[at++] = j_statistic(x, y);
            d.terms[at++] = j_statistic(y, x);
        }
    }
    return d;
}

/// Reduced forms of the cross-pair statistic when the second family is symmetric.
enum class ReducedCase {
    /// #{(i,j,k) : a(i,j) = b(i,k)}, for symmetric a.
    row_only = 1,
    /// #{(i,j,k) : a(i,j) in {b(i,k), b(k,j)}}, for j-small a.
    row_or_column = 2,
};

/// Counts each triple once.
inline std::uint64_t reduced_condition_ii_count(EntryPermutation const& a, EntryPermutation const& b,
                                                ReducedCase which) {
    std::uint64_t count = 0;
    detail::for_each_cross_match(a, b, [&](auto const& k) {
        if (which == ReducedCase::row_only) {
            count += k[0] >= 0 ? 1 : 0;
        } else {
            count += detail::distinct_hits(k, 2);
        }
    });
    return count;
}

// ---------------------------------------------------------------------------
// Growth certification over a finite grid of sides.

enum class Verdict { satisfies, violates, inconclusive };

inline char const* to_string(Verdict v) {
    switch (v) {
    case Verdict::satisfies: return "satisfies";
    case Verdict::violates: return "violates";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct GridPoint {
    int side = 0;
    std::uint64_t count = 0;
};

struct GrowthReport {
    std::vector<std::string> labels;
    /// "symmetric", "j-small", "condition-ii" or "c-small".
    std::string kind;
    std::vector<GridPoint> grid;
    /// Least-squares slope of log(count) against log(side); -inf when every count is zero.
    double fitted_exponent = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

/// Default margin around the growth threshold.
inline constexpr double growth_margin = 0.25;

/// Least-squares slope of log count against log side over the points with count > 0.
/// Returns -inf if no count is positive and NaN if exactly one is.
inline double fit_exponent(std::vector<GridPoint> const& grid) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (auto const& g : grid) {
        if (g.count == 0) continue;
        double const x = std::log(static_cast<double>(g.side));
        double const y = std::log(static_cast<double>(g.count));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++used;
    }
    if (used == 0) return -std::numeric_limits<double>::infinity();
    double const denom = used * sxx - sx * sx;
    if (used < 2 || denom <= 0) return std::numeric_limits<double>::quiet_NaN();
    return (used * sxy - sx * sy) / denom;
}

/**
 * Decides an o(side^threshold) hypothesis from grid evidence.
 *
 * exponent <= threshold - margin gives satisfies. exponent >= threshold - 0.1
 * with every count >= side^threshold / 4 gives violates. Anything else is
 * inconclusive. All-zero grids satisfy.
 */
inline Verdict assess_growth(std::vector<GridPoint> const& grid, double threshold, double& exponent,
                             double margin = growth_margin) {
    exponent = fit_exponent(grid);
    if (std::isinf(exponent) && exponent < 0) return Verdict::satisfies;
    if (std::isnan(exponent)) return Verdict::inconclusive;
    if (exponent <= threshold - margin) return Verdict::satisfies;
    bool large = !grid.empty();
    for (auto const& g : grid) {
        large = large && static_cast<double>(g.count) >= std::pow(static_cast<double>(g.side), threshold) / 4.0;
    }
    if (exponent >= threshold - 0.1 && large) return Verdict::violates;
    return Verdict::inconclusive;
}

enum class DeclaredKind {
    /// Expected to give a semicircular limit: must be exactly symmetric.
    symmetric,
    /// Expected to give a circular limit: j(mu : mu) must be o(side^2).
    j_small,
};

struct DeclaredScheme {
    PermutationScheme scheme;
    DeclaredKind kind;
};

/**
 * Checks the sufficient freeness conditions for a declared family over a grid of sides.
 *
 * Emits one report per hypothesis: exact symmetry for each symmetric scheme,
 * growth of j(mu : mu) for each j-small scheme, and growth of
 * condition_ii_count for each unordered pair (the statistic is symmetric in
 * the pair). A declared-symmetric scheme that is not symmetric at some grid
 * side gets a "violates" symmetry report.
 */
inline std::vector<GrowthReport> certify_family(std::vector<DeclaredScheme> const& family,
                                                std::vector<int> const& grid) {
    if (grid.size() < 3) {
        throw InvalidArgument("certify_family: the grid needs at least 3 sides, got " +
                              std::to_string(grid.size()));
    }
    if (family.empty()) throw InvalidArgument("certify_family: empty family");
    std::vector<std::vector<EntryPermutation>> built(family.size());
    for (std::size_t s = 0; s < family.size(); ++s) {
        for (int side : grid) built[s].push_back(family[s].scheme.build(side));
    }

    std::vector<GrowthReport> reports;
    for (std::size_t s = 0; s < family.size(); ++s) {
        GrowthReport r;
        r.labels = {family[s].scheme.label()};
        if (family[s].kind == DeclaredKind::symmetric) {
            r.kind = "symmetric";
            bool ok = true;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                auto const bad = asymmetry_count(built[s][g]);
                ok = ok && bad == 0;
                r.grid.push_back({grid[g], bad});
            }
            r.fitted_exponent = fit_exponent(r.grid);
            r.verdict = ok ? Verdict::satisfies : Verdict::violates;
        } else {
            r.kind = "j-small";
            for (std::size_t g = 0; g < grid.size(); ++g) {
                r.grid.push_back({grid[g], j_statistic(built[s][g], built[s][g])});
            }
            r.verdict = assess_growth(r.grid, 2.0, r.fitted_exponent);
        }
        reports.push_back(std::move(r));
    }
    for (std::size_t a = 0; a < family.size(); ++a) {
        for (std::size_t b = a + 1; b < family.size(); ++b) {
            GrowthReport r;
            r.labels = {family[a].scheme.label(), family[b].scheme.label()};
            r.kind = "condition-ii";
            for (std::size_t g = 0; g < grid.size(); ++g) {
                r.grid.push_back({grid[g], condition_ii_count(built[a][g], built[b][g])});
            }
            r.verdict = assess_growth(r.grid, 2.0, r.fitted_exponent);
            reports.push_back(std::move(r));
        }
    }
    return reports;
}

inline bool all_satisfied(std::vector<GrowthReport> const& reports) {
    for (auto const& r : reports) {
        if (r.verdict != Verdict::satisfies) return false;
    }
    return true;
}

} // namespace permfree
