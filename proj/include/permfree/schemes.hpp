#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "permfree/entry_permutation.hpp"
#include "permfree/error.hpp"

namespace permfree {

/**
 * A family of entry permutations indexed by the matrix side.
 *
 * build(n) is defined exactly on the admissible sides and always returns a
 * permutation of side n. Asking for an inadmissible side throws
 * InadmissibleSize; there is no rounding to a nearby size.
 */
class PermutationScheme {
public:
    using Predicate = std::function<bool(int)>;
    using Rule = std::function<EntryPermutation(int)>;

    PermutationScheme(std::string label, std::string admissible_sides, Predicate admissible, Rule rule)
        : label_(std::move(label)), sides_(std::move(admissible_sides)),
          admissible_(std::move(admissible)), rule_(std::move(rule)) {}

    std::string const& label() const noexcept { return label_; }
    /// Human readable description of the admissible sides ("all", "perfect squares", ...).
    std::string const& admissible_sides() const noexcept { return sides_; }

    bool admissible(int side) const { return side >= 1 && admissible_(side); }

    EntryPermutation build(int side) const {
        if (!admissible(side)) {
            throw InadmissibleSize("scheme '" + label_ + "' is not defined at side " +
                                   std::to_string(side) + " (admissible: " + sides_ + ")");
        }
        EntryPermutation p = rule_(side);
        require_same_side(p.side(), side, "PermutationScheme::build");
        return p;
    }

    PermutationScheme relabeled(std::string label) const {
        PermutationScheme s = *this;
        s.label_ = std::move(label);
        return s;
    }

private:
    std::string label_;
    std::string sides_;
    Predicate admissible_;
    Rule rule_;
};

namespace detail {

inline bool always(int) { return true; }

inline int perfect_square_root(int side) {
    int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(side))));
    while (r * r > side) --r;
    while ((r + 1) * (r + 1) <= side) ++r;
    return r * r == side ? r : 0;
}

inline int wrap(int k, int n) { return ((k - 1) % n + n) % n + 1; }

} // namespace detail

/// A permutation of [n], stored 1-based: line[i-1] is the image of i.
using LinePermutation = std::vector<int>;
/// Rule n -> permutation of [n].
using LineRule = std::function<LinePermutation(int)>;

inline void check_line_permutation(LinePermutation const& p, int n) {
    if (static_cast<int>(p.size()) != n) {
        throw InvalidArgument("line permutation: expected " + std::to_string(n) + " images, got " +
                              std::to_string(p.size()));
    }
    std::vector<bool> hit(n, false);
    for (int i = 0; i < n; ++i) {
        int const v = p[i];
        if (v < 1 || v > n) {
            throw InvalidArgument("line permutation: image " + std::to_string(v) + " of " +
                                  std::to_string(i + 1) + " is outside [" + std::to_string(n) + "]");
        }
        if (hit[v - 1]) {
            throw InvalidArgument("line permutation: image " + std::to_string(v) +
                                  " is hit twice (second time by " + std::to_string(i + 1) + ")");
        }
        hit[v - 1] = true;
    }
}

/// i -> i + k (mod n).
inline LinePermutation cyclic_shift(int n, int k) {
    LinePermutation p(n);
    for (int i = 1; i <= n; ++i) p[i - 1] = detail::wrap(i + k, n);
    return p;
}

/// Fold [2n] onto [n]: the unique p in [n] with k = p (mod n).
inline int phi_fold(int n, int k) {
    if (n < 1 || k < 1 || k > 2 * n) {
        throw InvalidArgument("phi_fold: need 1 <= k <= 2n, got n=" + std::to_string(n) +
                              ", k=" + std::to_string(k));
    }
    return (k - 1) % n + 1;
}

inline PermutationScheme identity_scheme() {
    return {"id", "all", detail::always, [](int n) { return EntryPermutation(n); }};
}

inline PermutationScheme transpose_scheme() {
    return {"t", "all", detail::always, [](int n) { return transpose_perm(n); }};
}

/// (phi (x) psi)(i,j) = (phi(i), psi(j)).
inline EntryPermutation tensor_perm(LinePermutation const& phi, LinePermutation const& psi) {
    int const n = static_cast<int>(phi.size());
    check_line_permutation(phi, n);
    check_line_permutation(psi, n);
    return EntryPermutation::from_rule(n, [&](Cell c) { return Cell{phi[c.row - 1], psi[c.col - 1]}; });
}

inline PermutationScheme tensor_scheme(LineRule phi, LineRule psi, std::string label = "tensor") {
    return {std::move(label), "all", detail::always,
            [phi = std::move(phi), psi = std::move(psi)](int n) { return tensor_perm(phi(n), psi(n)); }};
}

namespace detail {

/// Reorders the four block coordinates of a side-n^2 index pair.
///   (i,j) = ((a-1)n + b, (c-1)n + d)  <->  (a,b,c,d)
template <typename Shuffle>
EntryPermutation block_index_map(int side, Shuffle&& shuffle) {
    int const n = perfect_square_root(side);
    return EntryPermutation::from_rule(side, [&](Cell c) {
        std::array<int, 4> const abcd{(c.row - 1) / n + 1, (c.row - 1) % n + 1, (c.col - 1) / n + 1,
                                      (c.col - 1) % n + 1};
        std::array<int, 4> const r = shuffle(abcd);
        return Cell{(r[0] - 1) * n + r[1], (r[2] - 1) * n + r[3]};
    });
}

inline bool is_perfect_square(int side) { return perfect_square_root(side) > 0; }

} // namespace detail

/// Partial transpose on side n^2: transposes every n x n block in place.
inline PermutationScheme partial_transpose_scheme() {
    return {"gamma", "perfect squares", detail::is_perfect_square, [](int side) {
                return detail::block_index_map(side, [](std::array<int, 4> const& x) {
                    return std::array<int, 4>{x[0], x[3], x[2], x[1]};
                });
            }};
}

/// Mixing map on side n^2: swaps the middle two tensor indices.
inline PermutationScheme mixing_map_scheme() {
    return {"mix", "perfect squares", detail::is_perfect_square, [](int side) {
                return detail::block_index_map(side, [](std::array<int, 4> const& x) {
                    return std::array<int, 4>{x[0], x[2], x[1], x[3]};
                });
            }};
}

/// omega_n(i,j) = (phi_n(i+1), phi_n(j+2)) on [n]^2.
inline EntryPermutation corner_shift(int n) {
    return EntryPermutation::from_rule(n, [n](Cell c) {
        return Cell{detail::wrap(c.row + 1, n), detail::wrap(c.col + 2, n)};
    });
}

/// gamma_n on [2n]^2: keeps the block of each coordinate and swaps the in-block offsets.
inline EntryPermutation block_transpose(int n) {
    return EntryPermutation::from_rule(2 * n, [n](Cell c) {
        int const pi = (c.row - 1) % n + 1;
        int const pj = (c.col - 1) % n + 1;
        return Cell{c.row - pi + pj, c.col - pj + pi};
    });
}

namespace detail {

/// Extends a side-2n permutation to side 2n+1 by fixing every cell in the last row and column.
inline EntryPermutation pad_odd(EntryPermutation const& even, int side) {
    if (even.side() == side) return even;
    return EntryPermutation::from_rule(side, [&](Cell c) {
        if (c.row <= even.side() && c.col <= even.side()) return even(c);
        return c;
    });
}

inline EntryPermutation corner_shift_first(int side) {
    int const n = side / 2;
    EntryPermutation const omega = corner_shift(n);
    EntryPermutation const even = EntryPermutation::from_rule(2 * n, [&](Cell c) {
        if (c.row <= n && c.col <= n) return omega(c);
        return c;
    });
    return pad_odd(even, side);
}

inline EntryPermutation corner_shift_second(int side) {
    int const n = side / 2;
    EntryPermutation const first = corner_shift_first(2 * n);
    return pad_odd(compose(block_transpose(n), first), side);
}

inline bool at_least_two(int side) { return side >= 2; }

} // namespace detail

/**
 * Pair (mu_1, mu_2) on side 2n: mu_1 applies omega_n to the top-left n x n
 * block and fixes every other cell; mu_2 = gamma_n o mu_1. Odd sides 2n+1
 * agree with side 2n on [2n]^2 and fix the last row and column.
 *
 * Both are bijections and satisfy the cross-pair growth condition, yet mu_1 is
 * neither symmetric nor j-small, and the two are not asymptotically free.
 */
inline std::pair<PermutationScheme, PermutationScheme> corner_shift_pair() {
    return {PermutationScheme{"r41a", "sides >= 2", detail::at_least_two, detail::corner_shift_first},
            PermutationScheme{"r41b", "sides >= 2", detail::at_least_two, detail::corner_shift_second}};
}

/// tau_n(i,j) = (phi_n(i+j), j): column j is cyclically shifted by j.
inline PermutationScheme column_shift_scheme() {
    return {"r42", "all", detail::always, [](int n) {
                return EntryPermutation::from_rule(
                    n, [n](Cell c) { return Cell{phi_fold(n, c.row + c.col), c.col}; });
            }};
}

/// Wraps explicit tables, one per side. Each table is validated on construction.
inline PermutationScheme table_scheme(std::string label, std::map<int, EntryPermutation> tables) {
    std::string sides;
    for (auto const& [n, p] : tables) {
        require_same_side(n, p.side(), "table_scheme");
        sides += (sides.empty() ? "" : ",") + std::to_string(n);
    }
    auto shared = std::make_shared<std::map<int, EntryPermutation> const>(std::move(tables));
    return {std::move(label), "{" + sides + "}", [shared](int n) { return shared->count(n) > 0; },
            [shared](int n) { return shared->at(n); }};
}

/**
 * Reads one or more tables in the text format
 *
 *     N <n>
 *     i j -> p q        (n^2 lines, 1-based)
 *
 * Blank lines and lines starting with '#' are ignored. Missing, repeated or
 * colliding pairs are errors.
 */
inline std::map<int, EntryPermutation> parse_permutation_tables(std::istream& in) {
    std::map<int, EntryPermutation> out;
    std::string line;
    int lineno = 0;
    int n = 0;
    std::vector<std::int64_t> image;
    std::vector<int> source_line;
    std::vector<int> target_line;

    auto where = [&](int l) { return "line " + std::to_string(l); };
    auto finish = [&]() {
        if (n == 0) return;
        std::vector<EntryPermutation::Index> table(image.size());
        for (std::size_t f = 0; f < image.size(); ++f) {
            if (image[f] < 0) {
                Cell const c = EntryPermutation::unflat(n, static_cast<EntryPermutation::Index>(f));
                throw InvalidArgument("permutation table N=" + std::to_string(n) + ": pair (" +
                                      std::to_string(c.row) + "," + std::to_string(c.col) +
                                      ") has no image");
            }
            table[f] = static_cast<EntryPermutation::Index>(image[f]);
        }
        if (out.count(n) > 0) {
            throw InvalidArgument("permutation table N=" + std::to_string(n) + " given twice");
        }
        out.emplace(n, EntryPermutation::from_flat(n, std::move(table)));
        n = 0;
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto const first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "N") {
            finish();
            int side = 0;
            if (!(ls >> side) || side < 1) throw InvalidArgument(where(lineno) + ": bad header '" + line + "'");
            n = side;
            std::size_t const area = static_cast<std::size_t>(n) * n;
            image.assign(area, -1);
            source_line.assign(area, 0);
            target_line.assign(area, 0);
            continue;
        }
        if (n == 0) throw InvalidArgument(where(lineno) + ": entry before 'N <n>' header");
        std::istringstream es(line);
        int i = 0, j = 0, p = 0, q = 0;
        std::string arrow;
        if (!(es >> i >> j >> arrow >> p >> q) || arrow != "->") {
            throw InvalidArgument(where(lineno) + ": expected 'i j -> p q', got '" + line + "'");
        }
        for (int v : {i, j, p, q}) {
            if (v < 1 || v > n) {
                throw InvalidArgument(where(lineno) + ": index " + std::to_string(v) + " outside [" +
                                      std::to_string(n) + "]");
            }
        }
        auto const src = EntryPermutation::flat(n, {i, j});
        auto const dst = EntryPermutation::flat(n, {p, q});
        if (image[src] >= 0) {
            throw InvalidArgument(where(lineno) + ": pair (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") already mapped at " + where(source_line[src]));
        }
        if (target_line[dst] > 0) {
            throw InvalidArgument(where(lineno) + ": image (" + std::to_string(p) + "," + std::to_string(q) +
                                  ") collides with " + where(target_line[dst]));
        }
        image[src] = dst;
        source_line[src] = lineno;
        target_line[dst] = lineno;
    }
    finish();
    if (out.empty()) throw InvalidArgument("permutation table: no 'N <n>' section found");
    return out;
}

inline PermutationScheme load_scheme_file(std::string const& path, std::string label = {}) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open permutation file '" + path + "'");
    return table_scheme(label.empty() ? "custom:" + path : std::move(label), parse_permutation_tables(in));
}

/// Parses a line-permutation name: "id", "rev" or "shift<k>" (k may be negative).
inline LineRule line_rule_from_name(std::string const& name) {
    if (name == "id") {
        return [](int n) { return cyclic_shift(n, 0); };
    }
    if (name == "rev") {
        return [](int n) {
            LinePermutation p(n);
            for (int i = 1; i <= n; ++i) p[i - 1] = n + 1 - i;
            return p;
        };
    }
    if (name.rfind("shift", 0) == 0 && name.size() > 5) {
        std::size_t used = 0;
        int k = 0;
        try {
            k = std::stoi(name.substr(5), &used);
        } catch (std::exception const&) {
            used = 0;
        }
        if (used == name.size() - 5) {
            return [k](int n) { return cyclic_shift(n, k); };
        }
    }
    throw InvalidArgument("unknown line permutation '" + name + "' (expected id, rev or shift<k>)");
}

/**
 * Resolves a built-in scheme name:
 *   id, t, gamma, mix, tensor:<phi>/<psi>, r41a (mu1), r41b (mu2), r42 (tau), custom:<path>
 * The returned scheme carries `name` as its label.
 */
inline PermutationScheme scheme_from_name(std::string const& name) {
    if (name == "id") return identity_scheme();
    if (name == "t") return transpose_scheme();
    if (name == "gamma" || name == "Gamma") return partial_transpose_scheme().relabeled(name);
    if (name == "mix" || name == "M") return mixing_map_scheme().relabeled(name);
    if (name == "r41a" || name == "mu1") return corner_shift_pair().first.relabeled(name);
    if (name == "r41b" || name == "mu2") return corner_shift_pair().second.relabeled(name);
    if (name == "r42" || name == "tau") return column_shift_scheme().relabeled(name);
    if (name.rfind("tensor:", 0) == 0) {
        std::string const body = name.substr(7);
        auto const slash = body.find('/');
        if (slash == std::string::npos) {
            throw InvalidArgument("tensor scheme '" + name + "': expected tensor:<phi>/<psi>");
        }
        return tensor_scheme(line_rule_from_name(body.substr(0, slash)),
                             line_rule_from_name(body.substr(slash + 1)), name);
    }
    if (name.rfind("custom:", 0) == 0) return load_scheme_file(name.substr(7), name);
    throw InvalidArgument("unknown scheme '" + name + "'");
}

} // namespace permfree
