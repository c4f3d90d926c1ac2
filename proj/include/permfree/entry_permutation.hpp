#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "permfree/error.hpp"

namespace permfree {

/// A matrix position, 1-based on both coordinates.
struct Cell {
    int row = 1;
    int col = 1;

    friend constexpr bool operator==(Cell, Cell) = default;
    friend constexpr auto operator<=>(Cell, Cell) = default;
};

inline Cell transposed(Cell c) { return {c.col, c.row}; }

/**
 * A bijection of [n] x [n], i.e. a permutation of matrix entries.
 *
 * The table is dense: one image per cell, stored 0-based in row-major order.
 * Every public accessor speaks 1-based cells. Values are immutable once built.
 */
class EntryPermutation {
public:
    using Index = std::uint32_t;

    /// Identity on [n]^2.
    explicit EntryPermutation(int n = 1) : n_(n), image_(checked_area(n)) {
        for (Index f = 0; f < image_.size(); ++f) image_[f] = f;
    }

    /// Wraps a row-major 0-based image table; throws if it is not a bijection.
    static EntryPermutation from_flat(int n, std::vector<Index> image) {
        std::size_t const area = checked_area(n);
        if (image.size() != area) {
            throw InvalidArgument("entry permutation: table has " + std::to_string(image.size()) +
                                  " entries, expected " + std::to_string(area));
        }
        std::vector<std::int64_t> seen(area, -1);
        for (std::size_t f = 0; f < area; ++f) {
            Index const g = image[f];
            if (g >= area) {
                throw InvalidArgument("entry permutation: image of " + cell_string(n, f) +
                                      " lies outside [" + std::to_string(n) + "]^2");
            }
            if (seen[g] >= 0) {
                throw InvalidArgument("entry permutation: " + cell_string(n, seen[g]) + " and " +
                                      cell_string(n, f) + " both map to " + cell_string(n, g));
            }
            seen[g] = static_cast<std::int64_t>(f);
        }
        EntryPermutation p;
        p.n_ = n;
        p.image_ = std::move(image);
        return p;
    }

    /// Builds from a rule Cell -> Cell evaluated on every cell.
    template <typename Rule>
    static EntryPermutation from_rule(int n, Rule&& rule) {
        std::vector<Index> image(checked_area(n));
        for (int i = 1; i <= n; ++i) {
            for (int j = 1; j <= n; ++j) {
                Cell const c = rule(Cell{i, j});
                if (c.row < 1 || c.row > n || c.col < 1 || c.col > n) {
                    throw InvalidArgument("entry permutation: rule maps (" + std::to_string(i) + "," +
                                          std::to_string(j) + ") outside [" + std::to_string(n) +
                                          "]^2");
                }
                image[flat(n, {i, j})] = flat(n, c);
            }
        }
        return from_flat(n, std::move(image));
    }

    int side() const noexcept { return n_; }
    std::size_t area() const noexcept { return image_.size(); }

    Cell operator()(Cell c) const { return unflat(n_, image_[flat(n_, c)]); }
    Cell operator()(int i, int j) const { return (*this)(Cell{i, j}); }

    /// Row-major 0-based image table.
    std::span<Index const> flat_image() const noexcept { return image_; }

    EntryPermutation inverse() const {
        std::vector<Index> inv(image_.size());
        for (Index f = 0; f < image_.size(); ++f) inv[image_[f]] = f;
        EntryPermutation p;
        p.n_ = n_;
        p.image_ = std::move(inv);
        return p;
    }

    bool is_identity() const {
        for (Index f = 0; f < image_.size(); ++f) {
            if (image_[f] != f) return false;
        }
        return true;
    }

    friend bool operator==(EntryPermutation const&, EntryPermutation const&) = default;

    static Index flat(int n, Cell c) {
        return static_cast<Index>(c.row - 1) * static_cast<Index>(n) + static_cast<Index>(c.col - 1);
    }
    static Cell unflat(int n, Index f) {
        return {static_cast<int>(f / static_cast<Index>(n)) + 1,
                static_cast<int>(f % static_cast<Index>(n)) + 1};
    }

private:
    static std::size_t checked_area(int n) {
        if (n < 1 || n > 46340) {
            throw InvalidArgument("entry permutation: side must lie in [1, 46340], got " +
                                  std::to_string(n));
        }
        return static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    }

    static std::string cell_string(int n, std::size_t f) {
        Cell const c = unflat(n, static_cast<Index>(f));
        return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
    }

    int n_ = 1;
    std::vector<Index> image_{0};
};

/// The transpose t(i,j) = (j,i).
inline EntryPermutation transpose_perm(int n) {
    return EntryPermutation::from_rule(n, [](Cell c) { return transposed(c); });
}

/// (a o b)(c) = a(b(c)).
inline EntryPermutation compose(EntryPermutation const& a, EntryPermutation const& b) {
    require_same_side(a.side(), b.side(), "compose");
    auto const ai = a.flat_image();
    auto const bi = b.flat_image();
    std::vector<EntryPermutation::Index> image(ai.size());
    for (std::size_t f = 0; f < image.size(); ++f) image[f] = ai[bi[f]];
    return EntryPermutation::from_flat(a.side(), std::move(image));
}

/// t o sigma o t. Realizes the adjoint: (G^sigma)^* = G^{t o sigma o t} for Hermitian G.
inline EntryPermutation conjugate_by_t(EntryPermutation const& sigma) {
    int const n = sigma.side();
    return EntryPermutation::from_rule(n, [&](Cell c) { return transposed(sigma(transposed(c))); });
}

/// True iff t o sigma o t = sigma.
inline bool is_symmetric(EntryPermutation const& sigma) {
    int const n = sigma.side();
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            if (sigma(j, i) != transposed(sigma(i, j))) return false;
        }
    }
    return true;
}

/// Number of cells (i,j) with sigma(j,i) != t(sigma(i,j)); zero iff sigma is symmetric.
inline std::uint64_t asymmetry_count(EntryPermutation const& sigma) {
    int const n = sigma.side();
    std::uint64_t bad = 0;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            if (sigma(j, i) != transposed(sigma(i, j))) ++bad;
        }
    }
    return bad;
}

/// [A^sigma]_{ij} = [A]_{sigma(i,j)}.
template <typename Derived>
auto apply_to_matrix(Eigen::MatrixBase<Derived> const& a, EntryPermutation const& sigma)
    -> Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
    if (a.rows() != a.cols()) throw SizeMismatch("apply_to_matrix: matrix is not square");
    require_same_side(static_cast<int>(a.rows()), sigma.side(), "apply_to_matrix");
    int const n = sigma.side();
    auto const img = sigma.flat_image();
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            auto const g = img[static_cast<std::size_t>(i) * n + j];
            out(i, j) = a(g / n, g % n);
        }
    }
    return out;
}

} // namespace permfree
