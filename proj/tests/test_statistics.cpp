#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "permfree/schemes.hpp"
#include "permfree/statistics.hpp"

using namespace permfree;

namespace {

std::uint64_t naive_reduced(EntryPermutation const& a, EntryPermutation const& b, bool with_column) {
    int const n = a.side();
    std::uint64_t c = 0;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                bool hit = a(i, j) == b(i, k);
                if (with_column) hit = hit || a(i, j) == b(k, j);
                c += hit ? 1 : 0;
            }
    return c;
}

EntryPermutation gamma(int n) { return partial_transpose_scheme().build(n * n); }
EntryPermutation mix(int n) { return mixing_map_scheme().build(n * n); }

} // namespace

TEST(JStatistic, Examples) {
    EXPECT_EQ(j_statistic(EntryPermutation(3), EntryPermutation(3)), 9u);
    // The mixing map gives side (= N^2) here, by brute force as well.
    for (int n : {2, 3, 4}) {
        EXPECT_EQ(j_statistic(mix(n), mix(n)), static_cast<std::uint64_t>(n * n));
        EXPECT_EQ(oracle::j_count(mix(n), mix(n)), static_cast<std::uint64_t>(n * n));
    }
    EXPECT_THROW(j_statistic(EntryPermutation(2), EntryPermutation(3)), SizeMismatch);
}

TEST(JStatistic, PartialTransposeRowMatches) {
    for (int n : {2, 3}) {
        auto const g = gamma(n);
        int const side = n * n;
        std::uint64_t c = 0;
        for (int i = 1; i <= side; ++i)
            for (int j = 1; j <= side; ++j)
                for (int k = 1; k <= side; ++k) c += g(i, j) == Cell{i, k} ? 1 : 0;
        EXPECT_EQ(c, static_cast<std::uint64_t>(n * n * n));
    }
}

TEST(JStatistic, MatchesBruteForce) {
    oracle::Rng rng(10);
    for (int trial = 0; trial < 40; ++trial) {
        int const n = oracle::uniform(rng, 1, 6);
        auto const s = oracle::random_entry_perm(n, rng);
        auto const t = oracle::random_entry_perm(n, rng);
        EXPECT_EQ(j_statistic(s, t), oracle::j_count(s, t));
        EXPECT_EQ(j_statistic(s, t), j_statistic(conjugate_by_t(t), conjugate_by_t(s)));
    }
    for (auto const& s : {gamma(2), mix(2), column_shift_scheme().build(5), corner_shift_pair().first.build(6)}) {
        EXPECT_EQ(j_statistic(s, s), oracle::j_count(s, s));
    }
}

TEST(CStatistic, Examples) {
    oracle::Rng rng(12);
    auto const phi = oracle::random_line_perm(5, rng);
    EXPECT_EQ(c_statistic(phi, phi), 5u);
    EXPECT_EQ(c_statistic({1, 2, 3, 4}, {2, 3, 4, 1}), 0u);
    for (int trial = 0; trial < 10; ++trial) {
        auto const a = oracle::random_line_perm(6, rng);
        auto const b = oracle::random_line_perm(6, rng);
        EXPECT_EQ(c_statistic(a, b), c_statistic(b, a));
        // Fixed points of a^{-1} b.
        std::uint64_t fixed = 0;
        for (int i = 1; i <= 6; ++i) {
            int const bi = b[i - 1];
            int inv = 0;
            for (int x = 1; x <= 6; ++x)
                if (a[x - 1] == bi) inv = x;
            fixed += inv == i ? 1 : 0;
        }
        EXPECT_EQ(c_statistic(a, b), fixed);
    }
    EXPECT_THROW(c_statistic({1}, {1, 2}), SizeMismatch);
}

TEST(TensorIdentities, JEqualsNTimesC) {
    oracle::Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        int const n = oracle::uniform(rng, 1, 6);
        auto const p1 = oracle::random_line_perm(n, rng);
        auto const s1 = oracle::random_line_perm(n, rng);
        auto const p2 = oracle::random_line_perm(n, rng);
        auto const s2 = oracle::random_line_perm(n, rng);
        auto const a = tensor_perm(p1, s1);
        auto const b = tensor_perm(p2, s2);
        EXPECT_EQ(j_statistic(a, b), n * c_statistic(s1, p2));
        EXPECT_EQ(j_statistic(a, compose(transpose_perm(n), b)), static_cast<std::uint64_t>(n));
        EXPECT_EQ(j_statistic(a, compose(b, transpose_perm(n))), static_cast<std::uint64_t>(n));
    }
}

TEST(ConditionII, ExamplesAgainstBruteForce) {
    EXPECT_EQ(condition_ii_count(EntryPermutation(2), EntryPermutation(2)),
              oracle::cross_count(EntryPermutation(2), EntryPermutation(2), true));
    EXPECT_EQ(condition_ii_distinct_count(EntryPermutation(2), EntryPermutation(2)),
              oracle::cross_count(EntryPermutation(2), EntryPermutation(2), false));
    EXPECT_EQ(condition_ii_distinct_count(EntryPermutation(2), EntryPermutation(2)), 6u);
    EXPECT_GE(condition_ii_distinct_count(EntryPermutation(4), gamma(2)), 8u);
    auto const m3 = mix(3);
    EXPECT_GE(condition_ii_distinct_count(m3, m3), 81u);
}

TEST(ConditionII, CountsAgreeWithBruteForce) {
    oracle::Rng rng(14);
    for (int trial = 0; trial < 40; ++trial) {
        int const n = oracle::uniform(rng, 1, 5);
        auto const a = oracle::random_entry_perm(n, rng);
        auto const b = oracle::random_entry_perm(n, rng);
        auto const multi = condition_ii_count(a, b);
        auto const once = condition_ii_distinct_count(a, b);
        EXPECT_EQ(multi, oracle::cross_count(a, b, true));
        EXPECT_EQ(once, oracle::cross_count(a, b, false));
        EXPECT_LE(once, multi);
        EXPECT_LE(multi, 4 * once);
    }
}

TEST(ConditionII, HalfSumOfEightJTerms) {
    oracle::Rng rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        int const n = oracle::uniform(rng, 2, 4);
        auto const s = oracle::random_entry_perm(n, rng);
        auto const m = oracle::random_entry_perm(n, rng);
        auto const d = condition_ii_decomposition(s, m);
        EXPECT_EQ(d.sum() % 2, 0u);
        EXPECT_EQ(d.half_sum(), condition_ii_count(s, m));
    }
    EXPECT_EQ(condition_ii_decomposition(EntryPermutation(2), EntryPermutation(2)).half_sum(),
              condition_ii_count(EntryPermutation(2), EntryPermutation(2)));
    EXPECT_EQ(condition_ii_decomposition(gamma(2), mix(2)).half_sum(), condition_ii_count(gamma(2), mix(2)));
    auto const t = transpose_perm(3);
    auto const d = condition_ii_decomposition(t, t);
    for (auto v : d.terms) EXPECT_EQ(v, d.terms[0]);
    EXPECT_EQ(d.half_sum(), condition_ii_count(t, t));
}

TEST(ConditionII, ReducedCases) {
    EXPECT_EQ(reduced_condition_ii_count(EntryPermutation(3), EntryPermutation(3), ReducedCase::row_only), 9u);
    EXPECT_EQ(reduced_condition_ii_count(mix(2), EntryPermutation(4), ReducedCase::row_or_column),
              naive_reduced(mix(2), EntryPermutation(4), true));
    EXPECT_EQ(reduced_condition_ii_count(gamma(2), mix(2), ReducedCase::row_only),
              naive_reduced(gamma(2), mix(2), false));
    oracle::Rng rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        int const n = oracle::uniform(rng, 1, 5);
        auto const a = oracle::random_entry_perm(n, rng);
        auto const b = oracle::random_entry_perm(n, rng);
        EXPECT_EQ(reduced_condition_ii_count(a, b, ReducedCase::row_only), naive_reduced(a, b, false));
        EXPECT_EQ(reduced_condition_ii_count(a, b, ReducedCase::row_or_column), naive_reduced(a, b, true));
    }
}

TEST(Growth, FitAndVerdicts) {
    std::vector<GridPoint> cubic{{2, 8}, {4, 64}, {8, 512}};
    EXPECT_NEAR(fit_exponent(cubic), 3.0, 1e-12);
    double e = 0;
    EXPECT_EQ(assess_growth({{4, 4}, {9, 9}, {16, 16}}, 2.0, e), Verdict::satisfies);
    EXPECT_NEAR(e, 1.0, 1e-12);
    EXPECT_EQ(assess_growth({{8, 64}, {16, 256}, {32, 1024}}, 2.0, e), Verdict::violates);
    // Quadratic slope but counts far below side^2 / 4.
    EXPECT_EQ(assess_growth({{8, 1}, {16, 4}, {32, 16}}, 2.0, e), Verdict::inconclusive);
    EXPECT_EQ(assess_growth({{8, 0}, {16, 0}, {32, 0}}, 2.0, e), Verdict::satisfies);
    EXPECT_TRUE(std::isinf(e) && e < 0);
}

TEST(Certify, TrioSatisfies) {
    std::vector<DeclaredScheme> family{{identity_scheme(), DeclaredKind::symmetric},
                                       {partial_transpose_scheme(), DeclaredKind::symmetric},
                                       {mixing_map_scheme(), DeclaredKind::j_small}};
    auto const reports = certify_family(family, {4, 9, 16});
    EXPECT_EQ(reports.size(), 6u);
    EXPECT_TRUE(all_satisfied(reports));
    EXPECT_THROW(certify_family(family, {4, 9}), InvalidArgument);
    EXPECT_THROW(certify_family(family, {4, 8, 16}), InadmissibleSize);
}

TEST(Certify, ColumnShiftViolatesCrossCondition) {
    std::vector<DeclaredScheme> family{{identity_scheme(), DeclaredKind::symmetric},
                                       {column_shift_scheme(), DeclaredKind::j_small}};
    auto const reports = certify_family(family, {8, 16, 32});
    ASSERT_EQ(reports.size(), 3u);
    EXPECT_EQ(reports[0].verdict, Verdict::satisfies);
    EXPECT_EQ(reports[1].verdict, Verdict::satisfies);
    EXPECT_EQ(reports[2].kind, "condition-ii");
    EXPECT_EQ(reports[2].verdict, Verdict::violates);
    for (auto const& g : reports[2].grid) EXPECT_GE(g.count, static_cast<std::uint64_t>(g.side * g.side));
}

TEST(Certify, CornerShiftPair) {
    auto const [a, b] = corner_shift_pair();
    auto const reports = certify_family({{a, DeclaredKind::j_small}, {b, DeclaredKind::j_small}}, {8, 16, 32});
    EXPECT_EQ(reports[0].verdict, Verdict::violates);
    EXPECT_EQ(reports[1].verdict, Verdict::violates);
    EXPECT_EQ(reports[2].verdict, Verdict::satisfies);
    EXPECT_FALSE(is_symmetric(a.build(8)));
    // Declared symmetric but is not: reported, not thrown.
    auto const sym = certify_family({{a, DeclaredKind::symmetric}, {b, DeclaredKind::j_small}}, {8, 16, 32});
    EXPECT_EQ(sym[0].kind, "symmetric");
    EXPECT_EQ(sym[0].verdict, Verdict::violates);
}
