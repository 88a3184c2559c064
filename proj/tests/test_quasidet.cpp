#include <gtest/gtest.h>

#include <random>

#include <ncint/quasidet.hpp>

#include "support.hpp"

using namespace ncint;

namespace {

const ThetaConfig kXY(0, 1, 2);

NCMatrix<StarSeries> star_matrix(std::mt19937_64& rng, std::size_t n) {
    std::vector<StarSeries> s;
    for (auto& p : testing_support::rand_linear_entries(rng, n)) s.emplace_back(kXY, ExpRational(p));
    return NCMatrix<StarSeries>(n, s, kXY);
}

NCMatrix<Scalar> scalar_matrix(const std::vector<std::vector<Scalar>>& a) {
    NCMatrix<Scalar> m(a.size(), {});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) m(i, j) = a[i][j];
    return m;
}

}  // namespace

TEST(Quasidet, OneByOne) {
    NCMatrix<Scalar> a(1, {Scalar(3)}, {});
    EXPECT_EQ(quasidet(a, 0, 0), Scalar(3));
}

TEST(Quasidet, TwoByTwoFormula) {
    Scalar a(2), b(3), c(5), d(7);
    NCMatrix<Scalar> A(2, {a, b, c, d}, {});
    EXPECT_EQ(quasidet(A, 0, 0), a - b * d.inv() * c);
    EXPECT_EQ(quasidet(A, 1, 0), c - d * b.inv() * a);
}

TEST(Quasidet, CommutativeLimitAgainstPermutationDeterminant) {
    std::mt19937_64 rng(71);
    int checked = 0;
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 1 + t % 5;
        std::vector<std::vector<Scalar>> a(n, std::vector<Scalar>(n));
        for (auto& row : a)
            for (auto& e : row) e = testing_support::rand_scalar(rng);
        NCMatrix<Scalar> A = scalar_matrix(a);
        const std::size_t i = t % n, j = (t / 5) % n;
        Scalar minor = n == 1 ? Scalar(1) : testing_support::permutation_det(testing_support::drop(a, i, j));
        if (minor.is_zero()) continue;
        Scalar want = testing_support::permutation_det(a) * minor.inv();
        if ((i + j) % 2) want = -want;
        try {
            EXPECT_EQ(quasidet(A, i, j), want);
            ++checked;
        } catch (const singular_block&) {
        }
    }
    EXPECT_GT(checked, 30);
}

TEST(Quasidet, LibraryLimitCheckAgrees) {
    NCMatrix<Scalar> A(3, {Scalar(2), Scalar(1), Scalar(-1), Scalar(1), Scalar(3), Scalar(1), Scalar(3), Scalar(1),
                           Scalar(4)},
                       {});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_TRUE(commutative_limit_check(A, i, j).pass) << i << j;
}

TEST(Quasidet, MatchesInverseEntryForStarMatrices) {
    std::mt19937_64 rng(73);
    for (std::size_t n = 2; n <= 3; ++n)
        for (int t = 0; t < 4; ++t) {
            NCMatrix<StarSeries> A = star_matrix(rng, n);
            try {
                StarSeries q = quasidet(A, 0, n - 1);
                EXPECT_TRUE((q - quasidet_via_inverse(A, 0, n - 1)).is_zero());
            } catch (const singular_block&) {
            }
        }
}

TEST(Quasidet, InverseIsTwoSided) {
    std::mt19937_64 rng(79);
    NCMatrix<StarSeries> A = star_matrix(rng, 3);
    NCMatrix<StarSeries> B = invert(A);
    EXPECT_TRUE((A * B).is_identity());
    EXPECT_TRUE((B * A).is_identity());
}

TEST(Quasidet, SingularBlockNamesTheMinor) {
    NCMatrix<Scalar> A(2, {Scalar(1), Scalar(1), Scalar(1), Scalar(0)}, {});
    try {
        quasidet(A, 0, 0);
        FAIL() << "expected singular_block";
    } catch (const singular_block& e) {
        EXPECT_NE(std::string(e.what()).find("|A(rows 2; cols 2)|_22"), std::string::npos) << e.what();
    }
    NCMatrix<Scalar> Z(2, {Scalar(0), Scalar(1), Scalar(1), Scalar(0)}, {});
    EXPECT_THROW(invert(Z), singular_block);
}

TEST(QuasidetFormula, ThreeByThreeExpansion) {
    QuasidetFormula f;
    std::string s = f.expansion(3, 0, 0);
    EXPECT_EQ(s.substr(0, 4), "a11 ");
    // the a13 ... a21 term boxes a23
    EXPECT_NE(s.find("a13*|a22 [a23]; a32 a33|^-1*a21"), std::string::npos) << s;
    EXPECT_NE(s.find("a12*|[a22] a23; a32 a33|^-1*a21"), std::string::npos) << s;
    EXPECT_EQ(f.expansion(1, 0, 0), "a11");
    EXPECT_EQ(f.expansion(2, 0, 0), "a11 - a12*a22^-1*a21");
}
