#include <gtest/gtest.h>

#include <random>

#include <ncint/freealg.hpp>

#include "support.hpp"

using namespace ncint;

namespace {
const NCPoly u = NCPoly::u();
const NCPoly u1 = NCPoly::u(1);
const NCPoly u2 = NCPoly::u(2);
}  // namespace

TEST(NCPoly, WordsDoNotCommute) {
    EXPECT_NE(u * u1, u1 * u);
    EXPECT_FALSE(commutator(u, u1).is_zero());
    EXPECT_TRUE(commutator(u, u).is_zero());
    EXPECT_EQ((u * u1).size(), 1u);
}

TEST(NCPoly, CanonicalCancellation) {
    NCPoly p = u * u1 * Scalar(3) + u1 * u - u * u1 * Scalar(3);
    EXPECT_EQ(p, u1 * u);
    EXPECT_TRUE((p - u1 * u).is_zero());
}

TEST(NCPoly, LeibnizDerivation) {
    EXPECT_EQ(d_x(u * u), u1 * u + u * u1);
    EXPECT_EQ(d_x(u * u1), u1 * u1 + u * u2);
    EXPECT_EQ(d_x(NCPoly(Scalar(7))), NCPoly());
    EXPECT_EQ(d_x(u, 3), NCPoly::u(3));
}

TEST(NCPoly, RingAxiomsOnRandomPolys) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        NCPoly a = testing_support::rand_ncpoly(rng), b = testing_support::rand_ncpoly(rng),
               c = testing_support::rand_ncpoly(rng);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ(d_x(a * b), d_x(a) * b + a * d_x(b));
    }
}

TEST(NCPoly, PrintsCommutatorsAndPrimes) {
    NCPoly a = NCPoly::uk(2), b = NCPoly::uk(3);
    NCPoly p = NCPoly::uk(2, 2) + NCPoly::uk(3, 1) * Scalar(2) + commutator(a, b) * Scalar(2);
    EXPECT_EQ(p.str(), "u2'' + 2*u3' + 2*[u2,u3]");
    EXPECT_EQ(NCPoly::u(5).str(), "u^(5)");
    EXPECT_EQ(NCPoly().str(), "0");
    EXPECT_NE(p.latex().find("[u_{2},u_{3}]_\\star"), std::string::npos) << p.latex();
}

TEST(NCPoly, JsonRoundTrip) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 50; ++t) {
        NCPoly a = testing_support::rand_ncpoly(rng, 4);
        EXPECT_EQ(NCPoly::from_json(a.to_json()), a);
    }
}

TEST(Substitution, FieldsIntoPolys) {
    NCPoly p = u1 * u + NCPoly::u(3);
    NCPoly sub = substitute_fields(p, {{DiffGen::kU, u * u}});
    NCPoly uu = u * u;
    EXPECT_EQ(sub, d_x(uu) * uu + d_x(uu, 3));
}

TEST(Substitution, DerivativeConsistencyIsChecked) {
    Substitution<NCPoly> s({});
    s.set(DiffGen::u(), u * u);
    s.set(DiffGen::u(1), u);
    EXPECT_THROW(s(NCPoly::u(1)), derivation_mismatch);
    Substitution<NCPoly> empty({});
    EXPECT_THROW(empty(u), missing_generator);
}

TEST(Derivation, ApplyToUdot) {
    NCPoly p = u * u1;
    NCPoly r = apply_derivation(p, [](int f) -> std::optional<NCPoly> {
        if (f == DiffGen::kU) return NCPoly::udot();
        return std::nullopt;
    });
    EXPECT_EQ(r, NCPoly::udot() * u1 + u * NCPoly::udot(1));
}
