#include <gtest/gtest.h>

#include <ncint/asdym.hpp>
#include <ncint/hierarchy.hpp>

using namespace ncint;

TEST(Asdym, AnsatzEntries) {
    GaugeFields g = GaugeFields::kdv_ansatz();
    EXPECT_TRUE(g.A_zt(1, 0).is_one());
    EXPECT_EQ(g.A_w(0, 1), NCPoly(-1));
    EXPECT_EQ(g.A_wt(1, 0), NCPoly::u() * Scalar(Rational(1, 2)));
}

TEST(Asdym, ReductionRules) {
    const NCPoly u = NCPoly::u();
    EXPECT_EQ(ReductionRules::d_z(u * u), NCPoly::udot() * u + u * NCPoly::udot());
    EXPECT_EQ(ReductionRules::d_z(NCPoly::u(2)), NCPoly::udot(2));
    EXPECT_TRUE(ReductionRules::d_zt(u).is_zero());
    EXPECT_EQ(ReductionRules::d_w(u), NCPoly::u(1));
}

TEST(Asdym, ReducesToNcKdV) {
    ReductionReport r = check_kdv_reduction();
    EXPECT_TRUE(r.reduced());
    EXPECT_EQ(r.evolution, kdv_flow(3).rhs);
    EXPECT_EQ(r.udot_coeff, Scalar(-1));
    EXPECT_EQ(r.carrier, "F_wz");
    EXPECT_EQ(r.row, 1u);
    EXPECT_EQ(r.col, 0u);
    ASSERT_EQ(r.zero_residuals.size(), 2u);
    EXPECT_EQ(r.zero_residuals[0], "F_w~z~");
    EXPECT_EQ(r.zero_residuals[1], "F_zz~ - F_ww~");
}

TEST(Asdym, ResidualEntryIsKdvEquation) {
    AsdymResiduals res = asdym_residuals(GaugeFields::kdv_ansatz());
    EXPECT_EQ(res.F_wz(1, 0), kdv_flow(3).rhs - NCPoly::udot());
    EXPECT_TRUE(res.F_wz(0, 0).is_zero());
    EXPECT_TRUE(res.F_wz(0, 1).is_zero());
    EXPECT_TRUE(res.F_wz(1, 1).is_zero());
}

TEST(Asdym, PerturbedAnsatzDoesNotReduce) {
    ReductionReport r = check_kdv_reduction(GaugeFields::kdv_ansatz(Scalar(Rational(1, 4))));
    EXPECT_FALSE(r.reduced());
    EXPECT_NE(r.to_json().dump().find("closes"), std::string::npos);
}
