#include <gtest/gtest.h>

#include <cmath>

#include "vrd/protocols.hpp"

using namespace vrd;

namespace {

/// Closed-form distilled state: (4 rho_w - (3 - 3 xi) rho_eta) / (1 + 3 xi), for xi >= 1/3.
ComplexMatrix hand_distilled(double xi) {
    return (4.0 / (1.0 + 3.0 * xi)) * werner(WernerParams{xi}).matrix() -
           ((3.0 - 3.0 * xi) / (1.0 + 3.0 * xi)) * eta_state().matrix();
}

}  // namespace

TEST(CoherenceVrd, CostAndWeights) {
    const auto qc = coherence_vrd();
    EXPECT_EQ(qc.cost(), 3.0);
    EXPECT_EQ(qc.branches().size(), 12u);
    EXPECT_NEAR(qc.positive_weight(), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(qc.negative_weight(), 1.0 / 3.0, 1e-15);
    for (const auto& b : qc.branches())
        EXPECT_NEAR(b.probability, b.sign == Sign::plus ? 1.0 / 9.0 : 1.0 / 18.0, 1e-16);
}

TEST(CoherenceVrd, OutputIsMcsAndExactlyPsd) {
    const ComplexMatrix out = quasi_apply_exact(coherence_vrd(), DensityOperator(psi_plus_1()));
    EXPECT_LE(out.max_abs_diff(mcs(4).projector()), 1e-12);
    const auto e = hermitian_eig(out);
    EXPECT_NEAR(e.values[0], 1.0, 1e-10);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(e.values[k], 0.0, 1e-10);
}

TEST(EntanglementVrd, CleanInputNeedsNothing) {
    const auto qc = entanglement_vrd(1.0);
    EXPECT_EQ(qc.cost(), 1.0);
    ASSERT_EQ(qc.branches().size(), 1u);
    EXPECT_EQ(qc.branches()[0].sign, Sign::plus);
    EXPECT_EQ(qc.branches()[0].probability, 1.0);
    EXPECT_EQ(qc.branches()[0].channel.apply_linear(ComplexMatrix::identity(4)), ComplexMatrix::identity(4));
}

TEST(EntanglementVrd, AtThreshold) {
    const auto qc = entanglement_vrd(1.0 / 3.0);
    EXPECT_NEAR(qc.cost(), 3.0, 1e-12);
    EXPECT_NEAR(qc.positive_weight(), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(qc.negative_weight(), 1.0 / 3.0, 1e-12);
}

TEST(EntanglementVrd, ClampedBelowThreshold) {
    for (double xi : {0.0, 0.1, 0.2, 0.3}) {
        const auto qc = entanglement_vrd(xi);
        EXPECT_NEAR(qc.cost(), 3.0, 1e-12);
        // positive branch prepares the xi = 1/3 Werner state whatever the input
        const auto out = qc.branches()[0].channel.apply(werner(WernerParams{xi}));
        EXPECT_LE(out.matrix().max_abs_diff(werner(WernerParams{1.0 / 3.0}).matrix()), 1e-15);
    }
    EXPECT_THROW(entanglement_vrd(-0.1), std::invalid_argument);
    EXPECT_THROW(entanglement_vrd(1.1), std::invalid_argument);
}

TEST(EntanglementVrd, DistillsSingletOnGrid) {
    const ComplexMatrix singlet = bell(BellLabel::PsiMinus).projector();
    for (int i = 0; i <= 20; ++i) {
        const double xi = i / 20.0;
        const double xe = std::max(xi, 1.0 / 3.0);
        EXPECT_LE(quasi_apply_exact(entanglement_vrd(xi), werner(WernerParams{xe})).max_abs_diff(singlet), 1e-12) << xi;
        // callers may pass their actual state below the threshold
        EXPECT_LE(quasi_apply_exact(entanglement_vrd(xi), werner(WernerParams{xi})).max_abs_diff(singlet), 1e-12) << xi;
        EXPECT_LE(hand_distilled(xe).max_abs_diff(singlet), 1e-12);
    }
}

TEST(EntanglementVrd, BranchWeightsMatchClosedForm) {
    for (double xi : {0.4, 0.5, 0.6, 0.8, 0.95}) {
        const auto qc = entanglement_vrd(xi);
        EXPECT_NEAR(qc.positive_weight(), 4.0 / (7.0 - 3.0 * xi), 1e-15);
        EXPECT_NEAR(qc.negative_weight(), (3.0 - 3.0 * xi) / (7.0 - 3.0 * xi), 1e-15);
        EXPECT_NEAR(qc.cost(), (7.0 - 3.0 * xi) / (1.0 + 3.0 * xi), 1e-15);
    }
}

TEST(VrdCost, Examples) {
    EXPECT_EQ(vrd_cost(1.0), 1.0);
    EXPECT_NEAR(vrd_cost(0.6), 5.2 / 2.8, 1e-15);
    EXPECT_NEAR(vrd_cost(0.6), 1.857142857143, 1e-12);
    EXPECT_EQ(vrd_cost(0.2), 3.0);
    EXPECT_THROW(vrd_cost(2.0), std::invalid_argument);
}

TEST(VrdCost, NonIncreasingAboveThreshold) {
    double prev = vrd_cost(1.0 / 3.0);
    for (int i = 1; i <= 200; ++i) {
        const double xi = 1.0 / 3.0 + (2.0 / 3.0) * i / 200.0;
        const double c = vrd_cost(std::min(xi, 1.0));
        EXPECT_LE(c, prev + 1e-15);
        prev = c;
    }
}

TEST(OneShotRate, Examples) {
    EXPECT_EQ(one_shot_rate(1.0), 1.0);
    EXPECT_NEAR(one_shot_rate(3.0), 1.0 / 9.0, 1e-16);
    EXPECT_EQ(one_shot_rate(vrd_cost(1.0)), 1.0);
    EXPECT_EQ(one_shot_rate(2.0, 4), 1.0);
    EXPECT_THROW(one_shot_rate(0.5), std::invalid_argument);
    EXPECT_THROW(one_shot_rate(2.0, 0), std::invalid_argument);
}

TEST(ProtocolSpec, Targets) {
    const auto c = ProtocolSpec::coherence();
    EXPECT_EQ(c.name, ProtocolName::coherence_2to4);
    EXPECT_EQ(c.cost(), 3.0);
    EXPECT_NEAR(c.target.overlap(mcs_ququart()), 1.0, 1e-15);
    const auto e = ProtocolSpec::entanglement(0.6);
    EXPECT_NEAR(e.cost(), vrd_cost(0.6), 1e-15);
    EXPECT_NEAR(e.target.overlap(bell(BellLabel::PsiMinus)), 1.0, 1e-15);
}
