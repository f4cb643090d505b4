#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "focus/geneig.hpp"
#include "focus/scatter.hpp"
#include "test_util.hpp"

namespace {

Eigen::MatrixXd random_spd(std::mt19937_64& gen, Eigen::Index d, Eigen::Index rank) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd g(d, rank);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = z(gen);
    return g * g.transpose();
}

}  // namespace

TEST(Geneig, DiagonalPencilHasKnownSpectrum) {
    const Eigen::Vector3d a(2.0, 1.0, 0.0), b(4.0, 1.0, 3.0);
    const auto s = focus::solve(a.asDiagonal().toDenseMatrix(), b.asDiagonal().toDenseMatrix(), 0.0);
    EXPECT_NEAR(s.eigenvalues[0], 1.0, 1e-14);
    EXPECT_NEAR(s.eigenvalues[1], 0.5, 1e-14);
    EXPECT_NEAR(s.eigenvalues[2], 0.0, 1e-14);
    EXPECT_NEAR(s.eigenvectors(1, 0), 1.0, 1e-14);
    EXPECT_NEAR(s.eigenvectors(0, 1), 1.0, 1e-14);
    EXPECT_NEAR(s.eigenvectors(2, 2), 1.0, 1e-14);
}

TEST(Geneig, MatchesPencilRootOracle) {
    std::mt19937_64 gen(31);
    for (Eigen::Index d = 1; d <= 8; ++d) {
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::MatrixXd cw = random_spd(gen, d, d + 2);
            const Eigen::MatrixXd ca = cw + random_spd(gen, d, d);
            const auto s = focus::solve(cw, ca, 0.0);
            auto roots = focus::test::pencil_roots(cw, ca);
            ASSERT_EQ(static_cast<Eigen::Index>(roots.size()), d) << "d=" << d << " trial=" << trial;
            std::sort(roots.rbegin(), roots.rend());
            for (Eigen::Index i = 0; i < d; ++i) EXPECT_NEAR(s.eigenvalues[i], roots[static_cast<std::size_t>(i)], 1e-8);
        }
    }
}

TEST(Geneig, ResidualNormalizationAndSign) {
    std::mt19937_64 gen(2);
    const Eigen::MatrixXd cw = random_spd(gen, 6, 3);
    const Eigen::MatrixXd ca = cw + random_spd(gen, 6, 2);
    const double eps = focus::default_epsilon(ca);
    EXPECT_GT(eps, 0.0);
    const auto s = focus::solve(cw, ca, eps);
    const double scale = cw.norm() + ca.norm();
    EXPECT_LE(focus::max_residual(s, cw, ca), 1e-8 * scale);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        EXPECT_NEAR(s.eigenvectors.col(i).norm(), 1.0, 1e-12);
        const auto k = focus::detail::argmax_abs(s.eigenvectors.col(i));
        EXPECT_GT(s.eigenvectors(k, i), 0.0);
        EXPECT_GE(s.eigenvalues[i], 0.0);
        EXPECT_LT(s.eigenvalues[i], 1.0);
        if (i > 0) {
            EXPECT_GE(s.eigenvalues[i - 1], s.eigenvalues[i]);
        }
    }
    // The cw rank is 3, so three eigenvalues are exactly zero after clamping, and
    // the rest sit in (0, 1) because eps > 0.
    EXPECT_EQ(std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(), [](double v) { return v <= 1e-9; }), 3);
}

TEST(Geneig, TiesOrderedByLeadingIndex) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
    const Eigen::MatrixXd b = 2.0 * Eigen::MatrixXd::Identity(4, 4);
    const auto s = focus::solve(a, b, 0.0);
    for (Eigen::Index i = 0; i < 4; ++i) {
        EXPECT_NEAR(s.eigenvalues[i], 0.5, 1e-15);
        EXPECT_EQ(focus::detail::argmax_abs(s.eigenvectors.col(i)), i);
    }
}

TEST(Geneig, IndefiniteDenominatorReportsPivot) {
    Eigen::MatrixXd ca = Eigen::MatrixXd::Identity(3, 3);
    ca(1, 1) = 0.0;
    try {
        focus::solve(Eigen::MatrixXd::Zero(3, 3), ca, 0.0);
        FAIL() << "expected IndefiniteDenominatorError";
    } catch (const focus::IndefiniteDenominatorError& e) {
        EXPECT_EQ(e.pivot_index(), 1u);
        EXPECT_EQ(e.exit_code(), focus::ExitCode::IndefiniteDenominator);
    }
    // The cushion makes the same pencil solvable.
    EXPECT_NO_THROW(focus::solve(Eigen::MatrixXd::Zero(3, 3), ca, 1e-6));
}

TEST(Geneig, InputValidation) {
    const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
    EXPECT_THROW(focus::solve(i2, Eigen::MatrixXd::Identity(3, 3), 0.0), focus::DimensionError);
    EXPECT_THROW(focus::solve(Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0), 0.0), focus::DimensionError);
    EXPECT_THROW(focus::solve(i2, i2, -1.0), focus::ConfigError);
    Eigen::MatrixXd bad = i2;
    bad(0, 1) = std::nan("");
    EXPECT_THROW(focus::solve(bad, i2, 0.0), focus::NumericInputError);
}

TEST(Geneig, WithinOnlyDirectionsApproachOne) {
    // Direction 0 varies only inside sets, direction 1 only between them.
    focus::SetCollection c;
    for (int m = 0; m < 4; ++m) {
        Eigen::MatrixXd x(2, 2);
        x << -1.0, 3.0 * m, 1.0, 3.0 * m;
        c.sets.push_back(x);
    }
    const auto sum = focus::summarize(focus::SufficientStats::from_sets(c), focus::WeightingScheme::uniform());
    const double eps = focus::default_epsilon(sum.c_all);
    const auto s = focus::solve(sum.c_within, sum.c_all, eps);
    EXPECT_GT(s.eigenvalues[0], 0.999);
    EXPECT_NEAR(std::abs(s.eigenvectors(0, 0)), 1.0, 1e-9);
    EXPECT_LE(s.eigenvalues[1], 1e-9);
}

TEST(Partition, ClassifiesAndValidates) {
    const Eigen::Vector4d ev(0.9995, 0.5, 1e-12, 0.0);
    const auto p = focus::partition(ev, 0.999, 1e-9);
    ASSERT_EQ(p.labels.size(), 4u);
    EXPECT_EQ(p.labels[0], focus::DirectionLabel::RemoveDistractor);
    EXPECT_EQ(p.labels[1], focus::DirectionLabel::Ambiguous);
    EXPECT_EQ(p.count(focus::DirectionLabel::KeepNull), 2u);
    EXPECT_STREQ(focus::to_string(p.labels[0]), "remove");
    EXPECT_THROW(focus::partition(ev, 1.5, 1e-9), focus::ConfigError);
    EXPECT_THROW(focus::partition(ev, 0.5, 0.6), focus::ConfigError);
    EXPECT_THROW(focus::partition(ev, 0.5, -1.0), focus::ConfigError);
}
