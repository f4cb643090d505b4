#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "focus/synth.hpp"

using namespace focus::synth;

TEST(Analytic, ShapeMomentsAndDeterminism) {
    AnalyticSpec spec;
    spec.n_per_set = 4000;
    const auto c = gen_analytic(spec);
    ASSERT_EQ(c.size(), 10u);
    for (std::size_t m = 0; m < c.size(); ++m) {
        const auto& x = c.sets[m];
        ASSERT_EQ(x.cols(), 3);
        const Eigen::RowVectorXd mu = x.colwise().mean();
        EXPECT_NEAR(mu[0], 3.0 * static_cast<double>(m + 1), 0.1);
        EXPECT_NEAR(mu[1], 1.0, 0.1);
        EXPECT_EQ(mu[2], -1.0);
        const Eigen::MatrixXd centred = x.rowwise() - mu;
        const Eigen::Vector3d var = centred.colwise().squaredNorm().transpose() / static_cast<double>(x.rows());
        EXPECT_NEAR(var[0], 2.0, 0.2);
        EXPECT_NEAR(var[1], 1.0, 0.1);
        EXPECT_EQ(var[2], 0.0);
    }
    EXPECT_EQ(gen_analytic(spec).sets[3], c.sets[3]);
    spec.seed = 2;
    EXPECT_NE(gen_analytic(spec).sets[3], c.sets[3]);
}

TEST(Analytic, TestSplitPlantsAnomaliesAlongConstantAxis) {
    AnalyticSpec spec;
    const auto t = gen_analytic_test(spec, 20, 5, 2.5);
    ASSERT_EQ(t.points.rows(), 25);
    EXPECT_EQ(t.labels.sum(), 5.0);
    for (Eigen::Index i = 0; i < 25; ++i) EXPECT_EQ(t.points(i, 2), i < 20 ? -1.0 : 1.5);
}

TEST(Analytic, Validation) {
    AnalyticSpec spec;
    spec.m_sets = 1;
    EXPECT_THROW(gen_analytic(spec), focus::ConfigError);
    spec = {};
    spec.n_per_set = 1;
    EXPECT_THROW(gen_analytic(spec), focus::ConfigError);
}

TEST(Images, PlaneBasisIsOrthonormalAndContainsGradients) {
    const std::size_t side = 14;
    const auto basis = illumination_plane_basis(side);
    ASSERT_EQ(basis.rows(), 196);
    ASSERT_EQ(basis.cols(), 3);
    EXPECT_LT((basis.transpose() * basis - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    for (double theta : {0.0, 0.7, 2.0, 4.5}) {
        const auto g = illumination_gradient(side, 0.8, theta);
        EXPECT_NEAR(g.mean(), 0.0, 1e-14);
        EXPECT_NEAR(alignment(g, basis), 1.0, 1e-12);
    }
    // Full-range ramp: corner-to-corner difference along theta = 0 is the amplitude.
    const auto g = illumination_gradient(side, 0.8, 0.0);
    EXPECT_NEAR(g[side - 1] - g[0], 0.8, 1e-12);
}

TEST(Images, RenderingIsBinaryAndCentred) {
    ShapeClass disc{ShapeFamily::Disc, 0.5, 0.5, 0.1, -0.1};
    const auto img = render_centred(disc, {}, 14, 0.35, 0.65);
    double fg = 0;
    for (Eigen::Index i = 0; i < img.size(); ++i) {
        EXPECT_TRUE(img[i] == 0.35 || img[i] == 0.65);
        fg += img[i] == 0.65;
    }
    EXPECT_GT(fg, 20);
    const auto lit = illuminate(img, 14, 5.0, 0.3);
    EXPECT_GE(lit.minCoeff(), 0.0);
    EXPECT_LE(lit.maxCoeff(), 1.0);
}

TEST(Images, BrokenRingGapFollowsAngle) {
    ShapeClass ring{ShapeFamily::BrokenRing, 0.7, 0.45, 0.0, 0.0, 0.0, 0.3};
    // Point on the ring inside the gap at angle 0, and one well away from it.
    EXPECT_FALSE(inside(ring, 0.57, 0.0));
    EXPECT_TRUE(inside(ring, 0.0, 0.57));
    ring.gap_angle = std::numbers::pi / 2;
    EXPECT_TRUE(inside(ring, 0.57, 0.0));
}

TEST(Images, DatasetShapesLabelsAndDeterminism) {
    IlluminationSpec spec;
    spec.side = 10;
    spec.m_sets = 6;
    spec.n_per_set = 5;
    spec.n_test_normal = 30;
    spec.n_test_anomalies = 4;
    const auto a = gen_images(spec);
    ASSERT_EQ(a.train.size(), 6u);
    EXPECT_EQ(a.train.sets[0].rows(), 5);
    EXPECT_EQ(a.train.dim(), 100);
    EXPECT_EQ(a.test.rows(), 34);
    EXPECT_EQ(a.labels.sum(), 4.0);
    EXPECT_GE(a.train.sets[2].minCoeff(), 0.0);
    EXPECT_LE(a.train.sets[2].maxCoeff(), 1.0);
    const auto b = gen_images(spec);
    EXPECT_EQ(a.test, b.test);
    EXPECT_EQ(a.train.sets[5], b.train.sets[5]);
    for (auto gen : {ShapeGenerator::Rectangles, ShapeGenerator::Discs, ShapeGenerator::Crosses})
        EXPECT_EQ(gen_images(spec, gen).train.size(), 6u);
}

TEST(Images, AntitheticLightingCancelsInSetMeans) {
    IlluminationSpec spec;
    spec.side = 12;
    spec.m_sets = 4;
    spec.n_per_set = 10;
    spec.amp_sigma = 0.05;  // small enough that clipping never triggers
    const auto data = gen_images(spec);
    const auto basis = illumination_plane_basis(12);
    for (const auto& set : data.train.sets) {
        // Every image in a set shares one rendering, so centred rows are pure lighting
        // and their mean must vanish.
        const Eigen::VectorXd mean = set.colwise().mean().transpose();
        const Eigen::MatrixXd centred = set.rowwise() - mean.transpose();
        EXPECT_LT((centred.colwise().sum()).norm(), 1e-10);
        for (Eigen::Index r = 0; r < centred.rows(); ++r)
            if (centred.row(r).norm() > 1e-9) {
                EXPECT_NEAR(alignment(centred.row(r).transpose(), basis), 1.0, 1e-9);
            }
    }
}

TEST(Images, Validation) {
    IlluminationSpec spec;
    spec.fraction_lit = 1.5;
    EXPECT_THROW(gen_images(spec), focus::ConfigError);
    spec = {};
    spec.side = 1;
    EXPECT_THROW(gen_images(spec), focus::ConfigError);
}
