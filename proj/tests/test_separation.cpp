#include <gtest/gtest.h>

#include <cmath>

#include "geosep/separation.hpp"
#include "geosep/synth.hpp"
#include "testkit/oracles.hpp"

using namespace geosep;

TEST(Threshold, Scalars) {
    EXPECT_EQ(soft_threshold(0.5, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(soft_threshold(-2.0, 0.5), -1.5);
    EXPECT_EQ(soft_threshold(0.3, 0.0), 0.3);
    EXPECT_EQ(hard_threshold(0.5, 1.0), 0.0);
    EXPECT_EQ(hard_threshold(-2.0, 0.5), -2.0);
    EXPECT_EQ(hard_threshold(0.3, 0.0), 0.3);
}

TEST(Threshold, CoarsePlanesAreExempt) {
    const auto spec = WaveletSpec::cdf97(2);
    const auto c = uwt_forward(testkit::random_image(64, 64, 3), spec);
    const std::vector<double> ones(c.details.size(), 1.0);
    const auto t = threshold(c, 1e9, Thresholding::soft, ones);
    EXPECT_EQ(max_abs(t.approximation - c.approximation), 0.0);
    for (const auto& d : t.details) EXPECT_EQ(max_abs(d.plane), 0.0);
}

TEST(Schedule, Linear) {
    const std::vector<double> expected{1.0, 0.5, 0.0};
    EXPECT_EQ(threshold_schedule(1.0, 0.0, 3, Schedule::linear), expected);
    EXPECT_EQ(threshold_schedule(2.5, 0.1, 1, Schedule::linear), std::vector<double>{2.5});
}

TEST(Schedule, Exponential) {
    const auto s = threshold_schedule(1.0, 0.01, 3, Schedule::exponential);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_DOUBLE_EQ(s[0], 1.0);
    EXPECT_NEAR(s[1], 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(s[2], 0.01);
    EXPECT_EQ(parse_schedule("exp"), Schedule::exponential);
    EXPECT_THROW(parse_schedule("cubic"), ConfigError);
}

TEST(Separate, ZeroInputIsFixedPoint) {
    SolverConfig cfg;
    cfg.iterations = 3;
    cfg.wavelets = WaveletSpec::cdf97(3);
    const auto r = separate(RasterImage(128, 128), cfg);
    EXPECT_EQ(max_abs(r.points), 0.0);
    EXPECT_EQ(max_abs(r.curves), 0.0);
    EXPECT_EQ(max_abs(r.residual), 0.0);
}

TEST(Separate, ZeroWeightsGiveZeroResult) {
    SolverConfig cfg;
    cfg.iterations = 2;
    cfg.wavelets = WaveletSpec::cdf97(3);
    cfg.weights.values = {0, 0, 0, 0};
    const auto r = separate_image(testkit::random_image(128, 128, 4), cfg);
    EXPECT_EQ(max_abs(r.points), 0.0);
    EXPECT_EQ(max_abs(r.curves), 0.0);
}

TEST(Separate, BookkeepingAndMonotoneResidual) {
    const auto ph = gen_phantom(128, 128, default_point_scene(128, 128), default_curve_scene(128, 128), 0.05, 3);
    SolverConfig cfg;
    cfg.wavelets = WaveletSpec::cdf97(3);
    const auto fam = build_subband_family(128, 128, cfg.subbands);
    const auto f_tilde = preprocess(ph.image, fam, cfg.weights);
    double worst = 0.0;
    std::vector<double> norms;
    const auto r = separate(f_tilde, cfg, [&](const IterationRecord& rec, const IterationState& st) {
        for (std::size_t i = 0; i < f_tilde.size(); ++i) {
            const double sum = st.points.data()[i] + st.curves.data()[i] + st.residual.data()[i];
            worst = std::max(worst, std::abs(sum - f_tilde.data()[i]));
        }
        norms.push_back(rec.residual_norm);
    });
    EXPECT_LE(worst, 1e-12);
    ASSERT_EQ(norms.size(), 15u);
    for (std::size_t i = 1; i < norms.size(); ++i) EXPECT_LE(norms[i], norms[i - 1]) << i;
    EXPECT_EQ(r.trace.size(), 15u);
    EXPECT_GT(r.lambda_max, r.lambda_min);
    EXPECT_DOUBLE_EQ(r.trace.front().lambda, r.lambda_max);
    EXPECT_DOUBLE_EQ(r.trace.back().lambda, r.lambda_min);
}

TEST(Separate, ComposesWithPreprocess) {
    const auto x = testkit::random_image(128, 128, 8);
    SolverConfig cfg;
    cfg.iterations = 3;
    cfg.wavelets = WaveletSpec::cdf97(3);
    const auto a = separate_image(x, cfg);
    const auto b = separate(preprocess(x, build_subband_family(128, 128, 3), cfg.weights), cfg);
    EXPECT_EQ(max_abs(a.points - b.points), 0.0);
    EXPECT_EQ(max_abs(a.curves - b.curves), 0.0);
}

TEST(Separate, DictionaryRolesOnPureScenes) {
    const std::size_t n = 256;
    SolverConfig cfg;
    const auto pts = separate_image(gen_points(n, n, default_point_scene(n, n)), cfg);
    EXPECT_LE(l2_norm(pts.curves), 0.1 * l2_norm(pts.points));
    const auto crv = separate_image(gen_curves(n, n, default_curve_scene(n, n)), cfg);
    EXPECT_LE(l2_norm(crv.points), 0.2 * l2_norm(crv.curves));
}

TEST(Separate, Errors) {
    SolverConfig cfg;
    cfg.wavelets = WaveletSpec::cdf97(3);
    cfg.lambda_min = 1e6;
    EXPECT_THROW(separate(testkit::random_image(128, 128, 1), cfg), ConfigError);
    cfg = {};
    cfg.iterations = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.lambda_max_factor = 1.5;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.wavelets = WaveletSpec::cdf97(3);
    RasterImage bad(128, 128);
    bad(3, 3) = std::nan("");
    EXPECT_THROW(separate(bad, cfg), NumericError);
    EXPECT_THROW(separate(RasterImage(32, 32), SolverConfig{}), DimensionError);
}
