#include <gtest/gtest.h>

#include "geosep/fft.hpp"
#include "testkit/oracles.hpp"

using namespace geosep;

namespace {

double max_diff(const SpectralImage& a, const SpectralImage& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double max_diff(const RasterImage& a, const RasterImage& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

} // namespace

TEST(Dft, ConstantIsDcOnly) {
    RasterImage img(8, 8, 3.0);
    const auto s = dft2(img);
    EXPECT_NEAR(s(0, 0).real(), 3.0 * 8.0, 1e-12);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(std::abs(s.data()[i]), 1e-12);
}

TEST(Dft, ImpulseIsFlat) {
    const auto s = dft2(impulse(6, 10));
    for (const auto& v : s.values()) EXPECT_NEAR(std::abs(v), 1.0 / std::sqrt(60.0), 1e-14);
}

TEST(Dft, MatchesOracle) {
    for (auto [h, w] : {std::pair{8, 8}, {16, 12}, {5, 7}}) {
        const auto img = testkit::random_image(h, w, 7);
        EXPECT_LE(max_diff(dft2(img), testkit::oracle_dft(img)), 1e-10) << h << "x" << w;
    }
}

TEST(Dft, ShiftedImpulseRoundtrip) {
    const auto x = impulse(8, 8, 3, 5);
    EXPECT_LE(max_diff(idft2(testkit::oracle_dft(x)), x), 1e-12);
}

TEST(Dft, InverseRoundtrip) {
    const auto x = testkit::random_image(16, 16, 3);
    EXPECT_LE(max_diff(idft2(dft2(x)), x), 1e-10);
    EXPECT_EQ(max_abs(idft2(SpectralImage(4, 4))), 0.0);
}

TEST(Rfft, RoundtripOddAndEven) {
    for (auto [h, w] : {std::pair{8, 8}, {9, 14}, {12, 7}}) {
        const auto x = testkit::random_image(h, w, 11);
        EXPECT_LE(max_diff(irfft2(rfft2(x)), x), 1e-12);
    }
}

TEST(Convolve, IdentityKernel) {
    const auto x = testkit::random_image(8, 8, 1);
    RasterImage k(3, 3);
    k(1, 1) = 1.0;
    EXPECT_LE(max_diff(convolve_periodic(x, k), x), 1e-12);
}

TEST(Convolve, ConstantScalesBySum) {
    RasterImage x(8, 8, 2.0);
    const auto k = testkit::random_image(3, 3, 5);
    const auto y = convolve_periodic(x, k);
    for (double v : y.values()) EXPECT_NEAR(v, 2.0 * sum(k), 1e-12);
}

TEST(Convolve, MatchesDirectSum) {
    for (std::size_t n : {8u, 13u, 32u}) {
        const auto x = testkit::random_image(n, n, n);
        const auto k = testkit::random_image(3, 3, n + 1);
        EXPECT_LE(max_diff(convolve_periodic(x, k), testkit::oracle_convolve(x, k, 1, 1)), 1e-10) << n;
    }
}

TEST(Oracle, HandComputedCase) {
    RasterImage x(2, 2);
    x(0, 0) = 1.0;
    RasterImage k(2, 2);
    k(0, 0) = 1;
    k(0, 1) = 2;
    k(1, 0) = 3;
    k(1, 1) = 4;
    EXPECT_EQ(max_diff(testkit::oracle_convolve(x, k), k), 0.0);

    // 3x3 box of ones around the origin applied to an impulse at (1, 1).
    RasterImage box(3, 3, 1.0);
    const auto y = testkit::oracle_convolve(impulse(4, 4, 1, 1), box, 1, 1);
    const double expected[4][4] = {{1, 1, 1, 0}, {1, 1, 1, 0}, {1, 1, 1, 0}, {0, 0, 0, 0}};
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(y(r, c), expected[r][c]);
}

TEST(Convolve, FilterLargerThanImageThrows) {
    EXPECT_THROW(convolve_periodic(RasterImage(4, 4), RasterImage(5, 3)), DimensionError);
}
