#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "geosep/shearlets.hpp"
#include "testkit/oracles.hpp"

using namespace geosep;

namespace {

const ShearletFilterBank& bank256() {
    static const ShearletFilterBank b = build_filter_bank(256, 256);
    return b;
}

const ShearletFilterBank& bank128() {
    static const ShearletFilterBank b = build_filter_bank(128, 128);
    return b;
}

testkit::Taps taps(const Filter1D& f) { return {f.taps, f.origin}; }

// Direct DTFT of a centered spatial filter.
std::complex<double> dtft(const RasterImage& f, double w1, double w2) {
    const long cy = static_cast<long>(f.height() / 2);
    const long cx = static_cast<long>(f.width() / 2);
    std::complex<double> acc = 0.0;
    for (std::size_t r = 0; r < f.height(); ++r)
        for (std::size_t c = 0; c < f.width(); ++c)
            acc += f(r, c) * std::polar(1.0, -(w1 * (static_cast<long>(c) - cx) + w2 * (static_cast<long>(r) - cy)));
    return acc;
}

double energy_fraction(const HalfSpectrum& s, const std::function<bool(double, double)>& inside) {
    double in = 0.0, total = 0.0;
    for (std::size_t r = 0; r < s.bins.height(); ++r) {
        for (std::size_t c = 0; c < s.bins.width(); ++c) {
            const double e = half_column_weight(c, s.width) * std::norm(s.bins(r, c));
            total += e;
            if (inside(bin_frequency(c, s.width), bin_frequency(r, s.bins.height()))) in += e;
        }
    }
    return in / total;
}

} // namespace

TEST(Shearlets, ShearCounts) {
    const int expected_m[] = {1, 2, 2, 3, 4, 6};
    for (int j = 0; j < 6; ++j) EXPECT_EQ(shear_count(j), expected_m[j]) << j;
    std::size_t total = 0;
    for (int j = 0; j < 4; ++j) total += directional_filter_count(j);
    EXPECT_EQ(total, 2u * (3 + 5 + 5 + 7));
    EXPECT_THROW(Shear::for_scale(2, 0), ParameterError);
}

TEST(Shearlets, BankLayout) {
    const auto& b = bank256();
    ASSERT_EQ(b.size(), 41u);
    EXPECT_EQ(b.index(0).cone, Cone::lowpass);
    std::size_t directional = 0;
    for (std::size_t i = 1; i < b.size(); ++i) directional += b.index(i).cone != Cone::lowpass;
    EXPECT_EQ(directional, 40u);
}

TEST(Shearlets, FanFilterPassAndStop) {
    const auto f = build_fan_filter(12, 0);
    EXPECT_GE(std::abs(dtft(f, M_PI / 2, 0.0)), 0.99);
    EXPECT_LE(std::abs(dtft(f, 0.0, M_PI / 2)), 0.01);
    for (auto [w1, w2] : {std::pair{0.3, 1.1}, {2.0, -0.7}, {-1.4, 2.9}}) {
        EXPECT_NEAR(std::abs(dtft(f, w1, w2) - std::conj(dtft(f, -w1, -w2))), 0.0, 1e-12);
    }
}

TEST(Shearlets, GeneratorHasNoDc) {
    const ShearletSpec spec;
    for (int j = 0; j < spec.scales; ++j) {
        EXPECT_LE(std::abs(shearlet_generator_spectrum(j, spec, 128, 128).bins(0, 0)), 1e-8) << j;
    }
}

TEST(Shearlets, GeneratorConcentratesOnConeBand) {
    const ShearletSpec spec;
    const int big_j = spec.scales;
    for (int j = 0; j < big_j; ++j) {
        const auto s = shearlet_generator_spectrum(j, spec, 256, 256);
        const double lo = M_PI * std::ldexp(1.0, j - big_j - 1);
        const double hi = M_PI * std::ldexp(1.0, j - big_j + 2);
        const double frac = energy_fraction(s, [&](double w1, double w2) {
            return std::abs(w1) >= std::abs(w2) && std::abs(w1) >= lo && std::abs(w1) <= hi;
        });
        EXPECT_GE(frac, 0.90) << "scale " << j;
    }
}

TEST(Shearlets, CoarsestGeneratorIsFanTimesSeparableWavelet) {
    const ShearletSpec spec;
    const int big_j = spec.scales;
    const auto s = shearlet_generator_spectrum(0, spec, 128, 128);
    const auto& h = spec.lowpass;
    const auto& g = spec.highpass;
    auto lowpass_product = [&](int levels, double w) {
        std::complex<double> p = 1.0;
        for (int i = 0; i < levels; ++i) p *= h.response(w * (1 << i)) / h.sum();
        return p;
    };
    double worst = 0.0;
    for (std::size_t r = 0; r < 128; r += 3) {
        for (std::size_t c = 0; c < 65; c += 2) {
            const double w1 = bin_frequency(c, 128);
            const double w2 = bin_frequency(r, 128);
            const auto gx = lowpass_product(big_j - 1, w1) * g.response(w1 * (1 << (big_j - 1))) / h.sum();
            const auto hy = lowpass_product(big_j, w2);
            const double fan = maxflat_halfband(spec.fan_order, 0.5 * (std::cos(w2 * (1 << big_j)) -
                                                                       std::cos(w1 * (1 << (big_j - 1)))));
            worst = std::max(worst, std::abs(s.bins(r, c) - fan * gx * hy));
        }
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(DigitalShear, ZeroIsIdentity) {
    const auto f = testkit::random_image(16, 24, 4);
    const auto out = digital_shear(f, Shear{0, 1}, ShearletSpec{});
    EXPECT_EQ(max_abs(out - f), 0.0);
}

TEST(DigitalShear, IntegerShearIsRowShift) {
    const auto f = testkit::random_image(16, 24, 5);
    const auto out = digital_shear(f, Shear{2, 1}, ShearletSpec{}); // s = 1
    for (long r = 0; r < 16; ++r) {
        const long n2 = r < 8 ? r : r - 16;
        for (long c = 0; c < 24; ++c) {
            EXPECT_EQ(out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)),
                      f.wrapped(r, c - n2));
        }
    }
}

TEST(DigitalShear, HalfShearMatchesResamplingOracle) {
    const auto interp = ShearInterpolation::from(ShearletSpec{});
    RasterImage rows(16, 64);
    for (std::size_t r = 0; r < 16; ++r) rows(r, 30) = 1.0;
    for (const RasterImage& f : {rows, testkit::random_image(16, 64, 8)}) {
        for (int k : {1, -1}) {
            const auto prod = digital_shear(f, Shear{k, 1}, interp);
            const auto ref = testkit::oracle_shear(f, k, 1, taps(interp.lowpass), taps(interp.dual));
            EXPECT_LE(max_abs(prod - ref), 1e-8) << k;
        }
    }
}

TEST(DigitalShear, QuarterShearMatchesResamplingOracle) {
    const auto interp = ShearInterpolation::from(ShearletSpec{});
    const auto f = testkit::random_image(32, 96, 12);
    for (int k : {1, 3, -3}) {
        const auto prod = digital_shear(f, Shear{k, 2}, interp);
        const auto ref = testkit::oracle_shear(f, k, 2, taps(interp.lowpass), taps(interp.dual));
        EXPECT_LE(max_abs(prod - ref), 1e-8) << k;
    }
}

TEST(Shearlets, VerticalIsTransposeOfHorizontal) {
    const auto& b = bank128();
    for (int j = 0; j < 4; ++j) {
        for (int k = -shear_count(j); k <= shear_count(j); ++k) {
            const auto hz = b.spatial(b.find({Cone::horizontal, j, k}));
            const auto vt = b.spatial(b.find({Cone::vertical, j, k}));
            EXPECT_LE(max_abs(vt - transpose(hz)), 1e-12) << j << "," << k;
        }
    }
}

TEST(Shearlets, FrameRatioDiagnostic) {
    const auto fb = frame_bounds(bank256());
    EXPECT_GT(fb.lower, 0.0);
    EXPECT_LE(fb.ratio(), 100.0);
}

TEST(Shearlets, DualIdentityAndReconstruction) {
    const auto& b = bank128();
    const auto dual = compute_dual_bank(b);
    double worst = 0.0;
    for (std::size_t bin = 0; bin < b.spectrum(0).bins.size(); ++bin) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            acc += b.spectrum(i).bins.data()[bin] * std::conj(dual.spectrum(i).bins.data()[bin]);
        }
        worst = std::max(worst, std::abs(acc - 1.0));
    }
    EXPECT_LE(worst, 1e-10);
    const auto x = testkit::random_image(128, 128, 31);
    EXPECT_LE(relative_error(shearlet_inverse(shearlet_forward(x, b), dual), x), 1e-8);
    const auto zero = shearlet_forward(RasterImage(128, 128), b);
    for (const auto& p : zero.planes) EXPECT_EQ(max_abs(p), 0.0);
    EXPECT_EQ(max_abs(shearlet_inverse(zero, dual)), 0.0);
}

TEST(Shearlets, TightBankIsSelfDual) {
    std::vector<ShearletFilter> filters;
    HalfSpectrum a{SpectralImage(8, 5), 8};
    HalfSpectrum b{SpectralImage(8, 5), 8};
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 5; ++c) {
            const double t = 0.3 * static_cast<double>(r + c);
            a.bins(r, c) = std::cos(t);
            b.bins(r, c) = std::sin(t);
        }
    }
    filters.push_back({{Cone::lowpass, -1, 0}, a});
    filters.push_back({{Cone::horizontal, 0, 0}, b});
    const ShearletFilterBank bank(8, 8, filters);
    const auto dual = compute_dual_bank(bank);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < 40; ++k) {
            EXPECT_NEAR(std::abs(dual.spectrum(i).bins.data()[k] - bank.spectrum(i).bins.data()[k]), 0.0, 1e-12);
        }
    }
}

TEST(Shearlets, AdjointIdentity) {
    const auto& b = bank128();
    const auto x = testkit::random_image(128, 128, 41);
    ShearletCoefficients c = shearlet_forward(testkit::random_image(128, 128, 42), b);
    for (std::size_t i = 0; i < c.planes.size(); ++i) c.planes[i] = testkit::random_image(128, 128, 100 + i);
    const double lhs = inner_product(shearlet_forward(x, b), c);
    const double rhs = dot(x, shearlet_adjoint(c, b));
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs));
}

TEST(Shearlets, ImpulseResponseIsFilter) {
    const auto& b = bank128();
    const auto c = shearlet_forward(impulse(128, 128), b);
    for (std::size_t i = 0; i < b.size(); i += 5) EXPECT_LE(max_abs(c.planes[i] - b.spatial(i)), 1e-12);
}

TEST(Shearlets, LineEnergyLandsInUnshearedFinestFilter) {
    // A line along y varies only in x, so its spectrum lies on the w1 axis: the
    // horizontal cone. The transposed line lands in the vertical cone.
    const auto& b = bank128();
    for (Cone cone : {Cone::horizontal, Cone::vertical}) {
        RasterImage line(128, 128);
        for (std::size_t t = 0; t < 128; ++t) {
            if (cone == Cone::horizontal) line(t, 64) = 1.0;
            else line(64, t) = 1.0;
        }
        const auto c = shearlet_forward(line, b);
        std::vector<double> all;
        for (std::size_t i = 1; i < c.size(); ++i)
            for (double v : c.planes[i].values()) all.push_back(v * v);
        std::nth_element(all.begin(), all.begin() + all.size() * 9 / 10, all.end());
        const double cut = all[all.size() * 9 / 10];
        double top = 0.0, target = 0.0;
        for (std::size_t i = 1; i < c.size(); ++i) {
            const auto& idx = c.index[i];
            const bool wanted = idx.cone == cone && idx.scale == 3 && std::abs(idx.shear) <= 1;
            for (double v : c.planes[i].values()) {
                if (v * v < cut) continue;
                top += v * v;
                if (wanted) target += v * v;
            }
        }
        EXPECT_GT(target / top, 0.5) << to_string(cone);
    }
}

TEST(Shearlets, SizeAndAdmissibilityErrors) {
    EXPECT_THROW(build_filter_bank(32, 32), DimensionError);
    std::vector<ShearletFilter> filters;
    filters.push_back({{Cone::lowpass, -1, 0}, HalfSpectrum{SpectralImage(8, 5), 8}});
    const ShearletFilterBank empty(8, 8, filters);
    EXPECT_THROW(require_admissible(empty), AdmissibilityError);
    EXPECT_THROW(compute_dual_bank(empty), AdmissibilityError);
    EXPECT_THROW(shearlet_forward(RasterImage(64, 64), bank128()), DimensionError);
}
