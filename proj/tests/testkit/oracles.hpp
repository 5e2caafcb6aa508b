#pragma once

// Brute-force reference implementations. Plain loops only; nothing here calls the
// library's FFT, filter or shear code.

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "geosep/image.hpp"

namespace testkit {

using geosep::RasterImage;
using geosep::SpectralImage;

inline long wrap(long i, long n) { return ((i % n) + n) % n; }

/// Direct circular convolution; kernel tap (origin_r, origin_c) sits at offset (0, 0).
inline RasterImage oracle_convolve(const RasterImage& img, const RasterImage& kernel, long origin_r = 0,
                                   long origin_c = 0) {
    const long h = static_cast<long>(img.height());
    const long w = static_cast<long>(img.width());
    RasterImage out(img.height(), img.width());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double acc = 0.0;
            for (long a = 0; a < static_cast<long>(kernel.height()); ++a) {
                for (long b = 0; b < static_cast<long>(kernel.width()); ++b) {
                    const long rr = wrap(r - (a - origin_r), h);
                    const long cc = wrap(c - (b - origin_c), w);
                    acc += kernel(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) *
                           img(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                }
            }
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
        }
    }
    return out;
}

/// Quadruple-loop unitary DFT.
inline SpectralImage oracle_dft(const RasterImage& img) {
    const std::size_t h = img.height();
    const std::size_t w = img.width();
    SpectralImage out(h, w);
    const double scale = 1.0 / std::sqrt(static_cast<double>(h * w));
    for (std::size_t u = 0; u < h; ++u) {
        for (std::size_t v = 0; v < w; ++v) {
            std::complex<double> acc = 0.0;
            for (std::size_t r = 0; r < h; ++r) {
                for (std::size_t c = 0; c < w; ++c) {
                    const double phase = -2.0 * M_PI *
                                         (static_cast<double>(u * r % h) / static_cast<double>(h) +
                                          static_cast<double>(v * c % w) / static_cast<double>(w));
                    acc += img(r, c) * std::polar(1.0, phase);
                }
            }
            out(u, v) = acc * scale;
        }
    }
    return out;
}

/// 1D filter as raw taps with the index of the tap at offset 0.
struct Taps {
    std::vector<double> values;
    long origin = 0;
};

/// y[n] = sum_i f[i] x[n - (i - origin)], periodic.
inline std::vector<double> circular_filter(const std::vector<double>& x, const Taps& f) {
    const long n = static_cast<long>(x.size());
    std::vector<double> y(x.size(), 0.0);
    for (long k = 0; k < n; ++k) {
        for (long i = 0; i < static_cast<long>(f.values.size()); ++i) {
            y[static_cast<std::size_t>(k)] +=
                f.values[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(wrap(k - (i - f.origin), n))];
        }
    }
    return y;
}

/// Shears each row by numerator / 2^level times its signed row offset. The row is
/// refined level times (zero insertion + lowpass), shifted on the fine grid, then
/// brought back by level rounds of dual filtering + decimation.
inline RasterImage oracle_shear(const RasterImage& filt, int numerator, int level, const Taps& lowpass,
                                const Taps& dual) {
    const long h = static_cast<long>(filt.height());
    const long w = static_cast<long>(filt.width());
    RasterImage out(filt.height(), filt.width());
    for (long r = 0; r < h; ++r) {
        const long n2 = (2 * r >= h) ? r - h : r;
        std::vector<double> row(static_cast<std::size_t>(w));
        for (long c = 0; c < w; ++c) row[static_cast<std::size_t>(c)] = filt(static_cast<std::size_t>(r), static_cast<std::size_t>(c));

        for (int s = 0; s < level; ++s) {
            std::vector<double> up(row.size() * 2, 0.0);
            for (std::size_t i = 0; i < row.size(); ++i) up[2 * i] = row[i];
            row = circular_filter(up, lowpass);
        }

        const long n = static_cast<long>(row.size());
        std::vector<double> shifted(row.size());
        for (long k = 0; k < n; ++k) {
            shifted[static_cast<std::size_t>(wrap(k + numerator * n2, n))] = row[static_cast<std::size_t>(k)];
        }
        row = shifted;

        for (int s = 0; s < level; ++s) {
            const auto filtered = circular_filter(row, dual);
            std::vector<double> down(row.size() / 2);
            for (std::size_t i = 0; i < down.size(); ++i) down[i] = filtered[2 * i];
            row = down;
        }
        for (long c = 0; c < w; ++c) out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = row[static_cast<std::size_t>(c)];
    }
    return out;
}

inline RasterImage random_image(std::size_t h, std::size_t w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RasterImage img(h, w);
    for (double& v : img.values()) v = u(rng);
    return img;
}

} // namespace testkit
