#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "geosep/error.hpp"
#include "geosep/image.hpp"

namespace geosep {

/// Finite 1D filter. `taps[i]` sits at position `i - origin`; applying it computes
/// y(n) = sum_p f(p) x(n - p).
struct Filter1D {
    std::vector<double> taps;
    int origin = 0;

    static Filter1D centered(std::vector<double> taps) {
        const int origin = static_cast<int>(taps.size() / 2);
        return {std::move(taps), origin};
    }

    std::size_t length() const noexcept { return taps.size(); }
    int position(std::size_t i) const noexcept { return static_cast<int>(i) - origin; }

    double sum() const {
        double s = 0.0;
        for (double t : taps) s += t;
        return s;
    }

    double norm() const {
        double s = 0.0;
        for (double t : taps) s += t * t;
        return std::sqrt(s);
    }

    /// Frequency response F(w) = sum_p f(p) exp(-i w p).
    std::complex<double> response(double omega) const {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < taps.size(); ++i) {
            acc += taps[i] * std::polar(1.0, -omega * position(i));
        }
        return acc;
    }

    /// Zero insertion: tap at position p moves to p * factor.
    Filter1D upsampled(int factor) const {
        if (factor == 1 || taps.empty()) return *this;
        Filter1D out;
        out.taps.assign((taps.size() - 1) * factor + 1, 0.0);
        for (std::size_t i = 0; i < taps.size(); ++i) out.taps[i * factor] = taps[i];
        out.origin = origin * factor;
        return out;
    }

    /// f(p) -> (-1)^p f(p).
    Filter1D modulated() const {
        Filter1D out = *this;
        for (std::size_t i = 0; i < taps.size(); ++i) {
            if (position(i) % 2 != 0) out.taps[i] = -out.taps[i];
        }
        return out;
    }

    /// f(p) -> f(-p).
    Filter1D reversed() const {
        Filter1D out;
        out.taps.assign(taps.rbegin(), taps.rend());
        out.origin = static_cast<int>(taps.size()) - 1 - origin;
        return out;
    }

    Filter1D scaled(double factor) const {
        Filter1D out = *this;
        for (double& t : out.taps) t *= factor;
        return out;
    }
};

inline Filter1D convolve(const Filter1D& a, const Filter1D& b) {
    if (a.taps.empty()) return b;
    if (b.taps.empty()) return a;
    Filter1D out;
    out.taps.assign(a.taps.size() + b.taps.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.taps.size(); ++i) {
        for (std::size_t k = 0; k < b.taps.size(); ++k) out.taps[i + k] += a.taps[i] * b.taps[k];
    }
    out.origin = a.origin + b.origin;
    return out;
}

/// Cohen-Daubechies-Feauveau 9/7 analysis lowpass (9 taps), normalized to sum sqrt(2).
inline Filter1D cdf97_lowpass() {
    return Filter1D::centered({0.037828455506995461393, -0.023849465019380001913,
                               -0.11062440441842340885, 0.37740285561265376411,
                               0.85269867900940341931, 0.37740285561265376411,
                               -0.11062440441842340885, -0.023849465019380001913,
                               0.037828455506995461393});
}

/// CDF 9/7 analysis highpass (7 taps): the modulated 7-tap dual lowpass.
inline Filter1D cdf97_highpass() {
    return Filter1D::centered({-0.064538882628938438637, -0.040689417609558436724,
                               0.41809227322221220084, 0.78848561640566439785,
                               0.41809227322221220084, -0.040689417609558436724,
                               -0.064538882628938438637})
        .modulated();
}

/// Analysis filters of the undecimated transform plus the number of levels J.
struct WaveletSpec {
    int levels = 4;
    Filter1D lowpass = cdf97_lowpass();
    Filter1D highpass = cdf97_highpass();

    static WaveletSpec cdf97(int levels) { return WaveletSpec{levels, cdf97_lowpass(), cdf97_highpass()}; }
};

/// Synthesis filters with the per-dimension 1/2 of the undecimated scheme folded in:
/// H_a H_s + G_a G_s = 1 at every frequency.
struct SynthesisFilters {
    Filter1D lowpass;
    Filter1D highpass;
};

/// Derives alias-cancelling synthesis filters from an analysis pair and checks that
/// the pair reconstructs perfectly. Throws ParameterError otherwise.
inline SynthesisFilters derive_synthesis(const Filter1D& lowpass, const Filter1D& highpass) {
    if (lowpass.taps.empty() || highpass.taps.empty()) {
        throw ParameterError("wavelet filters must be non-empty");
    }
    if (std::abs(lowpass.sum() - std::sqrt(2.0)) > 1e-10) {
        throw ParameterError("scaling filter must sum to sqrt(2), got " +
                             std::to_string(lowpass.sum()));
    }
    // H_s(w) = G_a(w + pi), G_s(w) = sign * H_a(w + pi); the distortion
    // H_a H_s + G_a G_s must then be a single monomial a z^d.
    for (double sign : {1.0, -1.0}) {
        Filter1D hs = highpass.modulated();
        Filter1D gs = lowpass.modulated().scaled(sign);
        const Filter1D d1 = convolve(lowpass, hs);
        const Filter1D d2 = convolve(highpass, gs);
        const int lo = std::min(d1.position(0), d2.position(0));
        const int hi = std::max(d1.position(d1.length() - 1), d2.position(d2.length() - 1));
        std::vector<double> distortion(static_cast<std::size_t>(hi - lo + 1), 0.0);
        for (std::size_t i = 0; i < d1.length(); ++i) distortion[d1.position(i) - lo] += d1.taps[i];
        for (std::size_t i = 0; i < d2.length(); ++i) distortion[d2.position(i) - lo] += d2.taps[i];

        std::size_t peak = 0;
        for (std::size_t i = 1; i < distortion.size(); ++i) {
            if (std::abs(distortion[i]) > std::abs(distortion[peak])) peak = i;
        }
        const double gain = distortion[peak];
        if (std::abs(gain) < 1e-12) continue;
        bool monomial = true;
        for (std::size_t i = 0; i < distortion.size(); ++i) {
            if (i != peak && std::abs(distortion[i]) > 1e-10 * std::abs(gain)) monomial = false;
        }
        if (!monomial) continue;
        const int delay = static_cast<int>(peak) + lo;
        hs = hs.scaled(1.0 / gain);
        gs = gs.scaled(1.0 / gain);
        hs.origin += delay;
        gs.origin += delay;
        return {hs, gs};
    }
    throw ParameterError("wavelet filters do not form a perfect-reconstruction pair");
}

enum class Orientation { horizontal, vertical, diagonal };

inline const char* to_string(Orientation o) {
    switch (o) {
    case Orientation::horizontal: return "horizontal";
    case Orientation::vertical: return "vertical";
    case Orientation::diagonal: return "diagonal";
    }
    return "?";
}

/// One detail plane. horizontal: highpass along y, lowpass along x (responds to
/// horizontal edges); vertical: the converse; diagonal: highpass along both.
struct DetailPlane {
    int level = 1;
    Orientation orientation = Orientation::horizontal;
    RasterImage plane;
};

/// Output of the undecimated transform: 3J detail planes (level 1 = finest first,
/// orientations in horizontal/vertical/diagonal order) plus the coarsest approximation.
struct WaveletCoefficients {
    RasterImage approximation;
    std::vector<DetailPlane> details;

    std::size_t plane_count() const noexcept { return details.size() + 1; }
    int levels() const noexcept { return static_cast<int>(details.size() / 3); }
};

namespace detail {

/// y(r, c) = sum_p f(p) x(r, c - p * step), periodic along x.
inline RasterImage filter_along_x(const RasterImage& in, const Filter1D& f, long step) {
    RasterImage out(in.height(), in.width());
    const long w = static_cast<long>(in.width());
    for (std::size_t r = 0; r < in.height(); ++r) {
        const double* src = in.data() + r * in.width();
        double* dst = out.data() + r * in.width();
        for (std::size_t i = 0; i < f.length(); ++i) {
            const double t = f.taps[i];
            if (t == 0.0) continue;
            const long shift = ((f.position(i) * step) % w + w) % w;
            // dst[c] += t * src[c - shift]
            for (long c = 0; c < shift; ++c) dst[c] += t * src[c - shift + w];
            for (long c = shift; c < w; ++c) dst[c] += t * src[c - shift];
        }
    }
    return out;
}

/// y(r, c) = sum_p f(p) x(r - p * step, c), periodic along y.
inline RasterImage filter_along_y(const RasterImage& in, const Filter1D& f, long step) {
    RasterImage out(in.height(), in.width());
    const long h = static_cast<long>(in.height());
    const std::size_t w = in.width();
    for (std::size_t i = 0; i < f.length(); ++i) {
        const double t = f.taps[i];
        if (t == 0.0) continue;
        const long shift = ((f.position(i) * step) % h + h) % h;
        for (long r = 0; r < h; ++r) {
            const long src_row = (r - shift + h) % h;
            const double* src = in.data() + static_cast<std::size_t>(src_row) * w;
            double* dst = out.data() + static_cast<std::size_t>(r) * w;
            for (std::size_t c = 0; c < w; ++c) dst[c] += t * src[c];
        }
    }
    return out;
}

inline void require_levels_fit(std::size_t height, std::size_t width, const WaveletSpec& spec) {
    if (spec.levels < 1) throw ParameterError("wavelet levels must be >= 1");
    require_nonempty(height, width, "undecimated wavelet transform");
    const std::size_t needed = (std::size_t{1} << spec.levels) * spec.lowpass.length();
    if (std::min(height, width) < needed) {
        throw DimensionError("image " + std::to_string(height) + "x" + std::to_string(width) +
                             " too small for " + std::to_string(spec.levels) +
                             " wavelet levels (needs min dimension >= " + std::to_string(needed) +
                             ")");
    }
}

inline void require_consistent(const WaveletCoefficients& coeffs, const WaveletSpec& spec) {
    if (coeffs.details.size() != static_cast<std::size_t>(3 * spec.levels)) {
        throw DimensionError("expected " + std::to_string(3 * spec.levels + 1) +
                             " wavelet planes, got " + std::to_string(coeffs.plane_count()));
    }
    static constexpr Orientation order[3] = {Orientation::horizontal, Orientation::vertical,
                                             Orientation::diagonal};
    for (std::size_t i = 0; i < coeffs.details.size(); ++i) {
        const auto& d = coeffs.details[i];
        if (d.level != static_cast<int>(i / 3) + 1 || d.orientation != order[i % 3]) {
            throw DimensionError("wavelet detail planes are not in canonical order");
        }
        require_same_shape(d.plane, coeffs.approximation, "wavelet coefficient planes");
    }
}

/// Shared synthesis cascade; the adjoint and the inverse differ only in filters.
inline RasterImage uwt_synthesize(const WaveletCoefficients& coeffs, const WaveletSpec& spec,
                                  const Filter1D& lowpass, const Filter1D& highpass) {
    require_consistent(coeffs, spec);
    RasterImage approx = coeffs.approximation;
    for (int level = spec.levels; level >= 1; --level) {
        const long step = 1L << (level - 1);
        const auto base = static_cast<std::size_t>(3 * (level - 1));
        const auto& horizontal = coeffs.details[base].plane;
        const auto& vertical = coeffs.details[base + 1].plane;
        const auto& diagonal = coeffs.details[base + 2].plane;
        RasterImage low_x = filter_along_y(approx, lowpass, step);
        low_x += filter_along_y(horizontal, highpass, step);
        RasterImage high_x = filter_along_y(vertical, lowpass, step);
        high_x += filter_along_y(diagonal, highpass, step);
        approx = filter_along_x(low_x, lowpass, step);
        approx += filter_along_x(high_x, highpass, step);
    }
    return approx;
}

} // namespace detail

/// Undecimated (a trous) 2D wavelet transform with periodic boundaries.
inline WaveletCoefficients uwt_forward(const RasterImage& img, const WaveletSpec& spec) {
    detail::require_levels_fit(img.height(), img.width(), spec);
    WaveletCoefficients out;
    out.details.reserve(static_cast<std::size_t>(3 * spec.levels));
    RasterImage approx = img;
    for (int level = 1; level <= spec.levels; ++level) {
        const long step = 1L << (level - 1);
        const RasterImage low_x = detail::filter_along_x(approx, spec.lowpass, step);
        const RasterImage high_x = detail::filter_along_x(approx, spec.highpass, step);
        out.details.push_back(
            {level, Orientation::horizontal, detail::filter_along_y(low_x, spec.highpass, step)});
        out.details.push_back(
            {level, Orientation::vertical, detail::filter_along_y(high_x, spec.lowpass, step)});
        out.details.push_back(
            {level, Orientation::diagonal, detail::filter_along_y(high_x, spec.highpass, step)});
        approx = detail::filter_along_y(low_x, spec.lowpass, step);
    }
    out.approximation = std::move(approx);
    return out;
}

inline RasterImage uwt_inverse(const WaveletCoefficients& coeffs, const WaveletSpec& spec) {
    const auto synthesis = derive_synthesis(spec.lowpass, spec.highpass);
    return detail::uwt_synthesize(coeffs, spec, synthesis.lowpass, synthesis.highpass);
}

/// Adjoint of uwt_forward: <forward(x), c> = <x, adjoint(c)>.
inline RasterImage uwt_adjoint(const WaveletCoefficients& coeffs, const WaveletSpec& spec) {
    return detail::uwt_synthesize(coeffs, spec, spec.lowpass.reversed(), spec.highpass.reversed());
}

inline double inner_product(const WaveletCoefficients& a, const WaveletCoefficients& b) {
    if (a.details.size() != b.details.size()) throw DimensionError("wavelet plane count mismatch");
    double acc = dot(a.approximation, b.approximation);
    for (std::size_t i = 0; i < a.details.size(); ++i) acc += dot(a.details[i].plane, b.details[i].plane);
    return acc;
}

/// l2 norms of the equivalent analysis filters of each detail plane (same order as
/// WaveletCoefficients::details), ignoring periodic wrap-around.
inline std::vector<double> uwt_detail_norms(const WaveletSpec& spec) {
    std::vector<double> norms;
    Filter1D low_chain = Filter1D::centered({1.0});
    for (int level = 1; level <= spec.levels; ++level) {
        const int step = 1 << (level - 1);
        const double low = convolve(low_chain, spec.lowpass.upsampled(step)).norm();
        const double high = convolve(low_chain, spec.highpass.upsampled(step)).norm();
        norms.push_back(low * high);  // horizontal
        norms.push_back(high * low);  // vertical
        norms.push_back(high * high); // diagonal
        low_chain = convolve(low_chain, spec.lowpass.upsampled(step));
    }
    return norms;
}

} // namespace geosep
