#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "geosep/error.hpp"
#include "geosep/fft.hpp"
#include "geosep/image.hpp"
#include "geosep/parallel.hpp"
#include "geosep/wavelets.hpp"

namespace geosep {

struct ShearletSpec {
    int scales = 4;
    int fan_order = 2; ///< maxflat degree K; the 1D half-band prototype has 4K - 1 taps
    Filter1D lowpass = cdf97_lowpass();
    Filter1D highpass = cdf97_highpass();
};

/// Shear range bound m_j = ceil(2^(j/2)); shears run over |k| <= m_j.
inline int shear_count(int scale) {
    if (scale < 0) throw ParameterError("negative shearlet scale");
    const long target = 1L << scale;
    int m = 0;
    while (static_cast<long>(m) * m < target) ++m;
    return m;
}

/// Shear denominator exponent ceil(j/2).
inline int shear_level(int scale) { return (scale + 1) / 2; }

inline std::size_t directional_filter_count(int scale) {
    return 2 * (2 * static_cast<std::size_t>(shear_count(scale)) + 1);
}

/// Rational shear numerator / 2^level.
struct Shear {
    int numerator = 0;
    int level = 0;

    static Shear for_scale(int k, int scale) {
        if (std::abs(k) > shear_count(scale)) {
            throw ParameterError("shear " + std::to_string(k) + " out of range for scale " +
                                 std::to_string(scale));
        }
        return {k, shear_level(scale)};
    }

    double value() const { return std::ldexp(static_cast<double>(numerator), -level); }
    bool is_integer() const { return numerator % (1 << level) == 0; }
};

/// Maximally flat half-band polynomial on x = cos(w): F(1) = 1, F(-1) = 0, F(x) + F(-x) = 1.
inline double maxflat_halfband(int order, double x) {
    const double a = 0.5 * (1.0 + x);
    const double b = 0.5 * (1.0 - x);
    double tail = 0.0;
    double binom = 1.0; // C(order - 1 + k, k)
    double bpow = 1.0;
    for (int k = 0; k < order; ++k) {
        tail += binom * bpow;
        binom = binom * (order + k) / (k + 1);
        bpow *= b;
    }
    return std::pow(a, order) * tail;
}

/// Fan response: ~1 where |w2| < |w1|, ~0 where |w2| > |w1| (diamond-to-fan mapping).
inline double fan_response(int order, double w1, double w2) {
    return maxflat_halfband(order, 0.5 * (std::cos(w2) - std::cos(w1)));
}

/// Spatial coefficients of P(2^(ell+1) w1, w2), centered. Exact: the grid equals the support.
inline RasterImage build_fan_filter(int order, int ell) {
    if (order < 1) throw ParameterError("fan filter order must be >= 1");
    if (ell < 0 || ell > 16) throw ParameterError("fan filter dilation out of range");
    const std::size_t dilation = std::size_t{1} << (ell + 1);
    const std::size_t rows = 4 * static_cast<std::size_t>(order) - 1;
    const std::size_t cols = (4 * static_cast<std::size_t>(order) - 2) * dilation + 1;
    HalfSpectrum spec{SpectralImage(rows, cols / 2 + 1), cols};
    for (std::size_t r = 0; r < rows; ++r) {
        const double w2 = bin_frequency(r, rows);
        for (std::size_t c = 0; c < spec.bins.width(); ++c) {
            const double w1 = bin_frequency(c, cols);
            spec.bins(r, c) = fan_response(order, static_cast<double>(dilation) * w1, w2);
        }
    }
    return circshift(irfft2(spec), static_cast<long>(rows / 2), static_cast<long>(cols / 2));
}

namespace detail {

/// prod_{i<levels} H(2^i w) / H(0).
inline std::complex<double> lowpass_cascade(const Filter1D& h, int levels, double w) {
    const double dc = h.sum();
    std::complex<double> acc = 1.0;
    for (int i = 0; i < levels; ++i) acc *= h.response(std::ldexp(w, i)) / dc;
    return acc;
}

/// G(2^(L-1) w) prod_{i<L-1} H(2^i w), normalized by H(0)^L.
inline std::complex<double> highpass_cascade(const Filter1D& h, const Filter1D& g, int levels,
                                             double w) {
    return lowpass_cascade(h, levels - 1, w) * g.response(std::ldexp(w, levels - 1)) / h.sum();
}

inline std::vector<std::complex<double>> sample_axis(std::size_t n, std::size_t count,
                                                     auto&& response) {
    std::vector<std::complex<double>> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = response(bin_frequency(i, n));
    return out;
}

inline Filter1D lowpass_chain(const Filter1D& h, int levels) {
    Filter1D out = Filter1D::centered({1.0});
    for (int i = 0; i < levels; ++i) out = convolve(out, h.upsampled(1 << i));
    return out;
}

} // namespace detail

inline bool supports_scales(std::size_t height, std::size_t width, int scales) {
    return scales >= 1 && scales <= 20 &&
           std::min(height, width) >= (std::size_t{4} << scales);
}

inline void require_supported(std::size_t height, std::size_t width, int scales) {
    if (scales < 1) throw ParameterError("shearlet scales must be >= 1");
    if (!supports_scales(height, width, scales)) {
        throw DimensionError(std::to_string(scales) + " shearlet scales need min dimension >= " +
                             std::to_string(std::size_t{4} << scales) + ", image is " +
                             std::to_string(height) + "x" + std::to_string(width));
    }
}

/// Half spectrum of the horizontal-cone generator w_j on a height x width grid:
/// P(2^(J-j-1) w1, 2^(J-ceil(j/2)) w2) G_{J-j}(w1) H_{J-ceil(j/2)}(w2).
inline HalfSpectrum shearlet_generator_spectrum(int scale, const ShearletSpec& spec,
                                                std::size_t height, std::size_t width) {
    require_supported(height, width, spec.scales);
    if (scale < 0 || scale >= spec.scales) {
        throw ParameterError("shearlet scale " + std::to_string(scale) + " outside [0, " +
                             std::to_string(spec.scales) + ")");
    }
    const int big_j = spec.scales;
    const int x_levels = big_j - scale;
    const int y_levels = big_j - shear_level(scale);
    const double fan_x = std::ldexp(1.0, x_levels - 1);
    const double fan_y = std::ldexp(1.0, y_levels);
    const std::size_t half = width / 2 + 1;
    const auto gx = detail::sample_axis(width, half, [&](double w) {
        return detail::highpass_cascade(spec.lowpass, spec.highpass, x_levels, w);
    });
    const auto hy = detail::sample_axis(height, height, [&](double w) {
        return detail::lowpass_cascade(spec.lowpass, y_levels, w);
    });
    HalfSpectrum out{SpectralImage(height, half), width};
    for (std::size_t r = 0; r < height; ++r) {
        const double w2 = bin_frequency(r, height);
        for (std::size_t c = 0; c < half; ++c) {
            const double w1 = bin_frequency(c, width);
            out.bins(r, c) = fan_response(spec.fan_order, fan_x * w1, fan_y * w2) * gx[c] * hy[r];
        }
    }
    return out;
}

/// Generator w_j in spatial form on the full grid (origin at index (0, 0)).
inline RasterImage build_shearlet_generator(int scale, const ShearletSpec& spec,
                                            std::size_t height, std::size_t width) {
    return irfft2(shearlet_generator_spectrum(scale, spec, height, width));
}

/// Interpolation pair for fractional shears: the scaling filter upsamples, its
/// biorthogonal dual filters before decimation, so integer shears stay exact.
struct ShearInterpolation {
    Filter1D lowpass;
    Filter1D dual;

    static ShearInterpolation from(const Filter1D& lowpass, const Filter1D& highpass) {
        Filter1D dual = derive_synthesis(lowpass, highpass).lowpass;
        return {lowpass, dual.scaled(2.0 / (lowpass.sum() * dual.sum()))};
    }
    static ShearInterpolation from(const ShearletSpec& spec) {
        return from(spec.lowpass, spec.highpass);
    }
};

/// Row-dependent shear along x: row n2 (signed offset) moves by s * n2 pixels.
inline RasterImage digital_shear(const RasterImage& filt, Shear shear,
                                 const ShearInterpolation& interp) {
    require_nonempty(filt.height(), filt.width(), "digital_shear");
    if (shear.level < 0 || shear.level > 16) throw ParameterError("shear level out of range");
    const long q = 1L << shear.level;
    if (std::abs(static_cast<long>(shear.numerator)) > q + 1) {
        throw ParameterError("shear " + std::to_string(shear.numerator) + "/" + std::to_string(q) +
                             " not representable at this level");
    }
    const long h = static_cast<long>(filt.height());
    const long w = static_cast<long>(filt.width());
    RasterImage out(filt.height(), filt.width());

    if (shear.is_integer()) {
        const long s = shear.numerator / q;
        for (long r = 0; r < h; ++r) {
            const long shift = ((s * signed_offset(r, h)) % w + w) % w;
            const double* src = filt.data() + r * w;
            double* dst = out.data() + r * w;
            for (long c = 0; c < w; ++c) dst[(c + shift) % w] = src[c];
        }
        return out;
    }

    // Composite interpolate-shift-decimate kernel on the refined grid; only taps
    // congruent to -k n2 (mod q) land on coarse samples.
    const Filter1D kernel = convolve(detail::lowpass_chain(interp.lowpass, shear.level),
                                     detail::lowpass_chain(interp.dual, shear.level));
    for (long r = 0; r < h; ++r) {
        const long offset = static_cast<long>(shear.numerator) * signed_offset(r, h);
        const double* src = filt.data() + r * w;
        double* dst = out.data() + r * w;
        for (std::size_t i = 0; i < kernel.length(); ++i) {
            const long p = kernel.position(i) + offset;
            if (p % q != 0) continue;
            const double t = kernel.taps[i];
            const long shift = ((p / q) % w + w) % w;
            for (long c = 0; c < shift; ++c) dst[c] += t * src[c - shift + w];
            for (long c = shift; c < w; ++c) dst[c] += t * src[c - shift];
        }
    }
    return out;
}

inline RasterImage digital_shear(const RasterImage& filt, Shear shear, const ShearletSpec& spec) {
    return digital_shear(filt, shear, ShearInterpolation::from(spec));
}

enum class Cone { lowpass, horizontal, vertical };

inline const char* to_string(Cone c) {
    switch (c) {
    case Cone::lowpass: return "lowpass";
    case Cone::horizontal: return "horizontal";
    case Cone::vertical: return "vertical";
    }
    return "?";
}

struct ShearletIndex {
    Cone cone = Cone::lowpass;
    int scale = -1;
    int shear = 0;

    bool operator==(const ShearletIndex&) const = default;
};

struct ShearletFilter {
    ShearletIndex index;
    HalfSpectrum spectrum;
};

/// Filters held as half spectra at one working size. Immutable after construction.
class ShearletFilterBank {
public:
    ShearletFilterBank() = default;

    ShearletFilterBank(std::size_t height, std::size_t width, std::vector<ShearletFilter> filters)
        : height_(height), width_(width), filters_(std::move(filters)) {
        require_nonempty(height, width, "shearlet filter bank");
        if (filters_.empty()) throw ParameterError("shearlet filter bank has no filters");
        norms_.reserve(filters_.size());
        for (const auto& f : filters_) {
            if (f.spectrum.width != width || f.spectrum.bins.height() != height ||
                f.spectrum.bins.width() != width / 2 + 1) {
                throw DimensionError("shearlet filter spectrum does not match bank size");
            }
            norms_.push_back(spectral_norm(f.spectrum));
        }
    }

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return filters_.size(); }
    const ShearletFilter& operator[](std::size_t i) const { return filters_.at(i); }
    const std::vector<ShearletFilter>& filters() const noexcept { return filters_; }
    const ShearletIndex& index(std::size_t i) const { return filters_.at(i).index; }
    const HalfSpectrum& spectrum(std::size_t i) const { return filters_.at(i).spectrum; }

    /// l2 norm of filter i in the spatial domain.
    double norm(std::size_t i) const { return norms_.at(i); }

    /// Filter i in spatial form, origin at index (0, 0).
    RasterImage spatial(std::size_t i) const { return irfft2(spectrum(i)); }

    std::size_t find(const ShearletIndex& idx) const {
        for (std::size_t i = 0; i < filters_.size(); ++i) {
            if (filters_[i].index == idx) return i;
        }
        throw ParameterError("no shearlet filter with the requested index");
    }

    /// Sum over filters of |spectrum|^2 on the half grid.
    RasterImage energy() const {
        RasterImage out(height_, width_ / 2 + 1);
        for (const auto& f : filters_) {
            for (std::size_t b = 0; b < out.size(); ++b) out.data()[b] += std::norm(f.spectrum.bins.data()[b]);
        }
        return out;
    }

private:
    static double spectral_norm(const HalfSpectrum& s) {
        double acc = 0.0;
        for (std::size_t r = 0; r < s.bins.height(); ++r) {
            for (std::size_t c = 0; c < s.bins.width(); ++c) {
                acc += half_column_weight(c, s.width) * std::norm(s.bins(r, c));
            }
        }
        return std::sqrt(acc / static_cast<double>(s.bins.height() * s.width));
    }

    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<ShearletFilter> filters_;
    std::vector<double> norms_;
};

struct FrameBounds {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t lower_row = 0;
    std::size_t lower_col = 0;

    double ratio() const { return lower > 0.0 ? upper / lower : INFINITY; }
};

inline FrameBounds frame_bounds(const ShearletFilterBank& bank) {
    const RasterImage e = bank.energy();
    FrameBounds fb{INFINITY, 0.0, 0, 0};
    for (std::size_t r = 0; r < e.height(); ++r) {
        for (std::size_t c = 0; c < e.width(); ++c) {
            const double v = e(r, c);
            if (v < fb.lower) fb = {v, fb.upper, r, c};
            fb.upper = std::max(fb.upper, v);
        }
    }
    return fb;
}

namespace detail {
inline std::string bin_name(std::size_t row, std::size_t col) {
    return "(row " + std::to_string(row) + ", col " + std::to_string(col) + ")";
}
} // namespace detail

inline void require_admissible(const ShearletFilterBank& bank) {
    const auto fb = frame_bounds(bank);
    if (!(fb.lower >= 1e-6 * fb.upper) || fb.upper <= 0.0) {
        throw AdmissibilityError("filter bank energy vanishes at frequency bin " +
                                 detail::bin_name(fb.lower_row, fb.lower_col) + ": " +
                                 std::to_string(fb.lower) + " vs max " + std::to_string(fb.upper));
    }
}

/// Lowpass, then per scale (coarse to fine) horizontal-cone shears -m..m followed by
/// vertical-cone shears -m..m. Vertical filters are transposes of horizontal ones
/// built on the transposed grid.
inline ShearletFilterBank build_filter_bank(std::size_t height, std::size_t width,
                                            const ShearletSpec& spec) {
    require_supported(height, width, spec.scales);
    if (spec.fan_order < 1) throw ParameterError("fan filter order must be >= 1");
    const auto interp = ShearInterpolation::from(spec);

    std::vector<ShearletFilter> filters;
    {
        const std::size_t half = width / 2 + 1;
        const auto hx = detail::sample_axis(width, half, [&](double w) {
            return detail::lowpass_cascade(spec.lowpass, spec.scales, w);
        });
        const auto hy = detail::sample_axis(height, height, [&](double w) {
            return detail::lowpass_cascade(spec.lowpass, spec.scales, w);
        });
        HalfSpectrum low{SpectralImage(height, half), width};
        for (std::size_t r = 0; r < height; ++r) {
            for (std::size_t c = 0; c < half; ++c) low.bins(r, c) = hx[c] * hy[r];
        }
        filters.push_back({{Cone::lowpass, -1, 0}, std::move(low)});
    }

    struct Job {
        ShearletIndex index;
        std::size_t slot;
    };
    std::vector<Job> jobs;
    for (int j = 0; j < spec.scales; ++j) {
        const int m = shear_count(j);
        for (Cone cone : {Cone::horizontal, Cone::vertical}) {
            for (int k = -m; k <= m; ++k) jobs.push_back({{cone, j, k}, filters.size() + jobs.size()});
        }
    }
    filters.resize(1 + jobs.size());

    std::vector<RasterImage> generators(static_cast<std::size_t>(2 * spec.scales));
    parallel_for(generators.size(), [&](std::size_t g) {
        const int j = static_cast<int>(g / 2);
        generators[g] = g % 2 == 0 ? build_shearlet_generator(j, spec, height, width)
                                   : build_shearlet_generator(j, spec, width, height);
    });
    parallel_for(jobs.size(), [&](std::size_t n) {
        const auto& job = jobs[n];
        const bool vertical = job.index.cone == Cone::vertical;
        const auto& gen = generators[2 * static_cast<std::size_t>(job.index.scale) + (vertical ? 1 : 0)];
        RasterImage f = digital_shear(gen, Shear::for_scale(job.index.shear, job.index.scale), interp);
        if (vertical) f = transpose(f);
        filters[job.slot] = {job.index, rfft2(f)};
    });

    ShearletFilterBank bank(height, width, std::move(filters));
    require_admissible(bank);
    return bank;
}

inline ShearletFilterBank build_filter_bank(std::size_t height, std::size_t width) {
    return build_filter_bank(height, width, ShearletSpec{});
}

/// Deconvolution duals: dual_i = psi_i / sum_l |psi_l|^2, so sum_i psi_i conj(dual_i) = 1.
inline ShearletFilterBank compute_dual_bank(const ShearletFilterBank& bank) {
    const RasterImage e = bank.energy();
    for (std::size_t r = 0; r < e.height(); ++r) {
        for (std::size_t c = 0; c < e.width(); ++c) {
            if (!(e(r, c) >= 1e-12)) {
                throw AdmissibilityError("cannot dualize: energy " + std::to_string(e(r, c)) +
                                         " at frequency bin " + detail::bin_name(r, c));
            }
        }
    }
    std::vector<ShearletFilter> duals = bank.filters();
    parallel_for(duals.size(), [&](std::size_t i) {
        auto& bins = duals[i].spectrum.bins;
        for (std::size_t b = 0; b < bins.size(); ++b) bins.data()[b] /= e.data()[b];
    });
    return ShearletFilterBank(bank.height(), bank.width(), std::move(duals));
}

/// One full-size plane per bank entry, same order.
struct ShearletCoefficients {
    std::vector<ShearletIndex> index;
    std::vector<RasterImage> planes;

    std::size_t size() const noexcept { return planes.size(); }
};

/// c_i = img * psi_i (periodic convolution), computed spectrally.
inline ShearletCoefficients shearlet_forward(const RasterImage& img, const ShearletFilterBank& bank) {
    if (img.height() != bank.height() || img.width() != bank.width()) {
        throw DimensionError("image " + std::to_string(img.height()) + "x" +
                             std::to_string(img.width()) + " does not match filter bank size " +
                             std::to_string(bank.height()) + "x" + std::to_string(bank.width()));
    }
    const HalfSpectrum x = rfft2(img);
    ShearletCoefficients out;
    out.planes.resize(bank.size());
    out.index.reserve(bank.size());
    for (const auto& f : bank.filters()) out.index.push_back(f.index);
    parallel_for(bank.size(), [&](std::size_t i) {
        out.planes[i] = irfft2(multiply(x, bank.spectrum(i)));
    });
    return out;
}

namespace detail {

/// sum_i C_i conj(F_i), accumulated bin-wise in filter order.
inline RasterImage correlate_sum(const ShearletCoefficients& coeffs, const ShearletFilterBank& bank) {
    if (coeffs.planes.size() != bank.size() || coeffs.index.size() != bank.size()) {
        throw DimensionError("coefficient count " + std::to_string(coeffs.planes.size()) +
                             " does not match filter bank size " + std::to_string(bank.size()));
    }
    for (std::size_t i = 0; i < bank.size(); ++i) {
        if (!(coeffs.index[i] == bank.index(i))) {
            throw ParameterError("coefficient index " + std::to_string(i) +
                                 " does not match the filter bank");
        }
        if (coeffs.planes[i].height() != bank.height() || coeffs.planes[i].width() != bank.width()) {
            throw DimensionError("coefficient plane size does not match the filter bank");
        }
    }
    std::vector<HalfSpectrum> spectra(bank.size());
    parallel_for(bank.size(), [&](std::size_t i) { spectra[i] = rfft2(coeffs.planes[i]); });
    HalfSpectrum acc{SpectralImage(bank.height(), bank.width() / 2 + 1), bank.width()};
    const std::size_t rows = acc.bins.height();
    parallel_for(rows, [&](std::size_t r) {
        auto dst = acc.bins.row(r);
        for (std::size_t i = 0; i < spectra.size(); ++i) {
            const auto c = spectra[i].bins.row(r);
            const auto f = bank.spectrum(i).bins.row(r);
            for (std::size_t b = 0; b < dst.size(); ++b) dst[b] += c[b] * std::conj(f[b]);
        }
    });
    return irfft2(acc);
}

} // namespace detail

/// Synthesis with the dual bank; identity on shearlet_forward output.
inline RasterImage shearlet_inverse(const ShearletCoefficients& coeffs, const ShearletFilterBank& dual) {
    return detail::correlate_sum(coeffs, dual);
}

/// Adjoint of shearlet_forward (correlation with each filter).
inline RasterImage shearlet_adjoint(const ShearletCoefficients& coeffs, const ShearletFilterBank& bank) {
    return detail::correlate_sum(coeffs, bank);
}

inline double inner_product(const ShearletCoefficients& a, const ShearletCoefficients& b) {
    if (a.planes.size() != b.planes.size()) throw DimensionError("shearlet plane count mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.planes.size(); ++i) acc += dot(a.planes[i], b.planes[i]);
    return acc;
}

} // namespace geosep
