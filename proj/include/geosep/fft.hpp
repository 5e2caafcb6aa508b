#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "geosep/error.hpp"
#include "geosep/image.hpp"

namespace geosep {

namespace detail {

enum class PlanKind { r2c, c2r, c2c_forward, c2c_backward };

/// FFTW plans keyed by (kind, height, width). Planning is serialized; executing a
/// plan through the new-array interface is thread-safe.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

    fftw_plan get(PlanKind kind, std::size_t height, std::size_t width) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(kind, height, width);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        const int h = static_cast<int>(height);
        const int w = static_cast<int>(width);
        const std::size_t n = height * width;
        const std::size_t half = height * (width / 2 + 1);
        // ESTIMATE keeps planning deterministic and never touches the buffers.
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = nullptr;
        switch (kind) {
        case PlanKind::r2c: {
            auto* in = fftw_alloc_real(n);
            auto* out = fftw_alloc_complex(half);
            plan = fftw_plan_dft_r2c_2d(h, w, in, out, flags);
            fftw_free(in);
            fftw_free(out);
            break;
        }
        case PlanKind::c2r: {
            auto* in = fftw_alloc_complex(half);
            auto* out = fftw_alloc_real(n);
            plan = fftw_plan_dft_c2r_2d(h, w, in, out, flags);
            fftw_free(in);
            fftw_free(out);
            break;
        }
        case PlanKind::c2c_forward:
        case PlanKind::c2c_backward: {
            auto* in = fftw_alloc_complex(n);
            auto* out = fftw_alloc_complex(n);
            plan = fftw_plan_dft_2d(h, w, in, out,
                                    kind == PlanKind::c2c_forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                    flags);
            fftw_free(in);
            fftw_free(out);
            break;
        }
        }
        if (plan == nullptr) throw Error("FFTW failed to create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::tuple<PlanKind, std::size_t, std::size_t>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

} // namespace detail

/// Non-redundant half of the spectrum of a real image (columns 0..width/2).
struct HalfSpectrum {
    SpectralImage bins;
    std::size_t width = 0; ///< width of the real image it came from

    std::size_t height() const noexcept { return bins.height(); }
};

/// Unitary 2D DFT: X(u, v) = (HW)^{-1/2} sum x(r, c) exp(-2 pi i (u r / H + v c / W)).
inline SpectralImage dft2(const RasterImage& img) {
    require_nonempty(img.height(), img.width(), "dft2");
    std::vector<std::complex<double>> in(img.values().begin(), img.values().end());
    SpectralImage out(img.height(), img.width());
    auto plan = detail::PlanCache::instance().get(detail::PlanKind::c2c_forward, img.height(),
                                                  img.width());
    fftw_execute_dft(plan, detail::as_fftw(in.data()), detail::as_fftw(out.data()));
    out *= std::complex<double>(1.0 / std::sqrt(static_cast<double>(img.size())), 0.0);
    return out;
}

/// Inverse of dft2; returns the real part.
inline RasterImage idft2(const SpectralImage& spec) {
    require_nonempty(spec.height(), spec.width(), "idft2");
    std::vector<std::complex<double>> in(spec.values().begin(), spec.values().end());
    std::vector<std::complex<double>> out(spec.size());
    auto plan = detail::PlanCache::instance().get(detail::PlanKind::c2c_backward, spec.height(),
                                                  spec.width());
    fftw_execute_dft(plan, detail::as_fftw(in.data()), detail::as_fftw(out.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.size()));
    RasterImage img(spec.height(), spec.width());
    for (std::size_t i = 0; i < out.size(); ++i) img.data()[i] = out[i].real() * scale;
    return img;
}

/// Unnormalized real-to-half-complex transform.
inline HalfSpectrum rfft2(const RasterImage& img) {
    require_nonempty(img.height(), img.width(), "rfft2");
    HalfSpectrum out{SpectralImage(img.height(), img.width() / 2 + 1), img.width()};
    auto plan = detail::PlanCache::instance().get(detail::PlanKind::r2c, img.height(), img.width());
    // r2c never writes its input.
    fftw_execute_dft_r2c(plan, const_cast<double*>(img.data()), detail::as_fftw(out.bins.data()));
    return out;
}

/// Inverse of rfft2, including the 1/(HW) factor.
inline RasterImage irfft2(const HalfSpectrum& spec) {
    require_nonempty(spec.bins.height(), spec.width, "irfft2");
    if (spec.bins.width() != spec.width / 2 + 1) {
        throw DimensionError("irfft2: half spectrum width does not match declared image width");
    }
    std::vector<std::complex<double>> in(spec.bins.values().begin(), spec.bins.values().end());
    RasterImage out(spec.bins.height(), spec.width);
    auto plan =
        detail::PlanCache::instance().get(detail::PlanKind::c2r, spec.bins.height(), spec.width);
    fftw_execute_dft_c2r(plan, detail::as_fftw(in.data()), out.data());
    out *= 1.0 / static_cast<double>(out.size());
    return out;
}

/// Multiplicity of half-spectrum column `col` in the full spectrum (1 or 2).
inline double half_column_weight(std::size_t col, std::size_t width) {
    if (col == 0) return 1.0;
    if (width % 2 == 0 && col == width / 2) return 1.0;
    return 2.0;
}

/// Zero-pads `filt` to height x width with its center tap (fh/2, fw/2) moved to (0, 0).
inline RasterImage embed_centered(const RasterImage& filt, std::size_t height, std::size_t width) {
    if (filt.height() > height || filt.width() > width) {
        throw DimensionError("filter " + std::to_string(filt.height()) + "x" +
                             std::to_string(filt.width()) + " is larger than image " +
                             std::to_string(height) + "x" + std::to_string(width));
    }
    RasterImage out(height, width);
    const long cy = static_cast<long>(filt.height() / 2);
    const long cx = static_cast<long>(filt.width() / 2);
    const long h = static_cast<long>(height);
    const long w = static_cast<long>(width);
    for (std::size_t r = 0; r < filt.height(); ++r) {
        for (std::size_t c = 0; c < filt.width(); ++c) {
            const long rr = ((static_cast<long>(r) - cy) % h + h) % h;
            const long cc = ((static_cast<long>(c) - cx) % w + w) % w;
            out(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)) += filt(r, c);
        }
    }
    return out;
}

/// Pointwise product of two half spectra.
inline HalfSpectrum multiply(const HalfSpectrum& a, const HalfSpectrum& b) {
    if (!a.bins.same_shape(b.bins) || a.width != b.width) {
        throw DimensionError("spectral multiply: size mismatch");
    }
    HalfSpectrum out{SpectralImage(a.bins.height(), a.bins.width()), a.width};
    for (std::size_t i = 0; i < a.bins.size(); ++i) out.bins.data()[i] = a.bins.data()[i] * b.bins.data()[i];
    return out;
}

/// Circular convolution of `img` with a centered filter no larger than the image.
inline RasterImage convolve_periodic(const RasterImage& img, const RasterImage& filt) {
    require_nonempty(img.height(), img.width(), "convolve_periodic");
    require_nonempty(filt.height(), filt.width(), "convolve_periodic (filter)");
    const auto kernel = embed_centered(filt, img.height(), img.width());
    return irfft2(multiply(rfft2(img), rfft2(kernel)));
}

} // namespace geosep
