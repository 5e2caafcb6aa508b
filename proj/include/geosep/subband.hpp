#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "geosep/error.hpp"
#include "geosep/fft.hpp"
#include "geosep/image.hpp"

namespace geosep {

namespace detail {

/// Meyer auxiliary polynomial: 0 at t <= 0, 1 at t >= 1, v(t) + v(1 - t) = 1.
inline double meyer_nu(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
}

/// Radial lowpass window: 1 below c, 0 above 2c, smooth cosine roll-off between.
inline double meyer_lowpass(double radius, double cutoff) {
    return std::cos(0.5 * M_PI * meyer_nu(radius / cutoff - 1.0));
}

} // namespace detail

/// Radial filters F_0..F_L with sum_j F_j^2 = 1. Responses are real and stored on
/// the half-spectrum grid.
class SubbandFamily {
public:
    SubbandFamily() = default;

    SubbandFamily(std::size_t height, std::size_t width, int bands) : height_(height), width_(width), bands_(bands) {
        require_nonempty(height, width, "subband family");
        if (bands < 1) throw ParameterError("subband count L must be >= 1");
        if (bands > 20 || std::min(height, width) < (std::size_t{4} << bands)) {
            throw DimensionError(std::to_string(bands) + " subbands need min dimension >= " +
                                 std::to_string(std::size_t{4} << std::min(bands, 20)) + ", image is " +
                                 std::to_string(height) + "x" + std::to_string(width));
        }
        const std::size_t half = width / 2 + 1;
        responses_.assign(static_cast<std::size_t>(bands) + 1, RasterImage(height, half));
        for (std::size_t r = 0; r < height; ++r) {
            const double w2 = bin_frequency(r, height);
            for (std::size_t c = 0; c < half; ++c) {
                const double w1 = bin_frequency(c, width);
                const double radius = std::hypot(w1, w2);
                double previous = 0.0; // Lambda_{j-1}^2
                for (int j = 0; j < bands; ++j) {
                    const double lam = detail::meyer_lowpass(radius, band_cutoff(j));
                    responses_[j](r, c) = std::sqrt(std::max(0.0, lam * lam - previous));
                    previous = lam * lam;
                }
                responses_[bands](r, c) = std::sqrt(std::max(0.0, 1.0 - previous));
            }
        }
    }

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    int bands() const noexcept { return bands_; }
    std::size_t size() const noexcept { return responses_.size(); }

    /// Radius where band j's lowpass window starts rolling off: pi 2^(j-L).
    double band_cutoff(int j) const { return M_PI * std::ldexp(1.0, j - bands_); }

    /// Real response of F_j on the half grid (rows x width/2+1).
    const RasterImage& response(std::size_t j) const { return responses_.at(j); }

    RasterImage spatial(std::size_t j) const {
        const auto& f = response(j);
        HalfSpectrum s{SpectralImage(f.height(), f.width()), width_};
        for (std::size_t b = 0; b < f.size(); ++b) s.bins.data()[b] = f.data()[b];
        return irfft2(s);
    }

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    int bands_ = 0;
    std::vector<RasterImage> responses_;
};

inline SubbandFamily build_subband_family(std::size_t height, std::size_t width, int bands) {
    return SubbandFamily(height, width, bands);
}

/// Non-negative band weights w_0..w_L.
struct WeightVector {
    std::vector<double> values;
    bool monotone = false; ///< require w_j <= w_{j+1}

    static WeightVector defaults() { return {{0.0, 0.1, 0.7, 0.7}, false}; }

    void validate(std::size_t expected) const {
        if (values.size() != expected) {
            throw ParameterError("expected " + std::to_string(expected) + " subband weights, got " +
                                 std::to_string(values.size()));
        }
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (!(values[j] >= 0.0) || !std::isfinite(values[j])) {
                throw ParameterError("subband weight w_" + std::to_string(j) + " must be finite and >= 0");
            }
            if (monotone && j > 0 && values[j] < values[j - 1]) {
                throw ParameterError("subband weights must be non-decreasing (w_" + std::to_string(j) +
                                     " < w_" + std::to_string(j - 1) + ")");
            }
        }
    }
};

namespace detail {

inline void require_family_size(const RasterImage& img, const SubbandFamily& family) {
    if (img.height() != family.height() || img.width() != family.width()) {
        throw DimensionError("image " + std::to_string(img.height()) + "x" + std::to_string(img.width()) +
                             " does not match subband family " + std::to_string(family.height()) + "x" +
                             std::to_string(family.width()));
    }
}

inline RasterImage apply_real_response(const HalfSpectrum& x, const RasterImage& response) {
    HalfSpectrum y = x;
    for (std::size_t b = 0; b < response.size(); ++b) y.bins.data()[b] *= response.data()[b];
    return irfft2(y);
}

} // namespace detail

/// Pieces f_j = F_j * f.
inline std::vector<RasterImage> decompose(const RasterImage& img, const SubbandFamily& family) {
    detail::require_family_size(img, family);
    const HalfSpectrum x = rfft2(img);
    std::vector<RasterImage> pieces;
    pieces.reserve(family.size());
    for (std::size_t j = 0; j < family.size(); ++j) pieces.push_back(detail::apply_real_response(x, family.response(j)));
    return pieces;
}

/// sum_j F_j * pieces[j]; inverts decompose.
inline RasterImage recompose(const std::vector<RasterImage>& pieces, const SubbandFamily& family) {
    if (pieces.size() != family.size()) {
        throw DimensionError("expected " + std::to_string(family.size()) + " subband pieces, got " +
                             std::to_string(pieces.size()));
    }
    RasterImage out(family.height(), family.width());
    for (std::size_t j = 0; j < pieces.size(); ++j) {
        detail::require_family_size(pieces[j], family);
        out += detail::apply_real_response(rfft2(pieces[j]), family.response(j));
    }
    return out;
}

/// Weighted recomposition sum_j w_j F_j * (F_j * f).
inline RasterImage preprocess(const RasterImage& img, const SubbandFamily& family, const WeightVector& weights) {
    detail::require_family_size(img, family);
    weights.validate(family.size());
    RasterImage gain(family.response(0).height(), family.response(0).width());
    for (std::size_t j = 0; j < family.size(); ++j) {
        const auto& f = family.response(j);
        for (std::size_t b = 0; b < gain.size(); ++b) gain.data()[b] += weights.values[j] * f.data()[b] * f.data()[b];
    }
    return detail::apply_real_response(rfft2(img), gain);
}

} // namespace geosep
