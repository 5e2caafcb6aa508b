#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "geosep/error.hpp"
#include "geosep/fft.hpp"
#include "geosep/image.hpp"

namespace geosep {

struct MeasureConfig {
    double gaussian_sigma = 2.0;
    std::vector<double> thresholds = default_thresholds();

    static std::vector<double> default_thresholds() {
        std::vector<double> t;
        for (int i = 1; i <= 99; ++i) t.push_back(i / 100.0);
        return t;
    }

    int kernel_radius() const { return static_cast<int>(std::ceil(3.0 * gaussian_sigma)); }

    void validate() const {
        if (!(gaussian_sigma > 0.0) || !std::isfinite(gaussian_sigma)) {
            throw ParameterError("gaussian sigma must be positive");
        }
        for (double t : thresholds) {
            if (!(t > 0.0 && t < 1.0)) throw ParameterError("thresholds must lie strictly inside (0, 1)");
        }
    }
};

/// Sampled Gaussian on a (2R+1)^2 support, normalized to unit sum.
inline RasterImage gaussian_kernel(double sigma, int radius) {
    if (!(sigma > 0.0) || radius < 0) throw ParameterError("invalid Gaussian kernel parameters");
    const auto n = static_cast<std::size_t>(2 * radius + 1);
    RasterImage k(n, n);
    for (int y = -radius; y <= radius; ++y) {
        for (int x = -radius; x <= radius; ++x) {
            k(static_cast<std::size_t>(y + radius), static_cast<std::size_t>(x + radius)) =
                std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
        }
    }
    k *= 1.0 / sum(k);
    return k;
}

inline RasterImage smooth(const RasterImage& img, const MeasureConfig& cfg) {
    return convolve_periodic(img, gaussian_kernel(cfg.gaussian_sigma, cfg.kernel_radius()));
}

/// 1 where img >= t_abs, else 0.
inline RasterImage binarize(const RasterImage& img, double t_abs) {
    RasterImage out(img.height(), img.width());
    for (std::size_t i = 0; i < img.size(); ++i) out.data()[i] = img.data()[i] >= t_abs ? 1.0 : 0.0;
    return out;
}

/// Estimate mask at threshold T * max(est); a non-positive maximum gives an empty mask.
inline RasterImage estimate_mask(const RasterImage& est, double t) {
    const double peak = max_value(est);
    if (!(peak > 0.0)) return RasterImage(est.height(), est.width());
    return binarize(est, t * peak);
}

/// Ground truth binarized at half its maximum.
inline RasterImage truth_mask(const RasterImage& truth) {
    const double peak = max_value(truth);
    if (!(peak > 0.0)) throw UndefinedMeasureError("ground truth is empty; the measure is undefined");
    return binarize(truth, 0.5 * peak);
}

/// Smoothed truth mask prepared once for evaluation over many thresholds.
class MeasureReference {
public:
    MeasureReference(const RasterImage& truth, const MeasureConfig& cfg) : cfg_(cfg) {
        cfg.validate();
        smoothed_ = smooth(truth_mask(truth), cfg);
        norm_ = l2_norm(smoothed_);
        if (!(norm_ > 0.0)) throw UndefinedMeasureError("smoothed ground truth vanishes");
    }

    /// ||g*truth - g*B_{T max(est)}(est)|| / ||g*truth||.
    double operator()(const RasterImage& est, double t) const {
        require_same_shape(est, smoothed_, "separation measure");
        if (!(t > 0.0 && t < 1.0)) throw ParameterError("threshold T must lie in (0, 1)");
        const RasterImage diff = smoothed_ - smooth(estimate_mask(est, t), cfg_);
        return l2_norm(diff) / norm_;
    }

private:
    MeasureConfig cfg_;
    RasterImage smoothed_;
    double norm_ = 0.0;
};

inline double measure_points(const RasterImage& truth, const RasterImage& est, double t,
                             const MeasureConfig& cfg = {}) {
    return MeasureReference(truth, cfg)(est, t);
}

inline double measure_curves(const RasterImage& truth, const RasterImage& est, double t,
                             const MeasureConfig& cfg = {}) {
    return MeasureReference(truth, cfg)(est, t);
}

/// (T, value) over cfg.thresholds.
inline std::vector<std::pair<double, double>> measure_curve_over_thresholds(const RasterImage& truth,
                                                                           const RasterImage& est,
                                                                           const MeasureConfig& cfg = {}) {
    const MeasureReference ref(truth, cfg);
    std::vector<std::pair<double, double>> out;
    out.reserve(cfg.thresholds.size());
    for (double t : cfg.thresholds) out.emplace_back(t, ref(est, t));
    return out;
}

inline double min_measure(const std::vector<std::pair<double, double>>& curve) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [t, v] : curve) m = std::min(m, v);
    return m;
}

inline constexpr double psnr_cap_db = 200.0;

/// 10 log10(peak^2 / MSE) with peak = max |ref|; identical images give the 200 dB cap.
inline double psnr(const RasterImage& ref, const RasterImage& est) {
    require_same_shape(ref, est, "psnr");
    require_nonempty(ref.height(), ref.width(), "psnr");
    const double peak = max_abs(ref);
    if (!(peak > 0.0)) throw ParameterError("psnr: reference peak must be positive");
    double mse = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = ref.data()[i] - est.data()[i];
        mse += d * d;
    }
    mse /= static_cast<double>(ref.size());
    if (mse == 0.0) return psnr_cap_db;
    return std::min(psnr_cap_db, 10.0 * std::log10(peak * peak / mse));
}

/// CSV with header T,M_p,M_c; both curves must share the same thresholds.
inline std::string measures_csv(const std::vector<std::pair<double, double>>& points,
                                const std::vector<std::pair<double, double>>& curves) {
    if (points.size() != curves.size()) throw DimensionError("measure curves differ in length");
    std::ostringstream out;
    out.precision(10);
    out << "T,M_p,M_c\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << points[i].first << ',' << points[i].second << ',' << curves[i].second << '\n';
    }
    return out.str();
}

} // namespace geosep
