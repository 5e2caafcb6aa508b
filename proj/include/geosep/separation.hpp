#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geosep/error.hpp"
#include "geosep/image.hpp"
#include "geosep/shearlets.hpp"
#include "geosep/subband.hpp"
#include "geosep/wavelets.hpp"

namespace geosep {

enum class Schedule { linear, exponential };

inline const char* to_string(Schedule s) { return s == Schedule::linear ? "linear" : "exponential"; }

/// Shrinkage rule applied to detail coefficients inside the solver.
enum class Thresholding { hard, soft };

inline const char* to_string(Thresholding t) { return t == Thresholding::hard ? "hard" : "soft"; }

inline Thresholding parse_thresholding(const std::string& name) {
    if (name == "hard") return Thresholding::hard;
    if (name == "soft") return Thresholding::soft;
    throw ConfigError("unknown thresholding '" + name + "' (expected hard or soft)");
}

inline Schedule parse_schedule(const std::string& name) {
    if (name == "linear") return Schedule::linear;
    if (name == "exponential" || name == "exp") return Schedule::exponential;
    throw ConfigError("unknown threshold schedule '" + name + "' (expected linear or exp)");
}

struct SolverConfig {
    int iterations = 15;
    double lambda_max_factor = 1.0;
    std::optional<double> lambda_min; ///< unset: 3 x estimated noise level
    Schedule schedule = Schedule::linear;
    Thresholding thresholding = Thresholding::hard;
    std::optional<double> rho;        ///< unset: calibrated from the input
    WaveletSpec wavelets = WaveletSpec::cdf97(4);
    ShearletSpec shearlets;
    int subbands = 3;
    WeightVector weights = WeightVector::defaults();

    void validate() const {
        if (iterations < 1) throw ConfigError("iterations must be >= 1");
        if (!(lambda_max_factor > 0.0 && lambda_max_factor <= 1.0)) {
            throw ConfigError("lambda_max_factor must lie in (0, 1]");
        }
        if (lambda_min && !(*lambda_min >= 0.0 && std::isfinite(*lambda_min))) {
            throw ConfigError("lambda_min must be finite and >= 0");
        }
        if (rho && !(*rho > 0.0 && std::isfinite(*rho))) throw ConfigError("rho must be finite and > 0");
    }
};

struct IterationRecord {
    int iteration = 0;
    double lambda = 0.0;
    double residual_norm = 0.0;
    double l1_wavelet = 0.0;  ///< l1 norm of the wavelet detail coefficients of W
    double l1_shearlet = 0.0; ///< l1 norm of the directional shearlet coefficients of S
};

struct SeparationResult {
    RasterImage points;   ///< W
    RasterImage curves;   ///< S
    RasterImage residual; ///< f_tilde - W - S
    std::vector<IterationRecord> trace;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    double rho = 1.0;
    double noise_sigma = 0.0;
};

/// Solver state right after an iteration.
struct IterationState {
    const RasterImage& points;
    const RasterImage& curves;
    const RasterImage& residual;
};

using IterationObserver = std::function<void(const IterationRecord&, const IterationState&)>;

inline double soft_threshold(double c, double lambda) {
    if (c > lambda) return c - lambda;
    if (c < -lambda) return c + lambda;
    return 0.0;
}

inline double hard_threshold(double c, double lambda) { return std::abs(c) > lambda ? c : 0.0; }

inline void soft_threshold_inplace(RasterImage& plane, double lambda) {
    for (double& v : plane.values()) v = soft_threshold(v, lambda);
}

inline void hard_threshold_inplace(RasterImage& plane, double lambda) {
    for (double& v : plane.values()) v = hard_threshold(v, lambda);
}

inline void threshold_inplace(RasterImage& plane, double lambda, Thresholding kind) {
    if (kind == Thresholding::soft) {
        soft_threshold_inplace(plane, lambda);
    } else {
        hard_threshold_inplace(plane, lambda);
    }
}

namespace detail {
inline void require_threshold(double lambda) {
    if (!(lambda >= 0.0)) throw ParameterError("threshold must be >= 0, got " + std::to_string(lambda));
}
} // namespace detail

/// Thresholds detail planes; plane i uses lambda * scale[i] (scale empty: 1). The
/// approximation plane is left alone.
inline WaveletCoefficients threshold(WaveletCoefficients coeffs, double lambda, Thresholding kind,
                                     const std::vector<double>& scale = {}) {
    detail::require_threshold(lambda);
    if (!scale.empty() && scale.size() != coeffs.details.size()) {
        throw DimensionError("wavelet threshold scale count mismatch");
    }
    for (std::size_t i = 0; i < coeffs.details.size(); ++i) {
        threshold_inplace(coeffs.details[i].plane, lambda * (scale.empty() ? 1.0 : scale[i]), kind);
    }
    return coeffs;
}

/// Thresholds directional planes; plane i uses lambda * scale[i]. Lowpass planes are exempt.
inline ShearletCoefficients threshold(ShearletCoefficients coeffs, double lambda, Thresholding kind,
                                      const std::vector<double>& scale = {}) {
    detail::require_threshold(lambda);
    if (!scale.empty() && scale.size() != coeffs.planes.size()) {
        throw DimensionError("shearlet threshold scale count mismatch");
    }
    parallel_for(coeffs.planes.size(), [&](std::size_t i) {
        if (coeffs.index[i].cone == Cone::lowpass) return;
        threshold_inplace(coeffs.planes[i], lambda * (scale.empty() ? 1.0 : scale[i]), kind);
    });
    return coeffs;
}

inline WaveletCoefficients soft_threshold(WaveletCoefficients coeffs, double lambda,
                                          const std::vector<double>& scale = {}) {
    return threshold(std::move(coeffs), lambda, Thresholding::soft, scale);
}

inline ShearletCoefficients soft_threshold(ShearletCoefficients coeffs, double lambda,
                                           const std::vector<double>& scale = {}) {
    return threshold(std::move(coeffs), lambda, Thresholding::soft, scale);
}

inline std::vector<double> threshold_schedule(double lambda_max, double lambda_min, int iterations,
                                              Schedule kind) {
    if (iterations < 1) throw ParameterError("iterations must be >= 1");
    if (!(lambda_min >= 0.0) || !(lambda_max >= lambda_min) || !std::isfinite(lambda_max)) {
        throw ParameterError("threshold schedule needs lambda_max >= lambda_min >= 0");
    }
    std::vector<double> out(static_cast<std::size_t>(iterations), lambda_max);
    if (iterations == 1) return out;
    const double steps = static_cast<double>(iterations - 1);
    if (kind == Schedule::linear) {
        for (int t = 1; t < iterations; ++t) out[t] = lambda_max + (lambda_min - lambda_max) * (t / steps);
        out.back() = lambda_min;
        return out;
    }
    const double floor = std::max(lambda_min, 1e-12);
    if (lambda_max <= floor) return out;
    const double ratio = floor / lambda_max;
    for (int t = 1; t < iterations; ++t) out[t] = lambda_max * std::pow(ratio, t / steps);
    out.back() = floor;
    return out;
}

namespace detail {

inline double median_inplace(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
    return m;
}

/// Median absolute deviation / 0.6745.
inline double mad_sigma(const RasterImage& plane) {
    std::vector<double> v(plane.values().begin(), plane.values().end());
    const double med = median_inplace(v);
    for (double& x : v) x = std::abs(x - med);
    return median_inplace(v) / 0.6745;
}

/// Median of the largest 1% of the values (at least one).
inline double top_percentile_median(std::vector<double>& mags) {
    if (mags.empty()) return 0.0;
    const std::size_t keep = std::max<std::size_t>(1, mags.size() / 100);
    std::nth_element(mags.begin(), mags.end() - static_cast<long>(keep), mags.end());
    std::vector<double> top(mags.end() - static_cast<long>(keep), mags.end());
    return median_inplace(top);
}

inline double detail_l1(const WaveletCoefficients& c) {
    double acc = 0.0;
    for (const auto& d : c.details) {
        for (double v : d.plane.values()) acc += std::abs(v);
    }
    return acc;
}

inline double directional_l1(const ShearletCoefficients& c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.planes.size(); ++i) {
        if (c.index[i].cone == Cone::lowpass) continue;
        for (double v : c.planes[i].values()) acc += std::abs(v);
    }
    return acc;
}

} // namespace detail

/// Dictionaries at one image size plus the per-plane filter norms used to put
/// coefficients on a common scale before thresholding.
struct Dictionaries {
    WaveletSpec wavelets;
    std::vector<double> wavelet_norms;
    ShearletFilterBank bank;
    ShearletFilterBank dual;
    std::vector<double> shearlet_norms;

    Dictionaries(std::size_t height, std::size_t width, const WaveletSpec& w, const ShearletSpec& s)
        : wavelets(w), wavelet_norms(uwt_detail_norms(w)), bank(build_filter_bank(height, width, s)),
          dual(compute_dual_bank(bank)) {
        detail::require_levels_fit(height, width, w);
        shearlet_norms.reserve(bank.size());
        for (std::size_t i = 0; i < bank.size(); ++i) shearlet_norms.push_back(bank.norm(i));
    }
};

/// Alternating analysis-side shrinkage with a decreasing threshold. f_tilde is the
/// (preprocessed) image; returns W (points), S (curves) and the residual.
inline SeparationResult separate(const RasterImage& f_tilde, const SolverConfig& config,
                                 const IterationObserver& observer = {}) {
    config.validate();
    require_nonempty(f_tilde.height(), f_tilde.width(), "separate");
    if (!all_finite(f_tilde)) throw NumericError("separate: input contains non-finite values");
    const Dictionaries dict(f_tilde.height(), f_tilde.width(), config.wavelets, config.shearlets);

    SeparationResult result;
    // Initial analysis on normalized planes sets lambda_max, sigma and rho.
    {
        const auto wc = uwt_forward(f_tilde, dict.wavelets);
        const auto sc = shearlet_forward(f_tilde, dict.bank);
        std::vector<double> wmags;
        std::vector<double> smags;
        wmags.reserve(wc.details.size() * f_tilde.size());
        for (std::size_t i = 0; i < wc.details.size(); ++i) {
            for (double v : wc.details[i].plane.values()) wmags.push_back(std::abs(v) / dict.wavelet_norms[i]);
        }
        smags.reserve((sc.planes.size() - 1) * f_tilde.size());
        for (std::size_t i = 0; i < sc.planes.size(); ++i) {
            if (sc.index[i].cone == Cone::lowpass) continue;
            for (double v : sc.planes[i].values()) smags.push_back(std::abs(v) / dict.shearlet_norms[i]);
        }
        const double wmax = wmags.empty() ? 0.0 : *std::max_element(wmags.begin(), wmags.end());
        const double smax = smags.empty() ? 0.0 : *std::max_element(smags.begin(), smags.end());
        result.lambda_max = config.lambda_max_factor * std::max(wmax, smax);

        RasterImage finest_diagonal = wc.details[2].plane;
        finest_diagonal *= 1.0 / dict.wavelet_norms[2];
        result.noise_sigma = detail::mad_sigma(finest_diagonal);
        if (config.lambda_min) {
            if (*config.lambda_min > result.lambda_max) {
                throw ConfigError("lambda_min " + std::to_string(*config.lambda_min) +
                                  " exceeds lambda_max " + std::to_string(result.lambda_max));
            }
            result.lambda_min = *config.lambda_min;
        } else {
            result.lambda_min = std::min(3.0 * result.noise_sigma, result.lambda_max);
        }

        if (config.rho) {
            result.rho = *config.rho;
        } else {
            const double wtop = detail::top_percentile_median(wmags);
            const double stop = detail::top_percentile_median(smags);
            result.rho = (wtop > 0.0 && stop > 0.0) ? stop / wtop : 1.0;
        }
    }

    const auto lambdas = threshold_schedule(result.lambda_max, result.lambda_min, config.iterations,
                                            config.schedule);
    RasterImage w(f_tilde.height(), f_tilde.width());
    RasterImage s(f_tilde.height(), f_tilde.width());
    for (int t = 0; t < config.iterations; ++t) {
        const double lambda = lambdas[static_cast<std::size_t>(t)];
        RasterImage r = f_tilde - w - s;
        const auto wc = threshold(uwt_forward(w + r, dict.wavelets), lambda, config.thresholding,
                                  dict.wavelet_norms);
        w = uwt_inverse(wc, dict.wavelets);

        r = f_tilde - w - s;
        const auto sc = threshold(shearlet_forward(s + r, dict.bank), lambda * result.rho,
                                  config.thresholding, dict.shearlet_norms);
        s = shearlet_inverse(sc, dict.dual);

        if (!all_finite(w) || !all_finite(s)) {
            throw NumericError("separate: non-finite values at iteration " + std::to_string(t + 1));
        }
        IterationRecord rec;
        rec.iteration = t + 1;
        rec.lambda = lambda;
        const RasterImage residual = f_tilde - w - s;
        rec.residual_norm = l2_norm(residual);
        rec.l1_wavelet = detail::detail_l1(uwt_forward(w, dict.wavelets));
        rec.l1_shearlet = detail::directional_l1(shearlet_forward(s, dict.bank));
        result.trace.push_back(rec);
        if (observer) observer(rec, IterationState{w, s, residual});
    }
    result.residual = f_tilde - w - s;
    result.points = std::move(w);
    result.curves = std::move(s);
    return result;
}

/// Subband preprocessing with the configured weights followed by separate().
inline SeparationResult separate_image(const RasterImage& f, const SolverConfig& config,
                                       const IterationObserver& observer = {}) {
    config.validate();
    const auto family = build_subband_family(f.height(), f.width(), config.subbands);
    return separate(preprocess(f, family, config.weights), config, observer);
}

/// CSV with header iteration,lambda,residual_norm,l1_wavelet,l1_shearlet.
inline std::string trace_csv(const std::vector<IterationRecord>& trace) {
    std::ostringstream out;
    out << "iteration,lambda,residual_norm,l1_wavelet,l1_shearlet\n";
    out << std::setprecision(10);
    for (const auto& rec : trace) {
        out << rec.iteration << ',' << rec.lambda << ',' << rec.residual_norm << ',' << rec.l1_wavelet << ','
            << rec.l1_shearlet << '\n';
    }
    return out.str();
}

} // namespace geosep
