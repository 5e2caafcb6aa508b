#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "geosep/error.hpp"
#include "geosep/image.hpp"

namespace geosep {

/// Pixel coordinates: x along columns, y along rows; pixel centers at integers.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

struct PointSceneSpec {
    std::vector<Point2> positions;
    std::vector<double> amplitudes; ///< one per position, or empty for all 1
    double r_clamp = 1.0;

    double amplitude(std::size_t i) const { return amplitudes.empty() ? 1.0 : amplitudes[i]; }

    void validate(std::size_t height, std::size_t width) const {
        if (!(r_clamp >= 0.5)) throw ParameterError("point core clamp radius must be >= 0.5");
        if (!amplitudes.empty() && amplitudes.size() != positions.size()) {
            throw ParameterError("point amplitude count does not match position count");
        }
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const auto& p = positions[i];
            if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= width - 1.0 && p.y <= height - 1.0)) {
                throw ParameterError("point " + std::to_string(i) + " lies outside the image");
            }
            if (!(amplitude(i) > 0.0)) throw ParameterError("point amplitudes must be positive");
        }
    }
};

enum class CurveKind { circle, ellipse, spline };

inline const char* to_string(CurveKind k) {
    switch (k) {
    case CurveKind::circle: return "circle";
    case CurveKind::ellipse: return "ellipse";
    case CurveKind::spline: return "spline";
    }
    return "?";
}

/// Closed curve parameterized over t in [0, 1).
struct Curve {
    CurveKind kind = CurveKind::circle;
    Point2 center;
    double axis_a = 0.0;   ///< radius for circles
    double axis_b = 0.0;
    double rotation = 0.0; ///< radians, ellipse only
    std::vector<Point2> control; ///< spline only

    static Curve circle(Point2 c, double r) { return {CurveKind::circle, c, r, r, 0.0, {}}; }
    static Curve ellipse(Point2 c, double a, double b, double rot) {
        return {CurveKind::ellipse, c, a, b, rot, {}};
    }
    /// Closed uniform Catmull-Rom spline through the control points.
    static Curve spline(std::vector<Point2> pts) {
        Curve c;
        c.kind = CurveKind::spline;
        c.control = std::move(pts);
        return c;
    }

    Point2 at(double t) const {
        switch (kind) {
        case CurveKind::circle:
        case CurveKind::ellipse: {
            const double a = 2.0 * M_PI * t;
            const double u = axis_a * std::cos(a);
            const double v = axis_b * std::sin(a);
            const double cr = std::cos(rotation);
            const double sr = std::sin(rotation);
            return {center.x + cr * u - sr * v, center.y + sr * u + cr * v};
        }
        case CurveKind::spline: {
            const std::size_t n = control.size();
            const double s = t * static_cast<double>(n);
            const auto seg = std::min(static_cast<std::size_t>(s), n - 1);
            const double f = s - static_cast<double>(seg);
            const Point2& p0 = control[(seg + n - 1) % n];
            const Point2& p1 = control[seg];
            const Point2& p2 = control[(seg + 1) % n];
            const Point2& p3 = control[(seg + 2) % n];
            const double f2 = f * f;
            const double f3 = f2 * f;
            auto blend = [&](double a, double b, double c, double d) {
                return 0.5 * ((2.0 * b) + (-a + c) * f + (2.0 * a - 5.0 * b + 4.0 * c - d) * f2 +
                              (-a + 3.0 * b - 3.0 * c + d) * f3);
            };
            return {blend(p0.x, p1.x, p2.x, p3.x), blend(p0.y, p1.y, p2.y, p3.y)};
        }
        }
        return center;
    }

    /// Same curve with x and y exchanged.
    Curve transposed() const {
        Curve out = *this;
        out.center = {center.y, center.x};
        if (kind == CurveKind::ellipse) out.rotation = 0.5 * M_PI - rotation;
        for (auto& p : out.control) p = {p.y, p.x};
        return out;
    }

    void validate(std::size_t height, std::size_t width) const {
        auto inside = [&](Point2 p) {
            return p.x >= 0.0 && p.y >= 0.0 && p.x <= width - 1.0 && p.y <= height - 1.0;
        };
        switch (kind) {
        case CurveKind::circle:
        case CurveKind::ellipse:
            if (!(axis_a > 0.0 && axis_b > 0.0)) {
                throw ParameterError(std::string(to_string(kind)) + " needs positive radius/axes");
            }
            if (!inside(center)) throw ParameterError(std::string(to_string(kind)) + " center outside the image");
            break;
        case CurveKind::spline: {
            if (control.size() < 3) throw ParameterError("closed spline needs at least 3 control points");
            for (const auto& p : control) {
                if (!inside(p)) throw ParameterError("spline control point outside the image");
            }
            bool degenerate = true;
            for (const auto& p : control) degenerate = degenerate && p == control.front();
            if (degenerate) throw ParameterError("degenerate curve: zero length");
            break;
        }
        }
    }
};

struct CurveSceneSpec {
    std::vector<Curve> curves;
    double intensity = 1.0;
    double stroke_width = 1.0;

    void validate(std::size_t height, std::size_t width) const {
        if (!(intensity > 0.0)) throw ParameterError("curve intensity must be positive");
        if (!(stroke_width > 0.0)) throw ParameterError("stroke width must be positive");
        for (const auto& c : curves) c.validate(height, width);
    }
};

/// Scales so the maximum becomes 1; all-zero images are returned unchanged.
inline RasterImage peak_normalized(RasterImage img) {
    const double peak = max_value(img);
    if (peak > 0.0) img *= 1.0 / peak;
    return img;
}

/// sum_i a_i max(|x - x_i|, r_clamp)^(-3/2), peak-normalized.
inline RasterImage gen_points(std::size_t height, std::size_t width, const PointSceneSpec& spec) {
    require_nonempty(height, width, "gen_points");
    spec.validate(height, width);
    RasterImage img(height, width);
    for (std::size_t i = 0; i < spec.positions.size(); ++i) {
        const auto p = spec.positions[i];
        const double a = spec.amplitude(i);
        for (std::size_t r = 0; r < height; ++r) {
            const double dy = static_cast<double>(r) - p.y;
            for (std::size_t c = 0; c < width; ++c) {
                const double dx = static_cast<double>(c) - p.x;
                const double d = std::max(std::hypot(dx, dy), spec.r_clamp);
                img(r, c) += a / (d * std::sqrt(d));
            }
        }
    }
    return peak_normalized(std::move(img));
}

namespace detail {

/// Bilinear deposit of `mass` at (x, y); contributions outside the grid are dropped.
inline void splat(RasterImage& img, double x, double y, double mass) {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const double ax = x - fx;
    const double ay = y - fy;
    const long c0 = static_cast<long>(fx);
    const long r0 = static_cast<long>(fy);
    const double w[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
    const long rr[4] = {r0, r0, r0 + 1, r0 + 1};
    const long cc[4] = {c0, c0 + 1, c0, c0 + 1};
    for (int k = 0; k < 4; ++k) {
        if (rr[k] < 0 || cc[k] < 0 || rr[k] >= static_cast<long>(img.height()) ||
            cc[k] >= static_cast<long>(img.width())) {
            continue;
        }
        img(static_cast<std::size_t>(rr[k]), static_cast<std::size_t>(cc[k])) += mass * w[k];
    }
}

/// Closed polyline with at most `max_step` px between consecutive vertices; the
/// vertex count is a multiple of 4 so circles sample symmetrically.
inline std::vector<Point2> sample_closed_curve(const Curve& curve, double max_step) {
    std::size_t n = 64;
    if (curve.kind == CurveKind::spline) n = std::max<std::size_t>(n, 4 * curve.control.size());
    for (;;) {
        std::vector<Point2> pts(n);
        for (std::size_t i = 0; i < n; ++i) pts[i] = curve.at(static_cast<double>(i) / static_cast<double>(n));
        double longest = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = pts[i];
            const auto& b = pts[(i + 1) % n];
            longest = std::max(longest, std::hypot(b.x - a.x, b.y - a.y));
        }
        if (longest <= max_step || n > (std::size_t{1} << 24)) return pts;
        n *= 2;
    }
}

} // namespace detail

/// Rasterizes curves as line measures: every polyline segment deposits
/// intensity x length x stroke width at its midpoint (split across the stroke).
/// Not normalized; total mass is intensity x stroke width x arc length.
inline RasterImage rasterize_curves(std::size_t height, std::size_t width, const CurveSceneSpec& spec) {
    require_nonempty(height, width, "gen_curves");
    spec.validate(height, width);
    RasterImage img(height, width);
    const int strands = spec.stroke_width <= 1.0 ? 1 : static_cast<int>(std::ceil(spec.stroke_width));
    for (const auto& curve : spec.curves) {
        const auto pts = detail::sample_closed_curve(curve, 0.1);
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& a = pts[i];
            const auto& b = pts[(i + 1) % pts.size()];
            const double len = std::hypot(b.x - a.x, b.y - a.y);
            total += len;
            if (len == 0.0) continue;
            const double nx = -(b.y - a.y) / len;
            const double ny = (b.x - a.x) / len;
            const double mx = 0.5 * (a.x + b.x);
            const double my = 0.5 * (a.y + b.y);
            const double mass = spec.intensity * len * spec.stroke_width / strands;
            for (int s = 0; s < strands; ++s) {
                const double off = strands == 1 ? 0.0 : spec.stroke_width * ((s + 0.5) / strands - 0.5);
                detail::splat(img, mx + off * nx, my + off * ny, mass);
            }
        }
        if (total == 0.0) throw ParameterError("degenerate curve: zero length");
    }
    return img;
}

inline RasterImage gen_curves(std::size_t height, std::size_t width, const CurveSceneSpec& spec) {
    return peak_normalized(rasterize_curves(height, width, spec));
}

/// Adds i.i.d. N(0, sigma^2) noise drawn from a 64-bit Mersenne Twister seeded with `seed`.
inline RasterImage add_noise(const RasterImage& img, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("noise sigma must be >= 0");
    RasterImage out = img;
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (double& v : out.values()) v += normal(rng);
    return out;
}

struct Phantom {
    RasterImage image;  ///< clamp(P + C, 0, 1) + noise
    RasterImage points; ///< P
    RasterImage curves; ///< C
};

inline Phantom gen_phantom(std::size_t height, std::size_t width, const PointSceneSpec& points,
                           const CurveSceneSpec& curves, double sigma, std::uint64_t seed) {
    Phantom ph;
    ph.points = gen_points(height, width, points);
    ph.curves = gen_curves(height, width, curves);
    RasterImage sum = ph.points + ph.curves;
    for (double& v : sum.values()) v = std::clamp(v, 0.0, 1.0);
    ph.image = add_noise(sum, sigma, seed);
    return ph;
}

/// A circle, a tilted ellipse and a closed spline with a sharp bend, laid out for
/// 512 x 512 and rescaled to other sizes.
inline CurveSceneSpec default_curve_scene(std::size_t height = 512, std::size_t width = 512) {
    const double sx = (width - 1.0) / 511.0;
    const double sy = (height - 1.0) / 511.0;
    const double s = std::min(sx, sy);
    CurveSceneSpec spec;
    spec.curves.push_back(Curve::circle({170 * sx, 160 * sy}, 85 * s));
    spec.curves.push_back(Curve::ellipse({365 * sx, 215 * sy}, 105 * s, 45 * s, 0.6));
    std::vector<Point2> ctrl = {{110, 395}, {200, 352}, {290, 380}, {350, 330}, {372, 345},
                                {330, 420}, {250, 450}, {170, 440}};
    for (auto& p : ctrl) p = {p.x * sx, p.y * sy};
    spec.curves.push_back(Curve::spline(std::move(ctrl)));
    return spec;
}

/// Twenty equal-amplitude points at seeded random sub-pixel positions, kept away
/// from the border, from each other and from the default curves.
inline PointSceneSpec default_point_scene(std::size_t height = 512, std::size_t width = 512) {
    const double scale = std::min(height, width) / 512.0;
    const double margin = 24.0 * scale;
    const double min_gap = 30.0 * scale;
    const double curve_gap = 12.0 * scale;
    std::vector<Point2> curve_samples;
    for (const auto& c : default_curve_scene(height, width).curves) {
        const auto pts = detail::sample_closed_curve(c, 2.0);
        curve_samples.insert(curve_samples.end(), pts.begin(), pts.end());
    }
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ux(margin, width - 1.0 - margin);
    std::uniform_real_distribution<double> uy(margin, height - 1.0 - margin);
    PointSceneSpec spec;
    for (int attempt = 0; attempt < 100000 && spec.positions.size() < 20; ++attempt) {
        const Point2 p{ux(rng), uy(rng)};
        auto far_from = [&](const std::vector<Point2>& others, double gap) {
            return std::all_of(others.begin(), others.end(),
                               [&](const Point2& q) { return std::hypot(p.x - q.x, p.y - q.y) >= gap; });
        };
        if (far_from(spec.positions, min_gap) && far_from(curve_samples, curve_gap)) spec.positions.push_back(p);
    }
    spec.r_clamp = 1.0;
    return spec;
}

} // namespace geosep
