#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <utility>
#include <vector>

#include "geosep/error.hpp"
#include "geosep/image_io.hpp"

namespace geosep {

using Rgb = std::array<unsigned char, 3>;

struct PlotSeries {
    std::vector<std::pair<double, double>> points; ///< (x, y)
    Rgb color{0, 0, 0};
};

/// Minimal raster line plot: white canvas, framed axes, grid at quarter steps.
class LinePlot {
public:
    LinePlot(std::size_t width = 640, std::size_t height = 400) : width_(width), height_(height) {
        if (width < 64 || height < 64) throw ParameterError("plot canvas must be at least 64x64");
        pixels_.assign(width * height * 3, 255);
    }

    void set_x_range(double lo, double hi) { x_ = {lo, hi}; }
    void set_y_range(double lo, double hi) { y_ = {lo, hi}; }

    void add(PlotSeries s) { series_.push_back(std::move(s)); }

    std::vector<unsigned char> render() {
        if (!(x_.second > x_.first) || !(y_.second > y_.first)) throw ParameterError("plot range is empty");
        std::fill(pixels_.begin(), pixels_.end(), 255);
        const Rgb grid{220, 220, 220};
        const Rgb axis{60, 60, 60};
        for (int i = 1; i < 4; ++i) {
            const double fx = x_.first + (x_.second - x_.first) * i / 4.0;
            const double fy = y_.first + (y_.second - y_.first) * i / 4.0;
            line(map_x(fx), top(), map_x(fx), bottom(), grid, 1);
            line(left(), map_y(fy), right(), map_y(fy), grid, 1);
        }
        line(left(), top(), right(), top(), axis, 1);
        line(left(), bottom(), right(), bottom(), axis, 1);
        line(left(), top(), left(), bottom(), axis, 1);
        line(right(), top(), right(), bottom(), axis, 1);
        for (const auto& s : series_) {
            for (std::size_t i = 1; i < s.points.size(); ++i) {
                const auto [x0, y0] = s.points[i - 1];
                const auto [x1, y1] = s.points[i];
                if (!std::isfinite(y0) || !std::isfinite(y1)) continue;
                line(map_x(x0), map_y(y0), map_x(x1), map_y(y1), s.color, 2);
            }
        }
        return pixels_;
    }

    void save(const std::filesystem::path& path) { save_rgb_png(render(), width_, height_, path); }

private:
    static constexpr int margin = 24;

    double left() const { return margin; }
    double right() const { return static_cast<double>(width_) - margin; }
    double top() const { return margin; }
    double bottom() const { return static_cast<double>(height_) - margin; }

    double map_x(double x) const { return left() + (x - x_.first) / (x_.second - x_.first) * (right() - left()); }
    double map_y(double y) const {
        const double c = std::clamp(y, y_.first, y_.second);
        return bottom() - (c - y_.first) / (y_.second - y_.first) * (bottom() - top());
    }

    void dot(long x, long y, const Rgb& c) {
        if (x < 0 || y < 0 || x >= static_cast<long>(width_) || y >= static_cast<long>(height_)) return;
        auto* p = &pixels_[(static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)) * 3];
        std::copy(c.begin(), c.end(), p);
    }

    void line(double x0, double y0, double x1, double y1, const Rgb& c, int thickness) {
        const double len = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
        const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            const long x = std::lround(x0 + t * (x1 - x0));
            const long y = std::lround(y0 + t * (y1 - y0));
            for (int dy = 0; dy < thickness; ++dy) {
                for (int dx = 0; dx < thickness; ++dx) dot(x + dx, y + dy, c);
            }
        }
    }

    std::size_t width_;
    std::size_t height_;
    std::pair<double, double> x_{0.0, 1.0};
    std::pair<double, double> y_{0.0, 1.0};
    std::vector<PlotSeries> series_;
    std::vector<unsigned char> pixels_;
};

} // namespace geosep
