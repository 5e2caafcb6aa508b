#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geosep/error.hpp"

namespace geosep {

/// Dense 2D grid stored row-major. Rows run along y (second axis, n2),
/// columns along x (first axis, n1).
template <typename T>
class Grid {
public:
    using value_type = T;

    Grid() = default;

    Grid(std::size_t height, std::size_t width, T fill = T{})
        : height_(height), width_(width), data_(height * width, fill) {}

    Grid(std::size_t height, std::size_t width, std::vector<T> data)
        : height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != height_ * width_) {
            throw DimensionError("grid data length " + std::to_string(data_.size()) +
                                 " does not match " + std::to_string(height_) + "x" +
                                 std::to_string(width_));
        }
    }

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * width_ + col]; }
    const T& operator()(std::size_t row, std::size_t col) const noexcept {
        return data_[row * width_ + col];
    }

    /// Periodic access with signed indices.
    const T& wrapped(long row, long col) const noexcept {
        const long h = static_cast<long>(height_);
        const long w = static_cast<long>(width_);
        long r = row % h;
        long c = col % w;
        if (r < 0) r += h;
        if (c < 0) c += w;
        return data_[static_cast<std::size_t>(r) * width_ + static_cast<std::size_t>(c)];
    }

    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }
    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * width_, width_}; }
    std::span<const T> row(std::size_t r) const noexcept {
        return {data_.data() + r * width_, width_};
    }

    bool same_shape(const Grid& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    Grid& operator+=(const Grid& other) {
        require_same_shape(other, "+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        return *this;
    }
    Grid& operator-=(const Grid& other) {
        require_same_shape(other, "-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
        return *this;
    }
    Grid& operator*=(T factor) noexcept {
        for (auto& v : data_) v *= factor;
        return *this;
    }

    friend Grid operator+(Grid a, const Grid& b) { return a += b; }
    friend Grid operator-(Grid a, const Grid& b) { return a -= b; }
    friend Grid operator*(Grid a, T factor) { return a *= factor; }
    friend Grid operator*(T factor, Grid a) { return a *= factor; }

    bool operator==(const Grid&) const = default;

private:
    void require_same_shape(const Grid& other, const char* op) const {
        if (!same_shape(other)) {
            throw DimensionError(std::string("shape mismatch in ") + op + ": " +
                                 std::to_string(height_) + "x" + std::to_string(width_) +
                                 " vs " + std::to_string(other.height_) + "x" +
                                 std::to_string(other.width_));
        }
    }

    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<T> data_;
};

using RasterImage = Grid<double>;
using SpectralImage = Grid<std::complex<double>>;

inline void require_nonempty(std::size_t height, std::size_t width, const char* what) {
    if (height == 0 || width == 0) {
        throw DimensionError(std::string(what) + ": image must have positive dimensions");
    }
}

template <typename T>
void require_same_shape(const Grid<T>& a, const Grid<T>& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(what) + ": size mismatch " + std::to_string(a.height()) +
                             "x" + std::to_string(a.width()) + " vs " +
                             std::to_string(b.height()) + "x" + std::to_string(b.width()));
    }
}

inline double dot(const RasterImage& a, const RasterImage& b) {
    require_same_shape(a, b, "dot");
    return std::inner_product(a.values().begin(), a.values().end(), b.values().begin(), 0.0);
}

inline double l2_norm(const RasterImage& img) { return std::sqrt(dot(img, img)); }

inline double max_value(const RasterImage& img) {
    if (img.empty()) return 0.0;
    return *std::max_element(img.values().begin(), img.values().end());
}

inline double max_abs(const RasterImage& img) {
    double m = 0.0;
    for (double v : img.values()) m = std::max(m, std::abs(v));
    return m;
}

inline double sum(const RasterImage& img) {
    return std::accumulate(img.values().begin(), img.values().end(), 0.0);
}

inline bool all_finite(const RasterImage& img) {
    return std::all_of(img.values().begin(), img.values().end(),
                       [](double v) { return std::isfinite(v); });
}

/// ||a - b||_2 / ||b||_2 (or the absolute error when b vanishes).
inline double relative_error(const RasterImage& a, const RasterImage& b) {
    require_same_shape(a, b, "relative_error");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        num += d * d;
        den += b.data()[i] * b.data()[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// out(r, c) = in(r - dy, c - dx), periodically.
template <typename T>
Grid<T> circshift(const Grid<T>& img, long dy, long dx) {
    Grid<T> out(img.height(), img.width());
    for (std::size_t r = 0; r < img.height(); ++r) {
        for (std::size_t c = 0; c < img.width(); ++c) {
            out(r, c) = img.wrapped(static_cast<long>(r) - dy, static_cast<long>(c) - dx);
        }
    }
    return out;
}

template <typename T>
Grid<T> transpose(const Grid<T>& img) {
    Grid<T> out(img.width(), img.height());
    for (std::size_t r = 0; r < img.height(); ++r) {
        for (std::size_t c = 0; c < img.width(); ++c) out(c, r) = img(r, c);
    }
    return out;
}

/// Unit impulse at (row, col).
inline RasterImage impulse(std::size_t height, std::size_t width, std::size_t row = 0,
                           std::size_t col = 0) {
    RasterImage img(height, width);
    img(row, col) = 1.0;
    return img;
}

/// Signed frequency (radians) of DFT bin `index` on an axis of length `n`, in [-pi, pi).
inline double bin_frequency(std::size_t index, std::size_t n) {
    const long i = static_cast<long>(index);
    const long len = static_cast<long>(n);
    const long signed_index = (2 * i >= len) ? i - len : i;
    return 2.0 * M_PI * static_cast<double>(signed_index) / static_cast<double>(len);
}

/// Signed spatial offset of grid index `index` on a periodic axis of length `n`.
inline long signed_offset(std::size_t index, std::size_t n) {
    const long i = static_cast<long>(index);
    const long len = static_cast<long>(n);
    return (2 * i >= len) ? i - len : i;
}

} // namespace geosep
