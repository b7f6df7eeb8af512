#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace vasc {

/// Integer pixel coordinate; x is the column, y the row.
struct Pixel {
    int x = 0;
    int y = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
    /// Row-major order (row first, then column).
    friend bool operator<(const Pixel& a, const Pixel& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Dense row-major 2-D grid. The Tag parameter keeps semantically different
/// grids (likelihoods, masks, fields) from being mixed up by accident.
template <typename T, typename Tag>
class Grid {
public:
    using value_type = T;

    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width < 0 || height < 0) {
            throw std::invalid_argument("grid dimensions must be non-negative");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }
    Grid(int width, int height, std::vector<T> values)
        : width_(width), height_(height), data_(std::move(values)) {
        if (width < 0 || height < 0 ||
            data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw std::invalid_argument("grid value count does not match dimensions");
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    bool contains(Pixel p) const { return contains(p.x, p.y); }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    T& operator()(int x, int y) { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const { return data_[index(x, y)]; }
    T& operator[](Pixel p) { return data_[index(p.x, p.y)]; }
    const T& operator[](Pixel p) const { return data_[index(p.x, p.y)]; }

    T& at(int x, int y) {
        if (!contains(x, y)) throw std::out_of_range("grid access out of range");
        return data_[index(x, y)];
    }
    const T& at(int x, int y) const {
        if (!contains(x, y)) throw std::out_of_range("grid access out of range");
        return data_[index(x, y)];
    }

    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

    template <typename OtherT, typename OtherTag>
    bool same_shape(const Grid<OtherT, OtherTag>& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

struct LikelihoodTag {};
struct MaskTag {};
struct FieldTag {};
struct ProbabilityTag {};

/// Per-pixel vessel confidence in [0,255].
using LikelihoodMap = Grid<std::uint8_t, LikelihoodTag>;
/// 1 = foreground, 0 = background.
using BinaryMask = Grid<std::uint8_t, MaskTag>;
/// Non-negative real-valued field (distances, accumulated log distances).
using ScalarField = Grid<double, FieldTag>;
/// Per-pixel probability in [0,1].
using ProbabilityGrid = Grid<double, ProbabilityTag>;

}  // namespace vasc
