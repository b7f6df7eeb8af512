#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "vasc/grid.hpp"

namespace oracle {

// O(n^2) nearest background, with a one-pixel background ring outside the
// image.
inline vasc::ScalarField brute_force_dt(const vasc::BinaryMask& m) {
    const int w = m.width(), h = m.height();
    std::vector<std::pair<int, int>> bg;
    for (int y = -1; y <= h; ++y) {
        for (int x = -1; x <= w; ++x) {
            if (!m.contains(x, y) || !m(x, y)) bg.push_back({x, y});
        }
    }
    vasc::ScalarField out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m(x, y)) continue;
            long best = std::numeric_limits<long>::max();
            for (auto [bx, by] : bg) best = std::min<long>(best, long(bx - x) * (bx - x) + long(by - y) * (by - y));
            out(x, y) = std::sqrt(static_cast<double>(best));
        }
    }
    return out;
}

inline double knudtson(std::vector<double> w, double p) {
    while (w.size() > 1) {
        std::sort(w.begin(), w.end(), std::greater<>());
        std::vector<double> next;
        std::size_t i = 0, j = w.size() - 1;
        for (; i < j; ++i, --j) next.push_back(p * std::sqrt(w[i] * w[i] + w[j] * w[j]));
        if (i == j) next.push_back(w[i]);
        w = next;
    }
    return w.at(0);
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Arc length of y = a sin(2 pi x / lambda) over [x0, x1].
inline double sine_arc(double a, double lambda, double x0, double x1) {
    const double k = 2.0 * M_PI / lambda;
    return simpson([&](double x) { return std::sqrt(1.0 + std::pow(a * k * std::cos(k * x), 2)); }, x0, x1);
}

inline vasc::BinaryMask random_mask(std::mt19937& rng, int max_side, double density) {
    std::uniform_int_distribution<int> side(1, max_side);
    std::bernoulli_distribution fg(density);
    vasc::BinaryMask m(side(rng), side(rng));
    for (auto& v : m.values()) v = fg(rng) ? 1 : 0;
    return m;
}

}  // namespace oracle
