#include "vasc/raster.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "vasc/errors.hpp"

namespace vasc {

BinaryMask binarize(const LikelihoodMap& map, int threshold) {
    BinaryMask mask(map.width(), map.height());
    auto& out = mask.values();
    const auto& in = map.values();
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = in[i] >= threshold ? 1 : 0;
    }
    return mask;
}

// =============================================================================
// Distance transform
// =============================================================================

namespace {

constexpr double kInf = 1e20;

// 1-D squared distance transform of a sampled function (lower envelope of
// parabolas). f and d have length n; v and z are scratch.
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
    v.resize(static_cast<std::size_t>(n));
    z.resize(static_cast<std::size_t>(n) + 1);
    auto intersect = [f](int q, int p) {
        return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
    };
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double s = intersect(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = intersect(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

ScalarField distance_transform(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    ScalarField out(w, h);
    if (w == 0 || h == 0) return out;

    // One-pixel background ring stands in for everything outside the image.
    const int pw = w + 2;
    const int ph = h + 2;
    std::vector<double> sq(static_cast<std::size_t>(pw) * ph, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (mask(x, y)) sq[static_cast<std::size_t>(y + 1) * pw + (x + 1)] = kInf;
        }
    }

    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> f(static_cast<std::size_t>(std::max(pw, ph)));
    std::vector<double> d(f.size());
    for (int x = 0; x < pw; ++x) {
        for (int y = 0; y < ph; ++y) f[y] = sq[static_cast<std::size_t>(y) * pw + x];
        edt_1d(f.data(), d.data(), ph, v, z);
        for (int y = 0; y < ph; ++y) sq[static_cast<std::size_t>(y) * pw + x] = d[y];
    }
    for (int y = 0; y < ph; ++y) {
        double* row = sq.data() + static_cast<std::size_t>(y) * pw;
        edt_1d(row, d.data(), pw, v, z);
        std::copy_n(d.begin(), pw, row);
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out(x, y) = mask(x, y) ? std::sqrt(sq[static_cast<std::size_t>(y + 1) * pw + (x + 1)]) : 0.0;
        }
    }
    return out;
}

ScalarField boundary_distance(const BinaryMask& mask, double offset) {
    ScalarField dt = distance_transform(mask);
    for (double& v : dt.values()) {
        v = v > 0.0 ? std::max(v - offset, 0.0) : 0.0;
    }
    return dt;
}

// =============================================================================
// Thinning
// =============================================================================

namespace {

// Neighbours in the order P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<int, 8> kDx{0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy{-1, -1, 0, 1, 1, 1, 0, -1};

std::array<std::uint8_t, 8> ring(const BinaryMask& m, int x, int y) {
    std::array<std::uint8_t, 8> p{};
    for (int k = 0; k < 8; ++k) {
        const int nx = x + kDx[k];
        const int ny = y + kDy[k];
        p[k] = m.contains(nx, ny) ? m(nx, ny) : 0;
    }
    return p;
}

int transitions(const std::array<std::uint8_t, 8>& p) {
    int a = 0;
    for (int k = 0; k < 8; ++k) {
        if (!p[k] && p[(k + 1) % 8]) ++a;
    }
    return a;
}

int neighbours(const std::array<std::uint8_t, 8>& p) {
    int b = 0;
    for (auto v : p) b += v;
    return b;
}

bool simple_non_end(const std::array<std::uint8_t, 8>& p) {
    const int b = neighbours(p);
    return b >= 2 && b <= 6 && transitions(p) == 1;
}

// Tip P of a thin diagonal staircase P, Q1, Q2, R: Q1 is P's only 4-neighbour,
// Q2 its only diagonal neighbour, R = Q1 + (Q2 - P) continues the stair and
// Q1 touches nothing else. Plain Zhang-Suen deletes such tips and eats 45
// degree lines from both ends.
bool staircase_tip(const BinaryMask& m, int x, int y, const std::array<std::uint8_t, 8>& p) {
    if (neighbours(p) != 2) return false;
    for (int k = 0; k < 8; ++k) {
        if (!p[k] || !p[(k + 1) % 8]) continue;
        const int four = k % 2 == 0 ? k : (k + 1) % 8;
        const int diag = k % 2 == 0 ? (k + 1) % 8 : k;
        const int q1x = x + kDx[four], q1y = y + kDy[four];
        const int rx = q1x + kDx[diag], ry = q1y + kDy[diag];
        return m.contains(rx, ry) && m(rx, ry) && neighbours(ring(m, q1x, q1y)) == 3;
    }
    return false;
}

bool deletable(const BinaryMask& m, int x, int y) {
    const auto p = ring(m, x, y);
    return simple_non_end(p) && !staircase_tip(m, x, y, p);
}

}  // namespace

BinaryMask thin(const BinaryMask& mask) {
    BinaryMask img = mask;
    std::vector<Pixel> live;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (img(x, y)) live.push_back({x, y});
        }
    }

    std::vector<Pixel> marked;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            marked.clear();
            for (const Pixel& px : live) {
                const auto p = ring(img, px.x, px.y);
                if (!deletable(img, px.x, px.y)) continue;
                // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W)
                const bool ok = pass == 0 ? (!(p[0] && p[2] && p[4]) && !(p[2] && p[4] && p[6]))
                                          : (!(p[0] && p[2] && p[6]) && !(p[0] && p[4] && p[6]));
                if (ok) marked.push_back(px);
            }
            for (const Pixel& px : marked) {
                if (deletable(img, px.x, px.y)) {
                    img[px] = 0;
                    changed = true;
                }
            }
            std::erase_if(live, [&](const Pixel& px) { return img[px] == 0; });
        }
    }
    return img;
}

int count_components(const BinaryMask& mask) {
    Grid<std::uint8_t, MaskTag> seen(mask.width(), mask.height());
    std::vector<Pixel> stack;
    int count = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask(x, y) || seen(x, y)) continue;
            ++count;
            seen(x, y) = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                for (int k = 0; k < 8; ++k) {
                    const int nx = p.x + kDx[k];
                    const int ny = p.y + kDy[k];
                    if (mask.contains(nx, ny) && mask(nx, ny) && !seen(nx, ny)) {
                        seen(nx, ny) = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }
        }
    }
    return count;
}

// =============================================================================
// Normalized background distance
// =============================================================================

void validate_thresholds(std::span<const int> thresholds) {
    if (thresholds.empty()) throw ConfigError("threshold list is empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] < 0 || thresholds[i] > 255) {
            throw ConfigError("threshold out of range [0,255]: " + std::to_string(thresholds[i]));
        }
        if (i > 0 && thresholds[i] <= thresholds[i - 1]) {
            throw ConfigError("thresholds must be strictly increasing");
        }
    }
}

void accumulate_background_distance(ScalarField& field, const LikelihoodMap& map,
                                    std::span<const int> thresholds, int first_position,
                                    int index_base) {
    validate_thresholds(thresholds);
    if (!field.same_shape(map)) throw std::invalid_argument("field and map shapes differ");
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        const ScalarField dist = distance_transform(binarize(map, thresholds[k]));
        const long i = index_base + first_position + static_cast<long>(k);
        const double gain = i > 5 ? static_cast<double>(i) * static_cast<double>(i) : 1.0;
        auto& acc = field.values();
        const auto& d = dist.values();
        for (std::size_t p = 0; p < acc.size(); ++p) {
            acc[p] += std::log(1.0 + d[p] * gain);
        }
    }
}

ScalarField background_distance_field(const LikelihoodMap& map, std::span<const int> thresholds,
                                      int index_base) {
    ScalarField field(map.width(), map.height());
    accumulate_background_distance(field, map, thresholds, 0, index_base);
    return field;
}

}  // namespace vasc
