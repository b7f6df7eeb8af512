#include "vasc/overlay.hpp"

#include <cmath>

namespace vasc {

Rgb RgbImage::at(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {data[i], data[i + 1], data[i + 2]};
}

void RgbImage::set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    data[i] = c[0];
    data[i + 1] = c[1];
    data[i + 2] = c[2];
}

RgbImage to_rgb(const DecodedImage& image) {
    RgbImage out{image.width, image.height, std::vector<std::uint8_t>(static_cast<std::size_t>(image.width) * image.height * 3)};
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            if (image.channels >= 3) {
                out.set(x, y, {image.at(x, y, 0), image.at(x, y, 1), image.at(x, y, 2)});
            } else {
                const std::uint8_t g = image.at(x, y, 0);
                out.set(x, y, {g, g, g});
            }
        }
    }
    return out;
}

RgbImage to_rgb(const LikelihoodMap& map) {
    RgbImage out{map.width(), map.height(), std::vector<std::uint8_t>(map.size() * 3)};
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            const auto g = static_cast<std::uint8_t>(map(x, y) / 2);
            out.set(x, y, {g, g, g});
        }
    }
    return out;
}

namespace {

void draw_circle(RgbImage& img, Point c, double r, Rgb colour) {
    if (r <= 0.0) return;
    const int steps = std::max(16, static_cast<int>(std::ceil(2.0 * M_PI * r * 2.0)));
    for (int k = 0; k < steps; ++k) {
        const double a = 2.0 * M_PI * k / steps;
        img.set(static_cast<int>(std::lround(c.x + r * std::cos(a))), static_cast<int>(std::lround(c.y + r * std::sin(a))),
                colour);
    }
}

}  // namespace

RgbImage render_overlay(const VesselGraph& graph, const std::vector<Annulus>& annuli, RgbImage background) {
    RgbImage img = std::move(background);
    for (const auto& a : annuli) {
        draw_circle(img, a.center, a.r_inner, kAnnulusColour);
        draw_circle(img, a.center, a.r_outer, kAnnulusColour);
    }
    for (const auto& seg : graph.segments) {
        const Rgb colour = seg.label == VesselLabel::Artery ? kArteryColour
                           : seg.label == VesselLabel::Vein ? kVeinColour
                                                            : kUnknownColour;
        for (const Pixel& p : seg.path) img.set(p.x, p.y, colour);
    }
    return img;
}

}  // namespace vasc
