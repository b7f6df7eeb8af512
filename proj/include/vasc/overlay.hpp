#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "vasc/image_io.hpp"
#include "vasc/morphometry.hpp"
#include "vasc/topology.hpp"

namespace vasc {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kArteryColour{230, 40, 40};
inline constexpr Rgb kVeinColour{40, 90, 240};
inline constexpr Rgb kUnknownColour{240, 210, 40};
inline constexpr Rgb kAnnulusColour{60, 220, 90};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Rgb at(int x, int y) const;
    void set(int x, int y, Rgb c);
};

/// Background from a decoded image (gray is replicated, extra channels
/// dropped).
RgbImage to_rgb(const DecodedImage& image);
RgbImage to_rgb(const LikelihoodMap& map);

/// Draws both circles of every annulus, then every segment path in its
/// label's colour.
RgbImage render_overlay(const VesselGraph& graph, const std::vector<Annulus>& annuli, RgbImage background);

}  // namespace vasc
