#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vasc/grid.hpp"

namespace vasc {

/// Which plane to pull out of a multi-channel image. `None` means the file
/// must already be single-channel.
enum class ChannelSelect { None, Red, Green, Blue };

ChannelSelect parse_channel(const std::string& name);

/// 8-bit image with interleaved channels, exactly as decoded.
struct DecodedImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    std::uint8_t at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

/// Decodes an 8-bit PNG, PGM (P2/P5) or PPM (P6). Throws InputError on
/// missing files, undecodable content and bit depths other than 8.
DecodedImage read_image(const std::filesystem::path& path);

/// Extracts one 8-bit plane. Single-channel images pass through unchanged;
/// multi-channel images need an explicit channel.
Grid<std::uint8_t, LikelihoodTag> select_plane(const DecodedImage& img, ChannelSelect channel);

LikelihoodMap load_likelihood(const std::filesystem::path& path,
                              ChannelSelect channel = ChannelSelect::None);

void write_png_gray(const std::filesystem::path& path, int width, int height,
                    std::span<const std::uint8_t> pixels);
void write_png_rgb(const std::filesystem::path& path, int width, int height,
                   std::span<const std::uint8_t> rgb);
void write_pgm(const std::filesystem::path& path, int width, int height,
               std::span<const std::uint8_t> pixels);

/// Debug dump of a field: "VMF1", u32 width, u32 height, u32 reserved, then
/// width*height little-endian float32 values in row-major order.
void write_field(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_field(const std::filesystem::path& path);

}  // namespace vasc
