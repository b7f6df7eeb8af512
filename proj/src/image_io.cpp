#include "vasc/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "vasc/errors.hpp"

namespace vasc {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open image: " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_png(const std::vector<std::uint8_t>& bytes) {
    static constexpr std::array<std::uint8_t, 8> kSig{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    return bytes.size() >= kSig.size() && std::equal(kSig.begin(), kSig.end(), bytes.begin());
}

DecodedImage decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw InputError("undecodable image: " + name);
    }
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw InputError("non-8-bit depth: " + name);
    }
    const bool color = image.format & PNG_FORMAT_FLAG_COLOR;
    const bool alpha = image.format & PNG_FORMAT_FLAG_ALPHA;
    DecodedImage out;
    if (color) {
        image.format = alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
        out.channels = alpha ? 4 : 3;
    } else {
        image.format = alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY;
        out.channels = alpha ? 2 : 1;
    }
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.data.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
        png_image_free(&image);
        throw InputError("undecodable image: " + name);
    }
    return out;
}

// Netpbm header tokens may be separated by whitespace and '#' comments.
class PnmHeader {
public:
    explicit PnmHeader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    long next_int() {
        skip_space();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw InputError("undecodable image");
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > (1L << 30)) throw InputError("undecodable image");
            ++pos_;
        }
        return value;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }

private:
    void skip_space() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 2;
};

DecodedImage decode_pnm(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    const char kind = static_cast<char>(bytes[1]);
    PnmHeader header(bytes);
    DecodedImage out;
    try {
        out.width = static_cast<int>(header.next_int());
        out.height = static_cast<int>(header.next_int());
        const long maxval = header.next_int();
        if (maxval > 255) throw InputError("non-8-bit depth: " + name);
        if (maxval <= 0) throw InputError("undecodable image: " + name);
        out.channels = kind == '6' ? 3 : 1;
        const std::size_t count = static_cast<std::size_t>(out.width) * out.height * out.channels;
        if (out.width <= 0 || out.height <= 0) throw InputError("undecodable image: " + name);
        out.data.resize(count);
        if (kind == '2') {
            for (std::size_t i = 0; i < count; ++i) {
                const long v = header.next_int();
                if (v > maxval) throw InputError("undecodable image: " + name);
                out.data[i] = static_cast<std::uint8_t>(v);
            }
        } else {
            // exactly one whitespace byte separates the header from the raster
            header.advance(1);
            if (header.pos() + count > bytes.size()) throw InputError("undecodable image: " + name);
            std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(header.pos()), count, out.data.begin());
        }
    } catch (const InputError& e) {
        if (std::string(e.what()).rfind("non-8-bit", 0) == 0) throw;
        throw InputError("undecodable image: " + name);
    }
    return out;
}

}  // namespace

ChannelSelect parse_channel(const std::string& name) {
    if (name.empty() || name == "none") return ChannelSelect::None;
    if (name == "red") return ChannelSelect::Red;
    if (name == "green") return ChannelSelect::Green;
    if (name == "blue") return ChannelSelect::Blue;
    throw InputError("unknown channel: " + name);
}

DecodedImage read_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw InputError("missing file: " + path.string());
    }
    const auto bytes = read_bytes(path);
    if (is_png(bytes)) {
        return decode_png(bytes, path.string());
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5' || bytes[1] == '6')) {
        return decode_pnm(bytes, path.string());
    }
    throw InputError("undecodable image: " + path.string());
}

Grid<std::uint8_t, LikelihoodTag> select_plane(const DecodedImage& img, ChannelSelect channel) {
    int plane = 0;
    if (img.channels > 1) {
        if (channel == ChannelSelect::None) {
            throw InputError("multi-channel image requires a channel selection");
        }
        if (img.channels < 3) {
            throw InputError("channel selection needs an RGB image");
        }
        plane = channel == ChannelSelect::Red ? 0 : channel == ChannelSelect::Green ? 1 : 2;
    }
    LikelihoodMap out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            out(x, y) = img.at(x, y, plane);
        }
    }
    return out;
}

LikelihoodMap load_likelihood(const std::filesystem::path& path, ChannelSelect channel) {
    return select_plane(read_image(path), channel);
}

namespace {

void write_png(const std::filesystem::path& path, int width, int height, std::uint32_t format,
               std::span<const std::uint8_t> pixels, std::size_t channels) {
    if (pixels.size() != static_cast<std::size_t>(width) * height * channels) {
        throw std::invalid_argument("pixel buffer does not match image size");
    }
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = format;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0, nullptr)) {
        throw std::runtime_error("failed to write PNG: " + path.string() + ": " + image.message);
    }
}

}  // namespace

void write_png_gray(const std::filesystem::path& path, int width, int height,
                    std::span<const std::uint8_t> pixels) {
    write_png(path, width, height, PNG_FORMAT_GRAY, pixels, 1);
}

void write_png_rgb(const std::filesystem::path& path, int width, int height,
                   std::span<const std::uint8_t> rgb) {
    write_png(path, width, height, PNG_FORMAT_RGB, rgb, 3);
}

void write_pgm(const std::filesystem::path& path, int width, int height,
               std::span<const std::uint8_t> pixels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(b.data(), 4);
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_field(const std::filesystem::path& path, const ScalarField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write("VMF1", 4);
    put_u32(out, static_cast<std::uint32_t>(field.width()));
    put_u32(out, static_cast<std::uint32_t>(field.height()));
    put_u32(out, 0);
    for (double v : field.values()) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
}

ScalarField read_field(const std::filesystem::path& path) {
    const auto bytes = read_bytes(path);
    if (bytes.size() < 16 || std::memcmp(bytes.data(), "VMF1", 4) != 0) {
        throw InputError("not a VMF1 field: " + path.string());
    }
    const int width = static_cast<int>(get_u32(bytes.data() + 4));
    const int height = static_cast<int>(get_u32(bytes.data() + 8));
    const std::size_t count = static_cast<std::size_t>(width) * height;
    if (bytes.size() != 16 + 4 * count) {
        throw InputError("truncated VMF1 field: " + path.string());
    }
    ScalarField field(width, height);
    for (std::size_t i = 0; i < count; ++i) {
        field.values()[i] = std::bit_cast<float>(get_u32(bytes.data() + 16 + 4 * i));
    }
    return field;
}

}  // namespace vasc
