#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "vasc/errors.hpp"
#include "vasc/image_io.hpp"
#include "vasc/raster.hpp"
#include "vasc/topology.hpp"

using namespace vasc;

namespace {

std::filesystem::path tmp(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "vasc_raster_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

// Horizontal tube with a Gaussian cross-profile centred on `row`.
LikelihoodMap tube(int w, int h, double row, double sigma) {
    LikelihoodMap m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double d = y - row;
            m(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * std::exp(-d * d / (2 * sigma * sigma))));
        }
    }
    return m;
}

}  // namespace

TEST_CASE("pgm read is an identity") {
    const auto p = tmp("2x2.pgm");
    std::ofstream(p, std::ios::binary) << "P5\n2 2\n255\n" << std::string("\x00\x64\xc8\xff", 4);
    const auto m = load_likelihood(p);
    CHECK(m.values() == std::vector<std::uint8_t>{0, 100, 200, 255});
}

TEST_CASE("empty and missing files are rejected") {
    const auto p = tmp("empty.png");
    std::ofstream(p, std::ios::binary).close();
    try {
        load_likelihood(p);
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("undecodable image") != std::string::npos);
    }
    CHECK_THROWS_AS(load_likelihood(tmp("nope.png")), InputError);
}

TEST_CASE("colour input needs a channel") {
    const auto p = tmp("rgb.png");
    std::vector<std::uint8_t> rgb{10, 20, 30, 40, 50, 60};
    write_png_rgb(p, 2, 1, rgb);
    CHECK_THROWS_AS(load_likelihood(p), InputError);
    const auto g = load_likelihood(p, ChannelSelect::Green);
    CHECK(g.values() == std::vector<std::uint8_t>{20, 50});
}

TEST_CASE("binarize uses >=") {
    LikelihoodMap m(3, 1, std::vector<std::uint8_t>{0, 100, 200});
    CHECK(binarize(m, 100).values() == std::vector<std::uint8_t>{0, 1, 1});
    CHECK(binarize(m, 0).values() == std::vector<std::uint8_t>{1, 1, 1});
    CHECK(binarize(m, 255).values() == std::vector<std::uint8_t>{0, 0, 0});
}

TEST_CASE("binarize is monotone in the threshold") {
    std::mt19937 rng(3);
    LikelihoodMap m(20, 20);
    for (auto& v : m.values()) v = static_cast<std::uint8_t>(rng() % 256);
    for (int t = 0; t < 255; t += 17) {
        const auto lo = binarize(m, t), hi = binarize(m, t + 17);
        for (std::size_t i = 0; i < lo.size(); ++i) CHECK(hi.values()[i] <= lo.values()[i]);
    }
}

TEST_CASE("distance transform basics") {
    CHECK(distance_transform(BinaryMask(4, 3)).values() == std::vector<double>(12, 0.0));

    BinaryMask single(5, 5);
    single(2, 2) = 1;
    CHECK(distance_transform(single)(2, 2) == 1.0);

    BinaryMask square(7, 7);
    for (int y = 1; y < 6; ++y)
        for (int x = 1; x < 6; ++x) square(x, y) = 1;
    const auto dt = distance_transform(square);
    CHECK(dt(3, 3) == 3.0);
    CHECK(dt.values() == oracle::brute_force_dt(square).values());

    // No background at all: the border counts.
    BinaryMask full(5, 3, std::uint8_t{1});
    CHECK(distance_transform(full)(2, 1) == 2.0);
}

TEST_CASE("distance transform matches brute force on random masks") {
    std::mt19937 rng(11);
    for (int k = 0; k < 100; ++k) {
        const auto m = oracle::random_mask(rng, 24, 0.3 + 0.6 * (k % 7) / 6.0);
        REQUIRE(distance_transform(m).values() == oracle::brute_force_dt(m).values());
    }
}

TEST_CASE("boundary distance subtracts the offset on foreground only") {
    BinaryMask m(5, 5);
    for (int y = 1; y < 4; ++y)
        for (int x = 1; x < 4; ++x) m(x, y) = 1;
    const auto b = boundary_distance(m, 0.5);
    CHECK(b(2, 2) == 1.5);
    CHECK(b(1, 2) == 0.5);
    CHECK(b(1, 1) == 0.5);
    CHECK(b(0, 2) == 0.0);
    // Outside the image counts as background.
    const auto row = boundary_distance(BinaryMask(5, 1, std::vector<std::uint8_t>{0, 1, 1, 1, 0}), 0.5);
    CHECK(row.values() == std::vector<double>{0.0, 0.5, 0.5, 0.5, 0.0});
}

TEST_CASE("thinning") {
    SUBCASE("a 1-px line is unchanged") {
        BinaryMask line(12, 1, std::uint8_t{1});
        CHECK(thin(line) == line);
    }
    SUBCASE("empty stays empty") { CHECK(thin(BinaryMask(6, 6)) == BinaryMask(6, 6)); }
    SUBCASE("solid bar collapses to a single curve") {
        BinaryMask bar(24, 9);
        for (int y = 2; y < 7; ++y)
            for (int x = 2; x < 22; ++x) bar(x, y) = 1;
        const auto s = thin(bar);
        CHECK(count_components(s) == 1);
        int xs_min = 99, xs_max = -1;
        for (int x = 0; x < 24; ++x) {
            int column = 0;
            for (int y = 0; y < 9; ++y) {
                column += s(x, y);
                if (s(x, y)) CHECK(bar(x, y) == 1);
            }
            if (column) xs_min = std::min(xs_min, x), xs_max = std::max(xs_max, x);
        }
        CHECK(xs_max - xs_min >= 14);
        // A curve: no branch pixels once redundant diagonals are dropped, two ends.
        const PixelGraph g = PixelGraph::from_mask(s);
        int ends = 0;
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const auto deg = g.skeleton_neighbours(static_cast<int>(i)).size();
            CHECK(deg <= 2);
            ends += deg == 1;
        }
        CHECK(ends == 2);
        // Away from the ends it is one pixel per column.
        for (int x = 6; x < 18; ++x) {
            int column = 0;
            for (int y = 0; y < 9; ++y) column += s(x, y);
            CHECK(column == 1);
        }
    }
    SUBCASE("component count is preserved and the result is stable") {
        // Random masks can hold 2x2 blocks whose every pixel carries its own
        // branch; nothing there is deletable, so width is checked by stability.
        std::mt19937 rng(5);
        for (int k = 0; k < 60; ++k) {
            const auto m = oracle::random_mask(rng, 30, 0.55);
            const auto s = thin(m);
            REQUIRE(count_components(s) == count_components(m));
            for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(s.values()[i] <= m.values()[i]);
            CHECK(thin(s) == s);
        }
    }
    SUBCASE("no 2x2 block survives on smooth shapes") {
        for (double hw : {1.5, 2.5, 4.0}) {
            for (double angle : {0.0, 0.4, M_PI / 4, 1.1}) {
                BinaryMask m(60, 60);
                for (int y = 0; y < 60; ++y)
                    for (int x = 0; x < 60; ++x) {
                        const double u = (x - 30) * std::cos(angle) + (y - 30) * std::sin(angle);
                        const double v = -(x - 30) * std::sin(angle) + (y - 30) * std::cos(angle);
                        if (std::abs(v) <= hw && std::abs(u) <= 22) m(x, y) = 1;
                    }
                const auto s = thin(m);
                for (int y = 0; y + 1 < 60; ++y)
                    for (int x = 0; x + 1 < 60; ++x)
                        CHECK_FALSE((s(x, y) && s(x + 1, y) && s(x, y + 1) && s(x + 1, y + 1)));
            }
        }
    }
    SUBCASE("diagonal bars keep their length") {
        for (double hw : {1.0, 2.0, 3.5}) {
            BinaryMask m(50, 50);
            for (int y = 0; y < 50; ++y)
                for (int x = 0; x < 50; ++x)
                    if (std::abs(x - y) / std::sqrt(2.0) <= hw && x + y > 20 && x + y < 78) m(x, y) = 1;
            const auto s = thin(m);
            int lo = 99, hi = -1;
            for (int y = 0; y < 50; ++y)
                for (int x = 0; x < 50; ++x)
                    if (s(x, y)) lo = std::min(lo, x), hi = std::max(hi, x);
            CHECK(hi - lo >= 20);
        }
    }
}

TEST_CASE("threshold validation") {
    CHECK_NOTHROW(validate_thresholds(kDefaultThresholds));
    CHECK_THROWS_AS(validate_thresholds(std::vector<int>{40, 20}), ConfigError);
    CHECK_THROWS_AS(validate_thresholds(std::vector<int>{20, 20}), ConfigError);
    CHECK_THROWS_AS(validate_thresholds(std::vector<int>{-1, 20}), ConfigError);
    CHECK_THROWS_AS(validate_thresholds(std::vector<int>{20, 256}), ConfigError);
}

TEST_CASE("background distance field") {
    SUBCASE("all-zero map gives a zero field") {
        const auto f = background_distance_field(LikelihoodMap(8, 8), kDefaultThresholds);
        CHECK(f.values() == std::vector<double>(64, 0.0));
    }
    SUBCASE("single threshold is log(1 + dt)") {
        const auto m = tube(30, 21, 10.0, 3.0);
        const auto dt = oracle::brute_force_dt(binarize(m, 100));
        const auto f = background_distance_field(m, std::vector<int>{100});
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.values()[i] == doctest::Approx(std::log1p(dt.values()[i])).epsilon(1e-14));
    }
    SUBCASE("boost from the seventh threshold") {
        const auto m = tube(30, 21, 10.0, 4.0);
        const std::vector<int> ts{20, 50, 80, 110, 140, 170, 200};
        const auto f = background_distance_field(m, ts);
        std::vector<double> expect(m.size(), 0.0);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const auto dt = oracle::brute_force_dt(binarize(m, ts[i]));
            for (std::size_t k = 0; k < expect.size(); ++k) {
                expect[k] += i > 5 ? std::log(1.0 + dt.values()[k] * double(i * i)) : std::log(1.0 + dt.values()[k]);
            }
        }
        for (std::size_t k = 0; k < expect.size(); ++k) CHECK(f.values()[k] == doctest::Approx(expect[k]).epsilon(1e-12));
    }
    SUBCASE("peaks on the centreline") {
        const auto m = tube(40, 31, 15.0, 3.5);
        const std::vector<int> ts{30, 60, 90, 120, 150, 180, 210, 240};
        const auto f = background_distance_field(m, ts);
        // Near the left and right edges the border caps the distance and rows tie.
        for (int x = 8; x < 32; ++x) {
            int arg = 0;
            for (int y = 1; y < 31; ++y)
                if (f(x, y) > f(x, arg)) arg = y;
            CHECK(arg == 15);
        }
    }
    SUBCASE("prefix then continuation equals the full list") {
        const auto m = tube(25, 25, 12.0, 4.0);
        const auto full = background_distance_field(m, kDefaultThresholds);
        const std::vector<int> head(kDefaultThresholds.begin(), kDefaultThresholds.begin() + 5);
        const std::vector<int> tail(kDefaultThresholds.begin() + 5, kDefaultThresholds.end());
        auto part = background_distance_field(m, head);
        accumulate_background_distance(part, m, tail, 5);
        CHECK(part == full);
    }
    SUBCASE("rejects bad thresholds") {
        CHECK_THROWS_AS(background_distance_field(LikelihoodMap(2, 2), std::vector<int>{100, 50}), ConfigError);
    }
}

TEST_CASE("field dump round trip") {
    ScalarField f(3, 2, std::vector<double>{0.0, 1.5, 2.25, 3.0, 4.0, 1e3});
    const auto p = tmp("f.vmf");
    write_field(p, f);
    CHECK(std::filesystem::file_size(p) == 16 + 6 * 4);
    CHECK(read_field(p) == f);
}
