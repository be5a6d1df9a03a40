#include <doctest.h>

#include "schex/raster.hpp"
#include "schex/rng.hpp"
#include "test_util.hpp"

using namespace schex;
using testutil::image_from;

TEST_CASE("binarize basics") {
    SUBCASE("all white page has no ink") {
        GrayImage img{4, 4, std::vector<std::uint8_t>(16, 255)};
        BinaryRaster r = binarize(img, 128);
        for (int row = 0; row < 4; ++row)
            for (int col = 0; col < 4; ++col) CHECK_FALSE(r.ink(row, col));
    }
    SUBCASE("single dark sample becomes the single ink pixel") {
        GrayImage img{3, 3, std::vector<std::uint8_t>(9, 255)};
        img.samples[4] = 0;  // (1,1)
        BinaryRaster r = binarize(img, 128);
        int count = 0;
        for (int row = 0; row < 3; ++row)
            for (int col = 0; col < 3; ++col) count += r.ink(row, col);
        CHECK(count == 1);
        CHECK(r.ink(1, 1));
    }
    SUBCASE("strictly-below-threshold rule") {
        GrayImage img{3, 1, {0, 100, 200}};
        BinaryRaster r = binarize(img, 128);
        CHECK(r.ink(0, 0));
        CHECK(r.ink(0, 1));
        CHECK_FALSE(r.ink(0, 2));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(binarize(GrayImage{}, 128), InvalidInput);
        GrayImage img{1, 1, {0}};
        CHECK_THROWS_AS(binarize(img, -1), InvalidInput);
        CHECK_THROWS_AS(binarize(img, 256), InvalidInput);
    }
}

TEST_CASE("binarize is idempotent under re-thresholding its own output") {
    Rng rng(11);
    GrayImage img{17, 9, {}};
    img.samples.resize(17 * 9);
    for (auto& s : img.samples) s = static_cast<std::uint8_t>(rng.below(256));
    BinaryRaster first = binarize(img, 128);

    // Scale the 0/1 output back to {0,255} and re-threshold anywhere in (0,255].
    GrayImage scaled{17, 9, {}};
    for (std::size_t i = 0; i < img.samples.size(); ++i)
        scaled.samples.push_back(first.data()[i] ? 0 : 255);
    for (int threshold : {1, 64, 128, 255}) {
        BinaryRaster again = binarize(scaled, threshold);
        CHECK(again.data() == first.data());
    }
}

TEST_CASE("neighbors geometry") {
    BinaryRaster r3 = testutil::raster_from({"...", "...", "..."});
    SUBCASE("interior pixel has 8 neighbors in row-major order") {
        auto n = neighbors(r3, {1, 1});
        REQUIRE(n.size() == 8);
        CHECK(n.front() == PixelCoord{0, 0});
        CHECK(n.back() == PixelCoord{2, 2});
        CHECK(std::is_sorted(n.begin(), n.end()));
    }
    SUBCASE("corner clips to 3") { CHECK(neighbors(r3, {0, 0}).size() == 3); }
    SUBCASE("1x1 raster has none") {
        BinaryRaster r1 = testutil::raster_from({"."});
        CHECK(neighbors(r1, {0, 0}).empty());
    }
    SUBCASE("out of bounds is an error") {
        CHECK_THROWS_AS(neighbors(r3, {3, 0}), InvalidInput);
        CHECK_THROWS_AS(neighbors(r3, {0, -1}), InvalidInput);
    }
    SUBCASE("four-connectivity variant") {
        auto n = neighbors(r3, {1, 1}, Connectivity::Four);
        CHECK(n == std::vector<PixelCoord>{{0, 1}, {1, 0}, {1, 2}, {2, 1}});
    }
}

TEST_CASE("neighbors is symmetric, self-free and bounded") {
    Rng rng(7);
    BinaryRaster r = testutil::raster_from({".....", ".....", ".....", "....."});
    for (int trial = 0; trial < 200; ++trial) {
        PixelCoord p{rng.range(0, r.height() - 1), rng.range(0, r.width() - 1)};
        auto np = neighbors(r, p);
        CHECK(np.size() <= 8);
        for (const auto& q : np) {
            CHECK(q != p);
            auto nq = neighbors(r, q);
            CHECK(std::find(nq.begin(), nq.end(), p) != nq.end());
        }
    }
}
