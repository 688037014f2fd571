#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "seatex/raster.hpp"
#include "test_util.hpp"

using namespace seatex;

TEST_CASE("loads and min-max normalizes an 8-bit PGM", "[raster]") {
    const std::string path = testutil::tmp_path("two_by_two.pgm");
    testutil::write_pgm8(path, 2, 2, {0, 255, 255, 0});
    const Raster r = load_raster(path);
    REQUIRE(r.width == 2);
    REQUIRE(r.height == 2);
    REQUIRE(r.valid_count() == 4);
    CHECK(r.intensities == std::vector<double>{0.0, 1.0, 1.0, 0.0});
}

TEST_CASE("constant image normalizes to all zeros", "[raster]") {
    const std::string path = testutil::tmp_path("constant.pgm");
    testutil::write_pgm8(path, 3, 3, std::vector<std::uint8_t>(9, 128));
    const Raster r = load_raster(path);
    for (double v : r.intensities) CHECK(v == 0.0);
}

TEST_CASE("16-bit input normalizes by its observed range", "[raster]") {
    const std::string path = testutil::tmp_path("deep.pgm");
    testutil::write_pgm16(path, 2, 1, {100, 500});
    const Raster r = load_raster(path);
    CHECK(r.intensities[0] == 0.0);
    CHECK(r.intensities[1] == 1.0);
}

TEST_CASE("sidecar mask marks pixels invalid and shrinks N", "[raster]") {
    const std::string path = testutil::tmp_path("masked.png");
    io::write_png_gray8(path, 3, 3, {255, 10, 20, 30, 40, 50, 60, 70, 80});
    std::vector<std::uint8_t> mask(9, 255);
    mask[0] = 0; // top-left corner invalid
    io::write_png_gray8(mask_sidecar_path(path), 3, 3, mask);

    const Raster r = load_raster(path);
    REQUIRE(r.valid_count() == 8);
    CHECK_FALSE(r.valid(0, 0));
    CHECK(r.intensities[0] == 0.0); // sentinel, excluded from normalization
    // min/max over valid pixels only: 10..80
    CHECK(r.at(0, 1) == 0.0);
    CHECK(r.at(2, 2) == 1.0);
}

TEST_CASE("explicit mask path overrides the sidecar rule", "[raster]") {
    const std::string path = testutil::tmp_path("explicit.pgm");
    testutil::write_pgm8(path, 2, 1, {0, 200});
    const std::string mpath = testutil::tmp_path("explicit_mask.png");
    io::write_png_gray8(mpath, 2, 1, {0, 255});
    const Raster r = load_raster(path, mpath);
    CHECK(r.valid_count() == 1);
}

TEST_CASE("mask dimension mismatch is an error", "[raster]") {
    const std::string path = testutil::tmp_path("mismatch.pgm");
    testutil::write_pgm8(path, 2, 2, {0, 1, 2, 3});
    const std::string mpath = testutil::tmp_path("mismatch_mask.png");
    io::write_png_gray8(mpath, 1, 1, {255});
    CHECK_THROWS(load_raster(path, mpath));
}

TEST_CASE("missing file is an error", "[raster]") {
    CHECK_THROWS(load_raster(testutil::tmp_path("does_not_exist.png")));
}

TEST_CASE("write_map quantizes with round-half-up and blacks out invalid", "[raster]") {
    Raster r = testutil::make_raster(3, 1, {0.2, 0.4, 0.9});
    r.mask = {1, 1, 0};
    const std::string path = testutil::tmp_path("map.png");

    write_map({0.0, 0.5, 1.0}, r, path);
    const io::GrayImage img = io::read_png(path);
    CHECK(img.pixels[0] == 0);
    CHECK(img.pixels[1] == 128); // floor(0.5*255 + 0.5)
    CHECK(img.pixels[2] == 0);   // invalid pixel renders black

    write_map({1.0, 1.0, 1.0}, r, path);
    const io::GrayImage ones = io::read_png(path);
    CHECK(ones.pixels[0] == 255);
    CHECK(ones.pixels[1] == 255);
}

TEST_CASE("load-write-load round trip reproduces quantized intensities", "[raster]") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> value(13, 240); // force a re-normalizing range
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::uint8_t> px(6 * 7);
        for (auto& v : px) v = static_cast<std::uint8_t>(value(rng));
        px[0] = 13;
        px[1] = 240;
        const std::string path = testutil::tmp_path("roundtrip.pgm");
        testutil::write_pgm8(path, 6, 7, px);

        const Raster first = load_raster(path);
        const std::string out = testutil::tmp_path("roundtrip_out.png");
        write_map(first.intensities, first, out);
        const Raster second = load_raster(out);

        for (std::size_t i = 0; i < first.intensities.size(); ++i)
            CHECK(second.intensities[i] == quantize8(first.intensities[i]) / 255.0);
    }
}

TEST_CASE("normalization is idempotent", "[raster]") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    Raster r = testutil::make_raster(5, 4, {});
    r.intensities.resize(20);
    for (auto& v : r.intensities) v = value(rng);
    r.mask[3] = 0;
    normalize(r);
    Raster again = r;
    normalize(again);
    for (std::size_t i = 0; i < r.intensities.size(); ++i)
        CHECK(std::abs(again.intensities[i] - r.intensities[i]) < 1e-12);
}
