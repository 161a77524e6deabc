#include <doctest.h>

#include <cmath>

#include "sempri/color.hpp"

using namespace sempri;

TEST_CASE("sRGB to L*a*b* matches D65 reference values") {
    auto check = [](std::uint8_t r, std::uint8_t g, std::uint8_t b, double el, double ea,
                    double eb) {
        const auto lab = srgb_to_lab(r, g, b);
        CHECK(lab[0] == doctest::Approx(el).epsilon(1e-3));
        CHECK(lab[1] == doctest::Approx(ea).scale(1.0).epsilon(1e-3));
        CHECK(lab[2] == doctest::Approx(eb).scale(1.0).epsilon(1e-3));
    };
    check(255, 0, 0, 53.2408, 80.0925, 67.2032);
    check(0, 255, 0, 87.7347, -86.1827, 83.1793);
    check(0, 0, 255, 32.2970, 79.1875, -107.8602);
    check(255, 255, 255, 100.0, 0.0, 0.0);
    check(0, 0, 0, 0.0, 0.0, 0.0);
    check(128, 128, 128, 53.5850, 0.0, 0.0);
}

TEST_CASE("sRGB to HSV uses [0,1] channels") {
    auto red = srgb_to_hsv(255, 0, 0);
    CHECK(red[0] == doctest::Approx(0.0));
    CHECK(red[1] == doctest::Approx(1.0));
    CHECK(red[2] == doctest::Approx(1.0));

    auto green = srgb_to_hsv(0, 255, 0);
    CHECK(green[0] == doctest::Approx(1.0 / 3.0));

    auto gray = srgb_to_hsv(77, 77, 77);
    CHECK(gray[0] == 0.0);  // undefined hue convention
    CHECK(gray[1] == 0.0);
    CHECK(gray[2] == doctest::Approx(77.0 / 255.0));
}

TEST_CASE("HSV round trips through 8-bit RGB") {
    for (int h = 0; h < 12; ++h) {
        for (int s = 1; s <= 4; ++s) {
            for (int v = 1; v <= 4; ++v) {
                const double hh = h / 12.0, ss = s / 4.0, vv = v / 4.0;
                const auto rgb = hsv_to_srgb(hh, ss, vv);
                const auto back = srgb_to_hsv(rgb[0], rgb[1], rgb[2]);
                CHECK(std::abs(back[0] - hh) < 0.01);
                CHECK(std::abs(back[1] - ss) < 0.02);
                CHECK(std::abs(back[2] - vv) < 0.01);
            }
        }
    }
}
