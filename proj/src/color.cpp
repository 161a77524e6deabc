#include "sempri/color.hpp"

#include <algorithm>
#include <cmath>

namespace sempri {

namespace {

double srgb_linearize(std::uint8_t c8) {
    const double c = c8 / 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t)
                                     : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

std::array<double, 3> srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = srgb_linearize(r8);
    const double g = srgb_linearize(g8);
    const double b = srgb_linearize(b8);

    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    const double fx = lab_f(x / 0.95047);
    const double fy = lab_f(y);
    const double fz = lab_f(z / 1.08883);

    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::array<double, 3> srgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = r8 / 255.0;
    const double g = g8 / 255.0;
    const double b = b8 / 255.0;
    const double v = std::max({r, g, b});
    const double lo = std::min({r, g, b});
    const double c = v - lo;

    double h = 0.0;
    if (c > 0.0) {
        if (v == r) {
            h = (g - b) / c;
            if (h < 0.0) h += 6.0;
        } else if (v == g) {
            h = (b - r) / c + 2.0;
        } else {
            h = (r - g) / c + 4.0;
        }
        h /= 6.0;
    }
    const double s = v > 0.0 ? c / v : 0.0;
    return {h, s, v};
}

std::array<std::uint8_t, 3> hsv_to_srgb(double h, double s, double v) {
    h = std::clamp(h, 0.0, 1.0) * 6.0;
    if (h >= 6.0) h = 0.0;
    s = std::clamp(s, 0.0, 1.0);
    v = std::clamp(v, 0.0, 1.0);
    const int sector = static_cast<int>(h);
    const double f = h - sector;
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    double r = v, g = t, b = p;
    switch (sector) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
    auto to_byte = [](double c) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
    };
    return {to_byte(r), to_byte(g), to_byte(b)};
}

}  // namespace sempri
