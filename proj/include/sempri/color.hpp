#ifndef SEMPRI_COLOR_HPP
#define SEMPRI_COLOR_HPP

#include <array>
#include <cstdint>

namespace sempri {

// CIE L*a*b* under D65, from 8-bit sRGB. L in [0,100], a/b roughly [-128,127].
std::array<double, 3> srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// HSV with all three channels in [0,1]; hue wraps, undefined hue maps to 0.
std::array<double, 3> srgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Rec.601 luma in [0,1].
inline double srgb_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
}

// Inverse of srgb_to_hsv's convention: h/s/v in [0,1] to 8-bit RGB.
std::array<std::uint8_t, 3> hsv_to_srgb(double h, double s, double v);

}  // namespace sempri

#endif
