#ifndef SEATEX_RASTER_HPP
#define SEATEX_RASTER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatex/image_io.hpp"

namespace seatex {

/// 2-D grayscale raster with a valid-pixel mask. Intensities of valid pixels
/// are normalized to [0,1]; invalid pixels hold 0 and are skipped everywhere.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<double> intensities; // row-major
    std::vector<std::uint8_t> mask;  // nonzero = valid

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width + col;
    }
    bool valid(int row, int col) const { return mask[index(row, col)] != 0; }
    double at(int row, int col) const { return intensities[index(row, col)]; }

    int valid_count() const {
        int n = 0;
        for (auto m : mask) n += m != 0;
        return n;
    }
};

/// Min-max normalizes valid pixels to [0,1]. A constant image maps to all
/// zeros instead of dividing by a zero range. Invalid pixels are reset to 0.
inline void normalize(Raster& raster) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < raster.intensities.size(); ++i) {
        if (!raster.mask[i]) continue;
        lo = std::min(lo, raster.intensities[i]);
        hi = std::max(hi, raster.intensities[i]);
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < raster.intensities.size(); ++i) {
        if (!raster.mask[i]) {
            raster.intensities[i] = 0.0;
        } else if (!(range > 0.0)) {
            raster.intensities[i] = 0.0;
        } else {
            raster.intensities[i] = (raster.intensities[i] - lo) / range;
        }
    }
}

/// Sidecar mask path: same basename with a `.mask.png` suffix.
inline std::string mask_sidecar_path(const std::string& image_path) {
    std::filesystem::path p(image_path);
    p.replace_extension(".mask.png");
    return p.string();
}

/// Loads an 8/16-bit grayscale PNG or PGM and min-max normalizes it over the
/// valid pixels. The mask comes from `mask_path` when given, else from the
/// `.mask.png` sidecar when present, else all pixels are valid. Mask pixels
/// are valid where nonzero.
inline Raster load_raster(const std::string& path, const std::string& mask_path = "") {
    io::GrayImage img = io::read_gray_image(path);

    Raster raster;
    raster.width = img.width;
    raster.height = img.height;
    raster.intensities.resize(img.size());
    raster.mask.assign(img.size(), 1);
    for (std::size_t i = 0; i < img.size(); ++i)
        raster.intensities[i] = static_cast<double>(img.pixels[i]);

    std::string mpath = mask_path;
    if (mpath.empty()) {
        const std::string sidecar = mask_sidecar_path(path);
        if (std::filesystem::exists(sidecar)) mpath = sidecar;
    }
    if (!mpath.empty()) {
        io::GrayImage m = io::read_gray_image(mpath);
        if (m.width != img.width || m.height != img.height)
            throw std::runtime_error("mask dimensions do not match image: " + mpath);
        for (std::size_t i = 0; i < img.size(); ++i)
            raster.mask[i] = m.pixels[i] != 0 ? 1 : 0;
    }

    normalize(raster);
    return raster;
}

/// Quantizes v in [0,1] to an 8-bit level: floor(v*255 + 0.5), clamped.
inline std::uint8_t quantize8(double v) {
    const double q = std::floor(v * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
}

/// Writes a per-pixel map of values in [0,1] as an 8-bit grayscale PNG.
/// Invalid pixels render black.
inline void write_map(const std::vector<double>& values, const Raster& raster,
                      const std::string& path) {
    if (values.size() != raster.intensities.size())
        throw std::invalid_argument("value map size does not match raster");
    std::vector<std::uint8_t> out(values.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i)
        if (raster.mask[i]) out[i] = quantize8(values[i]);
    io::write_png_gray8(path, raster.width, raster.height, out);
}

} // namespace seatex

#endif
