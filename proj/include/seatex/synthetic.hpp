#ifndef SEATEX_SYNTHETIC_HPP
#define SEATEX_SYNTHETIC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "seatex/raster.hpp"

namespace seatex {

enum class TextureKind { flat, ripple, speckle };

inline TextureKind texture_from_name(const std::string& name) {
    if (name == "flat") return TextureKind::flat;
    if (name == "ripple") return TextureKind::ripple;
    if (name == "speckle") return TextureKind::speckle;
    throw std::invalid_argument("unknown texture kind: " + name);
}

struct TextureParams {
    double level = 0.5;      // base intensity
    double amplitude = 0.25; // ripple sinusoid amplitude
    double frequency = 0.15; // ripple cycles per pixel
    double orientation = 0.0;
    double noise = 0.02; // additive Gaussian sigma (flat/ripple)
};

struct SceneRegion {
    std::vector<std::array<double, 2>> polygon; // (x, y) vertices
    TextureKind kind = TextureKind::flat;
    TextureParams params;
};

struct OutlierBlob {
    double row = 0.0, col = 0.0;
    double radius = 3.0;
    double intensity = 1.0;
};

/// Synthetic texture scene: polygonal regions that tile the image, a linear
/// blending width at region boundaries, and bright outlier blobs.
struct SceneSpec {
    int width = 128;
    int height = 128;
    std::vector<SceneRegion> regions;
    double boundary_softness = 0.0; // pixels of linear blending
    std::vector<OutlierBlob> outliers;
};

struct Scene {
    Raster raster;
    std::vector<int> labels; // ground-truth region index per pixel
};

/// Axis-aligned rectangle as a polygon; [x0,x1) x [y0,y1), half-open so
/// abutting rectangles tile exactly.
inline std::vector<std::array<double, 2>> rect_polygon(double x0, double y0, double x1,
                                                       double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

namespace detail {

// Even-odd rule; the half-open behavior on right/bottom edges follows from
// testing pixel centers.
inline bool point_in_polygon(const std::vector<std::array<double, 2>>& poly, double x, double y) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = poly[i][0], yi = poly[i][1];
        const double xj = poly[j][0], yj = poly[j][1];
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) inside = !inside;
    }
    return inside;
}

// Box blur with count normalization at the borders; preserves partitions of
// unity, so blurred region indicators stay valid blend weights.
inline std::vector<double> box_blur(const std::vector<double>& in, int width, int height,
                                    int radius) {
    std::vector<double> tmp(in.size(), 0.0), out(in.size(), 0.0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double s = 0.0;
            int n = 0;
            for (int k = -radius; k <= radius; ++k) {
                const int xx = x + k;
                if (xx < 0 || xx >= width) continue;
                s += in[static_cast<std::size_t>(y) * width + xx];
                ++n;
            }
            tmp[static_cast<std::size_t>(y) * width + x] = s / n;
        }
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double s = 0.0;
            int n = 0;
            for (int k = -radius; k <= radius; ++k) {
                const int yy = y + k;
                if (yy < 0 || yy >= height) continue;
                s += tmp[static_cast<std::size_t>(yy) * width + x];
                ++n;
            }
            out[static_cast<std::size_t>(y) * width + x] = s / n;
        }
    return out;
}

inline std::vector<double> texture_field(const SceneRegion& region, int width, int height,
                                         std::mt19937_64& rng) {
    std::vector<double> field(static_cast<std::size_t>(width) * height, 0.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const TextureParams& p = region.params;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double v = p.level;
            switch (region.kind) {
                case TextureKind::flat:
                    v += p.noise * gauss(rng);
                    break;
                case TextureKind::ripple: {
                    const double u = x * std::cos(p.orientation) + y * std::sin(p.orientation);
                    v += p.amplitude * std::sin(2.0 * std::numbers::pi * p.frequency * u) +
                         p.noise * gauss(rng);
                    break;
                }
                case TextureKind::speckle: {
                    // multiplicative exponential noise, the classic high-variance model
                    const double e = -std::log1p(-uniform(rng));
                    v = p.level * e;
                    break;
                }
            }
            field[static_cast<std::size_t>(y) * width + x] = v;
        }
    }
    return field;
}

} // namespace detail

/// Renders the scene deterministically for the seed. Blending affects
/// intensities only; the returned ground-truth labels always follow the
/// unblended region polygons.
inline Scene generate(const SceneSpec& spec, std::uint64_t seed) {
    if (spec.regions.empty()) throw std::invalid_argument("scene needs at least one region");
    if (spec.boundary_softness < 0.0) throw std::invalid_argument("boundary softness must be >= 0");
    const int w = spec.width, h = spec.height;
    const std::size_t total = static_cast<std::size_t>(w) * h;

    Scene scene;
    scene.labels.assign(total, -1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            for (std::size_t r = 0; r < spec.regions.size(); ++r)
                if (detail::point_in_polygon(spec.regions[r].polygon, x + 0.5, y + 0.5)) {
                    scene.labels[static_cast<std::size_t>(y) * w + x] = static_cast<int>(r);
                    break;
                }
            if (scene.labels[static_cast<std::size_t>(y) * w + x] < 0)
                throw std::invalid_argument("scene regions do not tile the image");
        }

    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> fields;
    for (const auto& region : spec.regions)
        fields.push_back(detail::texture_field(region, w, h, rng));

    std::vector<double> intensity(total, 0.0);
    if (spec.boundary_softness > 0.0 && spec.regions.size() > 1) {
        const int radius = std::max(1, static_cast<int>(std::lround(spec.boundary_softness / 2)));
        std::vector<std::vector<double>> weights;
        for (std::size_t r = 0; r < spec.regions.size(); ++r) {
            std::vector<double> ind(total, 0.0);
            for (std::size_t i = 0; i < total; ++i)
                ind[i] = scene.labels[i] == static_cast<int>(r) ? 1.0 : 0.0;
            weights.push_back(detail::box_blur(ind, w, h, radius));
        }
        for (std::size_t i = 0; i < total; ++i) {
            double v = 0.0;
            for (std::size_t r = 0; r < spec.regions.size(); ++r)
                v += weights[r][i] * fields[r][i];
            intensity[i] = v;
        }
    } else {
        for (std::size_t i = 0; i < total; ++i) intensity[i] = fields[scene.labels[i]][i];
    }

    for (const auto& blob : spec.outliers) {
        const int y0 = std::max(0, static_cast<int>(blob.row - 3 * blob.radius));
        const int y1 = std::min(h - 1, static_cast<int>(blob.row + 3 * blob.radius));
        const int x0 = std::max(0, static_cast<int>(blob.col - 3 * blob.radius));
        const int x1 = std::min(w - 1, static_cast<int>(blob.col + 3 * blob.radius));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const double d = std::hypot(y - blob.row, x - blob.col);
                double v;
                if (d <= blob.radius) {
                    v = blob.intensity;
                } else {
                    const double skirt = d - blob.radius;
                    v = blob.intensity * std::exp(-skirt * skirt / 2.0);
                }
                auto& px = intensity[static_cast<std::size_t>(y) * w + x];
                px = std::max(px, v);
            }
    }

    scene.raster.width = w;
    scene.raster.height = h;
    scene.raster.mask.assign(total, 1);
    scene.raster.intensities.resize(total);
    for (std::size_t i = 0; i < total; ++i)
        scene.raster.intensities[i] = std::clamp(intensity[i], 0.0, 1.0);
    return scene;
}

/// Ground-truth labels as an 8-bit PNG of raw region indices.
inline void write_labels(const Scene& scene, const std::string& path) {
    std::vector<std::uint8_t> out(scene.labels.size(), 0);
    for (std::size_t i = 0; i < scene.labels.size(); ++i)
        out[i] = static_cast<std::uint8_t>(std::clamp(scene.labels[i], 0, 255));
    io::write_png_gray8(path, scene.raster.width, scene.raster.height, out);
}

} // namespace seatex

#endif
