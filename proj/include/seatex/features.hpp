#ifndef SEATEX_FEATURES_HPP
#define SEATEX_FEATURES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatex/matrix.hpp"
#include "seatex/raster.hpp"
#include "seatex/superpixel.hpp"

namespace seatex {

/// Named texture extractor with its parameters (window sizes, scales, ...).
struct FeatureSpec {
    std::string name;
    std::map<std::string, double> params;

    double param(const std::string& key, double fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
};

/// Per-superpixel feature vectors, column-standardized to zero mean and unit
/// population std (constant columns map to all-zero).
struct FeatureMatrix {
    Matrix values; // N x d, rows = superpixels
    std::vector<std::string> names;
    std::vector<std::pair<double, double>> standardization; // per-column (mean, std)
};

namespace detail {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Invalid pixels replaced by the valid mean, for convolution-style filters.
inline std::vector<double> filled_intensities(const Raster& r) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < r.intensities.size(); ++i)
        if (r.mask[i]) {
            sum += r.intensities[i];
            ++n;
        }
    const double fill = n > 0 ? sum / n : 0.0;
    std::vector<double> out(r.intensities.size(), fill);
    for (std::size_t i = 0; i < r.intensities.size(); ++i)
        if (r.mask[i]) out[i] = r.intensities[i];
    return out;
}

struct Gradients {
    std::vector<double> gx, gy;
};

// 3x3 Sobel with clamped borders on the filled image.
inline Gradients sobel_gradients(const Raster& r) {
    const std::vector<double> f = filled_intensities(r);
    Gradients g;
    g.gx.assign(f.size(), 0.0);
    g.gy.assign(f.size(), 0.0);
    auto at = [&](int y, int x) {
        return f[r.index(clampi(y, 0, r.height - 1), clampi(x, 0, r.width - 1))];
    };
    for (int y = 0; y < r.height; ++y) {
        for (int x = 0; x < r.width; ++x) {
            const double gx = (at(y - 1, x + 1) + 2 * at(y, x + 1) + at(y + 1, x + 1)) -
                              (at(y - 1, x - 1) + 2 * at(y, x - 1) + at(y + 1, x - 1));
            const double gy = (at(y + 1, x - 1) + 2 * at(y + 1, x) + at(y + 1, x + 1)) -
                              (at(y - 1, x - 1) + 2 * at(y - 1, x) + at(y - 1, x + 1));
            g.gx[r.index(y, x)] = gx;
            g.gy[r.index(y, x)] = gy;
        }
    }
    return g;
}

inline int window_size(const Raster& r, const FeatureSpec& spec) {
    const int w = static_cast<int>(spec.param("window", 9.0));
    if (w < 1 || w % 2 == 0) throw std::invalid_argument("window must be a positive odd size");
    if (w > r.width || w > r.height) throw std::invalid_argument("window larger than image");
    return w;
}

// Applies fn(y, x) over every valid pixel; invalid pixels stay 0.
template <typename Fn>
std::vector<double> per_valid_pixel(const Raster& r, Fn&& fn) {
    std::vector<double> out(r.intensities.size(), 0.0);
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x)
            if (r.valid(y, x)) out[r.index(y, x)] = fn(y, x);
    return out;
}

inline std::vector<double> convolve(const Raster& r, const Matrix& kernel) {
    const std::vector<double> f = filled_intensities(r);
    const int ry = kernel.rows / 2, rx = kernel.cols / 2;
    return per_valid_pixel(r, [&](int y, int x) {
        double acc = 0.0;
        for (int ky = 0; ky < kernel.rows; ++ky)
            for (int kx = 0; kx < kernel.cols; ++kx) {
                const int sy = clampi(y + ky - ry, 0, r.height - 1);
                const int sx = clampi(x + kx - rx, 0, r.width - 1);
                acc += kernel(ky, kx) * f[r.index(sy, sx)];
            }
        return acc;
    });
}

inline void zero_mean(Matrix& kernel) {
    double s = 0.0;
    for (double v : kernel.data) s += v;
    const double mean = s / kernel.data.size();
    for (double& v : kernel.data) v -= mean;
}

// Uniform LBP mapping: patterns with <= 2 circular transitions keep a
// sequential code, the rest collapse into one bin (58).
inline const std::array<int, 256>& uniform_lbp_table() {
    static const std::array<int, 256> table = [] {
        std::array<int, 256> t{};
        int next = 0;
        for (int p = 0; p < 256; ++p) {
            int transitions = 0;
            for (int b = 0; b < 8; ++b) {
                const int cur = (p >> b) & 1;
                const int nxt = (p >> ((b + 1) % 8)) & 1;
                transitions += cur != nxt;
            }
            t[p] = transitions <= 2 ? next++ : 58;
        }
        return t;
    }();
    return table;
}

struct GlcmStats {
    double contrast = 0.0;
    double correlation = 0.0;
    double energy = 1.0;
    double homogeneity = 1.0;
};

// GLCM over the clamped window around (y, x): `levels` gray levels over
// [0,1], offset (0,1), symmetrized, pairs restricted to valid pixels.
inline GlcmStats glcm_stats(const Raster& r, int y, int x, int window, int levels) {
    const int rad = window / 2;
    const int y0 = clampi(y - rad, 0, r.height - 1), y1 = clampi(y + rad, 0, r.height - 1);
    const int x0 = clampi(x - rad, 0, r.width - 1), x1 = clampi(x + rad, 0, r.width - 1);

    std::vector<double> counts(static_cast<std::size_t>(levels) * levels, 0.0);
    auto quantize = [&](double v) {
        return std::min(levels - 1, static_cast<int>(std::floor(v * levels)));
    };
    double total = 0.0;
    for (int py = y0; py <= y1; ++py) {
        for (int px = x0; px + 1 <= x1; ++px) {
            if (!r.valid(py, px) || !r.valid(py, px + 1)) continue;
            const int g1 = quantize(r.at(py, px));
            const int g2 = quantize(r.at(py, px + 1));
            counts[static_cast<std::size_t>(g1) * levels + g2] += 1.0;
            counts[static_cast<std::size_t>(g2) * levels + g1] += 1.0;
            total += 2.0;
        }
    }

    GlcmStats s;
    if (total == 0.0) return s; // degenerate window: no co-occurring pairs

    s.energy = 0.0;
    s.homogeneity = 0.0;
    double mu = 0.0;
    for (int i = 0; i < levels; ++i) {
        for (int j = 0; j < levels; ++j) {
            const double p = counts[static_cast<std::size_t>(i) * levels + j] / total;
            s.contrast += (i - j) * (i - j) * p;
            s.energy += p * p;
            s.homogeneity += p / (1.0 + (i - j) * (i - j));
            mu += i * p;
        }
    }
    double var = 0.0;
    for (int i = 0; i < levels; ++i)
        for (int j = 0; j < levels; ++j) {
            const double p = counts[static_cast<std::size_t>(i) * levels + j] / total;
            var += (i - mu) * (i - mu) * p;
        }
    if (var > 1e-12) {
        double corr = 0.0;
        for (int i = 0; i < levels; ++i)
            for (int j = 0; j < levels; ++j) {
                const double p = counts[static_cast<std::size_t>(i) * levels + j] / total;
                corr += (i - mu) * (j - mu) * p;
            }
        s.correlation = corr / var; // sigma_i == sigma_j after symmetrization
    }
    return s;
}

inline std::vector<double> extract_sobel(const Raster& r, const FeatureSpec&) {
    const Gradients g = sobel_gradients(r);
    return per_valid_pixel(r, [&](int y, int x) {
        const std::size_t i = r.index(y, x);
        return std::hypot(g.gx[i], g.gy[i]);
    });
}

inline std::vector<double> extract_hog(const Raster& r, const FeatureSpec& spec) {
    const int window = window_size(r, spec);
    const int bins = static_cast<int>(spec.param("bins", 9.0));
    const Gradients g = sobel_gradients(r);
    const int rad = window / 2;
    return per_valid_pixel(r, [&](int y, int x) {
        std::vector<double> hist(bins, 0.0);
        for (int py = clampi(y - rad, 0, r.height - 1); py <= clampi(y + rad, 0, r.height - 1); ++py)
            for (int px = clampi(x - rad, 0, r.width - 1); px <= clampi(x + rad, 0, r.width - 1); ++px) {
                if (!r.valid(py, px)) continue;
                const std::size_t i = r.index(py, px);
                const double mag = std::hypot(g.gx[i], g.gy[i]);
                if (mag == 0.0) continue;
                double ang = std::atan2(g.gy[i], g.gx[i]);
                if (ang < 0) ang += std::numbers::pi;
                if (ang >= std::numbers::pi) ang -= std::numbers::pi;
                const int b = std::min(bins - 1, static_cast<int>(ang / std::numbers::pi * bins));
                hist[b] += mag;
            }
        double e = 0.0;
        for (double h : hist) e += h * h;
        return std::sqrt(e);
    });
}

inline std::vector<double> extract_lbp(const Raster& r, const FeatureSpec&) {
    const std::vector<double> f = filled_intensities(r);
    const auto& table = uniform_lbp_table();
    // circular neighbor order, radius 1
    const int offy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
    const int offx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
    return per_valid_pixel(r, [&](int y, int x) {
        const double c = f[r.index(y, x)];
        int code = 0;
        for (int b = 0; b < 8; ++b) {
            const int ny = clampi(y + offy[b], 0, r.height - 1);
            const int nx = clampi(x + offx[b], 0, r.width - 1);
            if (f[r.index(ny, nx)] >= c) code |= 1 << b;
        }
        return table[code] / 58.0;
    });
}

inline std::vector<double> extract_mean(const Raster& r, const FeatureSpec& spec) {
    const int rad = window_size(r, spec) / 2;
    return per_valid_pixel(r, [&](int y, int x) {
        double sum = 0.0;
        int n = 0;
        for (int py = clampi(y - rad, 0, r.height - 1); py <= clampi(y + rad, 0, r.height - 1); ++py)
            for (int px = clampi(x - rad, 0, r.width - 1); px <= clampi(x + rad, 0, r.width - 1); ++px)
                if (r.valid(py, px)) {
                    sum += r.at(py, px);
                    ++n;
                }
        return n > 0 ? sum / n : 0.0;
    });
}

inline std::vector<double> extract_variance(const Raster& r, const FeatureSpec& spec) {
    const int rad = window_size(r, spec) / 2;
    // two-pass so a constant window is exactly zero
    return per_valid_pixel(r, [&](int y, int x) {
        const int y0 = clampi(y - rad, 0, r.height - 1), y1 = clampi(y + rad, 0, r.height - 1);
        const int x0 = clampi(x - rad, 0, r.width - 1), x1 = clampi(x + rad, 0, r.width - 1);
        double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
        int n = 0;
        for (int py = y0; py <= y1; ++py)
            for (int px = x0; px <= x1; ++px)
                if (r.valid(py, px)) {
                    const double v = r.at(py, px);
                    sum += v;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                    ++n;
                }
        if (n == 0 || lo == hi) return 0.0;
        const double mean = sum / n;
        double var = 0.0;
        for (int py = y0; py <= y1; ++py)
            for (int px = x0; px <= x1; ++px)
                if (r.valid(py, px)) {
                    const double d = r.at(py, px) - mean;
                    var += d * d;
                }
        return var / n;
    });
}

// Structure-tensor anisotropy 1 - lambda2/lambda1, a stand-in for the cited
// shape descriptor.
inline std::vector<double> extract_shape(const Raster& r, const FeatureSpec& spec) {
    const int rad = window_size(r, spec) / 2;
    const Gradients g = sobel_gradients(r);
    return per_valid_pixel(r, [&](int y, int x) {
        double jxx = 0.0, jyy = 0.0, jxy = 0.0;
        for (int py = clampi(y - rad, 0, r.height - 1); py <= clampi(y + rad, 0, r.height - 1); ++py)
            for (int px = clampi(x - rad, 0, r.width - 1); px <= clampi(x + rad, 0, r.width - 1); ++px) {
                if (!r.valid(py, px)) continue;
                const std::size_t i = r.index(py, px);
                jxx += g.gx[i] * g.gx[i];
                jyy += g.gy[i] * g.gy[i];
                jxy += g.gx[i] * g.gy[i];
            }
        const double tr = jxx + jyy;
        const double disc = std::sqrt(std::max(0.0, (jxx - jyy) * (jxx - jyy) + 4.0 * jxy * jxy));
        const double l1 = 0.5 * (tr + disc);
        const double l2 = std::max(0.0, 0.5 * (tr - disc));
        return l1 > 1e-12 ? 1.0 - l2 / l1 : 0.0;
    });
}

template <double GlcmStats::* Member>
std::vector<double> extract_haralick(const Raster& r, const FeatureSpec& spec) {
    const int window = window_size(r, spec);
    const int levels = static_cast<int>(spec.param("levels", 8.0));
    if (levels < 2) throw std::invalid_argument("haralick levels must be >= 2");
    return per_valid_pixel(r, [&](int y, int x) {
        return glcm_stats(r, y, x, window, levels).*Member;
    });
}

inline std::vector<double> extract_gabor(const Raster& r, const FeatureSpec& spec) {
    const int window = window_size(r, spec);
    const double freq = spec.param("frequency", 0.25);
    const double theta = spec.param("theta", 0.0);
    const double sigma = spec.param("sigma", 2.0);
    const double gamma = spec.param("gamma", 1.0);
    const int rad = window / 2;

    Matrix even(window, window), odd(window, window);
    for (int ky = 0; ky < window; ++ky)
        for (int kx = 0; kx < window; ++kx) {
            const double dy = ky - rad, dx = kx - rad;
            const double xp = dx * std::cos(theta) + dy * std::sin(theta);
            const double yp = -dx * std::sin(theta) + dy * std::cos(theta);
            const double env = std::exp(-(xp * xp + gamma * gamma * yp * yp) / (2 * sigma * sigma));
            even(ky, kx) = env * std::cos(2 * std::numbers::pi * freq * xp);
            odd(ky, kx) = env * std::sin(2 * std::numbers::pi * freq * xp);
        }
    detail::zero_mean(even); // kill the DC response so flat regions read 0

    const std::vector<double> re = convolve(r, even);
    const std::vector<double> im = convolve(r, odd);
    return per_valid_pixel(r, [&](int y, int x) {
        const std::size_t i = r.index(y, x);
        return std::hypot(re[i], im[i]);
    });
}

inline std::vector<double> extract_gaussian(const Raster& r, const FeatureSpec& spec) {
    const int window = window_size(r, spec);
    const double sigma = spec.param("sigma", 1.5);
    const int rad = window / 2;
    Matrix kernel(window, window);
    double sum = 0.0;
    for (int ky = 0; ky < window; ++ky)
        for (int kx = 0; kx < window; ++kx) {
            const double dy = ky - rad, dx = kx - rad;
            kernel(ky, kx) = std::exp(-(dy * dy + dx * dx) / (2 * sigma * sigma));
            sum += kernel(ky, kx);
        }
    for (double& v : kernel.data) v /= sum;
    return convolve(r, kernel);
}

// Gliding-box lacunarity at one box size within the local window:
// E[M^2]/E[M]^2 over all box placements, 1 for gapless (constant) texture.
inline std::vector<double> extract_lacunarity(const Raster& r, const FeatureSpec& spec) {
    const int window = window_size(r, spec);
    const int box = static_cast<int>(spec.param("box", 3.0));
    if (box < 1 || box > window) throw std::invalid_argument("lacunarity box out of range");
    const int rad = window / 2;
    return per_valid_pixel(r, [&](int y, int x) {
        const int y0 = clampi(y - rad, 0, r.height - 1), y1 = clampi(y + rad, 0, r.height - 1);
        const int x0 = clampi(x - rad, 0, r.width - 1), x1 = clampi(x + rad, 0, r.width - 1);
        double m1 = 0.0, m2 = 0.0;
        int boxes = 0;
        for (int by = y0; by + box - 1 <= y1; ++by)
            for (int bx = x0; bx + box - 1 <= x1; ++bx) {
                double mass = 0.0;
                for (int py = by; py < by + box; ++py)
                    for (int px = bx; px < bx + box; ++px)
                        if (r.valid(py, px)) mass += r.at(py, px);
                m1 += mass;
                m2 += mass * mass;
                ++boxes;
            }
        if (boxes == 0) return 1.0;
        m1 /= boxes;
        m2 /= boxes;
        return m1 > 1e-12 ? m2 / (m1 * m1) : 1.0;
    });
}

inline std::vector<double> extract_log(const Raster& r, const FeatureSpec& spec) {
    const int window = window_size(r, spec);
    const double sigma = spec.param("sigma", 2.0);
    const int rad = window / 2;
    Matrix kernel(window, window);
    for (int ky = 0; ky < window; ++ky)
        for (int kx = 0; kx < window; ++kx) {
            const double dy = ky - rad, dx = kx - rad;
            const double d2 = dy * dy + dx * dx;
            kernel(ky, kx) = (d2 - 2 * sigma * sigma) / (sigma * sigma * sigma * sigma) *
                             std::exp(-d2 / (2 * sigma * sigma));
        }
    detail::zero_mean(kernel);
    return convolve(r, kernel);
}

inline std::vector<double> extract_intensity(const Raster& r, const FeatureSpec&) {
    return per_valid_pixel(r, [&](int y, int x) { return r.at(y, x); });
}

} // namespace detail

/// Names of the registered per-pixel texture extractors (the 15-channel bank).
inline const std::vector<std::string>& registered_features() {
    static const std::vector<std::string> names = {
        "sobel",           "hog",
        "lbp",             "mean",
        "variance",        "shape",
        "haralick_contrast", "haralick_correlation",
        "haralick_energy", "haralick_homogeneity",
        "gabor",           "gaussian",
        "lacunarity",      "log",
        "intensity"};
    return names;
}

inline bool is_registered_feature(const std::string& name) {
    const auto& names = registered_features();
    return std::find(names.begin(), names.end(), name) != names.end();
}

/// Runs one extractor over the raster: one finite scalar per valid pixel
/// (invalid pixels hold 0 and are never consumed downstream).
inline std::vector<double> extract(const Raster& raster, const FeatureSpec& spec) {
    using Extractor = std::vector<double> (*)(const Raster&, const FeatureSpec&);
    static const std::map<std::string, Extractor> registry = {
        {"sobel", detail::extract_sobel},
        {"hog", detail::extract_hog},
        {"lbp", detail::extract_lbp},
        {"mean", detail::extract_mean},
        {"variance", detail::extract_variance},
        {"shape", detail::extract_shape},
        {"haralick_contrast", detail::extract_haralick<&detail::GlcmStats::contrast>},
        {"haralick_correlation", detail::extract_haralick<&detail::GlcmStats::correlation>},
        {"haralick_energy", detail::extract_haralick<&detail::GlcmStats::energy>},
        {"haralick_homogeneity", detail::extract_haralick<&detail::GlcmStats::homogeneity>},
        {"gabor", detail::extract_gabor},
        {"gaussian", detail::extract_gaussian},
        {"lacunarity", detail::extract_lacunarity},
        {"log", detail::extract_log},
        {"intensity", detail::extract_intensity}};
    auto it = registry.find(spec.name);
    if (it == registry.end()) throw std::invalid_argument("unknown feature: " + spec.name);
    std::vector<double> out = it->second(raster, spec);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (raster.mask[i] && !std::isfinite(out[i]))
            throw std::runtime_error("non-finite value from feature " + spec.name);
    return out;
}

/// Column standardization in place: (x - mean) / population-std per column;
/// constant columns become all-zero. Returns the (mean, std) pairs used.
inline std::vector<std::pair<double, double>> standardize_columns(Matrix& m) {
    std::vector<std::pair<double, double>> stats(m.cols);
    for (int c = 0; c < m.cols; ++c) {
        double sum = 0.0;
        for (int r = 0; r < m.rows; ++r) sum += m(r, c);
        const double mean = m.rows > 0 ? sum / m.rows : 0.0;
        double var = 0.0;
        for (int r = 0; r < m.rows; ++r) {
            const double d = m(r, c) - mean;
            var += d * d;
        }
        const double std_ = m.rows > 0 ? std::sqrt(var / m.rows) : 0.0;
        stats[c] = {mean, std_};
        for (int r = 0; r < m.rows; ++r)
            m(r, c) = std_ > 1e-12 ? (m(r, c) - mean) / std_ : 0.0;
    }
    return stats;
}

/// Averages each per-pixel map over every superpixel's valid pixels, then
/// standardizes columns. Row n corresponds to superpixel n.
inline FeatureMatrix aggregate(const std::vector<std::vector<double>>& per_pixel_maps,
                               const std::vector<std::string>& names, const SuperpixelMap& map) {
    if (per_pixel_maps.size() != names.size())
        throw std::invalid_argument("feature map/name count mismatch");
    for (const auto& m : per_pixel_maps)
        if (m.size() != map.labels.size())
            throw std::invalid_argument("feature map does not cover the raster");
    for (int s = 0; s < map.count; ++s)
        if (map.sizes[s] == 0) throw std::runtime_error("superpixel with zero valid pixels");

    FeatureMatrix fm;
    fm.names = names;
    fm.values = Matrix(map.count, static_cast<int>(per_pixel_maps.size()));
    for (std::size_t f = 0; f < per_pixel_maps.size(); ++f) {
        std::vector<double> sums(map.count, 0.0);
        for (std::size_t i = 0; i < map.labels.size(); ++i)
            if (map.labels[i] >= 0) sums[map.labels[i]] += per_pixel_maps[f][i];
        for (int s = 0; s < map.count; ++s)
            fm.values(s, static_cast<int>(f)) = sums[s] / map.sizes[s];
    }
    fm.standardization = standardize_columns(fm.values);
    for (double v : fm.values.data)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite feature value after aggregation");
    return fm;
}

/// Column subset of a feature matrix, preserving standardization bookkeeping.
inline FeatureMatrix select_columns(const FeatureMatrix& fm, const std::vector<int>& columns) {
    FeatureMatrix out;
    out.values = Matrix(fm.values.rows, static_cast<int>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const int c = columns[j];
        if (c < 0 || c >= fm.values.cols) throw std::out_of_range("feature column out of range");
        out.names.push_back(fm.names[c]);
        out.standardization.push_back(fm.standardization[c]);
        for (int r = 0; r < fm.values.rows; ++r)
            out.values(r, static_cast<int>(j)) = fm.values(r, c);
    }
    return out;
}

} // namespace seatex

#endif
