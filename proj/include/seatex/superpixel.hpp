#ifndef SEATEX_SUPERPIXEL_HPP
#define SEATEX_SUPERPIXEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatex/image_io.hpp"
#include "seatex/raster.hpp"

namespace seatex {

/// Superpixel labeling with the spatial structure used by the clustering
/// stage: centroid positions, valid-pixel counts, and the adjacency graph.
struct SuperpixelMap {
    int width = 0;
    int height = 0;
    std::vector<int> labels; // per pixel, -1 for invalid pixels
    int count = 0;
    std::vector<std::array<double, 2>> centroids; // (row, col)
    std::vector<std::vector<int>> adjacency;      // sorted neighbor ids
    std::vector<int> sizes;                       // valid-pixel counts

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width + col;
    }
};

struct NeighborDistance {
    int id = 0;
    double distance = 0.0; // centroid Euclidean distance, pixel units
};

/// Neighbors of superpixel n with centroid distances d_nk.
inline std::vector<NeighborDistance> neighborhood_distances(const SuperpixelMap& map, int n) {
    if (n < 0 || n >= map.count) throw std::out_of_range("superpixel id out of range");
    std::vector<NeighborDistance> out;
    out.reserve(map.adjacency[n].size());
    for (int k : map.adjacency[n]) {
        const double dy = map.centroids[n][0] - map.centroids[k][0];
        const double dx = map.centroids[n][1] - map.centroids[k][1];
        out.push_back({k, std::sqrt(dy * dy + dx * dx)});
    }
    return out;
}

namespace detail {

inline int detail_clamp(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// 4-connected components of equal-label valid pixels. Returns the component
// id per pixel (-1 for invalid) and fills sizes/labels per component.
inline int label_components(const SuperpixelMap& map, const std::vector<int>& labels,
                            std::vector<int>& comp, std::vector<int>& comp_label,
                            std::vector<int>& comp_size) {
    comp.assign(labels.size(), -1);
    comp_label.clear();
    comp_size.clear();
    int next = 0;
    std::deque<std::size_t> queue;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const std::size_t i = map.index(y, x);
            if (labels[i] < 0 || comp[i] >= 0) continue;
            const int lab = labels[i];
            comp[i] = next;
            int size = 0;
            queue.push_back(i);
            while (!queue.empty()) {
                const std::size_t j = queue.front();
                queue.pop_front();
                ++size;
                const int jy = static_cast<int>(j) / map.width;
                const int jx = static_cast<int>(j) % map.width;
                const int dy[4] = {-1, 1, 0, 0};
                const int dx[4] = {0, 0, -1, 1};
                for (int d = 0; d < 4; ++d) {
                    const int ny = jy + dy[d], nx = jx + dx[d];
                    if (ny < 0 || ny >= map.height || nx < 0 || nx >= map.width) continue;
                    const std::size_t k = map.index(ny, nx);
                    if (labels[k] == lab && comp[k] < 0) {
                        comp[k] = next;
                        queue.push_back(k);
                    }
                }
            }
            comp_label.push_back(lab);
            comp_size.push_back(size);
            ++next;
        }
    }
    return next;
}

// Relabels fragments (non-largest components of a label) into the dominant
// neighboring kept component until every label is 4-connected. Fragments
// only merge into kept components, so rounds cannot oscillate; a fragment
// with no kept neighbor is eventually promoted to its own label.
inline void enforce_connectivity(const SuperpixelMap& map, std::vector<int>& labels,
                                 int& label_count) {
    for (;;) {
        std::vector<int> comp, comp_label, comp_size;
        const int ncomp = label_components(map, labels, comp, comp_label, comp_size);

        // largest component per label (ties break to the first in scan order)
        std::vector<int> largest(label_count, -1);
        for (int c = 0; c < ncomp; ++c) {
            const int lab = comp_label[c];
            if (largest[lab] < 0 || comp_size[c] > comp_size[largest[lab]]) largest[lab] = c;
        }
        std::vector<char> kept(ncomp, 0);
        for (int lab = 0; lab < label_count; ++lab)
            if (largest[lab] >= 0) kept[largest[lab]] = 1;

        bool any_fragment = false;
        for (int c = 0; c < ncomp; ++c) any_fragment = any_fragment || !kept[c];
        if (!any_fragment) return;

        // dominant kept neighbor label per fragment
        std::vector<std::vector<std::pair<int, int>>> votes(ncomp); // (label, count)
        auto vote = [&](int c, int lab) {
            for (auto& v : votes[c])
                if (v.first == lab) {
                    ++v.second;
                    return;
                }
            votes[c].push_back({lab, 1});
        };
        for (int y = 0; y < map.height; ++y) {
            for (int x = 0; x < map.width; ++x) {
                const std::size_t i = map.index(y, x);
                if (labels[i] < 0 || kept[comp[i]]) continue;
                const int dy[4] = {-1, 1, 0, 0};
                const int dx[4] = {0, 0, -1, 1};
                for (int d = 0; d < 4; ++d) {
                    const int ny = y + dy[d], nx = x + dx[d];
                    if (ny < 0 || ny >= map.height || nx < 0 || nx >= map.width) continue;
                    const std::size_t k = map.index(ny, nx);
                    if (labels[k] >= 0 && kept[comp[k]]) vote(comp[i], labels[k]);
                }
            }
        }

        std::vector<int> target(ncomp, -1);
        bool merged = false;
        int largest_stranded = -1;
        for (int c = 0; c < ncomp; ++c) {
            if (kept[c]) continue;
            int best = -1, best_count = 0;
            for (auto& [lab, cnt] : votes[c]) {
                if (cnt > best_count || (cnt == best_count && lab < best)) {
                    best = lab;
                    best_count = cnt;
                }
            }
            target[c] = best;
            merged = merged || best >= 0;
            if (best < 0 && (largest_stranded < 0 || comp_size[c] > comp_size[largest_stranded]))
                largest_stranded = c;
        }
        // nothing touches a kept component: promote the largest stranded
        // fragment so the next round has an anchor
        if (!merged && largest_stranded >= 0) target[largest_stranded] = label_count++;

        for (std::size_t i = 0; i < labels.size(); ++i) {
            const int c = labels[i] >= 0 ? comp[i] : -1;
            if (c >= 0 && !kept[c] && target[c] >= 0) labels[i] = target[c];
        }
    }
}

} // namespace detail

/// SLIC over (intensity, x, y) with deterministic regular-grid seeding.
/// Distance: sqrt(d_int^2 + (compactness/S)^2 * d_spatial^2), S = sqrt(P/K).
/// A post-pass relabels orphan fragments to enforce 4-connectivity.
inline SuperpixelMap slic(const Raster& raster, int target_count, double compactness,
                          int max_iters = 10) {
    const int n_valid = raster.valid_count();
    if (target_count < 1 || target_count > n_valid)
        throw std::invalid_argument("superpixel target_count out of range");
    if (compactness <= 0.0) throw std::invalid_argument("compactness must be positive");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");

    SuperpixelMap map;
    map.width = raster.width;
    map.height = raster.height;

    const double total = static_cast<double>(raster.width) * raster.height;
    const double spacing = std::sqrt(total / target_count);
    const double spatial_weight = compactness / spacing;

    struct Seed {
        double y, x, intensity;
    };
    std::vector<Seed> seeds;
    const int ny = std::max(1, static_cast<int>(std::lround(raster.height / spacing)));
    const int nx = std::max(1, static_cast<int>(std::lround(raster.width / spacing)));
    for (int gy = 0; gy < ny; ++gy) {
        for (int gx = 0; gx < nx; ++gx) {
            // cell center in pixel-index space (pixel i sits at coordinate i)
            const double cy = (gy + 0.5) * raster.height / ny - 0.5;
            const double cx = (gx + 0.5) * raster.width / nx - 0.5;
            const int py = detail::detail_clamp(static_cast<int>(std::lround(cy)), 0, raster.height - 1);
            const int px = detail::detail_clamp(static_cast<int>(std::lround(cx)), 0, raster.width - 1);
            if (raster.valid(py, px)) {
                seeds.push_back({cy, cx, raster.at(py, px)});
                continue;
            }
            // seed cell's pixel is masked: fall back to the cell's valid mean
            const int y0 = gy * raster.height / ny, y1 = (gy + 1) * raster.height / ny;
            const int x0 = gx * raster.width / nx, x1 = (gx + 1) * raster.width / nx;
            double sy = 0, sx = 0, si = 0;
            int cnt = 0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    if (raster.valid(y, x)) {
                        sy += y;
                        sx += x;
                        si += raster.at(y, x);
                        ++cnt;
                    }
            if (cnt > 0) seeds.push_back({sy / cnt, sx / cnt, si / cnt});
        }
    }

    std::vector<int> labels(raster.intensities.size(), -1);
    std::vector<double> best(raster.intensities.size(), 0.0);
    const int radius = static_cast<int>(std::ceil(spacing));

    for (int iter = 0; iter < max_iters; ++iter) {
        std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
        std::fill(labels.begin(), labels.end(), -1);

        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const Seed& seed = seeds[s];
            const int y0 = std::max(0, static_cast<int>(std::floor(seed.y)) - radius);
            const int y1 = std::min(raster.height - 1, static_cast<int>(std::ceil(seed.y)) + radius);
            const int x0 = std::max(0, static_cast<int>(std::floor(seed.x)) - radius);
            const int x1 = std::min(raster.width - 1, static_cast<int>(std::ceil(seed.x)) + radius);
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const std::size_t i = raster.index(y, x);
                    if (!raster.mask[i]) continue;
                    const double di = raster.intensities[i] - seed.intensity;
                    const double dy = y - seed.y;
                    const double dx = x - seed.x;
                    const double d2 = di * di + spatial_weight * spatial_weight * (dy * dy + dx * dx);
                    if (d2 < best[i]) {
                        best[i] = d2;
                        labels[i] = static_cast<int>(s);
                    }
                }
            }
        }

        // valid pixels outside every search window inherit the nearest assigned label
        std::deque<std::size_t> queue;
        for (int y = 0; y < raster.height; ++y)
            for (int x = 0; x < raster.width; ++x) {
                const std::size_t i = raster.index(y, x);
                if (raster.mask[i] && labels[i] >= 0) queue.push_back(i);
            }
        while (!queue.empty()) {
            const std::size_t j = queue.front();
            queue.pop_front();
            const int jy = static_cast<int>(j) / raster.width;
            const int jx = static_cast<int>(j) % raster.width;
            const int dy[4] = {-1, 1, 0, 0};
            const int dx[4] = {0, 0, -1, 1};
            for (int d = 0; d < 4; ++d) {
                const int ny2 = jy + dy[d], nx2 = jx + dx[d];
                if (ny2 < 0 || ny2 >= raster.height || nx2 < 0 || nx2 >= raster.width) continue;
                const std::size_t k = raster.index(ny2, nx2);
                if (raster.mask[k] && labels[k] < 0) {
                    labels[k] = labels[j];
                    queue.push_back(k);
                }
            }
        }

        // masked-off islands the flood never reaches: take the nearest seed
        for (int y = 0; y < raster.height; ++y)
            for (int x = 0; x < raster.width; ++x) {
                const std::size_t i = raster.index(y, x);
                if (!raster.mask[i] || labels[i] >= 0) continue;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t s = 0; s < seeds.size(); ++s) {
                    const double di = raster.intensities[i] - seeds[s].intensity;
                    const double dy2 = y - seeds[s].y;
                    const double dx2 = x - seeds[s].x;
                    const double d2 =
                        di * di + spatial_weight * spatial_weight * (dy2 * dy2 + dx2 * dx2);
                    if (d2 < best_d) {
                        best_d = d2;
                        labels[i] = static_cast<int>(s);
                    }
                }
            }

        // recompute seeds
        std::vector<double> sy(seeds.size(), 0), sx(seeds.size(), 0), si(seeds.size(), 0);
        std::vector<int> cnt(seeds.size(), 0);
        for (int y = 0; y < raster.height; ++y)
            for (int x = 0; x < raster.width; ++x) {
                const std::size_t i = raster.index(y, x);
                if (!raster.mask[i] || labels[i] < 0) continue;
                sy[labels[i]] += y;
                sx[labels[i]] += x;
                si[labels[i]] += raster.intensities[i];
                ++cnt[labels[i]];
            }
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            if (cnt[s] == 0) continue;
            seeds[s] = {sy[s] / cnt[s], sx[s] / cnt[s], si[s] / cnt[s]};
        }
    }

    int label_count = static_cast<int>(seeds.size());
    detail::enforce_connectivity(map, labels, label_count);

    // compact ids to [0, N), dropping empty superpixels
    std::vector<int> remap(label_count, -1);
    int next = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        if (remap[labels[i]] < 0) remap[labels[i]] = next++;
        labels[i] = remap[labels[i]];
    }
    map.labels = std::move(labels);
    map.count = next;

    map.sizes.assign(map.count, 0);
    map.centroids.assign(map.count, {0.0, 0.0});
    for (int y = 0; y < raster.height; ++y)
        for (int x = 0; x < raster.width; ++x) {
            const int lab = map.labels[map.index(y, x)];
            if (lab < 0) continue;
            map.centroids[lab][0] += y;
            map.centroids[lab][1] += x;
            ++map.sizes[lab];
        }
    for (int s = 0; s < map.count; ++s) {
        map.centroids[s][0] /= map.sizes[s];
        map.centroids[s][1] /= map.sizes[s];
    }

    std::vector<std::set<int>> adj(map.count);
    for (int y = 0; y < raster.height; ++y)
        for (int x = 0; x < raster.width; ++x) {
            const int lab = map.labels[map.index(y, x)];
            if (lab < 0) continue;
            if (x + 1 < raster.width) {
                const int r = map.labels[map.index(y, x + 1)];
                if (r >= 0 && r != lab) {
                    adj[lab].insert(r);
                    adj[r].insert(lab);
                }
            }
            if (y + 1 < raster.height) {
                const int d = map.labels[map.index(y + 1, x)];
                if (d >= 0 && d != lab) {
                    adj[lab].insert(d);
                    adj[d].insert(lab);
                }
            }
        }
    map.adjacency.resize(map.count);
    for (int s = 0; s < map.count; ++s)
        map.adjacency[s].assign(adj[s].begin(), adj[s].end());

    return map;
}

/// Debug output: superpixel ids as a 16-bit PNG (id+1; invalid pixels 0).
inline void write_labels_png(const SuperpixelMap& map, const std::string& path) {
    std::vector<std::uint16_t> out(map.labels.size(), 0);
    for (std::size_t i = 0; i < map.labels.size(); ++i)
        if (map.labels[i] >= 0) out[i] = static_cast<std::uint16_t>(map.labels[i] + 1);
    io::write_png_gray16(path, map.width, map.height, out);
}

/// Debug output: raster with superpixel boundaries burned in white.
inline void write_boundary_overlay(const SuperpixelMap& map, const Raster& raster,
                                   const std::string& path) {
    std::vector<std::uint8_t> out(map.labels.size(), 0);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            const std::size_t i = map.index(y, x);
            if (!raster.mask[i]) continue;
            bool boundary = false;
            if (x + 1 < map.width && map.labels[map.index(y, x + 1)] != map.labels[i])
                boundary = true;
            if (y + 1 < map.height && map.labels[map.index(y + 1, x)] != map.labels[i])
                boundary = true;
            out[i] = boundary ? 255 : quantize8(raster.intensities[i]);
        }
    io::write_png_gray8(path, map.width, map.height, out);
}

} // namespace seatex

#endif
