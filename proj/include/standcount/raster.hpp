#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "standcount/detections.hpp"
#include "standcount/errors.hpp"
#include "standcount/geometry.hpp"

namespace standcount {

// Row-major image grid, interleaved channels (1 or 3). RGB input is
// stored as 0..255 values; derived maps (ExG, distance) are real-valued.
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data;

    static Raster make(int w, int h, int ch, double fill = 0.0) {
        Raster r;
        r.width = w;
        r.height = h;
        r.channels = ch;
        r.data.assign(static_cast<std::size_t>(w) * h * ch, fill);
        return r;
    }

    double& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    static BinaryMask make(int w, int h, bool fill = false) {
        BinaryMask m;
        m.width = w;
        m.height = h;
        m.bits.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
        return m;
    }

    bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    std::size_t count() const;
};

// Non-negative integer labels, 0 = background, components 1..K.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<int> labels;

    static LabelMap make(int w, int h) {
        LabelMap m;
        m.width = w;
        m.height = h;
        m.labels.assign(static_cast<std::size_t>(w) * h, 0);
        return m;
    }

    int get(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, int v) { labels[static_cast<std::size_t>(y) * width + x] = v; }
};

std::pair<double, double> min_max(const Raster& img);

// Scales a scalar map by its maximum into [0,1]; all-zero stays zero.
Raster normalize_to_unit(const Raster& img);

// Median filter over an m x n window (rows x cols, both odd), per
// channel, edge replication at borders. Throws BadWindow.
Raster median_filter(const Raster& img, int m, int n);

// Excess green index 2G - R - B per pixel, unclamped (range [-510,510]
// for 8-bit input). Throws ChannelMismatch unless 3-channel.
Raster exg(const Raster& img);

struct OtsuResult {
    double threshold = 0.0;  // in the input's value units
    BinaryMask mask;         // value > threshold
};

// Threshold maximizing between-class variance on a 256-bin histogram of
// the min-max-normalized image. Throws DegenerateImage when constant.
OtsuResult otsu_threshold(const Raster& img);

// Binary erosion with the discrete disk {(dx,dy): dx^2+dy^2 <= r^2};
// pixels outside the image count as background. radius 0 is identity.
BinaryMask erode_disk(const BinaryMask& mask, int radius);

// 8-connected components, labels 1..K assigned in row-major discovery
// order. Returns the map and K.
std::pair<LabelMap, int> connected_components(const BinaryMask& mask);

// Structuring-element radius from the mean minor-axis length of the
// mask's connected components: round(alpha * mean minor axis). Minor
// axis follows the equal-second-moments ellipse convention,
// 4*sqrt(lambda_min) with lambda_min the smaller eigenvalue of the
// per-pixel central covariance (a single pixel has length 0). Throws
// EmptyMask.
int auto_disk_radius(const BinaryMask& mask, double alpha = 0.25);

// Exact Euclidean (L2) distance to the nearest background pixel, 0 on
// background. A mask with no background at all gets hypot(w, h)
// everywhere.
Raster distance_transform(const BinaryMask& mask);

// Regional maxima of the distance map: connected plateaus of equal
// positive value with no greater neighbor. Each plateau yields one
// marker, the plateau pixel nearest its centroid. Markers closer than
// min_separation to a stronger one are suppressed (ties broken by
// (value desc, row-major position)).
std::vector<Point2> regional_maxima(const Raster& dist, double min_separation);

// Marker-seeded flooding of the negated distance map restricted to the
// mask; 4-connected. Each marker seeds label (index+1); ridge pixels go
// to the first arriving region, ties broken by (distance value, then
// row-major pixel index). Throws MarkerOffMask.
LabelMap watershed(const Raster& dist, const std::vector<Point2>& markers,
                   const BinaryMask& mask);

struct ClassicalConfig {
    int median_rows = 5;
    int median_cols = 5;
    double erosion_alpha = 0.25;     // fraction of mean minor axis
    int min_erosion_radius = 1;
    double min_marker_separation = 8.0;
    double min_exg_range = 120.0;    // below this ExG spread: no vegetation
};

// Intermediate maps captured for --dump-stages.
struct ClassicalStages {
    Raster exg_map;
    BinaryMask mask;
    BinaryMask eroded;
    Raster dist;
    LabelMap cells;
    int erosion_radius = 0;
};

// Classical color-based detector: median -> ExG -> Otsu -> auto-radius
// erosion -> distance transform -> regional maxima -> watershed. Emits
// one Single detection per watershed cell; box is the cell's bounding
// box, confidence the cell's peak of the normalized distance map.
// Images without vegetation contrast yield an empty list.
std::vector<Detection> classical_detect(const Raster& img, const ClassicalConfig& cfg = {},
                                        ClassicalStages* stages = nullptr);

}  // namespace standcount
