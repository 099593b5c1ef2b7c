#pragma once

#include <string>
#include <vector>

#include "standcount/detections.hpp"

namespace standcount {

enum class FieldMode { Nursery, Production };

// Half-open interval [start, end) in pixels.
struct Interval {
    double start = 0.0;
    double end = 0.0;
    bool contains(double v, bool closed_end = false) const {
        return v >= start && (closed_end ? v <= end : v < end);
    }
};

// Oriented field structure: horizontal range bands stacked along y,
// each holding its planted rows as x intervals (rows run top-to-bottom
// after orientation standardization). Intervals are disjoint and sorted.
// Production mode has exactly one range spanning the full extent.
struct FieldLayout {
    double theta = 0.0;  // rotation applied before segmentation, degrees
    FieldMode mode = FieldMode::Nursery;
    std::vector<Interval> ranges;                   // y intervals
    std::vector<std::vector<Interval>> rows;        // x intervals per range
};

struct LayoutConfig {
    double bin_px = 8.0;
    int window_bins = 9;           // moving-average width, odd
    double prominence_frac = 0.10;  // of the smoothed profile maximum
    double gap_frac = 0.10;         // bins at/below this count as gap
};

struct HistogramPeaks {
    std::vector<double> profile;  // smoothed counts per bin
    std::vector<double> peaks;    // peak positions, pixel coordinates
    std::vector<double> gaps;     // gap midpoints between adjacent peaks
    double origin = 0.0;
    double bin_width = 1.0;
};

// Bins positions over [extent.start, extent.end), smooths with a uniform
// moving window, then picks local maxima whose topographic prominence
// clears prominence_frac of the profile max. A gap is recorded between
// consecutive peaks when the profile dips to gap_frac of the max; its
// position is the midpoint of the dipped run. Throws EmptyInput /
// BadWindow.
HistogramPeaks histogram_peaks(const std::vector<double>& positions,
                               Interval extent, double bin_px, int window_bins,
                               double prominence_frac = 0.10,
                               double gap_frac = 0.10);

// Range bands from the y histogram of detection centroids; boundaries
// sit at gap midpoints, outermost at the extent edges. Throws
// NoRangesFound when the profile has no acceptable peak.
std::vector<Interval> detect_ranges(const std::vector<Detection>& dets,
                                    Interval y_extent, const LayoutConfig& cfg);

// Row intervals within one range from the x histogram of its centroids.
std::vector<Interval> detect_rows(const std::vector<Detection>& dets,
                                  Interval x_extent, const LayoutConfig& cfg);

FieldLayout nursery_layout(const std::vector<Detection>& dets,
                           Interval x_extent, Interval y_extent,
                           const LayoutConfig& cfg);

// Single range spanning the full height; rows detected over the whole
// field.
FieldLayout production_mode_layout(const std::vector<Detection>& dets,
                                   Interval x_extent, Interval y_extent,
                                   const LayoutConfig& cfg);

// Per-row stand counts.
struct RowCount {
    int range_idx = 0;
    int row_idx = 0;
    long predicted = 0;  // sum of class multiplicities
    std::vector<Detection> detections;
};

struct CountReport {
    std::vector<RowCount> rows;          // every layout row, reading order
    std::vector<Detection> unassigned;   // centroid outside all rows
};

// Assigns each detection to (range, row) by centroid membership; rows
// the layout defines but nothing hits still appear with count 0.
// Detections outside every row land in `unassigned`, never dropped, so
// total multiplicity is conserved.
CountReport count_rows(const FieldLayout& layout, const std::vector<Detection>& dets);

// `range,row,count` CSV, header included, reading order.
std::string counts_to_csv(const CountReport& report);

std::string layout_to_json(const FieldLayout& layout);

}  // namespace standcount
