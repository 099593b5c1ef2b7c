#pragma once

#include <string>
#include <vector>

#include "standcount/layout.hpp"
#include "standcount/raster.hpp"
#include "standcount/rawframe.hpp"

namespace standcount {

// Synthetic nursery geometry, all lengths in pixels. The defaults map
// the usual hand-planted nursery dimensions at 100 px/m: 91 px row
// pitch, 182 px alleys. Rows run vertically (standard orientation),
// ranges stack along y.
struct FieldSpec {
    int ranges = 3;
    int rows_per_range = 4;
    int plants_per_row = 20;
    double row_pitch = 91.0;      // x distance between rows in a range
    double alley_gap = 182.0;     // unplanted y gap between ranges
    double plant_spacing = 28.0;  // y distance between plants in a row
    double double_rate = 0.05;
    double triple_rate = 0.0;
    double weed_density = 0.0;    // blobs per px^2, off-grid
    double jitter = 2.0;          // positional jitter sigma, px
    double margin = 60.0;
    unsigned seed = 42;
};

struct SyntheticField {
    Raster image;                     // RGB, 0..255
    std::vector<Detection> truth;     // global pixel coords, conf 1
    CountReport truth_report;         // per (range,row) multiplicity sums
    FieldLayout truth_layout;
    int width = 0;
    int height = 0;
};

// Renders plants as lobed green blobs on noisy brown soil. Counts are
// exact by construction and everything is deterministic in the seed.
// Throws SpecInvalid.
SyntheticField generate_field(const FieldSpec& spec);

struct FlightSpec {
    int frame_w = 256;
    int frame_h = 256;
    int stride = 128;            // < min(frame_w, frame_h)
    double hom_noise_sigma = 0;  // gaussian px noise on pairwise shifts
    double min_visible_frac = 0.35;  // clipped boxes below this are omitted
    double conf_lo = 0.55;       // per-frame confidence jitter range
    double conf_hi = 0.95;
    unsigned seed = 7;
};

// Slices the field into overlapping frames (row-major scan), emitting
// exact pairwise translations perturbed by hom_noise_sigma and per-frame
// label clips of the truth detections.
std::vector<FrameRecord> generate_flight(const SyntheticField& field, const FlightSpec& spec);

// Writes the directory layout the rawframe loader consumes:
// frame_%06d.<image_format> + frame_%06d.txt + hom_%06d.txt. With
// invert_pairwise_files the stored matrices are the inverses of the
// loader convention (for exercising --invert-pairwise).
void write_flight_dir(const std::vector<FrameRecord>& frames, const std::string& dir,
                      const std::string& image_format = "ppm",
                      bool invert_pairwise_files = false);

}  // namespace standcount
