#pragma once

#include "standcount/layout.hpp"
#include "standcount/orientation.hpp"

namespace standcount {

// Back half shared by both input modes: standardize orientation, segment
// into ranges and rows, count.
struct CountingConfig {
    LayoutConfig layout;
    RadonConfig radon;
    FieldMode mode = FieldMode::Nursery;
    bool skip_orientation = false;  // force theta = 0
};

struct CountingResult {
    double theta = 0.0;       // rotation applied to detections, degrees
    int canvas_w = 0;         // oriented extent the layout lives in
    int canvas_h = 0;
    AngleEstimate estimate;   // empty profile when orientation skipped
    FieldLayout layout;
    CountReport report;
    std::vector<Detection> oriented;  // detections after rotation
};

// `global_dets` live in `extent` (global pixel coordinates).
// `exg_source` is the scalar map orientation runs on (usually the ExG
// of the mosaic); pass nullptr to skip orientation, e.g. for raw
// datasets without imagery.
CountingResult run_counting(const std::vector<Detection>& global_dets,
                            Rect extent, const Raster* exg_source,
                            const CountingConfig& cfg);

}  // namespace standcount
