#pragma once

#include <vector>

#include "standcount/detections.hpp"
#include "standcount/raster.hpp"

namespace standcount {

// Dominant crop-row angle, degrees in [1,180], measured from vertical
// (counterclockwise on screen). Rotating the image by -theta makes the
// rows vertical. variance_profile[i] is the projection variance at
// angle i+1.
struct AngleEstimate {
    int theta = 180;
    std::vector<double> variance_profile;  // length 180
    bool confident = false;                // max/min variance ratio >= 2
};

struct RadonConfig {
    int max_side = 512;           // decimate bigger inputs before projecting
    double support_frac = 0.25;   // bins with less line support are ignored
    double confident_ratio = 2.0;
};

// Projection variance over integer angles 1..180: for each angle the
// image is rotated so candidate rows stand vertical, columns are summed
// (line integrals) and the variance across adequately-supported bins is
// taken; the argmax angle wins. Throws DegenerateImage when constant.
AngleEstimate radon_variance(const Raster& img, const RadonConfig& cfg = {});

// Rotates about the image center, counterclockwise on screen for
// positive theta, bilinear interpolation, canvas enlarged to hold the
// full rotated extent, background 0. theta == 0 returns the input
// unchanged.
Raster rotate(const Raster& img, double theta_deg);

// Canvas size rotate() will produce for a w x h input.
std::pair<int, int> rotated_canvas(int w, int h, double theta_deg);

// Applies the raster rotation rule to detections: centers follow the
// same map; each box becomes the axis-aligned envelope of its rotated
// corners.
std::vector<Detection> rotate_detections(const std::vector<Detection>& dets,
                                         double theta_deg,
                                         int old_w, int old_h,
                                         int new_w, int new_h);

// Standardizing rotation for an estimate: -theta reduced so an already
// standard field (theta == 180) maps to 0; low-confidence estimates
// also map to 0.
double applied_rotation(const AngleEstimate& est);

}  // namespace standcount
