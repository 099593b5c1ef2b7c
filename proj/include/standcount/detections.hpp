#pragma once

#include <string>
#include <vector>

#include "standcount/geometry.hpp"

namespace standcount {

// Detector classes: a box may cover one, two or three plants growing
// from the same hole.
enum class PlantClass : int { Single = 0, Double = 1, Triple = 2 };

inline int multiplicity(PlantClass c) { return static_cast<int>(c) + 1; }

PlantClass plant_class_from_id(int id);  // throws ParseError outside {0,1,2}

// One classed, scored, axis-aligned detection. Coordinates are pixels;
// whether they are frame-local or global is tracked by context. `source`
// identifies the originating frame or patch and, together with input
// order, makes NMS tie-breaking deterministic.
struct Detection {
    PlantClass cls = PlantClass::Single;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
    double conf = 1.0;
    int source = 0;

    Box box() const { return {cx, cy, w, h}; }
};

// Parses YOLO-style label text: one detection per line,
//   class_id cx cy w h [conf]
// with cx, cy, w, h normalized to [0,1] relative to the image size and
// confidence optional (defaults to 1.0). Values are denormalized to
// pixels. Line order is preserved. Throws ParseError with the 1-based
// line number on malformed fields and RangeError when a normalized
// value leaves [0,1] by more than 1e-6 (or a box side is not positive).
std::vector<Detection> parse_labels(const std::string& text, double img_w, double img_h);

std::vector<Detection> load_label_file(const std::string& path, double img_w, double img_h);

// Inverse of parse_labels: normalizes by the image size and writes one
// `class cx cy w h conf` line per detection, floats with 6 decimals,
// '\n' terminated.
std::string serialize_labels(const std::vector<Detection>& dets, double img_w, double img_h);

// Intersection-over-union of the two axis-aligned boxes, treated as
// closed real rectangles (area = w*h). 0 when disjoint.
double iou(const Detection& a, const Detection& b);
double iou(const Box& a, const Box& b);

// Greedy class-agnostic non-maximum suppression. Drops detections with
// conf < conf_thresh, then keeps remaining boxes in descending
// confidence order, suppressing any box whose IoU with an already-kept
// box is strictly greater than iou_thresh. Ties at equal confidence are
// broken by (source, input order) so results are reproducible. Output
// is the kept boxes in descending confidence order.
//
// A uniform grid over kept boxes prunes the IoU candidate set; results
// are identical to the quadratic reference.
std::vector<Detection> nms(const std::vector<Detection>& dets,
                           double iou_thresh = 0.25,
                           double conf_thresh = 0.25);

}  // namespace standcount
