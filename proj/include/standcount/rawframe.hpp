#pragma once

#include <optional>
#include <string>
#include <vector>

#include "standcount/detections.hpp"
#include "standcount/geometry.hpp"
#include "standcount/raster.hpp"

namespace standcount {

// One video frame with its pairwise registration. `pairwise` maps this
// frame's coordinates into the previous frame's system (frame 0 holds
// the identity). Frame ids are dense 0..N-1.
struct FrameRecord {
    int frame_id = 0;
    std::string image_path;  // empty when the dataset has labels only
    Raster image;            // width 0 when pixels are not loaded
    int width = 0;
    int height = 0;
    Homography pairwise = Homography::identity();
    std::vector<Detection> detections;  // frame-local pixels, source = frame_id
};

struct FrameDirOptions {
    bool invert_pairwise = false;  // stored files map previous -> this frame
    int fallback_w = 0;            // frame size when no images exist
    int fallback_h = 0;
    bool load_pixels = false;      // keep decoded frames in memory
};

// Loads `frame_%06d.(png|ppm)`, `frame_%06d.txt` and `hom_%06d.txt`
// from a directory. A missing label file is a zero-detection frame; a
// missing hom file is only allowed for frame 0 (identity).
std::vector<FrameRecord> load_frame_dir(const std::string& dir, const FrameDirOptions& opts);

// H(0<-i) per frame: identity for frame 0, then the left-to-right
// product of the pairwise maps. Throws SingularMatrix naming the frame.
std::vector<Homography> cumulative_chain(const std::vector<FrameRecord>& frames);

// All detections in frame-0 coordinates plus the bounding rectangle of
// every projected frame corner (which contains every projected
// detection center).
struct GlobalScene {
    std::vector<Detection> detections;
    Rect extent;
};

// Projects every detection box through its frame's cumulative
// homography (frames are independent; projection runs in parallel up to
// `parallelism`). PointAtInfinity is annotated with frame and detection
// index.
GlobalScene project_all(const std::vector<FrameRecord>& frames,
                        const std::vector<Homography>& chain,
                        int parallelism = 1);

// Class-agnostic NMS over the projected detections: one survivor per
// physical plant when alignment error is small against plant size.
std::vector<Detection> consensus(const GlobalScene& scene,
                                 double iou_thresh = 0.25, double conf_thresh = 0.25);

struct RenderedMosaic {
    Raster image;
    double offset_x = 0.0;  // global coords of canvas pixel (0,0)
    double offset_y = 0.0;
};

// Warps frames into the global extent, later frames overwriting earlier
// ones on overlap (alpha = 1). Frames must carry pixels or a readable
// image_path. Extents above budget_px abort with ExtentBudgetExceeded
// before any allocation.
RenderedMosaic render_mosaic(const std::vector<FrameRecord>& frames,
                             const std::vector<Homography>& chain,
                             std::int64_t budget_px = 100'000'000);

}  // namespace standcount
