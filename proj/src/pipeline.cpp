#include "standcount/pipeline.hpp"

#include <cmath>

namespace standcount {

CountingResult run_counting(const std::vector<Detection>& global_dets,
                            Rect extent, const Raster* exg_source,
                            const CountingConfig& cfg) {
    CountingResult res;
    const int w = std::max(1, static_cast<int>(std::ceil(extent.width())));
    const int h = std::max(1, static_cast<int>(std::ceil(extent.height())));

    res.theta = 0.0;
    if (!cfg.skip_orientation && exg_source) {
        try {
            res.estimate = radon_variance(*exg_source, cfg.radon);
            res.theta = applied_rotation(res.estimate);
        } catch (const DegenerateImage&) {
            res.theta = 0.0;  // featureless input: leave as-is
        }
    }

    // work in extent-local coordinates so rotation math sees plain dims
    std::vector<Detection> local = global_dets;
    for (auto& d : local) {
        d.cx -= extent.x0;
        d.cy -= extent.y0;
    }
    if (res.theta != 0.0) {
        auto [nw, nh] = rotated_canvas(w, h, res.theta);
        res.oriented = rotate_detections(local, res.theta, w, h, nw, nh);
        res.canvas_w = nw;
        res.canvas_h = nh;
    } else {
        res.oriented = std::move(local);
        res.canvas_w = w;
        res.canvas_h = h;
    }

    const Interval x_extent{0.0, static_cast<double>(res.canvas_w)};
    const Interval y_extent{0.0, static_cast<double>(res.canvas_h)};
    if (cfg.mode == FieldMode::Production)
        res.layout = production_mode_layout(res.oriented, x_extent, y_extent, cfg.layout);
    else
        res.layout = nursery_layout(res.oriented, x_extent, y_extent, cfg.layout);
    res.layout.theta = res.theta;

    res.report = count_rows(res.layout, res.oriented);
    return res;
}

}  // namespace standcount
