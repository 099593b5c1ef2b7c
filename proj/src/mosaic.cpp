#include "standcount/mosaic.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "standcount/parallel.hpp"

namespace standcount {

namespace {

std::vector<int> axis_origins(int dim, int patch, int stride) {
    std::vector<int> xs{0};
    while (xs.back() + patch < dim) {
        int nx = xs.back() + stride;
        if (nx + patch >= dim) nx = dim - patch;
        xs.push_back(nx);
    }
    return xs;
}

}  // namespace

PatchGrid patchify(int mosaic_w, int mosaic_h, int patch_size, double overlap_frac) {
    if (patch_size < 64)
        throw RangeError("patchify: patch size must be >= 64, got " + std::to_string(patch_size));
    if (overlap_frac < 0.0 || overlap_frac >= 1.0)
        throw RangeError("patchify: overlap fraction must be in [0,1)");
    if (mosaic_w <= 0 || mosaic_h <= 0)
        throw RangeError("patchify: empty mosaic");

    PatchGrid g;
    g.requested_size = patch_size;
    g.overlap_frac = overlap_frac;
    g.mosaic_w = mosaic_w;
    g.mosaic_h = mosaic_h;
    g.patch_w = std::min(patch_size, mosaic_w);
    g.patch_h = std::min(patch_size, mosaic_h);

    const int stride = std::max(1, static_cast<int>(
        std::floor(patch_size * (1.0 - overlap_frac) + 1e-9)));
    const std::vector<int> xs = axis_origins(mosaic_w, g.patch_w, stride);
    const std::vector<int> ys = axis_origins(mosaic_h, g.patch_h, stride);
    g.cols = static_cast<int>(xs.size());
    g.rows = static_cast<int>(ys.size());
    for (int y : ys)
        for (int x : xs)
            g.origins.push_back({x, y});
    return g;
}

std::string grid_manifest_csv(const PatchGrid& grid) {
    std::string out = "patch_row,patch_col,x0,y0,size\n";
    char buf[96];
    for (int i = 0; i < grid.count(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%d\n", i / grid.cols, i % grid.cols,
                      grid.origins[i].first, grid.origins[i].second, grid.requested_size);
        out += buf;
    }
    return out;
}

Raster extract_patch(const Raster& mosaic, const PatchGrid& grid, int index) {
    const auto [x0, y0] = grid.origins[index];
    Raster out = Raster::make(grid.patch_w, grid.patch_h, mosaic.channels);
    for (int y = 0; y < grid.patch_h; ++y)
        for (int x = 0; x < grid.patch_w; ++x)
            for (int c = 0; c < mosaic.channels; ++c)
                out.at(x, y, c) = mosaic.at(x0 + x, y0 + y, c);
    return out;
}

std::vector<Detection> ClassicalProvider::detect(const PatchRef& patch) {
    if (!patch.pixels)
        throw MissingImage("classical provider needs patch pixels");
    std::vector<Detection> dets = classical_detect(*patch.pixels, cfg_);
    if (!drop_edge_) return dets;

    std::vector<Detection> kept;
    for (const auto& d : dets) {
        const bool clipped_left = !patch.at_left && d.cx - 0.5 * d.w <= 0.5;
        const bool clipped_right = !patch.at_right && d.cx + 0.5 * d.w >= patch.w - 1.5;
        const bool clipped_top = !patch.at_top && d.cy - 0.5 * d.h <= 0.5;
        const bool clipped_bottom = !patch.at_bottom && d.cy + 0.5 * d.h >= patch.h - 1.5;
        if (!(clipped_left || clipped_right || clipped_top || clipped_bottom))
            kept.push_back(d);
    }
    return kept;
}

std::vector<Detection> LabelDirProvider::detect(const PatchRef& patch) {
    char name[64];
    std::snprintf(name, sizeof(name), "patch_%d_%d.txt", patch.row, patch.col);
    const std::filesystem::path path = std::filesystem::path(dir_) / name;
    if (!std::filesystem::exists(path))
        return {};  // patch without detections
    return load_label_file(path.string(), patch.w, patch.h);
}

std::vector<Detection> merge_patch_detections(const PatchGrid& grid,
                                              const std::vector<std::vector<Detection>>& per_patch,
                                              double iou_thresh, double conf_thresh) {
    if (static_cast<int>(per_patch.size()) != grid.count())
        throw GridMismatch("merge: got " + std::to_string(per_patch.size())
                           + " detection lists for " + std::to_string(grid.count()) + " patches");
    std::vector<Detection> all;
    for (int i = 0; i < grid.count(); ++i) {
        const auto [x0, y0] = grid.origins[i];
        for (Detection d : per_patch[i]) {
            d.cx += x0;
            d.cy += y0;
            d.source = i;
            all.push_back(d);
        }
    }
    return nms(all, iou_thresh, conf_thresh);
}

std::vector<Detection> run_mosaic_mode(const Raster& mosaic, DetectionProvider& provider,
                                       const MosaicModeConfig& cfg, PatchGrid* grid_out) {
    const PatchGrid grid = patchify(mosaic.width, mosaic.height, cfg.patch_size, cfg.overlap_frac);
    if (grid_out) *grid_out = grid;

    std::vector<std::vector<Detection>> per_patch(grid.count());
    const bool pixels = provider.wants_pixels();
    parallel_for(grid.count(), cfg.parallelism, [&](int i) {
        PatchRef ref;
        ref.index = i;
        ref.row = i / grid.cols;
        ref.col = i % grid.cols;
        ref.x0 = grid.origins[i].first;
        ref.y0 = grid.origins[i].second;
        ref.w = grid.patch_w;
        ref.h = grid.patch_h;
        ref.at_left = ref.x0 == 0;
        ref.at_top = ref.y0 == 0;
        ref.at_right = ref.x0 + grid.patch_w >= grid.mosaic_w;
        ref.at_bottom = ref.y0 + grid.patch_h >= grid.mosaic_h;
        Raster patch;
        if (pixels) {
            patch = extract_patch(mosaic, grid, i);
            ref.pixels = &patch;
        }
        try {
            per_patch[i] = provider.detect(ref);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "patch (" << ref.row << "," << ref.col << ") at (" << ref.x0 << ","
               << ref.y0 << "): " << e.what();
            throw Error(os.str());
        }
    });

    return merge_patch_detections(grid, per_patch, cfg.iou_thresh, cfg.conf_thresh);
}

}  // namespace standcount
