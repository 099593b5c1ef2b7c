#pragma once

#include <memory>
#include <string>
#include <vector>

#include "standcount/detections.hpp"
#include "standcount/raster.hpp"

namespace standcount {

// Tiling of an oversized mosaic into overlapping square patches. The
// last patch of each axis is anchored to the mosaic edge (it may
// overlap its neighbor by more than overlap_frac) so the union of
// patches covers every mosaic pixel; nothing is padded.
struct PatchGrid {
    int requested_size = 0;
    double overlap_frac = 0.0;
    int patch_w = 0;  // min(requested, mosaic dim)
    int patch_h = 0;
    int cols = 0;
    int rows = 0;
    int mosaic_w = 0;
    int mosaic_h = 0;
    std::vector<std::pair<int, int>> origins;  // (x0, y0), row-major

    int count() const { return static_cast<int>(origins.size()); }
};

// patch_size >= 64, 0 <= overlap_frac < 1; a mosaic smaller than the
// patch yields a single full-mosaic patch.
PatchGrid patchify(int mosaic_w, int mosaic_h, int patch_size, double overlap_frac);

// `patch_row,patch_col,x0,y0,size` CSV with header.
std::string grid_manifest_csv(const PatchGrid& grid);

Raster extract_patch(const Raster& mosaic, const PatchGrid& grid, int index);

// Everything a provider learns about the patch it must process.
struct PatchRef {
    int index = 0;
    int row = 0;
    int col = 0;
    int x0 = 0;
    int y0 = 0;
    int w = 0;
    int h = 0;
    // whether each patch border coincides with the mosaic border
    bool at_left = false, at_right = false, at_top = false, at_bottom = false;
    const Raster* pixels = nullptr;  // null when the provider declined pixels
};

// Source of per-patch detections in patch-local pixel coordinates.
class DetectionProvider {
public:
    virtual ~DetectionProvider() = default;
    virtual bool wants_pixels() const { return true; }
    virtual std::vector<Detection> detect(const PatchRef& patch) = 0;
};

// Runs classical_detect on each patch. Cells clipped by an interior
// patch border are dropped: the overlapping neighbor sees the whole
// plant, and a clipped fragment can fall under the NMS threshold
// against the full box.
class ClassicalProvider : public DetectionProvider {
public:
    explicit ClassicalProvider(ClassicalConfig cfg = {}, bool drop_interior_edge_cells = true)
        : cfg_(cfg), drop_edge_(drop_interior_edge_cells) {}
    std::vector<Detection> detect(const PatchRef& patch) override;

private:
    ClassicalConfig cfg_;
    bool drop_edge_;
};

// Reads `patch_<row>_<col>.txt` label files from a directory; a missing
// file means an empty patch.
class LabelDirProvider : public DetectionProvider {
public:
    explicit LabelDirProvider(std::string dir) : dir_(std::move(dir)) {}
    bool wants_pixels() const override { return false; }
    std::vector<Detection> detect(const PatchRef& patch) override;

private:
    std::string dir_;
};

// Translates each patch's detections by its origin and deduplicates the
// union with class-agnostic NMS. per_patch must align with the grid
// (GridMismatch otherwise). Detection `source` becomes the patch index.
std::vector<Detection> merge_patch_detections(const PatchGrid& grid,
                                              const std::vector<std::vector<Detection>>& per_patch,
                                              double iou_thresh, double conf_thresh);

struct MosaicModeConfig {
    int patch_size = 1280;
    double overlap_frac = 0.10;
    double iou_thresh = 0.25;
    double conf_thresh = 0.25;
    int parallelism = 1;
};

// Mode-1 front half: patchify, gather per-patch detections (patches are
// processed concurrently up to cfg.parallelism; the merge order is
// fixed by patch index), merge into mosaic coordinates. Provider
// failures carry the patch origin.
std::vector<Detection> run_mosaic_mode(const Raster& mosaic, DetectionProvider& provider,
                                       const MosaicModeConfig& cfg, PatchGrid* grid_out = nullptr);

}  // namespace standcount
