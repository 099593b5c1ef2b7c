#include "standcount/rawframe.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <sstream>

#include "standcount/image_io.hpp"
#include "standcount/parallel.hpp"

namespace fs = std::filesystem;

namespace standcount {

namespace {

// frame_%06d.<ext> / hom_%06d.txt -> frame id, or nullopt
std::optional<int> parse_indexed_name(const std::string& stem, const char* prefix) {
    const std::size_t plen = std::strlen(prefix);
    if (stem.size() <= plen || stem.compare(0, plen, prefix) != 0)
        return std::nullopt;
    int id = 0;
    for (std::size_t i = plen; i < stem.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(stem[i])))
            return std::nullopt;
        id = id * 10 + (stem[i] - '0');
    }
    return id;
}

}  // namespace

std::vector<FrameRecord> load_frame_dir(const std::string& dir, const FrameDirOptions& opts) {
    if (!fs::is_directory(dir))
        throw IoError("frame directory does not exist: " + dir);

    std::map<int, FrameRecord> frames;
    std::map<int, std::string> hom_paths;
    std::map<int, std::string> label_paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string stem = entry.path().stem().string();
        const std::string ext = entry.path().extension().string();
        if (auto id = parse_indexed_name(stem, "frame_")) {
            if (ext == ".txt") {
                label_paths[*id] = entry.path().string();
            } else if (ext == ".png" || ext == ".ppm" || ext == ".pgm") {
                frames[*id].image_path = entry.path().string();
            }
            frames[*id].frame_id = *id;
        } else if (auto hid = parse_indexed_name(stem, "hom_")) {
            if (ext == ".txt") hom_paths[*hid] = entry.path().string();
        }
    }
    for (const auto& [id, path] : label_paths) frames[id].frame_id = id;
    for (const auto& [id, path] : hom_paths) frames[id].frame_id = id;

    if (frames.empty())
        throw IoError("no frame_* files found in " + dir);
    int expect = 0;
    for (const auto& [id, rec] : frames) {
        if (id != expect)
            throw Error("frame ids are not dense: expected " + std::to_string(expect)
                        + ", found " + std::to_string(id));
        ++expect;
    }

    std::vector<FrameRecord> out;
    out.reserve(frames.size());
    for (auto& [id, rec] : frames) {
        if (!rec.image_path.empty()) {
            auto [w, h] = read_image_size(rec.image_path);
            rec.width = w;
            rec.height = h;
            if (opts.load_pixels)
                rec.image = read_image(rec.image_path);
        } else if (opts.fallback_w > 0 && opts.fallback_h > 0) {
            rec.width = opts.fallback_w;
            rec.height = opts.fallback_h;
        } else {
            throw Error("frame " + std::to_string(id)
                        + " has no image and no fallback frame size was given");
        }

        if (auto it = hom_paths.find(id); it != hom_paths.end()) {
            try {
                const auto ms = load_homography_file(it->second);
                if (ms.size() != 1)
                    throw ParseError("expected exactly one matrix in " + it->second);
                Homography h = Homography::from_row_major(ms[0].m(), id, std::max(0, id - 1));
                rec.pairwise = opts.invert_pairwise ? h.inverted() : h;
            } catch (const SingularMatrix& e) {
                throw SingularMatrix("frame " + std::to_string(id) + ": " + e.what());
            }
        } else if (id == 0) {
            rec.pairwise = Homography::identity(0, 0);
        } else {
            throw IoError("missing hom_" + std::to_string(id) + " pairwise homography");
        }

        if (auto it = label_paths.find(id); it != label_paths.end()) {
            rec.detections = load_label_file(it->second, rec.width, rec.height);
            for (auto& d : rec.detections) d.source = id;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<Homography> cumulative_chain(const std::vector<FrameRecord>& frames) {
    std::vector<Homography> chain;
    chain.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        try {
            if (i == 0) {
                chain.push_back(Homography::identity(0, 0));
            } else {
                chain.push_back(compose({chain.back(), frames[i].pairwise}));
            }
        } catch (const SingularMatrix& e) {
            throw SingularMatrix("cumulative chain at frame " + std::to_string(i) + ": "
                                 + e.what());
        }
    }
    return chain;
}

GlobalScene project_all(const std::vector<FrameRecord>& frames,
                        const std::vector<Homography>& chain,
                        int parallelism) {
    if (frames.size() != chain.size())
        throw GridMismatch("project_all: chain length " + std::to_string(chain.size())
                           + " does not match " + std::to_string(frames.size()) + " frames");

    const int n = static_cast<int>(frames.size());
    std::vector<std::vector<Detection>> projected(n);
    std::vector<Rect> extents(n);
    parallel_for(n, parallelism, [&](int i) {
        const FrameRecord& f = frames[i];
        // frame pixels span [-0.5, dim-0.5] in pixel-center coordinates
        const Point2 corners[4] = {{-0.5, -0.5},
                                   {f.width - 0.5, -0.5},
                                   {-0.5, f.height - 0.5},
                                   {f.width - 0.5, f.height - 0.5}};
        Rect ext;
        for (int k = 0; k < 4; ++k) {
            const Point2 q = project_point(chain[i], corners[k]);
            if (k == 0) ext = {q.x, q.y, q.x, q.y};
            else ext.expand(q);
        }
        extents[i] = ext;

        projected[i].reserve(f.detections.size());
        for (std::size_t j = 0; j < f.detections.size(); ++j) {
            try {
                Detection d = f.detections[j];
                const Box b = project_box(chain[i], d.box());
                d.cx = b.cx;
                d.cy = b.cy;
                d.w = b.w;
                d.h = b.h;
                projected[i].push_back(d);
            } catch (const PointAtInfinity& e) {
                std::ostringstream os;
                os << "frame " << i << " detection " << j << ": " << e.what();
                throw PointAtInfinity(os.str());
            }
        }
    });

    GlobalScene scene;
    scene.extent = extents.empty() ? Rect{} : extents[0];
    for (int i = 0; i < n; ++i) {
        scene.extent.expand({extents[i].x0, extents[i].y0});
        scene.extent.expand({extents[i].x1, extents[i].y1});
        scene.detections.insert(scene.detections.end(), projected[i].begin(),
                                projected[i].end());
    }
    return scene;
}

std::vector<Detection> consensus(const GlobalScene& scene,
                                 double iou_thresh, double conf_thresh) {
    return nms(scene.detections, iou_thresh, conf_thresh);
}

RenderedMosaic render_mosaic(const std::vector<FrameRecord>& frames,
                             const std::vector<Homography>& chain,
                             std::int64_t budget_px) {
    if (frames.size() != chain.size())
        throw GridMismatch("render_mosaic: chain/frames length mismatch");

    // extent from projected frame corners, before any allocation
    Rect ext{};
    bool first = true;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const FrameRecord& f = frames[i];
        const Point2 corners[4] = {{-0.5, -0.5},
                                   {f.width - 0.5, -0.5},
                                   {-0.5, f.height - 0.5},
                                   {f.width - 0.5, f.height - 0.5}};
        for (const Point2& c : corners) {
            const Point2 q = project_point(chain[i], c);
            if (first) {
                ext = {q.x, q.y, q.x, q.y};
                first = false;
            } else {
                ext.expand(q);
            }
        }
    }
    const int cw = static_cast<int>(std::ceil(ext.width())) + 1;
    const int ch = static_cast<int>(std::ceil(ext.height())) + 1;
    if (static_cast<std::int64_t>(cw) * ch > budget_px) {
        std::ostringstream os;
        os << "render_mosaic: extent " << cw << "x" << ch << " exceeds the " << budget_px
           << " px budget; check the homography files";
        throw ExtentBudgetExceeded(os.str());
    }

    RenderedMosaic out;
    out.offset_x = ext.x0;
    out.offset_y = ext.y0;
    out.image = Raster::make(cw, ch, 3);

    // frame-id order so later frames overwrite earlier ones
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const FrameRecord& f = frames[i];
        Raster local;
        const Raster* src = &f.image;
        if (f.image.width == 0) {
            if (f.image_path.empty())
                throw MissingImage("render_mosaic: frame " + std::to_string(i)
                                   + " has no pixels");
            local = read_image(f.image_path);
            src = &local;
        }
        const Homography inv = chain[i].inverted();

        // canvas region this frame can touch
        const Point2 corners[4] = {{-0.5, -0.5},
                                   {f.width - 0.5, -0.5},
                                   {-0.5, f.height - 0.5},
                                   {f.width - 0.5, f.height - 0.5}};
        Rect fr{};
        for (int k = 0; k < 4; ++k) {
            const Point2 q = project_point(chain[i], corners[k]);
            if (k == 0) fr = {q.x, q.y, q.x, q.y};
            else fr.expand(q);
        }
        const int xa = std::max(0, static_cast<int>(std::floor(fr.x0 - ext.x0)));
        const int ya = std::max(0, static_cast<int>(std::floor(fr.y0 - ext.y0)));
        const int xb = std::min(cw - 1, static_cast<int>(std::ceil(fr.x1 - ext.x0)));
        const int yb = std::min(ch - 1, static_cast<int>(std::ceil(fr.y1 - ext.y0)));

        for (int y = ya; y <= yb; ++y) {
            for (int x = xa; x <= xb; ++x) {
                const Point2 p = project_point(inv, {x + ext.x0, y + ext.y0});
                if (p.x < -0.5 || p.x > f.width - 0.5 || p.y < -0.5 || p.y > f.height - 0.5)
                    continue;
                const double sx = std::clamp(p.x, 0.0, f.width - 1.0);
                const double sy = std::clamp(p.y, 0.0, f.height - 1.0);
                const int x0 = static_cast<int>(std::floor(sx));
                const int y0 = static_cast<int>(std::floor(sy));
                const int x1 = std::min(x0 + 1, f.width - 1);
                const int y1 = std::min(y0 + 1, f.height - 1);
                const double fx = sx - x0, fy = sy - y0;
                for (int c = 0; c < 3; ++c) {
                    const int sc = src->channels == 3 ? c : 0;
                    out.image.at(x, y, c) = src->at(x0, y0, sc) * (1 - fx) * (1 - fy)
                                          + src->at(x1, y0, sc) * fx * (1 - fy)
                                          + src->at(x0, y1, sc) * (1 - fx) * fy
                                          + src->at(x1, y1, sc) * fx * fy;
                }
            }
        }
    }
    return out;
}

}  // namespace standcount
