#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "standcount/errors.hpp"

namespace standcount {

// Pixel coordinates: x runs along columns (rightward), y along rows
// (downward), origin at the top-left pixel center. Every module shares
// this convention.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Axis-aligned rectangle given by its corners, in pixels.
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    void expand(Point2 p) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
};

// Axis-aligned box given by its center and size, in pixels.
struct Box {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    double x1() const { return cx - 0.5 * w; }
    double y1() const { return cy - 0.5 * h; }
    double x2() const { return cx + 0.5 * w; }
    double y2() const { return cy + 0.5 * h; }
    double area() const { return w * h; }
};

// 3x3 projective map between two frame coordinate systems. Stored
// row-major and normalized so m[8] == 1 whenever |m[8]| is not tiny.
// Frame indices are optional bookkeeping: -1 means "unbound" and is
// exempt from chain checks.
class Homography {
public:
    static constexpr int kUnbound = -1;

    // Validates invertibility (|det| > 1e-12 after normalization).
    static Homography from_row_major(const std::array<double, 9>& m,
                                     int src_frame = kUnbound,
                                     int dst_frame = kUnbound);

    static Homography identity(int src_frame = kUnbound, int dst_frame = kUnbound);
    static Homography translation(double tx, double ty,
                                  int src_frame = kUnbound, int dst_frame = kUnbound);
    // Rotation by theta degrees (counterclockwise on screen, y down)
    // mapping `center_src` to `center_dst`.
    static Homography rotation_about(double theta_deg, Point2 center_src, Point2 center_dst);

    const std::array<double, 9>& m() const { return m_; }
    double at(int r, int c) const { return m_[3 * r + c]; }

    int src_frame() const { return src_frame_; }
    int dst_frame() const { return dst_frame_; }

    Homography inverted() const;

private:
    Homography() = default;

    std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
    int src_frame_ = kUnbound;
    int dst_frame_ = kUnbound;

    friend Homography compose(const std::vector<Homography>& chain);
};

// Product of the chain in written order: compose([a, b, c]) applies c
// first, then b, then a -- i.e. it maps coordinates of the last frame
// into the first frame's system. Consecutive entries must chain:
// chain[k].src_frame == chain[k+1].dst_frame (unbound indices skip the
// check). Throws FrameChainMismatch on an empty or broken chain.
Homography compose(const std::vector<Homography>& chain);

// (x', y') = ((h00 x + h01 y + h02)/w, (h10 x + h11 y + h12)/w) with
// w = h20 x + h21 y + h22. Throws PointAtInfinity when |w| < 1e-12.
Point2 project_point(const Homography& h, Point2 p);

// Projects the 4 corners and returns their axis-aligned envelope. The
// envelope never under-covers the source region; slight over-coverage
// is absorbed downstream by NMS.
Box project_box(const Homography& h, const Box& b);

// Homography text format: 9 whitespace-separated decimals, row-major,
// one matrix per line. A file may hold a single matrix or one per line.
std::vector<Homography> parse_homographies(const std::string& text);
std::vector<Homography> load_homography_file(const std::string& path);
std::string serialize_homography(const Homography& h);

}  // namespace standcount
