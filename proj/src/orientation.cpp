#include "standcount/orientation.hpp"

#include <algorithm>
#include <cmath>

namespace standcount {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Snapped sine/cosine so right-angle rotations stay lattice-exact.
std::pair<double, double> cos_sin(double theta_deg) {
    const double t = theta_deg * kPi / 180.0;
    double c = std::cos(t), s = std::sin(t);
    if (std::abs(c) < 1e-12) c = 0.0;
    if (std::abs(s) < 1e-12) s = 0.0;
    if (std::abs(c) > 1.0 - 1e-12) c = c > 0 ? 1.0 : -1.0;
    if (std::abs(s) > 1.0 - 1e-12) s = s > 0 ? 1.0 : -1.0;
    return {c, s};
}

// Box-average decimation by an integer factor.
Raster decimate(const Raster& img, int k) {
    if (k <= 1) return img;
    const int w = (img.width + k - 1) / k;
    const int h = (img.height + k - 1) / k;
    Raster out = Raster::make(w, h, img.channels);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < img.channels; ++c) {
                double sum = 0.0;
                int n = 0;
                for (int yy = y * k; yy < std::min((y + 1) * k, img.height); ++yy)
                    for (int xx = x * k; xx < std::min((x + 1) * k, img.width); ++xx) {
                        sum += img.at(xx, yy, c);
                        ++n;
                    }
                out.at(x, y, c) = sum / n;
            }
    return out;
}

}  // namespace

std::pair<int, int> rotated_canvas(int w, int h, double theta_deg) {
    auto [c, s] = cos_sin(theta_deg);
    const int nw = static_cast<int>(std::ceil(w * std::abs(c) + h * std::abs(s) - 1e-7));
    const int nh = static_cast<int>(std::ceil(w * std::abs(s) + h * std::abs(c) - 1e-7));
    return {std::max(nw, 1), std::max(nh, 1)};
}

Raster rotate(const Raster& img, double theta_deg) {
    if (theta_deg == 0.0)
        return img;
    auto [c, s] = cos_sin(theta_deg);
    auto [nw, nh] = rotated_canvas(img.width, img.height, theta_deg);
    Raster out = Raster::make(nw, nh, img.channels);

    const double cx_in = 0.5 * (img.width - 1);
    const double cy_in = 0.5 * (img.height - 1);
    const double cx_out = 0.5 * (nw - 1);
    const double cy_out = 0.5 * (nh - 1);

    // forward map: p_out - c_out = [[c, s], [-s, c]] (p_in - c_in);
    // sample by the inverse
    for (int y = 0; y < nh; ++y) {
        const double dy = y - cy_out;
        for (int x = 0; x < nw; ++x) {
            const double dx = x - cx_out;
            const double sx = c * dx - s * dy + cx_in;
            const double sy = s * dx + c * dy + cy_in;
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            if (x0 < -1 || x0 >= img.width || y0 < -1 || y0 >= img.height)
                continue;
            const double fx = sx - x0, fy = sy - y0;
            for (int ch = 0; ch < img.channels; ++ch) {
                auto px = [&](int xx, int yy) -> double {
                    return img.in_bounds(xx, yy) ? img.at(xx, yy, ch) : 0.0;
                };
                out.at(x, y, ch) = px(x0, y0) * (1 - fx) * (1 - fy)
                                 + px(x0 + 1, y0) * fx * (1 - fy)
                                 + px(x0, y0 + 1) * (1 - fx) * fy
                                 + px(x0 + 1, y0 + 1) * fx * fy;
            }
        }
    }
    return out;
}

AngleEstimate radon_variance(const Raster& img, const RadonConfig& cfg) {
    auto [lo, hi] = min_max(img);
    if (!(hi > lo))
        throw DegenerateImage("radon_variance: image is constant");

    const int factor =
        (std::max(img.width, img.height) + cfg.max_side - 1) / cfg.max_side;
    const Raster small = decimate(img, factor);
    Raster support_src = Raster::make(small.width, small.height, 1, 1.0);

    AngleEstimate est;
    est.variance_profile.assign(180, 0.0);
    for (int a = 1; a <= 180; ++a) {
        const Raster rot = rotate(small, -static_cast<double>(a));
        const Raster sup = rotate(support_src, -static_cast<double>(a));

        std::vector<double> colsum(rot.width, 0.0), colsup(rot.width, 0.0);
        for (int y = 0; y < rot.height; ++y)
            for (int x = 0; x < rot.width; ++x) {
                colsum[x] += rot.at(x, y);
                colsup[x] += sup.at(x, y);
            }
        const double max_sup = *std::max_element(colsup.begin(), colsup.end());

        double mean = 0.0;
        int n = 0;
        std::vector<double> vals;
        vals.reserve(colsum.size());
        for (int x = 0; x < rot.width; ++x) {
            if (colsup[x] < cfg.support_frac * max_sup) continue;
            vals.push_back(colsum[x] / colsup[x]);  // mean intensity along the line
            mean += vals.back();
            ++n;
        }
        double var = 0.0;
        if (n > 1) {
            mean /= n;
            for (double v : vals) var += (v - mean) * (v - mean);
            var /= n;
        }
        est.variance_profile[a - 1] = var;
    }

    const auto it = std::max_element(est.variance_profile.begin(), est.variance_profile.end());
    est.theta = static_cast<int>(it - est.variance_profile.begin()) + 1;
    const double vmax = *it;
    const double vmin = *std::min_element(est.variance_profile.begin(), est.variance_profile.end());
    est.confident = vmax >= cfg.confident_ratio * std::max(vmin, 1e-300);
    return est;
}

std::vector<Detection> rotate_detections(const std::vector<Detection>& dets,
                                         double theta_deg,
                                         int old_w, int old_h,
                                         int new_w, int new_h) {
    if (theta_deg == 0.0)
        return dets;
    auto [c, s] = cos_sin(theta_deg);
    const double cx_in = 0.5 * (old_w - 1);
    const double cy_in = 0.5 * (old_h - 1);
    const double cx_out = 0.5 * (new_w - 1);
    const double cy_out = 0.5 * (new_h - 1);

    std::vector<Detection> out;
    out.reserve(dets.size());
    for (const Detection& d : dets) {
        Detection r = d;
        const double dx = d.cx - cx_in, dy = d.cy - cy_in;
        r.cx = c * dx + s * dy + cx_out;
        r.cy = -s * dx + c * dy + cy_out;
        r.w = d.w * std::abs(c) + d.h * std::abs(s);
        r.h = d.w * std::abs(s) + d.h * std::abs(c);
        out.push_back(r);
    }
    return out;
}

double applied_rotation(const AngleEstimate& est) {
    if (!est.confident)
        return 0.0;
    const int reduced = est.theta % 180;  // 180 is "already vertical"
    return -static_cast<double>(reduced);
}

}  // namespace standcount
