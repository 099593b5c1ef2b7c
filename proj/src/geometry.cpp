#include "standcount/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace standcount {

namespace {

constexpr double kSingularEps = 1e-12;
constexpr double kPi = 3.14159265358979323846;

double det3(const std::array<double, 9>& m) {
    return m[0] * (m[4] * m[8] - m[5] * m[7])
         - m[1] * (m[3] * m[8] - m[5] * m[6])
         + m[2] * (m[3] * m[7] - m[4] * m[6]);
}

void normalize_inplace(std::array<double, 9>& m) {
    if (std::abs(m[8]) > kSingularEps) {
        const double s = m[8];
        for (double& v : m) v /= s;
    }
}

std::array<double, 9> multiply(const std::array<double, 9>& a, const std::array<double, 9>& b) {
    std::array<double, 9> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a[3 * i + k] * b[3 * k + j];
            r[3 * i + j] = s;
        }
    return r;
}

}  // namespace

Homography Homography::from_row_major(const std::array<double, 9>& m, int src_frame, int dst_frame) {
    Homography h;
    h.m_ = m;
    normalize_inplace(h.m_);
    if (std::abs(det3(h.m_)) <= kSingularEps)
        throw SingularMatrix("homography is singular (|det| <= 1e-12 after normalization)");
    h.src_frame_ = src_frame;
    h.dst_frame_ = dst_frame;
    return h;
}

Homography Homography::identity(int src_frame, int dst_frame) {
    return from_row_major({1, 0, 0, 0, 1, 0, 0, 0, 1}, src_frame, dst_frame);
}

Homography Homography::translation(double tx, double ty, int src_frame, int dst_frame) {
    return from_row_major({1, 0, tx, 0, 1, ty, 0, 0, 1}, src_frame, dst_frame);
}

Homography Homography::rotation_about(double theta_deg, Point2 center_src, Point2 center_dst) {
    const double t = theta_deg * kPi / 180.0;
    const double c = std::cos(t), s = std::sin(t);
    // p_dst - c_dst = R (p_src - c_src) with R = [[c, s], [-s, c]]
    // (counterclockwise on screen for y-down coordinates).
    const double tx = center_dst.x - (c * center_src.x + s * center_src.y);
    const double ty = center_dst.y - (-s * center_src.x + c * center_src.y);
    return from_row_major({c, s, tx, -s, c, ty, 0, 0, 1});
}

Homography Homography::inverted() const {
    const auto& m = m_;
    const double d = det3(m);
    if (std::abs(d) <= kSingularEps)
        throw SingularMatrix("cannot invert singular homography");
    std::array<double, 9> inv{
        (m[4] * m[8] - m[5] * m[7]) / d,
        (m[2] * m[7] - m[1] * m[8]) / d,
        (m[1] * m[5] - m[2] * m[4]) / d,
        (m[5] * m[6] - m[3] * m[8]) / d,
        (m[0] * m[8] - m[2] * m[6]) / d,
        (m[2] * m[3] - m[0] * m[5]) / d,
        (m[3] * m[7] - m[4] * m[6]) / d,
        (m[1] * m[6] - m[0] * m[7]) / d,
        (m[0] * m[4] - m[1] * m[3]) / d,
    };
    return from_row_major(inv, dst_frame_, src_frame_);
}

Homography compose(const std::vector<Homography>& chain) {
    if (chain.empty())
        throw FrameChainMismatch("compose: empty homography chain");
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        const int a = chain[k].src_frame();
        const int b = chain[k + 1].dst_frame();
        if (a != Homography::kUnbound && b != Homography::kUnbound && a != b) {
            std::ostringstream os;
            os << "compose: chain break at position " << k << " (src frame " << a
               << " vs next dst frame " << b << ")";
            throw FrameChainMismatch(os.str());
        }
    }
    std::array<double, 9> acc = chain.front().m();
    for (std::size_t k = 1; k < chain.size(); ++k)
        acc = multiply(acc, chain[k].m());
    return Homography::from_row_major(acc, chain.back().src_frame(), chain.front().dst_frame());
}

Point2 project_point(const Homography& h, Point2 p) {
    const auto& m = h.m();
    const double w = m[6] * p.x + m[7] * p.y + m[8];
    if (std::abs(w) < kSingularEps)
        throw PointAtInfinity("project_point: homogeneous w vanished");
    return {(m[0] * p.x + m[1] * p.y + m[2]) / w,
            (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

Box project_box(const Homography& h, const Box& b) {
    const Point2 corners[4] = {
        {b.x1(), b.y1()}, {b.x2(), b.y1()}, {b.x1(), b.y2()}, {b.x2(), b.y2()}};
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    for (int i = 0; i < 4; ++i) {
        const Point2 q = project_point(h, corners[i]);
        if (i == 0) {
            xmin = xmax = q.x;
            ymin = ymax = q.y;
        } else {
            xmin = std::min(xmin, q.x);
            xmax = std::max(xmax, q.x);
            ymin = std::min(ymin, q.y);
            ymax = std::max(ymax, q.y);
        }
    }
    return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax), xmax - xmin, ymax - ymin};
}

std::vector<Homography> parse_homographies(const std::string& text) {
    std::vector<Homography> out;
    std::vector<double> vals;
    std::istringstream is(text);
    double v;
    while (is >> v) vals.push_back(v);
    if (vals.empty() || vals.size() % 9 != 0)
        throw ParseError("homography text must hold a multiple of 9 decimals, got "
                         + std::to_string(vals.size()));
    for (std::size_t i = 0; i < vals.size(); i += 9) {
        std::array<double, 9> m;
        std::copy(vals.begin() + i, vals.begin() + i + 9, m.begin());
        out.push_back(Homography::from_row_major(m));
    }
    return out;
}

std::vector<Homography> load_homography_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open homography file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_homographies(ss.str());
}

std::string serialize_homography(const Homography& h) {
    char buf[64];
    std::string out;
    for (int i = 0; i < 9; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", h.m()[i]);
        if (i) out += ' ';
        out += buf;
    }
    out += '\n';
    return out;
}

}  // namespace standcount
