#include "standcount/detections.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace standcount {

namespace {

constexpr double kNormSlack = 1e-6;

// Clamps a normalized field into [0,1], rejecting values beyond slack.
double checked_norm(double v, const char* field, int line_no) {
    if (v < -kNormSlack || v > 1.0 + kNormSlack) {
        std::ostringstream os;
        os << "line " << line_no << ": normalized " << field << "=" << v << " outside [0,1]";
        throw RangeError(os.str());
    }
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace

PlantClass plant_class_from_id(int id) {
    if (id < 0 || id > 2)
        throw ParseError("class id " + std::to_string(id) + " outside {0,1,2}");
    return static_cast<PlantClass>(id);
}

std::vector<Detection> parse_labels(const std::string& text, double img_w, double img_h) {
    std::vector<Detection> out;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream f(line);
        int cls_id;
        double cx, cy, w, h;
        if (!(f >> cls_id >> cx >> cy >> w >> h))
            throw ParseError("line " + std::to_string(line_no) + ": expected `class cx cy w h [conf]`");
        double conf = 1.0;
        std::string tail;
        if (f >> tail) {
            std::istringstream c(tail);
            if (!(c >> conf) || c.rdbuf()->in_avail() != 0)
                throw ParseError("line " + std::to_string(line_no) + ": bad confidence field `" + tail + "`");
            std::string junk;
            if (f >> junk)
                throw ParseError("line " + std::to_string(line_no) + ": trailing junk `" + junk + "`");
        }

        PlantClass cls;
        try {
            cls = plant_class_from_id(cls_id);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        cx = checked_norm(cx, "cx", line_no);
        cy = checked_norm(cy, "cy", line_no);
        w = checked_norm(w, "w", line_no);
        h = checked_norm(h, "h", line_no);
        conf = checked_norm(conf, "conf", line_no);
        if (w <= 0.0 || h <= 0.0)
            throw RangeError("line " + std::to_string(line_no) + ": box size must be positive");

        out.push_back({cls, cx * img_w, cy * img_h, w * img_w, h * img_h, conf, 0});
    }
    return out;
}

std::vector<Detection> load_label_file(const std::string& path, double img_w, double img_h) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open label file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse_labels(ss.str(), img_w, img_h);
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string serialize_labels(const std::vector<Detection>& dets, double img_w, double img_h) {
    std::string out;
    char buf[160];
    for (const auto& d : dets) {
        std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f %.6f\n",
                      static_cast<int>(d.cls), d.cx / img_w, d.cy / img_h,
                      d.w / img_w, d.h / img_h, d.conf);
        out += buf;
    }
    return out;
}

double iou(const Box& a, const Box& b) {
    const double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
    const double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
    if (iw <= 0.0 || ih <= 0.0)
        return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double iou(const Detection& a, const Detection& b) {
    return iou(a.box(), b.box());
}

namespace {

// Uniform grid over kept boxes. Two boxes can only overlap if their
// cell ranges share a cell, so querying the candidate's own range
// yields every kept box it could intersect.
class KeptGrid {
public:
    KeptGrid(double cell, std::size_t capacity) : cell_(cell) { stamp_.reserve(capacity); }

    void insert(int kept_id, const Box& b) {
        stamp_.push_back(-1);
        for_cells(b, [&](std::int64_t key) { cells_[key].push_back(kept_id); });
    }

    template <typename Fn>
    void query(int candidate_id, const Box& b, Fn&& fn) {
        for_cells(b, [&](std::int64_t key) {
            auto it = cells_.find(key);
            if (it == cells_.end()) return;
            for (int id : it->second) {
                if (stamp_[id] == candidate_id) continue;  // already tested
                stamp_[id] = candidate_id;
                fn(id);
            }
        });
    }

private:
    template <typename Fn>
    void for_cells(const Box& b, Fn&& fn) {
        const int x0 = static_cast<int>(std::floor(b.x1() / cell_));
        const int x1 = static_cast<int>(std::floor(b.x2() / cell_));
        const int y0 = static_cast<int>(std::floor(b.y1() / cell_));
        const int y1 = static_cast<int>(std::floor(b.y2() / cell_));
        for (int yc = y0; yc <= y1; ++yc)
            for (int xc = x0; xc <= x1; ++xc)
                fn((static_cast<std::int64_t>(xc) << 32) +
                   static_cast<std::int64_t>(static_cast<std::uint32_t>(yc)));
    }

    double cell_;
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
    std::vector<int> stamp_;
};

}  // namespace

std::vector<Detection> nms(const std::vector<Detection>& dets,
                           double iou_thresh, double conf_thresh) {
    std::vector<int> order;
    order.reserve(dets.size());
    double dim_sum = 0.0;
    for (int i = 0; i < static_cast<int>(dets.size()); ++i) {
        if (dets[i].conf < conf_thresh)
            continue;
        order.push_back(i);
        dim_sum += std::max(dets[i].w, dets[i].h);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (dets[a].conf != dets[b].conf) return dets[a].conf > dets[b].conf;
        if (dets[a].source != dets[b].source) return dets[a].source < dets[b].source;
        return a < b;
    });

    const double cell = order.empty() ? 1.0 : std::max(1.0, dim_sum / static_cast<double>(order.size()));
    KeptGrid grid(cell, order.size());

    std::vector<Detection> kept;
    for (int idx : order) {
        const Box b = dets[idx].box();
        bool suppressed = false;
        grid.query(idx, b, [&](int kept_id) {
            if (!suppressed && iou(kept[kept_id].box(), b) > iou_thresh)
                suppressed = true;
        });
        if (!suppressed) {
            grid.insert(static_cast<int>(kept.size()), b);
            kept.push_back(dets[idx]);
        }
    }
    return kept;
}

}  // namespace standcount
