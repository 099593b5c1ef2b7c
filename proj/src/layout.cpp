#include "standcount/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace standcount {

namespace {

// Collapsed local maximum: a run of equal bins higher than both
// flanking bins (array ends count as lower).
struct PeakRun {
    int lo = 0;
    int hi = 0;
    double value = 0.0;
    int center() const { return (lo + hi) / 2; }
};

std::vector<PeakRun> local_maxima(const std::vector<double>& s) {
    std::vector<PeakRun> runs;
    const int n = static_cast<int>(s.size());
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && s[j + 1] == s[i]) ++j;
        const bool left_ok = i == 0 || s[i - 1] < s[i];
        const bool right_ok = j == n - 1 || s[j + 1] < s[i];
        if (left_ok && right_ok && s[i] > 0.0)
            runs.push_back({i, j, s[i]});
        i = j + 1;
    }
    return runs;
}

// Topographic prominence: drop from the peak to the highest of the two
// key saddles (walking outward until a strictly higher bin or the end).
double prominence(const std::vector<double>& s, const PeakRun& p) {
    const int n = static_cast<int>(s.size());
    double lmin = p.value, rmin = p.value;
    for (int i = p.lo - 1; i >= 0; --i) {
        if (s[i] > p.value) break;
        lmin = std::min(lmin, s[i]);
        if (i == 0) lmin = std::min(lmin, 0.0);  // extent edge: true base
    }
    if (p.lo == 0) lmin = 0.0;
    for (int i = p.hi + 1; i < n; ++i) {
        if (s[i] > p.value) break;
        rmin = std::min(rmin, s[i]);
        if (i == n - 1) rmin = std::min(rmin, 0.0);
    }
    if (p.hi == n - 1) rmin = 0.0;
    return p.value - std::max(lmin, rmin);
}

}  // namespace

HistogramPeaks histogram_peaks(const std::vector<double>& positions,
                               Interval extent, double bin_px, int window_bins,
                               double prominence_frac, double gap_frac) {
    if (positions.empty())
        throw EmptyInput("histogram_peaks: no positions");
    if (bin_px < 1.0)
        throw BadWindow("histogram_peaks: bin must be >= 1 px");
    if (window_bins < 1 || window_bins % 2 == 0)
        throw BadWindow("histogram_peaks: smoothing window must be odd");

    const double span = extent.end - extent.start;
    const int n_bins = std::max(1, static_cast<int>(std::ceil(span / bin_px)));
    std::vector<double> raw(n_bins, 0.0);
    for (double p : positions) {
        int b = static_cast<int>(std::floor((p - extent.start) / bin_px));
        raw[std::clamp(b, 0, n_bins - 1)] += 1.0;
    }

    HistogramPeaks out;
    out.origin = extent.start;
    out.bin_width = bin_px;
    out.profile.assign(n_bins, 0.0);
    const int hw = window_bins / 2;
    for (int i = 0; i < n_bins; ++i) {
        const int a = std::max(0, i - hw), b = std::min(n_bins - 1, i + hw);
        double sum = 0.0;
        for (int j = a; j <= b; ++j) sum += raw[j];
        out.profile[i] = sum / (b - a + 1);
    }

    const double vmax = *std::max_element(out.profile.begin(), out.profile.end());
    const double floor_prom = prominence_frac * vmax;
    const double floor_gap = gap_frac * vmax;

    std::vector<PeakRun> accepted;
    for (const PeakRun& p : local_maxima(out.profile))
        if (prominence(out.profile, p) >= floor_prom)
            accepted.push_back(p);

    auto bin_center = [&](double b) { return extent.start + (b + 0.5) * bin_px; };
    for (const PeakRun& p : accepted)
        out.peaks.push_back(bin_center(0.5 * (p.lo + p.hi)));

    for (std::size_t k = 0; k + 1 < accepted.size(); ++k) {
        double sum_b = 0.0;
        int cnt = 0;
        for (int i = accepted[k].hi + 1; i < accepted[k + 1].lo; ++i) {
            if (out.profile[i] <= floor_gap) {
                sum_b += i;
                ++cnt;
            }
        }
        if (cnt > 0)
            out.gaps.push_back(bin_center(sum_b / cnt));
    }
    return out;
}

namespace {

std::vector<Interval> intervals_from_gaps(Interval extent, const std::vector<double>& gaps) {
    std::vector<double> bounds;
    bounds.push_back(extent.start);
    for (double g : gaps) bounds.push_back(g);
    bounds.push_back(extent.end);
    std::vector<Interval> out;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
        out.push_back({bounds[i], bounds[i + 1]});
    return out;
}

}  // namespace

std::vector<Interval> detect_ranges(const std::vector<Detection>& dets,
                                    Interval y_extent, const LayoutConfig& cfg) {
    std::vector<double> ys;
    ys.reserve(dets.size());
    for (const auto& d : dets) ys.push_back(d.cy);
    const HistogramPeaks hp = histogram_peaks(ys, y_extent, cfg.bin_px, cfg.window_bins,
                                              cfg.prominence_frac, cfg.gap_frac);
    if (hp.peaks.empty())
        throw NoRangesFound("detect_ranges: no peaks in the y profile; "
                            "production mode may fit this field");
    return intervals_from_gaps(y_extent, hp.gaps);
}

std::vector<Interval> detect_rows(const std::vector<Detection>& dets,
                                  Interval x_extent, const LayoutConfig& cfg) {
    std::vector<double> xs;
    xs.reserve(dets.size());
    for (const auto& d : dets) xs.push_back(d.cx);
    const HistogramPeaks hp = histogram_peaks(xs, x_extent, cfg.bin_px, cfg.window_bins,
                                              cfg.prominence_frac, cfg.gap_frac);
    if (hp.peaks.empty())
        throw NoRowsFound("detect_rows: no peaks in the x profile");
    return intervals_from_gaps(x_extent, hp.gaps);
}

FieldLayout nursery_layout(const std::vector<Detection>& dets,
                           Interval x_extent, Interval y_extent,
                           const LayoutConfig& cfg) {
    FieldLayout layout;
    layout.mode = FieldMode::Nursery;
    layout.ranges = detect_ranges(dets, y_extent, cfg);
    for (std::size_t r = 0; r < layout.ranges.size(); ++r) {
        const bool last = r + 1 == layout.ranges.size();
        std::vector<Detection> in_range;
        for (const auto& d : dets)
            if (layout.ranges[r].contains(d.cy, last))
                in_range.push_back(d);
        layout.rows.push_back(detect_rows(in_range, x_extent, cfg));
    }
    return layout;
}

FieldLayout production_mode_layout(const std::vector<Detection>& dets,
                                   Interval x_extent, Interval y_extent,
                                   const LayoutConfig& cfg) {
    if (dets.empty())
        throw EmptyInput("production_mode_layout: no detections");
    FieldLayout layout;
    layout.mode = FieldMode::Production;
    layout.ranges.push_back(y_extent);
    layout.rows.push_back(detect_rows(dets, x_extent, cfg));
    return layout;
}

CountReport count_rows(const FieldLayout& layout, const std::vector<Detection>& dets) {
    CountReport report;
    std::vector<std::size_t> row_index_of;  // flat offset per range
    std::size_t flat = 0;
    for (std::size_t r = 0; r < layout.ranges.size(); ++r) {
        row_index_of.push_back(flat);
        for (std::size_t c = 0; c < layout.rows[r].size(); ++c) {
            report.rows.push_back({static_cast<int>(r), static_cast<int>(c), 0, {}});
            ++flat;
        }
    }

    for (const auto& d : dets) {
        int range_idx = -1;
        for (std::size_t r = 0; r < layout.ranges.size(); ++r) {
            const bool last = r + 1 == layout.ranges.size();
            if (layout.ranges[r].contains(d.cy, last)) {
                range_idx = static_cast<int>(r);
                break;
            }
        }
        int row_idx = -1;
        if (range_idx >= 0) {
            const auto& rows = layout.rows[range_idx];
            for (std::size_t c = 0; c < rows.size(); ++c) {
                const bool last = c + 1 == rows.size();
                if (rows[c].contains(d.cx, last)) {
                    row_idx = static_cast<int>(c);
                    break;
                }
            }
        }
        if (range_idx < 0 || row_idx < 0) {
            report.unassigned.push_back(d);
        } else {
            RowCount& rc = report.rows[row_index_of[range_idx] + row_idx];
            rc.predicted += multiplicity(d.cls);
            rc.detections.push_back(d);
        }
    }
    return report;
}

std::string counts_to_csv(const CountReport& report) {
    std::string out = "range,row,count\n";
    char buf[64];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%ld\n", r.range_idx, r.row_idx, r.predicted);
        out += buf;
    }
    return out;
}

std::string layout_to_json(const FieldLayout& layout) {
    nlohmann::json j;
    j["theta"] = layout.theta;
    j["mode"] = layout.mode == FieldMode::Nursery ? "nursery" : "production";
    j["ranges"] = nlohmann::json::array();
    for (const auto& r : layout.ranges)
        j["ranges"].push_back({r.start, r.end});
    j["rows"] = nlohmann::json::array();
    for (const auto& rows : layout.rows) {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& c : rows) jr.push_back({c.start, c.end});
        j["rows"].push_back(jr);
    }
    return j.dump(2) + "\n";
}

}  // namespace standcount
