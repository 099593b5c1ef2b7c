#include "standcount/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "standcount/image_io.hpp"

namespace standcount {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Rgb {
    double r, g, b;
};

void fill_ellipse(Raster& img, double cx, double cy, double rx, double ry,
                  double angle_rad, Rgb color, Rect* bbox) {
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    const double reach = std::max(rx, ry);
    const int xa = std::max(0, static_cast<int>(std::floor(cx - reach)));
    const int xb = std::min(img.width - 1, static_cast<int>(std::ceil(cx + reach)));
    const int ya = std::max(0, static_cast<int>(std::floor(cy - reach)));
    const int yb = std::min(img.height - 1, static_cast<int>(std::ceil(cy + reach)));
    for (int y = ya; y <= yb; ++y)
        for (int x = xa; x <= xb; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double u = (dx * c + dy * s) / rx;
            const double v = (-dx * s + dy * c) / ry;
            if (u * u + v * v > 1.0) continue;
            img.at(x, y, 0) = color.r;
            img.at(x, y, 1) = color.g;
            img.at(x, y, 2) = color.b;
            if (bbox) {
                bbox->expand({static_cast<double>(x), static_cast<double>(y)});
            }
        }
}

// One plant: core ellipse plus 2-4 overlapping leaf lobes. Returns the
// rendered bounding rect.
Rect draw_plant(Raster& img, double cx, double cy, std::mt19937& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double core = 5.5 + 1.5 * u01(rng);
    Rgb green{45.0 + 20.0 * u01(rng), 150.0 + 40.0 * u01(rng), 35.0 + 20.0 * u01(rng)};

    Rect bbox{cx, cy, cx, cy};
    fill_ellipse(img, cx, cy, core, core * (0.85 + 0.3 * u01(rng)), 2 * kPi * u01(rng),
                 green, &bbox);
    const int lobes = 2 + static_cast<int>(u01(rng) * 3.0);  // 2..4
    for (int i = 0; i < lobes; ++i) {
        const double ang = 2 * kPi * u01(rng);
        const double dist = 0.5 * core;
        Rgb lg{green.r, std::min(255.0, green.g + 20.0 * u01(rng)), green.b};
        fill_ellipse(img, cx + dist * std::cos(ang), cy + dist * std::sin(ang),
                     1.5 * core, 0.4 * core, ang, lg, &bbox);
    }
    return bbox;
}

}  // namespace

SyntheticField generate_field(const FieldSpec& spec) {
    if (spec.ranges < 1 || spec.rows_per_range < 1 || spec.plants_per_row < 1)
        throw SpecInvalid("field spec: counts must be >= 1");
    if (spec.row_pitch <= 0 || spec.plant_spacing <= 0 || spec.alley_gap <= 0)
        throw SpecInvalid("field spec: pitches must be positive");
    if (spec.alley_gap <= spec.row_pitch)
        throw SpecInvalid("field spec: alley gap must exceed the row pitch");
    if (spec.double_rate < 0 || spec.triple_rate < 0
        || spec.double_rate + spec.triple_rate > 1.0)
        throw SpecInvalid("field spec: class rates must be probabilities summing <= 1");
    if (spec.weed_density < 0)
        throw SpecInvalid("field spec: weed density must be >= 0");

    const double pad = 14.0;
    const double band_h = (spec.plants_per_row - 1) * spec.plant_spacing + 2 * pad;
    const int width = static_cast<int>(std::ceil(
        2 * spec.margin + (spec.rows_per_range - 1) * spec.row_pitch));
    const int height = static_cast<int>(std::ceil(
        2 * spec.margin + spec.ranges * band_h + (spec.ranges - 1) * spec.alley_gap));

    std::mt19937 rng(spec.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> jit(0.0, spec.jitter);

    SyntheticField field;
    field.width = width;
    field.height = height;
    field.image = Raster::make(width, height, 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            field.image.at(x, y, 0) = 112.0 + 16.0 * u01(rng);
            field.image.at(x, y, 1) = 88.0 + 14.0 * u01(rng);
            field.image.at(x, y, 2) = 62.0 + 12.0 * u01(rng);
        }

    field.truth_layout.mode = FieldMode::Nursery;
    for (int r = 0; r < spec.ranges; ++r) {
        const double band_y0 = spec.margin + r * (band_h + spec.alley_gap);
        const double lo = r == 0 ? 0.0 : band_y0 - 0.5 * spec.alley_gap;
        const double hi = r == spec.ranges - 1
                              ? static_cast<double>(height)
                              : band_y0 + band_h + 0.5 * spec.alley_gap;
        field.truth_layout.ranges.push_back({lo, hi});
        std::vector<Interval> row_iv;
        for (int c = 0; c < spec.rows_per_range; ++c) {
            const double x = spec.margin + c * spec.row_pitch;
            row_iv.push_back({c == 0 ? 0.0 : x - 0.5 * spec.row_pitch,
                              c == spec.rows_per_range - 1 ? static_cast<double>(width)
                                                           : x + 0.5 * spec.row_pitch});
        }
        field.truth_layout.rows.push_back(row_iv);
    }

    for (int r = 0; r < spec.ranges; ++r) {
        const double band_y0 = spec.margin + r * (band_h + spec.alley_gap);
        for (int c = 0; c < spec.rows_per_range; ++c) {
            RowCount rc;
            rc.range_idx = r;
            rc.row_idx = c;
            for (int p = 0; p < spec.plants_per_row; ++p) {
                const double cx = spec.margin + c * spec.row_pitch
                                  + std::clamp(jit(rng), -5.0, 5.0);
                const double cy = band_y0 + pad + p * spec.plant_spacing
                                  + std::clamp(jit(rng), -5.0, 5.0);
                const double roll = u01(rng);
                PlantClass cls = PlantClass::Single;
                if (roll < spec.double_rate)
                    cls = PlantClass::Double;
                else if (roll < spec.double_rate + spec.triple_rate)
                    cls = PlantClass::Triple;

                Rect bbox{cx, cy, cx, cy};
                auto merge = [&](const Rect& b) {
                    bbox.expand({b.x0, b.y0});
                    bbox.expand({b.x1, b.y1});
                };
                // multi-plant holes render as separate blobs far enough
                // apart for the watershed to split them
                const double sep = 6.0;
                if (cls == PlantClass::Single) {
                    merge(draw_plant(field.image, cx, cy, rng));
                } else if (cls == PlantClass::Double) {
                    merge(draw_plant(field.image, cx - sep, cy, rng));
                    merge(draw_plant(field.image, cx + sep, cy, rng));
                } else {
                    merge(draw_plant(field.image, cx - sep, cy - 0.6 * sep, rng));
                    merge(draw_plant(field.image, cx + sep, cy - 0.6 * sep, rng));
                    merge(draw_plant(field.image, cx, cy + sep, rng));
                }

                Detection det;
                det.cls = cls;
                det.cx = 0.5 * (bbox.x0 + bbox.x1);
                det.cy = 0.5 * (bbox.y0 + bbox.y1);
                det.w = bbox.width() + 4.0;
                det.h = bbox.height() + 4.0;
                det.conf = 1.0;
                field.truth.push_back(det);
                rc.predicted += multiplicity(cls);
                rc.detections.push_back(det);
            }
            field.truth_report.rows.push_back(std::move(rc));
        }
    }

    const double area = static_cast<double>(width) * height;
    const int weeds = static_cast<int>(std::floor(spec.weed_density * area));
    for (int i = 0; i < weeds; ++i) {
        const double wx = u01(rng) * width;
        const double wy = u01(rng) * height;
        Rgb weedy{60.0 + 20.0 * u01(rng), 120.0 + 30.0 * u01(rng), 50.0 + 15.0 * u01(rng)};
        fill_ellipse(field.image, wx, wy, 2.0 + 2.0 * u01(rng), 1.5 + 1.5 * u01(rng),
                     2 * kPi * u01(rng), weedy, nullptr);
    }
    return field;
}

std::vector<FrameRecord> generate_flight(const SyntheticField& field, const FlightSpec& spec) {
    if (spec.frame_w < 16 || spec.frame_h < 16)
        throw SpecInvalid("flight spec: frame too small");
    if (spec.stride < 1 || spec.stride >= std::min(spec.frame_w, spec.frame_h))
        throw SpecInvalid("flight spec: stride must be positive and below the frame size");

    auto origins = [](int dim, int size, int stride) {
        std::vector<int> xs{0};
        const int lim = std::max(0, dim - size);
        while (xs.back() < lim) xs.push_back(std::min(xs.back() + stride, lim));
        return xs;
    };
    const int fw = std::min(spec.frame_w, field.width);
    const int fh = std::min(spec.frame_h, field.height);
    const std::vector<int> xs = origins(field.width, fw, spec.stride);
    const std::vector<int> ys = origins(field.height, fh, spec.stride);

    std::mt19937 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.hom_noise_sigma);
    std::uniform_real_distribution<double> conf_jit(spec.conf_lo, spec.conf_hi);

    std::vector<FrameRecord> frames;
    int prev_x = 0, prev_y = 0;
    int id = 0;
    for (int oy : ys) {
        for (int ox : xs) {
            FrameRecord rec;
            rec.frame_id = id;
            rec.width = fw;
            rec.height = fh;
            rec.image = Raster::make(fw, fh, 3);
            for (int y = 0; y < fh; ++y)
                for (int x = 0; x < fw; ++x)
                    for (int c = 0; c < 3; ++c)
                        rec.image.at(x, y, c) = field.image.at(ox + x, oy + y, c);

            if (id == 0) {
                rec.pairwise = Homography::identity(0, 0);
            } else {
                double tx = static_cast<double>(ox - prev_x);
                double ty = static_cast<double>(oy - prev_y);
                if (spec.hom_noise_sigma > 0) {
                    tx += noise(rng);
                    ty += noise(rng);
                }
                rec.pairwise = Homography::translation(tx, ty, id, id - 1);
            }

            for (const Detection& t : field.truth) {
                // frame covers [-0.5, dim-0.5] in frame-local pixel centers
                const double lx1 = t.cx - 0.5 * t.w - ox;
                const double lx2 = t.cx + 0.5 * t.w - ox;
                const double ly1 = t.cy - 0.5 * t.h - oy;
                const double ly2 = t.cy + 0.5 * t.h - oy;
                const double cx1 = std::max(lx1, -0.5), cx2 = std::min(lx2, fw - 0.5);
                const double cy1 = std::max(ly1, -0.5), cy2 = std::min(ly2, fh - 0.5);
                if (cx2 <= cx1 || cy2 <= cy1) continue;
                const double vis = ((cx2 - cx1) * (cy2 - cy1)) / (t.w * t.h);
                if (vis < spec.min_visible_frac) continue;
                Detection d = t;
                d.cx = 0.5 * (cx1 + cx2);
                d.cy = 0.5 * (cy1 + cy2);
                d.w = cx2 - cx1;
                d.h = cy2 - cy1;
                d.conf = conf_jit(rng);
                d.source = id;
                rec.detections.push_back(d);
            }

            frames.push_back(std::move(rec));
            prev_x = ox;
            prev_y = oy;
            ++id;
        }
    }
    return frames;
}

void write_flight_dir(const std::vector<FrameRecord>& frames, const std::string& dir,
                      const std::string& image_format, bool invert_pairwise_files) {
    std::filesystem::create_directories(dir);
    char name[64];
    for (const auto& f : frames) {
        std::snprintf(name, sizeof(name), "frame_%06d.%s", f.frame_id, image_format.c_str());
        write_image((std::filesystem::path(dir) / name).string(), f.image);

        std::snprintf(name, sizeof(name), "frame_%06d.txt", f.frame_id);
        std::ofstream labels((std::filesystem::path(dir) / name).string());
        labels << serialize_labels(f.detections, f.width, f.height);

        std::snprintf(name, sizeof(name), "hom_%06d.txt", f.frame_id);
        std::ofstream hom((std::filesystem::path(dir) / name).string());
        hom << serialize_homography(invert_pairwise_files ? f.pairwise.inverted()
                                                          : f.pairwise);
    }
}

}  // namespace standcount
