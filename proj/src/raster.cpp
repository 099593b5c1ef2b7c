#include "standcount/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace standcount {

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
}

std::pair<double, double> min_max(const Raster& img) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : img.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

Raster normalize_to_unit(const Raster& img) {
    Raster out = img;
    double hi = 0.0;
    for (double v : img.data) hi = std::max(hi, v);
    if (hi > 0.0)
        for (double& v : out.data) v /= hi;
    return out;
}

Raster median_filter(const Raster& img, int m, int n) {
    if (m < 1 || n < 1 || m % 2 == 0 || n % 2 == 0)
        throw BadWindow("median window must be odd and >= 1, got "
                        + std::to_string(m) + "x" + std::to_string(n));
    Raster out = Raster::make(img.width, img.height, img.channels);
    const int ry = m / 2, rx = n / 2;
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(m) * n);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                window.clear();
                for (int dy = -ry; dy <= ry; ++dy) {
                    const int yy = std::clamp(y + dy, 0, img.height - 1);
                    for (int dx = -rx; dx <= rx; ++dx) {
                        const int xx = std::clamp(x + dx, 0, img.width - 1);
                        window.push_back(img.at(xx, yy, c));
                    }
                }
                auto mid = window.begin() + window.size() / 2;
                std::nth_element(window.begin(), mid, window.end());
                out.at(x, y, c) = *mid;
            }
        }
    }
    return out;
}

Raster exg(const Raster& img) {
    if (img.channels != 3)
        throw ChannelMismatch("exg needs a 3-channel image, got "
                              + std::to_string(img.channels));
    Raster out = Raster::make(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(x, y) = 2.0 * img.at(x, y, 1) - img.at(x, y, 0) - img.at(x, y, 2);
    return out;
}

OtsuResult otsu_threshold(const Raster& img) {
    auto [lo, hi] = min_max(img);
    if (!(hi > lo))
        throw DegenerateImage("otsu: image is constant");

    constexpr int kBins = 256;
    std::vector<std::size_t> hist(kBins, 0);
    const double scale = 1.0 / (hi - lo);
    for (double v : img.data) {
        int b = static_cast<int>((v - lo) * scale * kBins);
        hist[std::clamp(b, 0, kBins - 1)]++;
    }

    const double total = static_cast<double>(img.data.size());
    double sum_all = 0.0;
    for (int b = 0; b < kBins; ++b) sum_all += b * static_cast<double>(hist[b]);

    // between-class variance w0*w1*(mu0-mu1)^2, maximized over the cut
    // "bins <= t vs bins > t"; first maximum wins.
    double best_var = -1.0;
    int best_t = 0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < kBins - 1; ++t) {
        w0 += static_cast<double>(hist[t]);
        sum0 += t * static_cast<double>(hist[t]);
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }

    OtsuResult res;
    const double thr_norm = (best_t + 0.5) / kBins;
    res.threshold = lo + thr_norm * (hi - lo);
    res.mask = BinaryMask::make(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            res.mask.set(x, y, img.at(x, y) > res.threshold);
    return res;
}

BinaryMask erode_disk(const BinaryMask& mask, int radius) {
    if (radius <= 0)
        return mask;
    std::vector<std::pair<int, int>> disk;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius)
                disk.emplace_back(dx, dy);

    BinaryMask out = BinaryMask::make(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y)) continue;
            bool fits = true;
            for (auto [dx, dy] : disk) {
                const int xx = x + dx, yy = y + dy;
                if (xx < 0 || xx >= mask.width || yy < 0 || yy >= mask.height
                    || !mask.get(xx, yy)) {
                    fits = false;
                    break;
                }
            }
            if (fits) out.set(x, y, true);
        }
    }
    return out;
}

std::pair<LabelMap, int> connected_components(const BinaryMask& mask) {
    LabelMap lm = LabelMap::make(mask.width, mask.height);
    int next = 0;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.get(x, y) || lm.get(x, y) != 0) continue;
            ++next;
            stack.push_back({x, y});
            lm.set(x, y, next);
            while (!stack.empty()) {
                auto [px, py] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int xx = px + dx, yy = py + dy;
                        if (xx < 0 || xx >= mask.width || yy < 0 || yy >= mask.height)
                            continue;
                        if (mask.get(xx, yy) && lm.get(xx, yy) == 0) {
                            lm.set(xx, yy, next);
                            stack.push_back({xx, yy});
                        }
                    }
            }
        }
    }
    return {std::move(lm), next};
}

int auto_disk_radius(const BinaryMask& mask, double alpha) {
    auto [lm, k] = connected_components(mask);
    if (k == 0)
        throw EmptyMask("auto_disk_radius: mask has no foreground");

    std::vector<double> n(k, 0), sx(k, 0), sy(k, 0);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            const int l = lm.get(x, y);
            if (l == 0) continue;
            n[l - 1] += 1;
            sx[l - 1] += x;
            sy[l - 1] += y;
        }
    std::vector<double> mxx(k, 0), myy(k, 0), mxy(k, 0);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            const int l = lm.get(x, y);
            if (l == 0) continue;
            const int i = l - 1;
            const double dx = x - sx[i] / n[i];
            const double dy = y - sy[i] / n[i];
            mxx[i] += dx * dx;
            myy[i] += dy * dy;
            mxy[i] += dx * dy;
        }

    double mean_minor = 0.0;
    for (int i = 0; i < k; ++i) {
        const double a = mxx[i] / n[i], b = mxy[i] / n[i], c = myy[i] / n[i];
        const double half_tr = 0.5 * (a + c);
        const double disc = std::sqrt(std::max(0.0, half_tr * half_tr - (a * c - b * b)));
        const double lambda_min = std::max(0.0, half_tr - disc);
        mean_minor += 4.0 * std::sqrt(lambda_min);
    }
    mean_minor /= k;
    return static_cast<int>(std::lround(alpha * mean_minor));
}

namespace {

// 1D squared-distance transform of a finite sampled function via the
// lower envelope of parabolas (Felzenszwalb & Huttenlocher). Exact for
// integer-valued inputs.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, int n) {
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

Raster distance_transform(const BinaryMask& mask) {
    const int w = mask.width, h = mask.height;
    Raster out = Raster::make(w, h, 1);
    if (w == 0 || h == 0) return out;

    bool any_bg = false;
    for (auto b : mask.bits)
        if (!b) { any_bg = true; break; }
    if (!any_bg) {
        const double far = std::hypot(static_cast<double>(w), static_cast<double>(h));
        for (double& v : out.data) v = far;
        return out;
    }

    // A column without background keeps this sentinel; it exceeds any
    // true squared distance so such parabolas never win in stage 2.
    const double big = static_cast<double>(w + h + 1) * (w + h + 1);

    // stage 1: per-column distance (in y) to the nearest in-column
    // background pixel, squared
    Raster d2 = Raster::make(w, h, 1);
    for (int x = 0; x < w; ++x) {
        double run = big;
        for (int y = 0; y < h; ++y) {
            run = mask.get(x, y) ? std::min(run + 1.0, static_cast<double>(h + 1)) : 0.0;
            d2.at(x, y) = run;
        }
        run = big;
        for (int y = h - 1; y >= 0; --y) {
            run = mask.get(x, y) ? std::min(run + 1.0, static_cast<double>(h + 1)) : 0.0;
            d2.at(x, y) = std::min(d2.at(x, y), run);
        }
        for (int y = 0; y < h; ++y) {
            const double dv = d2.at(x, y);
            d2.at(x, y) = dv > h ? big : dv * dv;
        }
    }

    // stage 2: exact squared EDT along rows over the column results
    std::vector<double> row(w), drow(w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) row[x] = d2.at(x, y);
        edt_1d(row, drow, w);
        for (int x = 0; x < w; ++x) out.at(x, y) = std::sqrt(drow[x]);
    }
    return out;
}

std::vector<Point2> regional_maxima(const Raster& dist, double min_separation) {
    const int w = dist.width, h = dist.height;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
    struct Peak {
        Point2 p;
        double value;
    };
    std::vector<Peak> peaks;

    std::vector<int> plateau;
    std::vector<int> stack;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const int start = y0 * w + x0;
            if (visited[start]) continue;
            const double v = dist.at(x0, y0);
            if (v <= 0.0) {
                visited[start] = 1;
                continue;
            }
            // flood the equal-value plateau, checking for greater neighbors
            plateau.clear();
            stack.assign(1, start);
            visited[start] = 1;
            bool is_max = true;
            while (!stack.empty()) {
                const int p = stack.back();
                stack.pop_back();
                plateau.push_back(p);
                const int px = p % w, py = p / w;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int xx = px + dx, yy = py + dy;
                        if (xx < 0 || xx >= w || yy < 0 || yy >= h) continue;
                        const double nv = dist.at(xx, yy);
                        if (nv > v) {
                            is_max = false;
                        } else if (nv == v) {
                            const int q = yy * w + xx;
                            if (!visited[q]) {
                                visited[q] = 1;
                                stack.push_back(q);
                            }
                        }
                    }
            }
            if (!is_max) continue;
            double cx = 0, cy = 0;
            for (int p : plateau) {
                cx += p % w;
                cy += p / w;
            }
            cx /= plateau.size();
            cy /= plateau.size();
            // snap the centroid to the plateau so the marker is on it
            int best = plateau.front();
            double best_d = std::numeric_limits<double>::infinity();
            std::sort(plateau.begin(), plateau.end());
            for (int p : plateau) {
                const double dx = p % w - cx, dy = p / w - cy;
                const double d = dx * dx + dy * dy;
                if (d < best_d) {
                    best_d = d;
                    best = p;
                }
            }
            peaks.push_back({{static_cast<double>(best % w), static_cast<double>(best / w)}, v});
        }
    }

    std::sort(peaks.begin(), peaks.end(), [w](const Peak& a, const Peak& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.p.y * w + a.p.x < b.p.y * w + b.p.x;
    });

    std::vector<Point2> kept;
    for (const auto& pk : peaks) {
        bool ok = true;
        for (const auto& q : kept) {
            if (std::hypot(pk.p.x - q.x, pk.p.y - q.y) < min_separation) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(pk.p);
    }
    return kept;
}

LabelMap watershed(const Raster& dist, const std::vector<Point2>& markers,
                   const BinaryMask& mask) {
    const int w = mask.width, h = mask.height;
    LabelMap lm = LabelMap::make(w, h);

    struct Entry {
        double value;
        int index;  // row-major pixel
        int label;
    };
    struct Lower {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.value != b.value) return a.value < b.value;  // max value first
            return a.index > b.index;                          // then smaller index
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, Lower> pq;

    for (std::size_t i = 0; i < markers.size(); ++i) {
        const int x = static_cast<int>(std::lround(markers[i].x));
        const int y = static_cast<int>(std::lround(markers[i].y));
        if (x < 0 || x >= w || y < 0 || y >= h || !mask.get(x, y))
            throw MarkerOffMask("watershed: marker " + std::to_string(i) + " not on foreground");
        if (lm.get(x, y) != 0)
            continue;  // duplicate seed pixel: first marker owns it
        lm.set(x, y, static_cast<int>(i) + 1);
        pq.push({dist.at(x, y), y * w + x, static_cast<int>(i) + 1});
    }

    const int dx4[4] = {0, -1, 1, 0};
    const int dy4[4] = {-1, 0, 0, 1};
    while (!pq.empty()) {
        const Entry e = pq.top();
        pq.pop();
        const int px = e.index % w, py = e.index / w;
        for (int k = 0; k < 4; ++k) {
            const int xx = px + dx4[k], yy = py + dy4[k];
            if (xx < 0 || xx >= w || yy < 0 || yy >= h) continue;
            if (!mask.get(xx, yy) || lm.get(xx, yy) != 0) continue;
            lm.set(xx, yy, e.label);
            pq.push({dist.at(xx, yy), yy * w + xx, e.label});
        }
    }
    return lm;
}

std::vector<Detection> classical_detect(const Raster& img, const ClassicalConfig& cfg,
                                        ClassicalStages* stages) {
    if (img.channels != 3)
        throw ChannelMismatch("classical_detect needs an RGB image");

    const Raster filtered = median_filter(img, cfg.median_rows, cfg.median_cols);
    Raster exg_map = exg(filtered);

    auto [lo, hi] = min_max(exg_map);
    if (hi - lo < cfg.min_exg_range) {
        // no vegetation contrast: thresholding would only segment noise
        if (stages) {
            stages->exg_map = std::move(exg_map);
            stages->mask = BinaryMask::make(img.width, img.height);
            stages->eroded = stages->mask;
            stages->dist = Raster::make(img.width, img.height, 1);
            stages->cells = LabelMap::make(img.width, img.height);
            stages->erosion_radius = 0;
        }
        return {};
    }

    OtsuResult otsu = otsu_threshold(exg_map);

    int radius = 0;
    try {
        radius = auto_disk_radius(otsu.mask, cfg.erosion_alpha);
    } catch (const EmptyMask&) {
        return {};
    }
    radius = std::max(radius, cfg.min_erosion_radius);

    BinaryMask eroded = erode_disk(otsu.mask, radius);
    Raster dist = distance_transform(eroded);
    Raster unit = normalize_to_unit(dist);
    std::vector<Point2> markers = regional_maxima(dist, cfg.min_marker_separation);
    LabelMap cells = markers.empty() ? LabelMap::make(img.width, img.height)
                                     : watershed(dist, markers, eroded);

    const int k = static_cast<int>(markers.size());
    std::vector<int> xmin(k, img.width), xmax(k, -1), ymin(k, img.height), ymax(k, -1);
    std::vector<double> peak(k, 0.0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const int l = cells.get(x, y);
            if (l == 0) continue;
            const int i = l - 1;
            xmin[i] = std::min(xmin[i], x);
            xmax[i] = std::max(xmax[i], x);
            ymin[i] = std::min(ymin[i], y);
            ymax[i] = std::max(ymax[i], y);
            peak[i] = std::max(peak[i], unit.at(x, y));
        }

    std::vector<Detection> out;
    for (int i = 0; i < k; ++i) {
        if (xmax[i] < 0) continue;  // marker lost its region to a duplicate seed
        Detection d;
        d.cls = PlantClass::Single;
        // a cell spanning pixels [a,b] covers [a-0.5, b+0.5] in
        // pixel-center coordinates
        d.cx = 0.5 * (xmin[i] + xmax[i]);
        d.cy = 0.5 * (ymin[i] + ymax[i]);
        d.w = xmax[i] - xmin[i] + 1;
        d.h = ymax[i] - ymin[i] + 1;
        d.conf = peak[i];
        out.push_back(d);
    }

    if (stages) {
        stages->exg_map = std::move(exg_map);
        stages->mask = std::move(otsu.mask);
        stages->eroded = std::move(eroded);
        stages->dist = std::move(dist);
        stages->cells = std::move(cells);
        stages->erosion_radius = radius;
    }
    return out;
}

}  // namespace standcount
