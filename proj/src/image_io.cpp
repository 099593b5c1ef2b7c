#include "standcount/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace standcount {

namespace {

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
}

// --- PNM (P5/P6, maxval 255) ---

int pnm_next_int(std::istream& is) {
    // skip whitespace and '#' comments
    int c = is.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = is.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = is.get();
    }
    if (c == EOF || !std::isdigit(c))
        throw IoError("malformed PNM header");
    int v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        c = is.get();
    }
    return v;
}

Raster read_pnm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open image: " + path);
    char magic[2];
    f.read(magic, 2);
    if (!f || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw IoError("not a binary PGM/PPM file: " + path);
    const int channels = magic[1] == '6' ? 3 : 1;
    const int w = pnm_next_int(f);
    const int h = pnm_next_int(f);
    const int maxval = pnm_next_int(f);
    if (maxval != 255)
        throw IoError("only maxval 255 PNM supported: " + path);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h * channels);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f)
        throw IoError("truncated PNM data: " + path);
    Raster img = Raster::make(w, h, channels);
    for (std::size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i];
    return img;
}

void write_pnm(const std::string& path, const Raster& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot write image: " + path);
    f << (img.channels == 3 ? "P6" : "P5") << "\n"
      << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> buf(img.data.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = to_u8(img.data[i]);
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f)
        throw IoError("short write: " + path);
}

// --- PNG via libpng ---

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};

Raster read_png(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp)
        throw IoError("cannot open image: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng failed to decode: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_packing(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY
        && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int channels = static_cast<int>(png_get_channels(png, info));
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unsupported PNG channel count: " + std::to_string(channels));
    }

    std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h * channels);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
        rows[y] = buf.data() + static_cast<std::size_t>(y) * w * channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Raster img = Raster::make(w, h, channels);
    for (std::size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i];
    return img;
}

void write_png(const std::string& path, const Raster& img) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp)
        throw IoError("cannot write image: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failed to encode: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<std::uint8_t> buf(img.data.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = to_u8(img.data[i]);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = buf.data() + static_cast<std::size_t>(y) * img.width * img.channels;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

Raster read_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == "png") return read_png(path);
    if (ext == "ppm" || ext == "pgm") return read_pnm(path);
    throw IoError("unsupported image extension: " + path);
}

void write_image(const std::string& path, const Raster& img) {
    const std::string ext = lower_ext(path);
    if (ext == "png") return write_png(path, img);
    if (ext == "ppm" || ext == "pgm") return write_pnm(path, img);
    throw IoError("unsupported image extension: " + path);
}

std::pair<int, int> read_image_size(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == "ppm" || ext == "pgm") {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw IoError("cannot open image: " + path);
        char magic[2];
        f.read(magic, 2);
        if (!f || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
            throw IoError("not a binary PGM/PPM file: " + path);
        const int w = pnm_next_int(f);
        const int h = pnm_next_int(f);
        return {w, h};
    }
    if (ext == "png") {
        std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
        if (!fp)
            throw IoError("cannot open image: " + path);
        png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info) {
            png_destroy_read_struct(&png, &info, nullptr);
            throw IoError("libpng init failed");
        }
        if (setjmp(png_jmpbuf(png))) {
            png_destroy_read_struct(&png, &info, nullptr);
            throw IoError("libpng failed to read header: " + path);
        }
        png_init_io(png, fp.get());
        png_read_info(png, info);
        const int w = static_cast<int>(png_get_image_width(png, info));
        const int h = static_cast<int>(png_get_image_height(png, info));
        png_destroy_read_struct(&png, &info, nullptr);
        return {w, h};
    }
    throw IoError("unsupported image extension: " + path);
}

void write_scalar_image(const std::string& path, const Raster& map) {
    auto [lo, hi] = min_max(map);
    Raster out = Raster::make(map.width, map.height, 1);
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    for (std::size_t i = 0; i < map.data.size(); ++i)
        out.data[i] = (map.data[i] - lo) * scale;
    write_image(path, out);
}

}  // namespace standcount
