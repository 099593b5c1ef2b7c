#pragma once

#include <string>

#include "standcount/raster.hpp"

namespace standcount {

// Thin decode/encode layer for lossless rasters. Format is picked from
// the extension: .png (libpng), .ppm (binary P6, RGB), .pgm (binary P5,
// grayscale). Reads yield 0..255-valued rasters with 1 or 3 channels;
// writes clamp and round to 8 bits.
Raster read_image(const std::string& path);
void write_image(const std::string& path, const Raster& img);

// Header-only probe: width and height without decoding pixel data.
std::pair<int, int> read_image_size(const std::string& path);

// Writes a scalar map as an 8-bit grayscale image, min-max stretched.
void write_scalar_image(const std::string& path, const Raster& map);

}  // namespace standcount
