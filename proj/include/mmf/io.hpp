#pragma once

#include <cstdint>
#include <string>

#include "mmf/image.hpp"

namespace mmf {

// Binary PPM (P6, 3 channels) or PGM (P5, 1 channel), maxval 255; samples are
// scaled to [0,1] internally.
MultiChannelImage read_image(const std::string& path);
void write_image(const std::string& path, const MultiChannelImage& img);

// Two-channel float field: ASCII header "FLO2 <w> <h>\n" followed by
// w*h*2 little-endian float32, (u,v) interleaved per pixel, row-major.
MultiChannelImage read_flow(const std::string& path);
void write_flow(const std::string& path, const MultiChannelImage& img);

// Replace each channel entry independently with probability `density` by a
// uniform draw from [lo, hi].
MultiChannelImage add_impulse_noise(const MultiChannelImage& img, double density, double lo,
                                    double hi, std::uint64_t seed);

}  // namespace mmf
