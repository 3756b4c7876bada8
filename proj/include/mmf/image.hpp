#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "mmf/geometry.hpp"

namespace mmf {

// Regular 2D or 3D grid with 1..3 channels, channel-interleaved storage.
struct MultiChannelImage {
    int dims = 2;      // spatial dimensions (2 or 3)
    int nx = 0, ny = 0, nz = 1;
    int channels = 1;
    double h = 1.0;    // isotropic grid step
    std::vector<double> data;

    static MultiChannelImage make2d(int nx, int ny, int channels, double h = 1.0) {
        MultiChannelImage img;
        img.dims = 2;
        img.nx = nx;
        img.ny = ny;
        img.nz = 1;
        img.channels = channels;
        img.h = h;
        img.data.assign(std::size_t(nx) * std::size_t(ny) * std::size_t(channels), 0.0);
        return img;
    }
    static MultiChannelImage make3d(int nx, int ny, int nz, int channels, double h = 1.0) {
        MultiChannelImage img;
        img.dims = 3;
        img.nx = nx;
        img.ny = ny;
        img.nz = nz;
        img.channels = channels;
        img.h = h;
        img.data.assign(std::size_t(nx) * std::size_t(ny) * std::size_t(nz) *
                            std::size_t(channels),
                        0.0);
        return img;
    }

    std::size_t index(int x, int y, int z = 0) const {
        return ((std::size_t(z) * std::size_t(ny) + std::size_t(y)) * std::size_t(nx) +
                std::size_t(x)) *
               std::size_t(channels);
    }
    double& at(int x, int y, int c) { return data[index(x, y) + std::size_t(c)]; }
    double at(int x, int y, int c) const { return data[index(x, y) + std::size_t(c)]; }
    double& at3(int x, int y, int z, int c) { return data[index(x, y, z) + std::size_t(c)]; }
    double at3(int x, int y, int z, int c) const {
        return data[index(x, y, z) + std::size_t(c)];
    }

    Vec value(int x, int y, int z = 0) const {
        Vec v = Vec::zero(channels);
        const std::size_t base = index(x, y, z);
        for (int c = 0; c < channels; ++c) v[c] = data[base + std::size_t(c)];
        return v;
    }
    void set_value(int x, int y, int z, const Vec& v) {
        const std::size_t base = index(x, y, z);
        for (int c = 0; c < channels; ++c) data[base + std::size_t(c)] = v[c];
    }

    std::size_t pixel_count() const {
        return std::size_t(nx) * std::size_t(ny) * std::size_t(nz);
    }
    bool same_shape(const MultiChannelImage& o) const {
        return dims == o.dims && nx == o.nx && ny == o.ny && nz == o.nz &&
               channels == o.channels;
    }
};

}  // namespace mmf
