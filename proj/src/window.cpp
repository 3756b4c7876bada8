#include "mmf/window.hpp"

#include <cmath>
#include <stdexcept>

namespace mmf {

namespace {

StructuringElement sample_generic(double rho, double h, int dims) {
    // h > rho is allowed and yields the bare centre offset.
    if (rho <= 0.0 || h <= 0.0) throw std::invalid_argument("need rho > 0 and h > 0");
    StructuringElement se;
    se.rho = rho;
    se.h = h;
    se.dims = dims;
    const int R = int(std::floor(rho / h));
    const double r2 = rho * rho;
    const int kmin = dims == 3 ? -R : 0, kmax = dims == 3 ? R : 0;
    for (int i = -R; i <= R; ++i)
        for (int j = -R; j <= R; ++j)
            for (int k = kmin; k <= kmax; ++k) {
                const double d2 = (double(i) * i + double(j) * j + double(k) * k) * h * h;
                if (d2 <= r2) se.offsets.push_back({i, j, k});
            }
    return se;
}

}  // namespace

StructuringElement sample_disc(double rho, double h) { return sample_generic(rho, h, 2); }

StructuringElement sample_ball(double rho, double h) { return sample_generic(rho, h, 3); }

PointCloud extract_cloud(const MultiChannelImage& img, int cx, int cy, int cz,
                         const StructuringElement& se) {
    PointCloud cloud;
    cloud.dim = img.channels;
    cloud.pts.reserve(se.size());
    for (const auto& off : se.offsets) {
        const int x = cx + off[0], y = cy + off[1], z = cz + off[2];
        if (x < 0 || x >= img.nx || y < 0 || y >= img.ny || z < 0 || z >= img.nz) continue;
        cloud.pts.push_back(img.value(x, y, z));
    }
    return cloud;
}

PointCloud rasterize(const AnalyticField& field, const StructuringElement& se,
                     const Vec& origin) {
    PointCloud cloud;
    cloud.dim = field.value_dim;
    cloud.pts.reserve(se.size());
    for (const auto& off : se.offsets) {
        Vec p = origin;
        for (int d = 0; d < se.dims; ++d) p[d] += off[std::size_t(d)] * se.h;
        cloud.pts.push_back(field.eval(p));
    }
    return cloud;
}

}  // namespace mmf
