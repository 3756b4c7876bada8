#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mmf/geometry.hpp"
#include "mmf/image.hpp"

namespace mmf {

// Disc/ball window as integer grid offsets with ||offset*h|| <= rho.
struct StructuringElement {
    double rho = 0.0;
    double h = 0.0;
    int dims = 2;
    std::vector<std::array<int, 3>> offsets;  // lexicographic (i outer, then j, then k)

    std::size_t size() const { return offsets.size(); }
};

StructuringElement sample_disc(double rho, double h);
StructuringElement sample_ball(double rho, double h);

// Value vectors at all window positions that fall inside the image
// (truncation at boundaries), in offset order.
PointCloud extract_cloud(const MultiChannelImage& img, int cx, int cy, int cz,
                         const StructuringElement& se);

struct AnalyticField {
    std::function<Vec(const Vec&)> eval;  // domain point -> value vector
    int domain_dim = 2;
    int value_dim = 2;
};

// Field samples at origin + offset*h for each window offset.
PointCloud rasterize(const AnalyticField& field, const StructuringElement& se,
                     const Vec& origin);

}  // namespace mmf
