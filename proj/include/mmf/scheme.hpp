#pragma once

#include <Eigen/Dense>

#include "mmf/filter.hpp"
#include "mmf/image.hpp"

namespace mmf {

struct SchemeConfig {
    double tau = 0.05;
    int steps = 1;
    double eps = 1e-4;           // regularisation in the curvature quotients
    double anti_diffusion = 0.0; // weight on the linear diffusion part removed
    double h = 1.0;
};

struct PatchFrame {
    Eigen::Matrix3d Q;        // orthogonal value-space transform, C = Q L Q^T
    Eigen::Vector3d lambdas;  // eigenvalues of C, descending
    double c = 1.0, s = 0.0;  // unit gradient direction of first rotated channel
    bool degenerate = false;  // zero gradient; direction defaulted to (1,0)
};

PatchFrame patch_frame(const MultiChannelImage& img, int x, int y, const SchemeConfig& cfg);

// One explicit update of the three-channel planar evolution; mirror boundaries.
MultiChannelImage scheme_step(const MultiChannelImage& img, const SchemeConfig& cfg,
                              ExecutionPolicy policy = ExecutionPolicy::Parallel);

MultiChannelImage evolve(const MultiChannelImage& img, const SchemeConfig& cfg,
                         ExecutionPolicy policy = ExecutionPolicy::Parallel);

}  // namespace mmf
