#pragma once

#include <array>

#include "mmf/geometry.hpp"

namespace mmf {

struct SolverConfig {
    double grad_tol = 1e-9;       // relative to term count (see residual scale)
    int max_iters = 5000;
    double initial_step = 0.05;   // fraction of cloud diameter
    double shrink = 0.5;
    double grow = 1.2;
    double distance_floor_rel = 1e-9;  // x diameter; L1 terms closer than this are skipped
    double volume_floor_rel = 1e-12;   // x diameter^k; degenerate simplices contribute no gradient
    bool use_fast_oja2 = true;         // angular-sweep evaluation for k=2, n=2 clouds
    bool parallel = false;             // OpenMP reduction in brute-force Oja sums
};

struct SolverReport {
    Vec minimiser;
    int iterations = 0;
    double final_grad_norm = 0.0;
    bool converged = false;
    bool degenerate = false;  // ill-posed problem (rank-deficient data, unbounded minimising set)
    bool flat = false;        // bounded flat minimising set; a canonical interior point is returned
};

struct WhiteningTransform {
    // y = W (x - mean); inverse x = Winv y + mean
    std::array<std::array<double, 3>, 3> W{};
    std::array<std::array<double, 3>, 3> Winv{};
    Vec mean;
    std::array<double, 3> eigenvalues{};  // of the covariance, descending
    int dim = 0;
    bool degenerate = false;  // all eigenvalues below absolute floor

    Vec apply(const Vec& x) const;
    Vec invert(const Vec& y) const;
};

Vec componentwise_median(const PointCloud& cloud);
Vec medoid(const PointCloud& cloud);

double l1_objective(const Vec& x, const PointCloud& cloud);
Vec l1_gradient(const Vec& x, const PointCloud& cloud, double distance_floor);

double oja_objective(const Vec& x, const PointCloud& cloud, int k);
Vec oja_gradient(const Vec& x, const PointCloud& cloud, int k, double volume_floor);

SolverReport l1_median(const PointCloud& cloud, const SolverConfig& cfg = {});
SolverReport oja_median(const PointCloud& cloud, int k, const SolverConfig& cfg = {});

WhiteningTransform covariance_whitening(const PointCloud& cloud, double eps_cov = 1e-8);
SolverReport trl1_median(const PointCloud& cloud, const SolverConfig& cfg = {});

PointCloud regularize_simplex(const PointCloud& cloud, double h);

}  // namespace mmf
