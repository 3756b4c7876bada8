#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "mmf/scheme.hpp"

using namespace mmf;

namespace {

MultiChannelImage blob_image(int nx, int ny) {
    MultiChannelImage img = MultiChannelImage::make2d(nx, ny, 3);
    const double cx = 0.5 * (nx - 1), cy = 0.5 * (ny - 1);
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            img.at(x, y, 0) = std::exp(-r2 / 8.0);
            img.at(x, y, 1) = 0.5 + 0.3 * std::exp(-r2 / 5.0);
            img.at(x, y, 2) = 0.1 * x / nx + 0.2 * std::exp(-r2 / 12.0);
        }
    return img;
}

MultiChannelImage random_image(std::mt19937& rng, int nx, int ny) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    MultiChannelImage img = MultiChannelImage::make2d(nx, ny, 3);
    for (double& v : img.data) v = d(rng);
    return img;
}

int mirror(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace

TEST_CASE("constant image is a fixed point") {
    MultiChannelImage img = MultiChannelImage::make2d(7, 6, 3);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 7; ++x) img.at(x, y, c) = 0.3 + 0.2 * c;
    SchemeConfig cfg;
    const MultiChannelImage out = scheme_step(img, cfg);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(std::abs(out.data[i] - img.data[i]) < 1e-10);
}

TEST_CASE("channelwise linear image has zero interior update") {
    MultiChannelImage img = MultiChannelImage::make2d(9, 8, 3);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 9; ++x) {
            img.at(x, y, 0) = 0.05 * x + 0.01 * y;
            img.at(x, y, 1) = -0.02 * x + 0.04 * y + 0.3;
            img.at(x, y, 2) = 0.03 * x;
        }
    SchemeConfig cfg;
    const MultiChannelImage out = scheme_step(img, cfg);
    for (int y = 1; y < 7; ++y)
        for (int x = 1; x < 8; ++x)
            for (int c = 0; c < 3; ++c)
                CHECK(std::abs(out.at(x, y, c) - img.at(x, y, c)) < 1e-10);
}

TEST_CASE("anti-diffusion weight removes exactly the discrete Laplacian") {
    const MultiChannelImage img = blob_image(11, 10);
    SchemeConfig a, b;
    a.anti_diffusion = 0.0;
    b.anti_diffusion = 1.0;
    const MultiChannelImage oa = scheme_step(img, a);
    const MultiChannelImage ob = scheme_step(img, b);
    for (int y = 0; y < img.ny; ++y)
        for (int x = 0; x < img.nx; ++x)
            for (int c = 0; c < 3; ++c) {
                const double lap = img.at(mirror(x + 1, img.nx), y, c) +
                                   img.at(mirror(x - 1, img.nx), y, c) +
                                   img.at(x, mirror(y + 1, img.ny), c) +
                                   img.at(x, mirror(y - 1, img.ny), c) -
                                   4.0 * img.at(x, y, c);
                CHECK(std::abs((oa.at(x, y, c) - ob.at(x, y, c)) - a.tau * lap) < 1e-12);
            }
}

TEST_CASE("patch frames are orthogonal with unit direction") {
    std::mt19937 rng(31);
    const MultiChannelImage img = random_image(rng, 9, 9);
    SchemeConfig cfg;
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x) {
            const PatchFrame f = patch_frame(img, x, y, cfg);
            CHECK(((f.Q.transpose() * f.Q) - Eigen::Matrix3d::Identity())
                      .cwiseAbs()
                      .maxCoeff() < 1e-10);
            CHECK(f.c * f.c + f.s * f.s == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(f.lambdas(0) >= f.lambdas(1));
            CHECK(f.lambdas(1) >= f.lambdas(2));
        }
    MultiChannelImage flat = MultiChannelImage::make2d(5, 5, 3);
    const PatchFrame f = patch_frame(flat, 2, 2, cfg);
    CHECK(f.degenerate);
    CHECK(f.c == 1.0);
    CHECK(f.s == 0.0);
}

TEST_CASE("grey value shift commutes exactly") {
    const MultiChannelImage img = blob_image(10, 9);
    MultiChannelImage shifted = img;
    const double off[3] = {0.17, -0.4, 2.3};
    for (int y = 0; y < img.ny; ++y)
        for (int x = 0; x < img.nx; ++x)
            for (int c = 0; c < 3; ++c) shifted.at(x, y, c) += off[c];
    SchemeConfig cfg;
    const MultiChannelImage a = scheme_step(img, cfg);
    const MultiChannelImage b = scheme_step(shifted, cfg);
    for (int y = 0; y < img.ny; ++y)
        for (int x = 0; x < img.nx; ++x)
            for (int c = 0; c < 3; ++c)
                CHECK(std::abs((b.at(x, y, c) - off[c]) - a.at(x, y, c)) < 1e-12);
}

// Channels with independent structures: the coupling tensor has two well
// separated nonzero eigenvalues at every pixel, so the per-pixel frames are
// well conditioned.
MultiChannelImage generic_image(int nx, int ny) {
    MultiChannelImage img = MultiChannelImage::make2d(nx, ny, 3);
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            img.at(x, y, 0) = std::exp(-((x - 3.2) * (x - 3.2) + (y - 2.1) * (y - 2.1)) / 7.0);
            img.at(x, y, 1) = 0.4 + 0.06 * y - 0.02 * x +
                              0.25 * std::exp(-((x - 7.8) * (x - 7.8) + (y - 6.4) * (y - 6.4)) / 9.0);
            img.at(x, y, 2) = 0.3 + 0.05 * x + 0.04 * y +
                              0.2 * std::sin(0.6 * x - 0.4 * y);
        }
    return img;
}

TEST_CASE("global value rotation commutes per step") {
    const MultiChannelImage img = generic_image(12, 11);
    const double th1 = 0.4, th2 = -0.9;
    Eigen::Matrix3d R1, R2;
    R1 << std::cos(th1), -std::sin(th1), 0, std::sin(th1), std::cos(th1), 0, 0, 0, 1;
    R2 << 1, 0, 0, 0, std::cos(th2), -std::sin(th2), 0, std::sin(th2), std::cos(th2);
    const Eigen::Matrix3d R = R2 * R1;

    MultiChannelImage rot = img;
    for (int y = 0; y < img.ny; ++y)
        for (int x = 0; x < img.nx; ++x) {
            Eigen::Vector3d v(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
            Eigen::Vector3d w = R * v;
            for (int c = 0; c < 3; ++c) rot.at(x, y, c) = w(c);
        }
    SchemeConfig cfg;
    const MultiChannelImage a = scheme_step(img, cfg);
    const MultiChannelImage b = scheme_step(rot, cfg);
    for (int y = 0; y < img.ny; ++y)
        for (int x = 0; x < img.nx; ++x) {
            Eigen::Vector3d v(a.at(x, y, 0), a.at(x, y, 1), a.at(x, y, 2));
            Eigen::Vector3d w = R * v;
            for (int c = 0; c < 3; ++c) CHECK(std::abs(b.at(x, y, c) - w(c)) < 5e-6);
        }
}

TEST_CASE("evolution is deterministic and composes steps") {
    std::mt19937 rng(37);
    const MultiChannelImage img = random_image(rng, 8, 8);
    SchemeConfig cfg;
    cfg.steps = 3;

    const MultiChannelImage e1 = evolve(img, cfg);
    const MultiChannelImage e2 = evolve(img, cfg);
    CHECK(e1.data == e2.data);

    MultiChannelImage manual = img;
    for (int i = 0; i < 3; ++i) manual = scheme_step(manual, cfg);
    CHECK(e1.data == manual.data);

    SchemeConfig zero = cfg;
    zero.steps = 0;
    CHECK(evolve(img, zero).data == img.data);

    const MultiChannelImage ser = evolve(img, cfg, ExecutionPolicy::Serial);
    CHECK(e1.data == ser.data);
}

TEST_CASE("invalid inputs are rejected") {
    SchemeConfig cfg;
    MultiChannelImage two = MultiChannelImage::make2d(5, 5, 2);
    CHECK_THROWS_AS(scheme_step(two, cfg), std::invalid_argument);
    MultiChannelImage tiny = MultiChannelImage::make2d(2, 3, 3);
    CHECK_THROWS_AS(scheme_step(tiny, cfg), std::invalid_argument);
}

TEST_CASE("updates stay finite on rough data") {
    std::mt19937 rng(41);
    MultiChannelImage img = random_image(rng, 10, 10);
    SchemeConfig cfg;
    cfg.steps = 10;
    const MultiChannelImage out = evolve(img, cfg);
    for (double v : out.data) {
        CHECK(std::isfinite(v));
        CHECK(std::abs(v) < 10.0);
    }
}
