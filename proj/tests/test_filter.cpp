#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "mmf/filter.hpp"

using namespace mmf;

namespace {

MultiChannelImage random_image(std::mt19937& rng, int nx, int ny, int channels) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    MultiChannelImage img = MultiChannelImage::make2d(nx, ny, channels);
    for (double& v : img.data) v = d(rng);
    return img;
}

double scalar_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("constant image is a fixed point of every variant") {
    MultiChannelImage img = MultiChannelImage::make2d(6, 5, 3);
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = 0.25 * (1 + int(i) % 3);
    const StructuringElement se = sample_disc(1.5, 1.0);
    for (MedianVariant v : {MedianVariant::L1, MedianVariant::OjaFull, MedianVariant::Oja2In3,
                            MedianVariant::TrL1, MedianVariant::Medoid}) {
        MedianSpec spec;
        spec.variant = v;
        const FilterReport rep = median_filter(img, se, spec);
        REQUIRE(rep.output.same_shape(img));
        for (std::size_t i = 0; i < img.data.size(); ++i)
            CHECK(rep.output.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("single channel reduces to the classical scalar median filter") {
    std::mt19937 rng(11);
    MultiChannelImage img = random_image(rng, 7, 6, 1);
    const StructuringElement se = sample_disc(1.0, 1.0);  // 5-point cross
    MedianSpec spec;
    spec.variant = MedianVariant::L1;
    const FilterReport rep = median_filter(img, se, spec);
    for (int y = 0; y < img.ny; ++y)
        for (int x = 0; x < img.nx; ++x) {
            std::vector<double> win;
            for (const auto& o : se.offsets) {
                const int xi = x + o[0], yi = y + o[1];
                if (xi < 0 || xi >= img.nx || yi < 0 || yi >= img.ny) continue;
                win.push_back(img.at(xi, yi, 0));
            }
            CHECK(rep.output.at(x, y, 0) ==
                  doctest::Approx(scalar_median(win)).epsilon(1e-9));
        }
}

TEST_CASE("linear two-channel image is unchanged in the interior") {
    MultiChannelImage img = MultiChannelImage::make2d(9, 9, 2);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x) {
            img.at(x, y, 0) = 0.1 * x;
            img.at(x, y, 1) = 0.1 * y;
        }
    const StructuringElement se = sample_disc(2.0, 1.0);
    for (MedianVariant v : {MedianVariant::L1, MedianVariant::OjaFull, MedianVariant::TrL1}) {
        MedianSpec spec;
        spec.variant = v;
        const FilterReport rep = median_filter(img, se, spec);
        for (int y = 2; y < 7; ++y)
            for (int x = 2; x < 7; ++x)
                for (int c = 0; c < 2; ++c)
                    CHECK(std::abs(rep.output.at(x, y, c) - img.at(x, y, c)) < 1e-6);
    }
}

TEST_CASE("iteration composes single applications") {
    std::mt19937 rng(13);
    MultiChannelImage img = random_image(rng, 6, 6, 1);
    // checkerboard overlay to have structure
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) img.at(x, y, 0) = (x + y) % 2 ? 1.0 : img.at(x, y, 0);
    const StructuringElement se = sample_disc(1.0, 1.0);
    MedianSpec spec;
    spec.variant = MedianVariant::L1;

    const FilterReport once = median_filter(img, se, spec);
    const FilterReport k1 = iterate_filter(img, se, spec, 1);
    CHECK(once.output.data == k1.output.data);

    const FilterReport twice = median_filter(once.output, se, spec);
    const FilterReport k2 = iterate_filter(img, se, spec, 2);
    CHECK(twice.output.data == k2.output.data);

    const FilterReport k10 = iterate_filter(img, se, spec, 10);
    REQUIRE(k10.output.same_shape(img));
}

TEST_CASE("output stays within the channelwise window range") {
    std::mt19937 rng(17);
    const StructuringElement se = sample_disc(1.5, 1.0);
    for (MedianVariant v :
         {MedianVariant::L1, MedianVariant::OjaFull, MedianVariant::TrL1, MedianVariant::Medoid}) {
        MultiChannelImage img = random_image(rng, 6, 5, 2);
        MedianSpec spec;
        spec.variant = v;
        const FilterReport rep = median_filter(img, se, spec);
        for (int y = 0; y < img.ny; ++y)
            for (int x = 0; x < img.nx; ++x)
                for (int c = 0; c < 2; ++c) {
                    double lo = 1e300, hi = -1e300;
                    for (const auto& o : se.offsets) {
                        const int xi = x + o[0], yi = y + o[1];
                        if (xi < 0 || xi >= img.nx || yi < 0 || yi >= img.ny) continue;
                        lo = std::min(lo, img.at(xi, yi, c));
                        hi = std::max(hi, img.at(xi, yi, c));
                    }
                    CHECK(rep.output.at(x, y, c) >= lo - 1e-6);
                    CHECK(rep.output.at(x, y, c) <= hi + 1e-6);
                }
    }
}

TEST_CASE("value-space equivariance of whole-image filtering") {
    std::mt19937 rng(19);
    MultiChannelImage img = random_image(rng, 6, 5, 2);
    const StructuringElement se = sample_disc(1.0, 1.0);
    const double th = 0.73;
    const double R[2][2] = {{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}};
    const double b[2] = {0.2, -0.1};

    auto map_values = [&](const MultiChannelImage& in, const double M[2][2]) {
        MultiChannelImage out = in;
        for (int y = 0; y < in.ny; ++y)
            for (int x = 0; x < in.nx; ++x) {
                const double u = in.at(x, y, 0), v = in.at(x, y, 1);
                out.at(x, y, 0) = M[0][0] * u + M[0][1] * v + b[0];
                out.at(x, y, 1) = M[1][0] * u + M[1][1] * v + b[1];
            }
        return out;
    };

    // rotation commutes with the distance-sum filter
    {
        MedianSpec spec;
        spec.variant = MedianVariant::L1;
        const MultiChannelImage a = map_values(median_filter(img, se, spec).output, R);
        const MultiChannelImage bb = median_filter(map_values(img, R), se, spec).output;
        for (std::size_t i = 0; i < a.data.size(); ++i)
            CHECK(std::abs(a.data[i] - bb.data[i]) < 1e-5);
    }
    // general linear maps commute with the affine equivariant filters
    const double A[2][2] = {{1.4, 0.3}, {-0.2, 0.8}};
    for (MedianVariant v : {MedianVariant::OjaFull, MedianVariant::TrL1}) {
        MedianSpec spec;
        spec.variant = v;
        const MultiChannelImage a = map_values(median_filter(img, se, spec).output, A);
        const MultiChannelImage bb = median_filter(map_values(img, A), se, spec).output;
        for (std::size_t i = 0; i < a.data.size(); ++i)
            CHECK(std::abs(a.data[i] - bb.data[i]) < 1e-4);
    }
}

TEST_CASE("serial and parallel execution agree bitwise") {
    std::mt19937 rng(23);
    MultiChannelImage img = random_image(rng, 8, 7, 2);
    const StructuringElement se = sample_disc(1.5, 1.0);
    for (MedianVariant v : {MedianVariant::L1, MedianVariant::OjaFull}) {
        MedianSpec spec;
        spec.variant = v;
        const FilterReport s = median_filter(img, se, spec, ExecutionPolicy::Serial);
        const FilterReport p = median_filter(img, se, spec, ExecutionPolicy::Parallel);
        CHECK(s.output.data == p.output.data);
        CHECK(s.fraction_converged == p.fraction_converged);
        CHECK(s.degenerate_pixels == p.degenerate_pixels);
    }
}

TEST_CASE("invalid specs are rejected") {
    MultiChannelImage img2 = MultiChannelImage::make2d(4, 4, 2);
    const StructuringElement disc = sample_disc(1.0, 1.0);
    MedianSpec spec;
    spec.variant = MedianVariant::Oja2In3;
    CHECK_THROWS_AS(median_filter(img2, disc, spec), std::invalid_argument);

    MultiChannelImage img3d = MultiChannelImage::make3d(4, 4, 4, 2);
    spec.variant = MedianVariant::L1;
    CHECK_THROWS_AS(median_filter(img3d, disc, spec), std::invalid_argument);
}

TEST_CASE("simplex regularisation keeps flat windows defined") {
    // piecewise constant two-channel image: clouds are rank deficient, the
    // full-dimensional median degenerates without regularisation
    MultiChannelImage img = MultiChannelImage::make2d(7, 7, 2);
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 7; ++x) {
            img.at(x, y, 0) = x < 3 ? 0.2 : 0.8;
            img.at(x, y, 1) = 0.5;
        }
    const StructuringElement se = sample_disc(1.5, 1.0);
    MedianSpec plain;
    plain.variant = MedianVariant::OjaFull;
    const FilterReport rep0 = median_filter(img, se, plain);
    CHECK(rep0.degenerate_pixels > 0);

    MedianSpec reg = plain;
    reg.regularize = 0.5 / 255.0;
    const FilterReport rep1 = median_filter(img, se, reg);
    CHECK(rep1.degenerate_pixels < rep0.degenerate_pixels);
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 7; ++x)
            CHECK(std::abs(rep1.output.at(x, y, 1) - 0.5) < 0.05);
}

TEST_CASE("three-dimensional image filtering") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    MultiChannelImage img = MultiChannelImage::make3d(4, 4, 4, 1);
    for (double& v : img.data) v = d(rng);
    const StructuringElement se = sample_ball(1.0, 1.0);
    MedianSpec spec;
    spec.variant = MedianVariant::L1;
    const FilterReport rep = median_filter(img, se, spec);
    REQUIRE(rep.output.same_shape(img));
    // interior voxel against the sorted window median
    std::vector<double> win;
    for (const auto& o : se.offsets)
        win.push_back(img.at3(1 + o[0], 1 + o[1], 1 + o[2], 0));
    CHECK(rep.output.at3(1, 1, 1, 0) == doctest::Approx(scalar_median(win)).epsilon(1e-9));
}
