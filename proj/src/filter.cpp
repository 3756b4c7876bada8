#include "mmf/filter.hpp"

#include <atomic>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mmf {

SolverReport compute_median(const PointCloud& cloud, const MedianSpec& spec) {
    switch (spec.variant) {
        case MedianVariant::L1:
            return l1_median(cloud, spec.solver);
        case MedianVariant::OjaFull:
            return oja_median(cloud, cloud.dim, spec.solver);
        case MedianVariant::Oja2In3:
            return oja_median(cloud, 2, spec.solver);
        case MedianVariant::TrL1:
            return trl1_median(cloud, spec.solver);
        case MedianVariant::Medoid: {
            SolverReport rep;
            rep.minimiser = medoid(cloud);
            rep.converged = true;
            return rep;
        }
    }
    return {};
}

FilterReport median_filter(const MultiChannelImage& img, const StructuringElement& se,
                           const MedianSpec& spec, ExecutionPolicy policy) {
    if (spec.variant == MedianVariant::Oja2In3 && img.channels != 3)
        throw std::invalid_argument("2D-Oja-in-3D needs 3 channels");
    if (se.dims != img.dims) throw std::invalid_argument("window/image dimension mismatch");

    FilterReport rep;
    rep.output = img;
    const std::size_t npix = img.pixel_count();
    std::vector<int> iters(npix, 0);
    std::vector<unsigned char> ok(npix, 1);

    const bool par = policy == ExecutionPolicy::Parallel;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (par)
#endif
    for (std::ptrdiff_t p = 0; p < std::ptrdiff_t(npix); ++p) {
        const int x = int(p % img.nx);
        const int y = int((p / img.nx) % img.ny);
        const int z = int(p / (std::size_t(img.nx) * std::size_t(img.ny)));
        PointCloud cloud = extract_cloud(img, x, y, z, se);
        PointCloud work = spec.regularize > 0.0 ? regularize_simplex(cloud, spec.regularize)
                                                : cloud;
        SolverReport r = compute_median(work, spec);
        Vec value = r.minimiser;
        // Degenerate or non-converged pixels keep a data value: window medoid.
        const bool fallback =
            !r.converged || (r.degenerate && spec.variant != MedianVariant::L1);
        if (fallback) {
            value = medoid(cloud);
            ok[std::size_t(p)] = 0;
        }
        rep.output.set_value(x, y, z, value);
        iters[std::size_t(p)] = r.iterations;
    }
    (void)par;

    std::size_t conv = 0;
    for (std::size_t p = 0; p < npix; ++p) {
        conv += ok[p];
        rep.max_iterations_used = std::max(rep.max_iterations_used, iters[p]);
    }
    rep.fraction_converged = double(conv) / double(npix);
    rep.degenerate_pixels = npix - conv;
    return rep;
}

FilterReport iterate_filter(const MultiChannelImage& img, const StructuringElement& se,
                            const MedianSpec& spec, int k, ExecutionPolicy policy) {
    FilterReport rep;
    rep.output = img;
    for (int i = 0; i < k; ++i) {
        FilterReport step = median_filter(rep.output, se, spec, policy);
        rep.output = std::move(step.output);
        rep.fraction_converged = step.fraction_converged;
        rep.max_iterations_used = std::max(rep.max_iterations_used, step.max_iterations_used);
        rep.degenerate_pixels = step.degenerate_pixels;
    }
    return rep;
}

}  // namespace mmf
