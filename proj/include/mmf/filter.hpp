#pragma once

#include "mmf/image.hpp"
#include "mmf/median.hpp"
#include "mmf/window.hpp"

namespace mmf {

enum class MedianVariant { L1, OjaFull, Oja2In3, TrL1, Medoid };

enum class ExecutionPolicy { Serial, Parallel };

struct MedianSpec {
    MedianVariant variant = MedianVariant::L1;
    SolverConfig solver;
    double regularize = 0.0;  // simplex circumradius; 0 disables input regularisation
};

struct FilterReport {
    MultiChannelImage output;
    double fraction_converged = 1.0;
    int max_iterations_used = 0;
    std::size_t degenerate_pixels = 0;  // fell back to the window medoid
};

// Median of one sample cloud under the given variant.
SolverReport compute_median(const PointCloud& cloud, const MedianSpec& spec);

FilterReport median_filter(const MultiChannelImage& img, const StructuringElement& se,
                           const MedianSpec& spec,
                           ExecutionPolicy policy = ExecutionPolicy::Parallel);

FilterReport iterate_filter(const MultiChannelImage& img, const StructuringElement& se,
                            const MedianSpec& spec, int k,
                            ExecutionPolicy policy = ExecutionPolicy::Parallel);

}  // namespace mmf
