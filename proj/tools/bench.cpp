#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "mmf/filter.hpp"
#include "mmf/scheme.hpp"

using namespace mmf;

namespace {

double seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
void report(const std::string& name, F run) {
    const auto t0 = std::chrono::steady_clock::now();
    const MultiChannelImage serial = run(ExecutionPolicy::Serial);
    const double ts = seconds(t0);
    const auto t1 = std::chrono::steady_clock::now();
    const MultiChannelImage parallel = run(ExecutionPolicy::Parallel);
    const double tp = seconds(t1);
    const bool identical = serial.data == parallel.data;
    std::printf("%-24s serial %7.3fs  parallel %7.3fs  speedup %5.2fx  %s\n", name.c_str(),
                ts, tp, ts / tp, identical ? "outputs identical" : "OUTPUTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    const int size = argc > 1 ? std::atoi(argv[1]) : 48;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(0.0, 1.0);

    MultiChannelImage rgb = MultiChannelImage::make2d(size, size, 3);
    for (double& v : rgb.data) v = d(rng);
    MultiChannelImage flow = MultiChannelImage::make2d(size, size, 2);
    for (double& v : flow.data) v = 2.0 * d(rng) - 1.0;

    const StructuringElement se = sample_disc(2.0, 1.0);
    std::printf("image %dx%d, disc radius 2 (%zu samples)\n", size, size, se.offsets.size());

    MedianSpec spec;
    spec.variant = MedianVariant::L1;
    report("filter l1 (2ch)", [&](ExecutionPolicy p) { return median_filter(flow, se, spec, p).output; });
    report("filter l1 (3ch)", [&](ExecutionPolicy p) { return median_filter(rgb, se, spec, p).output; });
    spec.variant = MedianVariant::OjaFull;
    report("filter oja (2ch)", [&](ExecutionPolicy p) { return median_filter(flow, se, spec, p).output; });
    spec.variant = MedianVariant::Oja2In3;
    report("filter oja23 (3ch)", [&](ExecutionPolicy p) { return median_filter(rgb, se, spec, p).output; });
    spec.variant = MedianVariant::TrL1;
    report("filter trl1 (2ch)", [&](ExecutionPolicy p) { return median_filter(flow, se, spec, p).output; });
    spec.variant = MedianVariant::Medoid;
    report("filter medoid (3ch)", [&](ExecutionPolicy p) { return median_filter(rgb, se, spec, p).output; });

    SchemeConfig cfg;
    cfg.steps = 50;
    report("scheme 50 steps", [&](ExecutionPolicy p) { return evolve(rgb, cfg, p); });
    return 0;
}
