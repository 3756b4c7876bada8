#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include "mmf/coeffs.hpp"
#include "mmf/filter.hpp"
#include "mmf/harness.hpp"
#include "mmf/io.hpp"
#include "mmf/scheme.hpp"

namespace {

bool is_flow_path(const std::string& p) {
    return p.size() >= 5 && p.substr(p.size() - 5) == ".flo2";
}

mmf::MultiChannelImage load(const std::string& p) {
    return is_flow_path(p) ? mmf::read_flow(p) : mmf::read_image(p);
}

void save(const std::string& p, const mmf::MultiChannelImage& img) {
    if (is_flow_path(p))
        mmf::write_flow(p, img);
    else
        mmf::write_image(p, img);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multivariate median filters and the matching diffusion evolutions"};
    app.require_subcommand(1);

    // filter
    std::string in_path, out_path, variant = "l1";
    double radius = 2.0, regularize = 0.0;
    int iters = 1;
    bool serial = false;
    auto* filter = app.add_subcommand("filter", "apply an iterated multivariate median filter");
    filter->add_option("input", in_path, "input image (.ppm/.pgm) or flow field (.flo2)")
        ->required();
    filter->add_option("output", out_path, "output path")->required();
    filter->add_option("--variant", variant, "median variant")
        ->check(CLI::IsMember({"l1", "oja", "oja23", "trl1", "medoid"}));
    filter->add_option("--radius", radius, "disc radius in pixels");
    filter->add_option("--iters", iters, "number of filter iterations");
    filter->add_option("--regularize", regularize, "simplex circumradius for input regularisation");
    filter->add_flag("--serial", serial, "single-threaded execution");

    // pde-evolve
    std::string pde_in, pde_out;
    mmf::SchemeConfig scheme;
    auto* pde = app.add_subcommand("pde-evolve", "explicit scheme for the affine equivariant evolution");
    pde->add_option("input", pde_in, "input 3-channel image (.ppm)")->required();
    pde->add_option("output", pde_out, "output path")->required();
    pde->add_option("--tau", scheme.tau, "time step size");
    pde->add_option("--steps", scheme.steps, "number of steps");
    pde->add_option("--eps", scheme.eps, "regularisation in the curvature quotients");
    pde->add_option("--anti-diffusion", scheme.anti_diffusion,
                    "weight of the diffusion part removed");

    // coeff
    std::string fn = "q1";
    double lambda = 1.0;
    auto* coeff = app.add_subcommand("coeff", "evaluate an anisotropy coefficient function");
    coeff->add_option("--fn", fn, "coefficient function")
        ->check(CLI::IsMember({"q1", "q2", "q3"}));
    coeff->add_option("--lambda", lambda, "eigenvalue ratio argument");

    // validate
    std::string table = "t1";
    double h_override = 0.0;
    auto* validate = app.add_subcommand("validate", "print a validation table as CSV");
    validate->add_option("--table", table, "which table to run")
        ->check(CLI::IsMember({"t1", "t2", "t3", "t4", "t5", "fig5"}));
    validate->add_option("--step", h_override, "sampling step override (0 keeps the default)");

    // noise
    std::string noise_in, noise_out;
    double density = 0.2, lo = -2.44, hi = 2.44;
    std::uint64_t seed = 1;
    auto* noise = app.add_subcommand("noise", "replace entries by uniform impulse noise");
    noise->add_option("input", noise_in, "input image or flow field")->required();
    noise->add_option("output", noise_out, "output path")->required();
    noise->add_option("--density", density, "replacement probability per entry");
    noise->add_option("--lo", lo, "lower bound of the replacement range");
    noise->add_option("--hi", hi, "upper bound of the replacement range");
    noise->add_option("--seed", seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (filter->parsed()) {
            static const std::map<std::string, mmf::MedianVariant> variants = {
                {"l1", mmf::MedianVariant::L1},
                {"oja", mmf::MedianVariant::OjaFull},
                {"oja23", mmf::MedianVariant::Oja2In3},
                {"trl1", mmf::MedianVariant::TrL1},
                {"medoid", mmf::MedianVariant::Medoid}};
            mmf::MedianSpec spec;
            spec.variant = variants.at(variant);
            spec.regularize = regularize;
            const mmf::MultiChannelImage img = load(in_path);
            const mmf::StructuringElement se = mmf::sample_disc(radius, 1.0);
            const mmf::FilterReport rep = mmf::iterate_filter(
                img, se, spec, iters,
                serial ? mmf::ExecutionPolicy::Serial : mmf::ExecutionPolicy::Parallel);
            save(out_path, rep.output);
            std::cerr << "converged fraction " << rep.fraction_converged << ", medoid fallbacks "
                      << rep.degenerate_pixels << "\n";
        } else if (pde->parsed()) {
            save(pde_out, mmf::evolve(load(pde_in), scheme));
        } else if (coeff->parsed()) {
            const double v = fn == "q1" ? mmf::q1(lambda)
                             : fn == "q2" ? mmf::q2(lambda)
                                          : mmf::q3(lambda);
            std::cout << std::setprecision(12) << v << "\n";
        } else if (validate->parsed()) {
            if (table == "fig5") {
                const std::vector<double> s = {0.1, 0.2, 0.3, 0.4, 0.5,
                                               0.6, 0.7, 0.8, 0.9, 1.0};
                const double h = h_override > 0.0 ? h_override : 0.01;
                const mmf::ResponseCurve uxx =
                    mmf::nonlinear_response(mmf::ResponseTerm::Uxx, s, 1.0, h);
                const mmf::ResponseCurve uyy =
                    mmf::nonlinear_response(mmf::ResponseTerm::Uyy, s, 1.0, h);
                const mmf::ResponseCurve vxy =
                    mmf::nonlinear_response(mmf::ResponseTerm::Vxy, s, 1.0, h);
                std::cout << "s,uxx,uyy,vxy\n" << std::setprecision(10);
                for (std::size_t i = 0; i < s.size(); ++i)
                    std::cout << s[i] << "," << uxx.response[i] << "," << uyy.response[i]
                              << "," << vxy.response[i] << "\n";
            } else {
                static const std::map<std::string, mmf::TableId> tables = {
                    {"t1", mmf::TableId::T1},
                    {"t2", mmf::TableId::T2},
                    {"t3", mmf::TableId::T3},
                    {"t4", mmf::TableId::T4},
                    {"t5", mmf::TableId::T5}};
                const mmf::TableId id = tables.at(table);
                std::cout << mmf::table_csv(id, mmf::run_table(id, h_override));
            }
        } else if (noise->parsed()) {
            save(noise_out, mmf::add_impulse_noise(load(noise_in), density, lo, hi, seed));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
