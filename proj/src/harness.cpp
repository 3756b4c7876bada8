#include "mmf/harness.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mmf {

namespace {

AnalyticField field22(std::function<double(double, double)> u,
                      std::function<double(double, double)> v) {
    AnalyticField f;
    f.domain_dim = 2;
    f.value_dim = 2;
    f.eval = [u, v](const Vec& p) { return Vec(u(p.c[0], p.c[1]), v(p.c[0], p.c[1])); };
    return f;
}

AnalyticField field32(std::function<double(double, double)> u,
                      std::function<double(double, double)> w) {
    AnalyticField f;
    f.domain_dim = 2;
    f.value_dim = 3;
    f.eval = [u, w](const Vec& p) {
        return Vec(u(p.c[0], p.c[1]), p.c[1], w(p.c[0], p.c[1]));
    };
    return f;
}

AnalyticField field33(std::function<double(double, double, double)> u) {
    AnalyticField f;
    f.domain_dim = 3;
    f.value_dim = 3;
    f.eval = [u](const Vec& p) {
        return Vec(u(p.c[0], p.c[1], p.c[2]), p.c[1], p.c[2]);
    };
    return f;
}

AnalyticField fig6_field() {
    AnalyticField f;
    f.domain_dim = 2;
    f.value_dim = 2;
    f.eval = [](const Vec& p) {
        return Vec(p.c[0] * p.c[0], std::hypot(p.c[0], p.c[1]));
    };
    return f;
}

MedianSpec spec_of(MedianVariant v) {
    MedianSpec s;
    s.variant = v;
    return s;
}

PdeUpdate eval_pde(PdeKind kind, const JetPoint& jet, double rho) {
    switch (kind) {
        case PdeKind::L1_22:
            return l1_rhs_22(jet, rho);
        case PdeKind::Oja22:
            return oja_rhs_22(jet, rho);
        case PdeKind::Oja33:
            return oja_rhs_33(jet, rho);
        case PdeKind::Oja23:
            return oja_rhs_23(jet, rho);
    }
    throw std::logic_error("unreachable");
}

const std::vector<std::pair<std::string, Vec>>& fig6_locations() {
    static const std::vector<std::pair<std::string, Vec>> locs = {
        {"a", Vec(0.9986, 0.0523)}, {"b", Vec(0.9659, 0.2588)},
        {"c", Vec(0.7071, 0.7071)}, {"d", Vec(0.2588, 0.9659)},
        {"e", Vec(0.0523, 0.9986)}, {"f", Vec(0.1, 0.1)},
        {"g", Vec(0.3, 0.3)}};
    return locs;
}

}  // namespace

ValidationRow run_case(const ValidationCase& c) {
    const StructuringElement se = c.field.domain_dim == 3 ? sample_ball(c.rho, c.h)
                                                          : sample_disc(c.rho, c.h);
    const PointCloud cloud = rasterize(c.field, se, c.location);
    const Vec centre = c.field.eval(c.location);
    const int n = c.field.value_dim;

    ValidationRow row;
    row.label = c.label;
    row.rho = c.rho;
    row.h = c.h;

    const JetPoint jet = jet_from_analytic(c.field, c.location);
    const PdeUpdate up = eval_pde(c.pde, jet, c.rho);
    row.pde_step = up.tau * up.rhs;

    for (const MedianSpec& spec : c.variants) {
        const SolverReport rep = compute_median(cloud, spec);
        Eigen::VectorXd d(n);
        for (int k = 0; k < n; ++k) d(k) = rep.minimiser.c[std::size_t(k)] - centre.c[std::size_t(k)];
        row.updates.push_back(d);
        row.converged.push_back(rep.converged);
        const double denom = row.pde_step.norm();
        row.rel_errors.push_back(denom > 0.0 ? (d - row.pde_step).norm() / denom
                                             : (d.norm() > 0.0 ? INFINITY : 0.0));
    }
    return row;
}

std::vector<ValidationCase> table_cases(TableId id, double h_override) {
    std::vector<ValidationCase> cases;
    auto sq = [](double t) { return t * t; };

    switch (id) {
        case TableId::T1: {
            const double h = h_override > 0.0 ? h_override : 0.01;
            const std::vector<std::pair<std::string, AnalyticField>> rows = {
                {"u=x+0.05x^2", field22([&](double x, double) { return x + 0.05 * sq(x); },
                                        [](double, double y) { return y; })},
                {"u=x+0.1xy", field22([](double x, double y) { return x + 0.1 * x * y; },
                                      [](double, double y) { return y; })},
                {"u=x+0.05y^2", field22([&](double x, double y) { return x + 0.05 * sq(y); },
                                        [](double, double y) { return y; })}};
            for (const auto& [label, f] : rows) {
                ValidationCase c;
                c.label = label;
                c.field = f;
                c.location = Vec(0.0, 0.0);
                c.rho = 1.0;
                c.h = h;
                c.variants = {spec_of(MedianVariant::L1), spec_of(MedianVariant::OjaFull)};
                c.variant_names = {"l1", "oja"};
                c.pde = PdeKind::Oja22;
                cases.push_back(c);
            }
            break;
        }
        case TableId::T2: {
            const double h = h_override > 0.0 ? h_override : 0.01;
            auto lin = [](double x, double) { return x; };
            auto bent = [sq](double x, double) { return x + 0.05 * sq(x); };
            auto wxx = [sq](double x, double) { return 0.05 * sq(x); };
            auto wxy = [](double x, double y) { return 0.1 * x * y; };
            auto wyy = [sq](double, double y) { return 0.05 * sq(y); };
            const std::vector<std::tuple<std::string, std::function<double(double, double)>,
                                         std::function<double(double, double)>>>
                rows = {{"w=0.05x^2", lin, wxx},
                        {"w=0.1xy", lin, wxy},
                        {"w=0.05y^2", lin, wyy},
                        {"u=x+0.05x^2 w=0.05x^2", bent, wxx},
                        {"u=x+0.05x^2 w=0.1xy", bent, wxy},
                        {"u=x+0.05x^2 w=0.05y^2", bent, wyy}};
            for (const auto& [label, u, w] : rows) {
                ValidationCase c;
                c.label = label;
                c.field = field32(u, w);
                c.location = Vec(0.0, 0.0);
                c.rho = 1.0;
                c.h = h;
                c.variants = {spec_of(MedianVariant::L1), spec_of(MedianVariant::Oja2In3)};
                c.variant_names = {"l1", "oja23"};
                c.pde = PdeKind::Oja23;
                cases.push_back(c);
            }
            break;
        }
        case TableId::T3: {
            const double h = h_override > 0.0 ? h_override : 0.2;
            const std::vector<std::pair<std::string, std::function<double(double, double, double)>>>
                rows = {{"u=x+0.05x^2", [sq](double x, double, double) { return x + 0.05 * sq(x); }},
                        {"u=x+0.1xy", [](double x, double y, double) { return x + 0.1 * x * y; }},
                        {"u=x+0.1xz", [](double x, double, double z) { return x + 0.1 * x * z; }},
                        {"u=x+0.05y^2", [sq](double x, double y, double) { return x + 0.05 * sq(y); }},
                        {"u=x+0.1yz", [](double x, double y, double z) { return x + 0.1 * y * z; }},
                        {"u=x+0.05z^2", [sq](double x, double, double z) { return x + 0.05 * sq(z); }}};
            for (const auto& [label, u] : rows) {
                ValidationCase c;
                c.label = label;
                c.field = field33(u);
                c.location = Vec(0.0, 0.0, 0.0);
                c.rho = 1.0;
                c.h = h;
                c.variants = {spec_of(MedianVariant::L1), spec_of(MedianVariant::OjaFull)};
                c.variant_names = {"l1", "oja"};
                c.pde = PdeKind::Oja33;
                cases.push_back(c);
            }
            break;
        }
        case TableId::T4:
        case TableId::T5: {
            const double h = h_override > 0.0 ? h_override : 0.001;
            for (const auto& [label, loc] : fig6_locations()) {
                ValidationCase c;
                c.label = label;
                c.field = fig6_field();
                c.location = loc;
                c.rho = 0.1;
                c.h = h;
                if (id == TableId::T4) {
                    c.variants = {spec_of(MedianVariant::L1)};
                    c.variant_names = {"l1"};
                    c.pde = PdeKind::L1_22;
                } else {
                    c.variants = {spec_of(MedianVariant::OjaFull),
                                  spec_of(MedianVariant::TrL1)};
                    c.variant_names = {"oja", "trl1"};
                    c.pde = PdeKind::Oja22;
                }
                cases.push_back(c);
            }
            break;
        }
    }
    return cases;
}

std::vector<ValidationRow> run_table(TableId id, double h_override) {
    std::vector<ValidationRow> rows;
    for (const ValidationCase& c : table_cases(id, h_override)) rows.push_back(run_case(c));
    return rows;
}

std::string table_csv(TableId id, const std::vector<ValidationRow>& rows) {
    const double scale = id == TableId::T3 ? 1e4 : 1e6;
    const std::vector<std::string> names =
        table_cases(id).empty() ? std::vector<std::string>{} : table_cases(id)[0].variant_names;
    const int n = rows.empty() ? 0 : int(rows[0].pde_step.size());

    std::ostringstream out;
    out << "row,rho,h";
    const std::string suffix = id == TableId::T3 ? "e4" : "e6";
    const char* comp[3] = {"du", "dv", "dw"};
    for (const std::string& v : names)
        for (int k = 0; k < n; ++k) out << "," << v << "_" << comp[k] << "_" << suffix;
    for (int k = 0; k < n; ++k) out << ",pde_" << comp[k] << "_" << suffix;
    for (const std::string& v : names) out << "," << v << "_relerr";
    out << "\n";
    for (const ValidationRow& r : rows) {
        out << r.label << "," << r.rho << "," << r.h;
        for (const Eigen::VectorXd& u : r.updates)
            for (int k = 0; k < n; ++k) out << "," << u(k) * scale;
        for (int k = 0; k < n; ++k) out << "," << r.pde_step(k) * scale;
        for (double e : r.rel_errors) out << "," << e;
        out << "\n";
    }
    return out.str();
}

ResponseCurve nonlinear_response(ResponseTerm term, const std::vector<double>& s_values,
                                 double rho, double h) {
    ResponseCurve curve;
    const double tau = rho * rho / 24.0;
    const StructuringElement se = sample_disc(rho, h);
    for (double s : s_values) {
        AnalyticField f;
        switch (term) {
            case ResponseTerm::Uxx:
                f = field22([s](double x, double) { return x + 0.5 * s * x * x; },
                            [](double, double y) { return y; });
                break;
            case ResponseTerm::Uyy:
                f = field22([s](double x, double y) { return x + 0.5 * s * y * y; },
                            [](double, double y) { return y; });
                break;
            case ResponseTerm::Vxy:
                f = field22([](double x, double) { return x; },
                            [s](double x, double y) { return y - s * x * y; });
                break;
        }
        const PointCloud cloud = rasterize(f, se, Vec(0.0, 0.0));
        const SolverReport rep = compute_median(cloud, spec_of(MedianVariant::OjaFull));
        curve.s.push_back(s);
        curve.response.push_back(rep.minimiser.c[0] / tau);
    }
    return curve;
}

ComparisonReport compare_median_vs_pde(const MultiChannelImage& img, double rho,
                                       int median_iters, const SchemeConfig& cfg) {
    if (img.channels != 3) throw std::invalid_argument("comparison needs 3 channels");
    ComparisonReport rep;
    rep.time_median = median_iters * rho * rho / 24.0;
    rep.time_scheme = cfg.steps * cfg.tau;

    const StructuringElement se = sample_disc(rho, 1.0);
    rep.median_out =
        iterate_filter(img, se, spec_of(MedianVariant::Oja2In3), median_iters).output;
    rep.scheme_out = evolve(img, cfg);

    double sum = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double d = std::abs(rep.median_out.data[i] - rep.scheme_out.data[i]);
        sum += d;
        mx = std::max(mx, d);
    }
    rep.mean_abs = img.data.empty() ? 0.0 : sum / double(img.data.size());
    rep.max_abs = mx;
    return rep;
}

}  // namespace mmf
