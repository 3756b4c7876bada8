#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mmf/filter.hpp"
#include "mmf/pde.hpp"
#include "mmf/scheme.hpp"
#include "mmf/window.hpp"

namespace mmf {

// Which analytic limit equation supplies the reference column.
enum class PdeKind { L1_22, Oja22, Oja33, Oja23 };

struct ValidationCase {
    std::string label;
    AnalyticField field;
    Vec location;
    double rho = 1.0;
    double h = 0.01;
    std::vector<MedianSpec> variants;
    std::vector<std::string> variant_names;
    PdeKind pde = PdeKind::Oja22;
};

struct ValidationRow {
    std::string label;
    double rho = 0.0, h = 0.0;
    std::vector<Eigen::VectorXd> updates;  // median minus centre value, per variant
    std::vector<bool> converged;
    Eigen::VectorXd pde_step;              // tau * rhs
    std::vector<double> rel_errors;        // |update - pde_step| / |pde_step|
};

enum class TableId { T1, T2, T3, T4, T5 };

ValidationRow run_case(const ValidationCase& c);

// h_override = 0 keeps each table's default sampling (T1/T2 h=0.01,
// T3 h=0.2, T4/T5 h=0.001).
std::vector<ValidationCase> table_cases(TableId id, double h_override = 0.0);
std::vector<ValidationRow> run_table(TableId id, double h_override = 0.0);

// CSV with the same scaling as the printed tables (1e6; 1e4 for the volume table).
std::string table_csv(TableId id, const std::vector<ValidationRow>& rows);

enum class ResponseTerm { Uxx, Uyy, Vxy };

struct ResponseCurve {
    std::vector<double> s;
    std::vector<double> response;  // first-channel median update divided by tau
};

ResponseCurve nonlinear_response(ResponseTerm term, const std::vector<double>& s_values,
                                 double rho = 1.0, double h = 0.01);

struct ComparisonReport {
    double time_median = 0.0;  // iters * rho^2 / 24
    double time_scheme = 0.0;  // steps * tau
    double mean_abs = 0.0;
    double max_abs = 0.0;
    MultiChannelImage median_out;
    MultiChannelImage scheme_out;
};

ComparisonReport compare_median_vs_pde(const MultiChannelImage& img, double rho,
                                       int median_iters, const SchemeConfig& cfg);

}  // namespace mmf
