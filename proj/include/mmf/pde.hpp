#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmf/window.hpp"

namespace mmf {

// Jacobian plus per-channel Hessians of a vector field at one location.
struct JetPoint {
    int n = 2;  // value dimension
    int m = 2;  // domain dimension
    Eigen::MatrixXd D;               // n x m, rows are channel gradients
    std::vector<Eigen::MatrixXd> H;  // n symmetric m x m Hessians

    static JetPoint zero(int n_, int m_) {
        JetPoint j;
        j.n = n_;
        j.m = m_;
        j.D = Eigen::MatrixXd::Zero(n_, m_);
        j.H.assign(std::size_t(n_), Eigen::MatrixXd::Zero(m_, m_));
        return j;
    }
};

struct StructureTensorFrame {
    Eigen::Matrix2d J;
    Eigen::Vector2d eta;  // major eigenvector
    Eigen::Vector2d xi;   // minor eigenvector
    double lambda1 = 0.0, lambda2 = 0.0;  // descending
    bool isotropic = false;
};

struct PdeUpdate {
    Eigen::VectorXd rhs;  // (u_t, v_t[, w_t])
    double tau = 0.0;
    std::vector<std::pair<std::string, Eigen::MatrixXd>> coeffs;
};

// Thrown where the continuous limit equation is not defined (singular or
// rank-deficient Jacobian).
struct PdeUndefined : std::domain_error {
    using std::domain_error::domain_error;
};

StructureTensorFrame structure_frame(const JetPoint& jet);

PdeUpdate l1_rhs_22(const JetPoint& jet, double rho);          // tau = rho^2/6
PdeUpdate oja_rhs_22(const JetPoint& jet, double rho);         // tau = rho^2/24
PdeUpdate oja_rhs_33(const JetPoint& jet, double rho);         // tau = rho^2/60
PdeUpdate oja_rhs_23(const JetPoint& jet, double rho);         // tau = rho^2/24
PdeUpdate l1_rhs_23_aligned(const JetPoint& jet, double rho);  // tau = rho^2/6

// Columns of D extended by their cross product.
Eigen::Matrix3d build_d3(const Eigen::MatrixXd& D);

// Central-difference jet (first derivatives step 1e-5; second derivatives use
// a coarser 1e-3 step, where fp roundoff ~eps/step^2 still permits ~1e-8
// accuracy on smooth fields).
JetPoint jet_from_analytic(const AnalyticField& field, const Vec& location);

}  // namespace mmf
